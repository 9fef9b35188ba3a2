#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tcm/model.hpp"

namespace tcm {

using Json = nlohmann::json;

inline constexpr const char* kSnapshotFormat = "tcm2d.snapshot";
inline constexpr int kSnapshotVersion = 1;

// Layout: one line of UTF-8 JSON, newline, then the five physical-space
// arrays (u.x, u.y, v.x, v.y, theta) as raw little-endian float64,
// row-major over (x, y). Physical samples determine all n^2 modes, so
// nothing is lost relative to the coefficient arrays.
inline void write_snapshot(const std::filesystem::path& path,
                           const TCMState& state, long step,
                           double bkm_integral, const Json& extra = {}) {
  static_assert(std::endian::native == std::endian::little,
                "snapshot writer assumes a little-endian host");
  const Grid2D& grid = state.grid();
  Json header = {
      {"format", kSnapshotFormat},
      {"version", kSnapshotVersion},
      {"byte_order", "little-endian"},
      {"grid", {{"n", grid.n()}, {"domain_length", grid.length()}}},
      {"fields",
       {{{"name", "u"}, {"components", 2}},
        {{"name", "v"}, {"components", 2}},
        {{"name", "theta"}, {"components", 1}}}},
      {"time", state.time},
      {"step", step},
      {"bkm_integral", bkm_integral},
  };
  if (!extra.is_null())
    for (const auto& [k, v] : extra.items()) header[k] = v;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open snapshot for writing: " + path.string());
  os << header.dump() << '\n';
  const auto dump = [&os](const SpectralField& f) {
    RealVec p = to_physical(f);
    os.write(reinterpret_cast<const char*>(p.data()),
             std::streamsize(p.size() * sizeof(double)));
  };
  dump(state.u.x);
  dump(state.u.y);
  dump(state.v.x);
  dump(state.v.y);
  dump(state.theta);
  if (!os) throw IoError("short write on snapshot: " + path.string());
}

struct LoadedSnapshot {
  TCMState state;
  Json header;
  long step = 0;
  double bkm_integral = 0.0;
};

inline LoadedSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open snapshot: " + path.string());
  std::string line;
  if (!std::getline(is, line))
    throw IoError("snapshot missing header line: " + path.string());
  Json header;
  try {
    header = Json::parse(line);
  } catch (const std::exception& ex) {
    throw IoError("snapshot header is not valid JSON: " +
                  std::string(ex.what()));
  }
  if (header.value("format", "") != kSnapshotFormat)
    throw IoError("not a tcm2d snapshot: " + path.string());
  if (header.value("version", -1) != kSnapshotVersion)
    throw IoError("unsupported snapshot version in " + path.string());
  if (header.value("byte_order", "") != "little-endian")
    throw IoError("snapshot byte order is not little-endian");

  const int n = header.at("grid").at("n").get<int>();
  const double length = header.at("grid").at("domain_length").get<double>();
  Grid2D grid(n, length);

  LoadedSnapshot out;
  out.header = header;
  out.step = header.value("step", 0L);
  out.bkm_integral = header.value("bkm_integral", 0.0);
  out.state = TCMState(grid);
  out.state.time = header.value("time", 0.0);

  const auto load = [&](SpectralField& f) {
    RealVec p(grid.size());
    is.read(reinterpret_cast<char*>(p.data()),
            std::streamsize(p.size() * sizeof(double)));
    if (std::size_t(is.gcount()) != p.size() * sizeof(double))
      throw IoError("snapshot truncated: " + path.string());
    f = to_spectral(grid, p);
  };
  load(out.state.u.x);
  load(out.state.u.y);
  load(out.state.v.x);
  load(out.state.v.y);
  load(out.state.theta);
  return out;
}

}  // namespace tcm
