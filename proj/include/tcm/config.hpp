#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tcm/diagnostics.hpp"
#include "tcm/timestepper.hpp"

namespace tcm {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

// Flat "section.key" -> raw string value map from the INI-style file.
using KeyValueMap = std::map<std::string, std::string>;

inline KeyValueMap parse_key_values(const std::string& text) {
  KeyValueMap kv;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = detail::lower(detail::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = detail::lower(detail::trim(line.substr(0, eq)));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside any [section]");
    kv[section + "." + key] = val;
  }
  return kv;
}

// "section.key=value" command-line override.
inline void apply_override(KeyValueMap& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || assignment.find('.') == std::string::npos ||
      assignment.find('.') > eq)
    throw ConfigError("override must look like section.key=value, got '" +
                      assignment + "'");
  kv[detail::lower(detail::trim(assignment.substr(0, eq)))] =
      detail::trim(assignment.substr(eq + 1));
}

enum class InitialKind { TaylorGreen, RandomSmooth, FromFile };
enum class SeedMode { Shared, PerCell };

struct RunConfig {
  int n = 64;
  double domain_length = 2.0 * std::numbers::pi;

  DissipationVariant variant = DissipationVariant::Fractional;
  double alpha = 1.5;
  double beta = 0.5;
  GFunction::Kind g_kind = GFunction::Kind::SqrtLog;

  InitialKind initial_kind = InitialKind::TaylorGreen;
  RandomSmoothParams random_params;
  std::string initial_file;

  SchemeConfig scheme;
  RegularityMonitor monitor;

  std::string output_directory = "runs";
  std::string label;
  int snapshot_interval = 0;

  std::vector<double> sweep_alpha;
  std::vector<double> sweep_beta;
  std::vector<GFunction::Kind> sweep_g;
  SeedMode seed_mode = SeedMode::Shared;

  double div_u_warn = 1e-8;

  GFunction make_g() const {
    switch (g_kind) {
      case GFunction::Kind::Constant1: return GFunction::constant1();
      case GFunction::Kind::SqrtLog: return GFunction::sqrt_log();
      case GFunction::Kind::SqrtLogLogLog: return GFunction::sqrt_log_log_log();
      case GFunction::Kind::SqrtLogLogLogLogLog:
        return GFunction::sqrt_log_log_log_log_log();
      case GFunction::Kind::Custom: break;
    }
    throw ConfigError("custom g functions are API-only, not configurable");
  }

  Grid2D make_grid() const { return Grid2D(n, domain_length); }

  DissipationSpec make_dissipation(const Grid2D& grid) const {
    switch (variant) {
      case DissipationVariant::None: return DissipationSpec::none(grid);
      case DissipationVariant::Fractional:
        return DissipationSpec::fractional(grid, alpha, beta);
      case DissipationVariant::LogSupercritical:
        return DissipationSpec::log_supercritical(grid, make_g());
    }
    throw ConfigError("unreachable dissipation variant");
  }

  std::string regime_label() const {
    if (variant == DissipationVariant::LogSupercritical)
      return "Theorem-1.2-log";
    if (variant == DissipationVariant::Fractional) {
      if (alpha + beta >= 2.0 && alpha > 1.0 && alpha < 2.0)
        return "Theorem-1.1";
      if (alpha == 2.0 && beta == 0.0) return "borderline";
    }
    return "supercritical";
  }
};

namespace detail {

class ConfigBuilder {
public:
  explicit ConfigBuilder(KeyValueMap kv) : kv_(std::move(kv)) {}

  RunConfig build(std::vector<std::string>& violations) {
    RunConfig c;
    get_int("grid.n", c.n, [&](int v) {
      if (v < 4 || (v & (v - 1)) != 0)
        fail("grid.n", "must be a power of two >= 4");
    });
    get_double("grid.domain_length", c.domain_length, [&](double v) {
      if (!(v > 0.0)) fail("grid.domain_length", "must be positive");
    });

    get_enum("dissipation.variant", c.variant,
             {{"fractional", DissipationVariant::Fractional},
              {"log_supercritical", DissipationVariant::LogSupercritical},
              {"none", DissipationVariant::None}});
    get_double("dissipation.alpha", c.alpha, [&](double v) {
      if (v < 0.0 || v > 2.0) fail("dissipation.alpha", "must lie in [0, 2]");
    });
    get_double("dissipation.beta", c.beta, [&](double v) {
      if (v < 0.0 || v > 2.0) fail("dissipation.beta", "must lie in [0, 2]");
    });
    get_enum("dissipation.g", c.g_kind, g_names());

    get_enum("initial.kind", c.initial_kind,
             {{"taylor_green", InitialKind::TaylorGreen},
              {"random_smooth", InitialKind::RandomSmooth},
              {"from_file", InitialKind::FromFile}});
    get_uint64("initial.seed", c.random_params.seed);
    get_double("initial.spectrum_slope", c.random_params.spectrum_slope);
    get_int("initial.cutoff", c.random_params.cutoff, [&](int v) {
      if (v < 1) fail("initial.cutoff", "must be >= 1");
    });
    get_double("initial.amplitude", c.random_params.amplitude, [&](double v) {
      if (!(v > 0.0)) fail("initial.amplitude", "must be positive");
    });
    get_string("initial.file", c.initial_file);

    get_enum("scheme.kind", c.scheme.scheme,
             {{"etdrk2", Scheme::Etdrk2}, {"rk2", Scheme::Rk2}});
    get_double("scheme.dt", c.scheme.dt, [&](double v) {
      if (!(v > 0.0)) fail("scheme.dt", "must be positive");
    });
    get_double("scheme.cfl", c.scheme.cfl_number, [&](double v) {
      if (!(v > 0.0) || v > 1.0) fail("scheme.cfl", "must lie in (0, 1]");
    });
    get_bool("scheme.adaptive", c.scheme.adaptive);
    get_double("scheme.t_end", c.scheme.t_end, [&](double v) {
      if (!(v >= 0.0)) fail("scheme.t_end", "must be non-negative");
    });
    get_long("scheme.max_steps", c.scheme.max_steps, [&](long v) {
      if (v < 1) fail("scheme.max_steps", "must be >= 1");
    });
    get_bool("scheme.linear_only", c.scheme.linear_only);

    get_double("monitor.sigma", c.monitor.sigma, [&](double v) {
      if (!(v > 0.0 && v < 1.0)) fail("monitor.sigma", "must lie in (0, 1)");
    });
    get_double_list("monitor.s_list", c.monitor.s_list, [&](const auto& v) {
      if (v.empty()) fail("monitor.s_list", "must not be empty");
    });
    get_double("monitor.blowup_threshold", c.monitor.blowup_threshold,
               [&](double v) {
                 if (!(v > 0.0))
                   fail("monitor.blowup_threshold", "must be positive");
               });
    get_int("monitor.sample_interval", c.monitor.sample_interval, [&](int v) {
      if (v < 1) fail("monitor.sample_interval", "must be >= 1");
    });

    get_string("output.directory", c.output_directory);
    get_string("output.label", c.label);
    get_int("output.snapshot_interval", c.snapshot_interval, [&](int v) {
      if (v < 0) fail("output.snapshot_interval", "must be >= 0");
    });

    get_double_list("sweep.alpha_list", c.sweep_alpha, [](const auto&) {});
    get_double_list("sweep.beta_list", c.sweep_beta, [](const auto&) {});
    get_g_list("sweep.g_list", c.sweep_g);
    get_enum("sweep.seed_mode", c.seed_mode,
             {{"shared", SeedMode::Shared}, {"per_cell", SeedMode::PerCell}});

    get_double("tolerances.div_u_warn", c.div_u_warn, [&](double v) {
      if (!(v > 0.0)) fail("tolerances.div_u_warn", "must be positive");
    });

    // Cross-field checks after the scalars have landed.
    if (c.initial_kind == InitialKind::RandomSmooth &&
        c.random_params.cutoff > c.n / 3)
      fail("initial.cutoff", "must stay within the dealias band n/3 = " +
                                 std::to_string(c.n / 3));
    if (c.initial_kind == InitialKind::FromFile && c.initial_file.empty())
      fail("initial.file", "required when initial.kind = from_file");
    if (c.snapshot_interval > 0 &&
        c.snapshot_interval % c.monitor.sample_interval != 0)
      fail("output.snapshot_interval",
           "must be a multiple of monitor.sample_interval");
    if (c.variant == DissipationVariant::LogSupercritical) {
      if (has("dissipation.alpha") && c.alpha != 2.0)
        fail("dissipation.alpha", "log_supercritical fixes alpha = 2");
      if (has("dissipation.beta") && c.beta != 0.0)
        fail("dissipation.beta", "log_supercritical fixes beta = 0");
      c.alpha = 2.0;
      c.beta = 0.0;
    }

    for (const auto& [key, val] : kv_) {
      (void)val;
      if (!consumed_.count(key)) violations_.push_back(key + ": unknown key");
    }
    violations = std::move(violations_);
    return c;
  }

  static std::map<std::string, GFunction::Kind> g_names() {
    return {{"constant1", GFunction::Kind::Constant1},
            {"sqrt_log", GFunction::Kind::SqrtLog},
            {"sqrt_log_log_log", GFunction::Kind::SqrtLogLogLog},
            {"sqrt_log_log_log_log_log",
             GFunction::Kind::SqrtLogLogLogLogLog}};
  }

private:
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  void fail(const std::string& key, const std::string& msg) {
    violations_.push_back(key + ": " + msg);
  }

  std::optional<std::string> raw(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second;
  }

  template <typename T, typename Check>
  void get_num(const std::string& key, T& out, Check check) {
    auto v = raw(key);
    if (!v) {
      check(out);
      return;
    }
    std::istringstream is(*v);
    T parsed;
    is >> parsed;
    if (is.fail() || !is.eof()) {
      fail(key, "cannot parse '" + *v + "'");
      return;
    }
    out = parsed;
    check(out);
  }

  template <typename Check>
  void get_int(const std::string& key, int& out, Check check) {
    get_num<int>(key, out, check);
  }
  template <typename Check>
  void get_long(const std::string& key, long& out, Check check) {
    get_num<long>(key, out, check);
  }
  void get_uint64(const std::string& key, std::uint64_t& out) {
    get_num<std::uint64_t>(key, out, [](std::uint64_t) {});
  }
  template <typename Check>
  void get_double(const std::string& key, double& out, Check check) {
    get_num<double>(key, out, check);
  }
  void get_double(const std::string& key, double& out) {
    get_num<double>(key, out, [](double) {});
  }

  void get_string(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

  void get_bool(const std::string& key, bool& out) {
    auto v = raw(key);
    if (!v) return;
    const std::string s = lower(*v);
    if (s == "true" || s == "1" || s == "yes") out = true;
    else if (s == "false" || s == "0" || s == "no") out = false;
    else fail(key, "expected a boolean, got '" + *v + "'");
  }

  template <typename T>
  void get_enum(const std::string& key, T& out,
                const std::map<std::string, T>& names) {
    auto v = raw(key);
    if (!v) return;
    const auto it = names.find(lower(*v));
    if (it == names.end()) {
      std::string opts;
      for (const auto& [name, _] : names)
        opts += (opts.empty() ? "" : ", ") + name;
      fail(key, "'" + *v + "' is not one of {" + opts + "}");
      return;
    }
    out = it->second;
  }

  template <typename Check>
  void get_double_list(const std::string& key, std::vector<double>& out,
                       Check check) {
    auto v = raw(key);
    if (!v) {
      check(out);
      return;
    }
    std::vector<double> vals;
    std::istringstream is(*v);
    std::string item;
    while (std::getline(is, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      std::istringstream vs(item);
      double d;
      vs >> d;
      if (vs.fail() || !vs.eof()) {
        fail(key, "cannot parse list element '" + item + "'");
        return;
      }
      vals.push_back(d);
    }
    out = std::move(vals);
    check(out);
  }

  void get_g_list(const std::string& key, std::vector<GFunction::Kind>& out) {
    auto v = raw(key);
    if (!v) return;
    const auto names = g_names();
    std::vector<GFunction::Kind> vals;
    std::istringstream is(*v);
    std::string item;
    while (std::getline(is, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto it = names.find(lower(item));
      if (it == names.end()) {
        fail(key, "unknown g function '" + item + "'");
        return;
      }
      vals.push_back(it->second);
    }
    out = std::move(vals);
  }

  KeyValueMap kv_;
  std::set<std::string> consumed_;
  std::vector<std::string> violations_;
};

}  // namespace detail

// Build a validated config; the thrown message lists every violation.
inline RunConfig config_from_map(const KeyValueMap& kv) {
  detail::ConfigBuilder builder(kv);
  std::vector<std::string> violations;
  RunConfig cfg = builder.build(violations);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  return config_from_map(parse_key_values(text));
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace tcm
