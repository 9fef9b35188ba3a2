#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <thread>

#include "tcm/config.hpp"
#include "tcm/snapshot.hpp"
#include "tcm/version.hpp"

namespace tcm {

inline const char* variant_name(DissipationVariant v) {
  switch (v) {
    case DissipationVariant::None: return "none";
    case DissipationVariant::Fractional: return "fractional";
    case DissipationVariant::LogSupercritical: return "log_supercritical";
  }
  return "unknown";
}

inline const char* g_kind_name(GFunction::Kind k) {
  switch (k) {
    case GFunction::Kind::Constant1: return "constant1";
    case GFunction::Kind::SqrtLog: return "sqrt_log";
    case GFunction::Kind::SqrtLogLogLog: return "sqrt_log_log_log";
    case GFunction::Kind::SqrtLogLogLogLogLog:
      return "sqrt_log_log_log_log_log";
    case GFunction::Kind::Custom: return "custom";
  }
  return "unknown";
}

inline const char* halt_name(HaltFlag h) {
  switch (h) {
    case HaltFlag::Running: return "running";
    case HaltFlag::Clean: return "clean";
    case HaltFlag::BlowupNonFinite: return "blowup_nonfinite";
    case HaltFlag::BlowupThreshold: return "blowup_threshold";
    case HaltFlag::MaxSteps: return "max_steps";
  }
  return "unknown";
}

inline Json config_to_json(const RunConfig& c) {
  Json j;
  j["grid"] = {{"n", c.n}, {"domain_length", c.domain_length}};
  j["dissipation"] = {{"variant", variant_name(c.variant)},
                      {"alpha", c.alpha},
                      {"beta", c.beta},
                      {"g", g_kind_name(c.g_kind)}};
  const char* kind = c.initial_kind == InitialKind::TaylorGreen
                         ? "taylor_green"
                         : (c.initial_kind == InitialKind::RandomSmooth
                                ? "random_smooth"
                                : "from_file");
  j["initial"] = {{"kind", kind},
                  {"seed", c.random_params.seed},
                  {"spectrum_slope", c.random_params.spectrum_slope},
                  {"cutoff", c.random_params.cutoff},
                  {"amplitude", c.random_params.amplitude},
                  {"file", c.initial_file}};
  j["scheme"] = {{"kind", c.scheme.scheme == Scheme::Etdrk2 ? "etdrk2" : "rk2"},
                 {"dt", c.scheme.dt},
                 {"cfl", c.scheme.cfl_number},
                 {"adaptive", c.scheme.adaptive},
                 {"t_end", c.scheme.t_end},
                 {"max_steps", c.scheme.max_steps},
                 {"linear_only", c.scheme.linear_only}};
  j["monitor"] = {{"sigma", c.monitor.sigma},
                  {"s_list", c.monitor.s_list},
                  {"blowup_threshold", c.monitor.blowup_threshold},
                  {"sample_interval", c.monitor.sample_interval}};
  j["output"] = {{"directory", c.output_directory},
                 {"label", c.label},
                 {"snapshot_interval", c.snapshot_interval}};
  j["tolerances"] = {{"div_u_warn", c.div_u_warn}};
  j["regime_label"] = c.regime_label();
  return j;
}

inline TCMState make_initial_state(const RunConfig& cfg, const Grid2D& grid) {
  switch (cfg.initial_kind) {
    case InitialKind::TaylorGreen:
      return taylor_green_state(grid);
    case InitialKind::RandomSmooth:
      return random_smooth_state(grid, cfg.random_params);
    case InitialKind::FromFile: {
      LoadedSnapshot snap = read_snapshot(cfg.initial_file);
      if (snap.state.grid() != grid)
        throw ConfigError(
            "initial.file: snapshot grid (n=" +
            std::to_string(snap.state.grid().n()) +
            ", L=" + std::to_string(snap.state.grid().length()) +
            ") does not match grid.n=" + std::to_string(grid.n()) +
            ", grid.domain_length=" + std::to_string(grid.length()));
      snap.state.time = 0.0;  // file supplies fields, not a resume point
      return std::move(snap.state);
    }
  }
  throw ConfigError("unreachable initial kind");
}

// Worker budget for sweeps, from TCM2D_WORKERS; defaults to 1 so plain
// invocations are sequential and reproducible without any environment.
inline int worker_budget() {
  const char* env = std::getenv("TCM2D_WORKERS");
  if (!env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1)
    throw ConfigError("TCM2D_WORKERS must be a positive integer, got '" +
                      std::string(env) + "'");
  return int(std::min<long>(v, 256));
}

namespace detail {

inline std::string utc_stamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// Timestamped directory that does not collide with an existing one.
inline std::filesystem::path fresh_run_dir(const std::filesystem::path& base,
                                           const std::string& label,
                                           const char* prefix) {
  const std::string stem =
      (label.empty() ? std::string(prefix) : label) + "-" + utc_stamp();
  std::filesystem::path dir = base / stem;
  for (int i = 1; std::filesystem::exists(dir); ++i)
    dir = base / (stem + "-" + std::to_string(i));
  return dir;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
}

inline Json dissipation_header(const RunConfig& cfg) {
  return {{"variant", variant_name(cfg.variant)},
          {"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"g", g_kind_name(cfg.g_kind)}};
}

}  // namespace detail

struct RunResult {
  std::filesystem::path dir;
  RunSummary summary;
};

namespace detail {

inline Json summary_to_json(const RunConfig& cfg, const RunSummary& sum) {
  Json j;
  j["version"] = kVersion;
  j["halt"] = halt_name(sum.halt);
  j["halt_code"] = int(sum.halt);
  j["steps"] = sum.steps;
  j["t_final"] = sum.final_state.time;
  j["bkm_integral"] = sum.bkm_integral;
  j["records"] = sum.records.size();
  if (!sum.records.empty()) {
    const DiagnosticsRecord& r = sum.records.back();
    j["final"] = {{"l2_energy", r.l2_energy},
                  {"dissipation_rate", r.dissipation_rate},
                  {"grad_u_linf", r.grad_u_linf},
                  {"x_sigma", r.x_sigma},
                  {"y_sigma", r.y_sigma},
                  {"besov_majorant", r.besov_majorant},
                  {"max_u", r.max_u},
                  {"div_u_rel", r.div_u_rel}};
  }
  Json mh = Json::object();
  for (const auto& [s, v] : sum.max_hs)
    mh[DiagnosticsCsv::fmt(s)] = v;
  j["max_hs"] = mh;
  j["seed"] = cfg.random_params.seed;
  j["regime_label"] = cfg.regime_label();
  j["config"] = config_to_json(cfg);
  return j;
}

inline RunResult execute_run(const RunConfig& cfg, TCMState state,
                             double bkm_start,
                             const std::filesystem::path& dir_override) {
  const Grid2D grid = state.grid();
  const DissipationSpec spec = cfg.make_dissipation(grid);
  const DyadicFilterBank bank(grid);

  std::filesystem::path dir =
      dir_override.empty()
          ? detail::fresh_run_dir(cfg.output_directory, cfg.label, "run")
          : dir_override;
  std::filesystem::create_directories(dir / "snapshots");

  Json manifest;
  manifest["format"] = "tcm2d.run";
  manifest["version"] = kVersion;
  manifest["created_utc"] = detail::utc_stamp();
  manifest["regime_label"] = cfg.regime_label();
  manifest["config"] = config_to_json(cfg);
  detail::write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  std::ofstream csv(dir / "diagnostics.csv", std::ios::binary);
  if (!csv) throw IoError("cannot write diagnostics.csv in " + dir.string());
  DiagnosticsCsv sink(csv, cfg.monitor);
  sink.write_header();

  const Json diss = detail::dissipation_header(cfg);
  const auto snapshot_path = [&dir](long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%08ld.tcms", step);
    return dir / "snapshots" / buf;
  };
  write_snapshot(snapshot_path(0), state, 0, bkm_start,
                 Json{{"dissipation", diss}});

  RunCallbacks cb;
  cb.snapshot_interval = cfg.snapshot_interval;
  cb.on_record = [&sink](const DiagnosticsRecord& r) { sink.write_row(r); };
  cb.on_snapshot = [&](const TCMState& s, long step, double bkm) {
    write_snapshot(snapshot_path(step), s, step, bkm,
                   Json{{"dissipation", diss}});
  };

  RunResult res;
  res.summary = run(std::move(state), spec, cfg.scheme, cfg.monitor, bank, cb,
                    bkm_start);
  res.dir = dir;
  csv.flush();

  write_snapshot(dir / "snapshots" / "snapshot_final.tcms",
                 res.summary.final_state, res.summary.steps,
                 res.summary.bkm_integral, Json{{"dissipation", diss}});
  detail::write_text(dir / "summary.json",
                     detail::summary_to_json(cfg, res.summary).dump(2) + "\n");
  return res;
}

}  // namespace detail

inline RunResult run_single(const RunConfig& cfg,
                            const std::filesystem::path& dir_override = {}) {
  const Grid2D grid = cfg.make_grid();
  return detail::execute_run(cfg, make_initial_state(cfg, grid), 0.0,
                             dir_override);
}

// Continue from a snapshot. The snapshot header must agree with the
// config on grid and dissipation; any differences are listed in the
// refusal. t_end at or before the snapshot time yields a no-op summary
// with one record.
inline RunResult resume_run(const std::filesystem::path& snapshot_path,
                            const RunConfig& cfg,
                            const std::filesystem::path& dir_override = {}) {
  LoadedSnapshot snap = read_snapshot(snapshot_path);
  std::vector<std::string> diff;
  const auto check = [&diff](const std::string& key, const Json& have,
                             const Json& want) {
    if (have != want)
      diff.push_back(key + ": snapshot has " + have.dump() + ", config wants " +
                     want.dump());
  };
  const Json& g = snap.header.at("grid");
  check("grid.n", g.at("n"), cfg.n);
  check("grid.domain_length", g.at("domain_length"), cfg.domain_length);
  if (snap.header.contains("dissipation")) {
    const Json want = detail::dissipation_header(cfg);
    const Json& have = snap.header.at("dissipation");
    for (const auto& key : {"variant", "alpha", "beta", "g"})
      check(std::string("dissipation.") + key, have.value(key, Json()),
            want.at(key));
  }
  if (!diff.empty()) {
    std::string msg = "snapshot does not match configuration:";
    for (const auto& d : diff) msg += "\n  " + d;
    throw ConfigError(msg);
  }
  return detail::execute_run(cfg, std::move(snap.state), snap.bkm_integral,
                             dir_override);
}

struct SweepCell {
  int index = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::string g_name;
  std::string regime;
  std::string halt = "error";
  int halt_code = -1;
  long steps = 0;
  double t_final = 0.0;
  double bkm_integral = 0.0;
  std::map<double, double> max_hs;
  std::string dir;
  std::string error;
};

struct SweepReport {
  std::filesystem::path dir;
  std::vector<SweepCell> cells;
};

// One run per cell: alpha x beta for the fractional variant, the g list
// for the log variant. Cells run concurrently up to the worker budget;
// failures are recorded and do not stop the sweep; aggregation is in
// cell order regardless of completion order.
inline SweepReport run_sweep(const RunConfig& cfg,
                             const std::filesystem::path& dir_override = {}) {
  struct CellSetup {
    RunConfig cfg;
    std::string tag;
  };
  std::vector<CellSetup> setups;
  if (cfg.variant == DissipationVariant::LogSupercritical) {
    if (cfg.sweep_g.empty())
      throw ConfigError("sweep.g_list: required for a log_supercritical sweep");
    for (const auto& gk : cfg.sweep_g) {
      CellSetup s{cfg, std::string("g_") + g_kind_name(gk)};
      s.cfg.g_kind = gk;
      setups.push_back(std::move(s));
    }
  } else if (cfg.variant == DissipationVariant::Fractional) {
    if (cfg.sweep_alpha.empty() || cfg.sweep_beta.empty())
      throw ConfigError(
          "sweep.alpha_list, sweep.beta_list: required for a fractional sweep");
    for (double a : cfg.sweep_alpha)
      for (double b : cfg.sweep_beta) {
        char tag[64];
        std::snprintf(tag, sizeof tag, "a%g_b%g", a, b);
        CellSetup s{cfg, tag};
        s.cfg.alpha = a;
        s.cfg.beta = b;
        setups.push_back(std::move(s));
      }
  } else {
    throw ConfigError("dissipation.variant: nothing to sweep for 'none'");
  }

  SweepReport report;
  report.dir =
      dir_override.empty()
          ? detail::fresh_run_dir(cfg.output_directory, cfg.label, "sweep")
          : dir_override;
  std::filesystem::create_directories(report.dir);
  report.cells.resize(setups.size());

  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= setups.size()) return;
      RunConfig cell_cfg = setups[i].cfg;
      cell_cfg.sweep_alpha.clear();
      cell_cfg.sweep_beta.clear();
      cell_cfg.sweep_g.clear();
      if (cfg.seed_mode == SeedMode::PerCell)
        cell_cfg.random_params.seed = cfg.random_params.seed + i;
      SweepCell& cell = report.cells[i];
      cell.index = int(i);
      cell.alpha = cell_cfg.alpha;
      cell.beta = cell_cfg.beta;
      cell.g_name = g_kind_name(cell_cfg.g_kind);
      cell.regime = cell_cfg.regime_label();
      char dirname[96];
      std::snprintf(dirname, sizeof dirname, "cell_%03zu_%s", i,
                    setups[i].tag.c_str());
      const std::filesystem::path cell_dir = report.dir / dirname;
      cell.dir = cell_dir.string();
      try {
        RunResult r = run_single(cell_cfg, cell_dir);
        cell.halt = halt_name(r.summary.halt);
        cell.halt_code = int(r.summary.halt);
        cell.steps = r.summary.steps;
        cell.t_final = r.summary.final_state.time;
        cell.bkm_integral = r.summary.bkm_integral;
        cell.max_hs = r.summary.max_hs;
      } catch (const std::exception& ex) {
        cell.error = ex.what();
      }
    }
  };

  const int workers =
      std::min<int>(worker_budget(), int(setups.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Aggregate in cell order.
  std::ostringstream csv;
  csv << "cell,alpha,beta,g,regime,halt,halt_code,steps,t_final,bkm_integral";
  for (double s : cfg.monitor.s_list) csv << ",max_h" << DiagnosticsCsv::fmt(s);
  csv << ",error\n";
  Json jcells = Json::array();
  for (const auto& c : report.cells) {
    csv << c.index << ',' << DiagnosticsCsv::fmt(c.alpha) << ','
        << DiagnosticsCsv::fmt(c.beta) << ',' << c.g_name << ',' << c.regime
        << ',' << c.halt << ',' << c.halt_code << ',' << c.steps << ','
        << DiagnosticsCsv::fmt(c.t_final) << ','
        << DiagnosticsCsv::fmt(c.bkm_integral);
    for (double s : cfg.monitor.s_list) {
      const auto it = c.max_hs.find(s);
      csv << ','
          << DiagnosticsCsv::fmt(it == c.max_hs.end() ? 0.0 : it->second);
    }
    csv << ',' << c.error << '\n';
    Json jc = {{"cell", c.index},       {"alpha", c.alpha},
               {"beta", c.beta},        {"g", c.g_name},
               {"regime", c.regime},    {"halt", c.halt},
               {"halt_code", c.halt_code}, {"steps", c.steps},
               {"t_final", c.t_final},  {"bkm_integral", c.bkm_integral},
               {"dir", c.dir},          {"error", c.error}};
    Json mh = Json::object();
    for (const auto& [s, v] : c.max_hs) mh[DiagnosticsCsv::fmt(s)] = v;
    jc["max_hs"] = mh;
    jcells.push_back(std::move(jc));
  }
  detail::write_text(report.dir / "sweep_report.csv", csv.str());
  Json jr = {{"format", "tcm2d.sweep"},
             {"version", kVersion},
             {"cells", jcells},
             {"config", config_to_json(cfg)}};
  detail::write_text(report.dir / "sweep_report.json", jr.dump(2) + "\n");
  return report;
}

// Self-contained invariant suite behind the check-properties subcommand.
// Prints one line per check; returns the number of failures.
inline int check_properties(std::ostream& os, int n = 64,
                            std::uint64_t seed = 7) {
  int failures = 0;
  const auto report = [&](const char* name, bool ok, double value,
                          double bound) {
    os << (ok ? "[PASS] " : "[FAIL] ") << name << "  (" << value
       << (ok ? " <= " : " > ") << bound << ")\n";
    if (!ok) ++failures;
  };

  const Grid2D grid(n);
  RandomSmoothParams rp;
  rp.seed = seed;
  rp.cutoff = std::min(8, grid.dealias_cut());
  const TCMState state = random_smooth_state(grid, rp);

  {
    std::mt19937_64 eng(seed + 13);
    RealVec phys(grid.size());
    for (auto& v : phys) v = 2.0 * detail::uniform01(eng) - 1.0;
    SpectralField f = to_spectral(grid, phys);
    RealVec back = to_physical(f);
    double d = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i)
      d = std::max(d, std::abs(back[i] - phys[i]));
    report("transform round-trip", d <= 1e-13, d, 1e-13);

    double phys_sq = 0.0;
    for (double v : phys) phys_sq += v * v;
    phys_sq /= double(grid.size());
    const double spec_sq = l2_norm_sq(f);
    const double rel = std::abs(phys_sq - spec_sq) / phys_sq;
    report("parseval identity", rel <= 1e-12, rel, 1e-12);
  }

  {
    const double d = divergence_rel(state.u);
    report("projected u divergence", d <= 1e-12, d, 1e-12);
    VectorField twice = leray_projected(state.u);
    const double idem = max_coeff_diff(twice, state.u);
    report("projection idempotence", idem <= 1e-14, idem, 1e-14);
  }

  {
    const auto [r1, r2] = cancellation_residual(state);
    report("quadratic pairing cancellation", r1 <= 1e-10, r1, 1e-10);
    report("theta coupling cancellation", r2 <= 1e-10, r2, 1e-10);
  }

  for (const bool log_variant : {false, true}) {
    const DissipationSpec spec =
        log_variant
            ? DissipationSpec::log_supercritical(grid, GFunction::sqrt_log())
            : DissipationSpec::fractional(grid, 1.5, 0.5);
    const Tendency t = rhs(state, spec);
    const double pairing = inner(t.u, state.u) + inner(t.v, state.v) +
                           inner(t.theta, state.theta);
    const double rate = dissipation_rate(state, spec);
    const double rel = std::abs(pairing + rate) /
                       std::max({std::abs(pairing), rate, 1e-300});
    report(log_variant ? "energy law (log variant)" : "energy law (fractional)",
           rel <= 1e-10, rel, 1e-10);
  }

  {
    const DissipationSpec a = DissipationSpec::fractional(grid, 2.0, 0.0);
    const DissipationSpec b =
        DissipationSpec::log_supercritical(grid, GFunction::constant1());
    double d = 0.0;
    for (std::size_t i = 0; i < a.m_u().size(); ++i)
      d = std::max(d, std::abs(a.m_u()[i] - b.m_u()[i]));
    report("g=1 reduction to alpha=2", d <= 0.0, d, 0.0);
  }

  {
    const DissipationSpec spec = DissipationSpec::fractional(grid, 1.0, 0.5);
    SchemeConfig sc;
    sc.linear_only = true;
    const double h = 0.01;
    TCMState after = step(state, spec, sc, h);
    double worst = 0.0;
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const std::size_t i = grid.index(ix, iy);
        const double fac_u = std::exp(-h * spec.m_u()[i]);
        const double fac_v = std::exp(-h * spec.m_v()[i]);
        worst = std::max(
            {worst,
             std::abs(after.u.x.coeffs[i] - fac_u * state.u.x.coeffs[i]),
             std::abs(after.v.x.coeffs[i] - fac_v * state.v.x.coeffs[i]),
             std::abs(after.theta.coeffs[i] - state.theta.coeffs[i])});
      }
    report("exact linear propagation", worst <= 1e-14, worst, 1e-14);
  }

  {
    const DyadicFilterBank bank(grid);
    report("partition of unity", bank.partition_error() <= 1e-13,
           bank.partition_error(), 1e-13);
    SpectralField sum_blocks(grid);
    for (int j = -1; j <= bank.j_max(); ++j)
      axpy(1.0, dyadic_block(bank, j, state.theta), sum_blocks);
    const double rec = max_coeff_diff(sum_blocks, state.theta) /
                       std::max(1e-300, max_abs_coeff(state.theta));
    report("block reconstruction", rec <= 1e-12, rec, 1e-12);

    SpectralField shell(grid);
    std::mt19937_64 eng(seed + 29);
    const double lo = 0.75 * 4.0, hi = (8.0 / 3.0) * 4.0;
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double kx = grid.k(ix), ky = grid.k(iy);
        const double r = std::sqrt(kx * kx + ky * ky);
        if (r >= lo && r <= hi)
          shell(ix, iy) = Complex(detail::uniform01(eng) - 0.5,
                                  detail::uniform01(eng) - 0.5);
      }
    hermitian_symmetrize(shell);
    const double ratio = bernstein_ratio(bank, shell, 2, 1.0);
    const bool ok = ratio >= 0.75 && ratio <= 8.0 / 3.0;
    report("bernstein ratio in shell bracket", ok, ratio, 8.0 / 3.0);

    SpectralField mode(grid);
    mode(0, 3) = 0.5;
    mode(0, n - 3) = 0.5;
    const auto decay = semigroup_block_decay(bank, mode, 1, 2.0,
                                             {0.0, 0.01, 0.02, 0.03, 0.04});
    const double err = std::abs(decay.slope + 9.0);
    report("semigroup single-mode slope", err <= 1e-6, err, 1e-6);
  }

  {
    const double got =
        growth_condition_partial(GFunction::constant1(), std::exp(9.0));
    const double err = std::abs(got - 4.0);
    report("growth integral closed form", err <= 1e-8, err, 1e-8);
  }

  {
    const Tendency t = explicit_tendency(state);
    const double mean_u = std::max(std::abs(t.u.x.coeffs[0]),
                                   std::abs(t.u.y.coeffs[0]));
    report("mean-u conservation", mean_u <= 1e-14, mean_u, 1e-14);
  }

  return failures;
}

// Filter bank audit: partition error, support table, and the sampled
// profile, as JSON.
inline Json check_filters(int n, double domain_length) {
  const Grid2D grid(n, domain_length);
  const DyadicFilterBank bank(grid);
  Json j;
  j["n"] = n;
  j["domain_length"] = domain_length;
  j["j_min"] = bank.j_min();
  j["j_max"] = bank.j_max();
  j["partition_max_error"] = bank.partition_error();

  // Largest cross-talk between blocks two or more apart; disjoint
  // supports make it exactly zero.
  double cross = 0.0;
  for (int j1 = -1; j1 <= bank.j_max(); ++j1)
    for (int j2 = j1 + 2; j2 <= bank.j_max(); ++j2) {
      const auto& w1 = bank.weight(j1);
      const auto& w2 = bank.weight(j2);
      for (std::size_t i = 0; i < w1.size(); ++i)
        cross = std::max(cross, std::abs(w1[i] * w2[i]));
    }
  j["max_cross_talk_separated_blocks"] = cross;

  Json profile = Json::array();
  for (int i = 0; i <= 160; ++i) {
    const double r = 3.0 * i / 160.0;
    profile.push_back({{"r", r},
                       {"chi", bank.profile(r)},
                       {"phi", bank.profile(0.5 * r) - bank.profile(r)}});
  }
  j["profile_samples"] = profile;

  Json blocks = Json::array();
  for (int jj = -1; jj <= bank.j_max(); ++jj) {
    const auto& w = bank.weight(jj);
    int active = 0;
    for (double v : w)
      if (v != 0.0) ++active;
    blocks.push_back({{"j", jj},
                      {"active_modes", active},
                      {"support",
                       jj == -1
                           ? Json{{"hi", 4.0 / 3.0}}
                           : Json{{"lo", 0.75 * std::ldexp(1.0, jj)},
                                  {"hi", (8.0 / 3.0) * std::ldexp(1.0, jj)}}}});
  }
  j["blocks"] = blocks;
  return j;
}

}  // namespace tcm
