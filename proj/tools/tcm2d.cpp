// Command-line front end: single runs, parameter sweeps, resume from
// snapshot, filter-bank audits, invariant checks, and norm queries.
//
// Exit codes: 0 clean, 1 internal error, 2 configuration or usage error,
// 3 blow-up halt, 4 I/O error, 5 step budget exhausted.

#include <CLI11.hpp>
#include <iostream>

#include "tcm/tcm.hpp"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitIo = 4;
constexpr int kExitBudget = 5;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config = true) {
  auto* c = cmd->add_option("-c,--config", o.config_path, "config file");
  if (need_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets,
                  "override a config value, section.key=value (repeatable)");
  cmd->add_option("-o,--out", o.out_dir,
                  "output directory (default: timestamped under "
                  "output.directory)");
  cmd->add_flag("-q,--quiet", o.quiet, "suppress the summary printout");
}

tcm::RunConfig load(const CommonOpts& o) {
  tcm::KeyValueMap kv;
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path);
    if (!is) throw tcm::IoError("cannot open config: " + o.config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    kv = tcm::parse_key_values(ss.str());
  }
  for (const auto& s : o.sets) tcm::apply_override(kv, s);
  return tcm::config_from_map(kv);
}

int exit_code_for(tcm::HaltFlag halt) {
  switch (halt) {
    case tcm::HaltFlag::Clean: return kExitClean;
    case tcm::HaltFlag::BlowupNonFinite:
    case tcm::HaltFlag::BlowupThreshold: return kExitBlowup;
    case tcm::HaltFlag::MaxSteps: return kExitBudget;
    default: return kExitInternal;
  }
}

void print_summary(const tcm::RunConfig& cfg, const tcm::RunResult& res) {
  const tcm::RunSummary& s = res.summary;
  std::cout << "run directory : " << res.dir.string() << "\n"
            << "regime        : " << cfg.regime_label() << "\n"
            << "halt          : " << tcm::halt_name(s.halt) << "\n"
            << "steps         : " << s.steps << "\n"
            << "t_final       : " << s.final_state.time << "\n"
            << "bkm_integral  : " << s.bkm_integral << "\n";
  for (const auto& [sv, v] : s.max_hs)
    std::cout << "max H^" << sv << "       : " << v << "\n";
  if (!s.records.empty() &&
      s.records.back().div_u_rel > cfg.div_u_warn)
    std::cerr << "warning: relative div u " << s.records.back().div_u_rel
              << " exceeds tolerances.div_u_warn " << cfg.div_u_warn << "\n";
}

double parse_p_or_r(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF")
    return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tcm2d: 2d periodic pseudo-spectral simulator for a coupled "
      "barotropic/baroclinic/temperature system with fractional or "
      "logarithmically weakened dissipation, plus a dyadic-analysis "
      "diagnostic toolkit"};
  app.require_subcommand(1);

  CommonOpts run_o, sweep_o, resume_o;
  std::string resume_snapshot;

  auto* cmd_run = app.add_subcommand("run", "execute a single run");
  add_common(cmd_run, run_o);

  auto* cmd_sweep =
      app.add_subcommand("sweep", "run every cell of the configured sweep");
  add_common(cmd_sweep, sweep_o);

  auto* cmd_resume =
      app.add_subcommand("resume", "continue a run from a snapshot");
  add_common(cmd_resume, resume_o);
  cmd_resume->add_option("-s,--snapshot", resume_snapshot, "snapshot file")
      ->required()
      ->check(CLI::ExistingFile);

  int cf_n = 128;
  double cf_length = 2.0 * std::numbers::pi;
  std::string cf_json;
  auto* cmd_filters = app.add_subcommand(
      "check-filters", "audit the dyadic filter bank for a grid size");
  cmd_filters->add_option("-n,--n", cf_n, "grid size");
  cmd_filters->add_option("--domain-length", cf_length, "domain length");
  cmd_filters->add_option("--json", cf_json, "write the full audit here");

  int cp_n = 64;
  std::uint64_t cp_seed = 7;
  auto* cmd_props = app.add_subcommand(
      "check-properties", "run the built-in invariant suite");
  cmd_props->add_option("-n,--n", cp_n, "grid size");
  cmd_props->add_option("--seed", cp_seed, "random state seed");

  std::string norms_snapshot;
  std::vector<double> norms_s{1.0, 2.0};
  std::vector<std::string> norms_besov;
  std::string norms_json;
  auto* cmd_norms =
      app.add_subcommand("norms", "compute norms of a snapshot file");
  cmd_norms->add_option("-s,--snapshot", norms_snapshot, "snapshot file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_norms->add_option("--sobolev", norms_s, "Sobolev indices");
  cmd_norms->add_option(
      "--besov", norms_besov,
      "Besov triple s,p,r with p in {2, inf}, r >= 1 or inf (repeatable)");
  cmd_norms->add_option("--json", norms_json, "write results here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const tcm::RunConfig cfg = load(run_o);
      const tcm::RunResult res = tcm::run_single(cfg, run_o.out_dir);
      if (!run_o.quiet) print_summary(cfg, res);
      return exit_code_for(res.summary.halt);
    }

    if (cmd_sweep->parsed()) {
      const tcm::RunConfig cfg = load(sweep_o);
      const tcm::SweepReport rep = tcm::run_sweep(cfg, sweep_o.out_dir);
      if (!sweep_o.quiet) {
        std::cout << "sweep directory: " << rep.dir.string() << "\n";
        for (const auto& c : rep.cells)
          std::cout << "  cell " << c.index << " [" << c.regime << "] "
                    << (c.error.empty() ? c.halt : "error: " + c.error)
                    << "\n";
      }
      return kExitClean;
    }

    if (cmd_resume->parsed()) {
      const tcm::RunConfig cfg = load(resume_o);
      const tcm::RunResult res =
          tcm::resume_run(resume_snapshot, cfg, resume_o.out_dir);
      if (!resume_o.quiet) print_summary(cfg, res);
      return exit_code_for(res.summary.halt);
    }

    if (cmd_filters->parsed()) {
      const tcm::Json audit = tcm::check_filters(cf_n, cf_length);
      if (!cf_json.empty()) {
        std::ofstream os(cf_json, std::ios::binary);
        if (!os) throw tcm::IoError("cannot write " + cf_json);
        os << audit.dump(2) << "\n";
      }
      std::cout << "n                   : " << audit["n"] << "\n"
                << "j range             : [" << audit["j_min"] << ", "
                << audit["j_max"] << "]\n"
                << "partition max error : " << audit["partition_max_error"]
                << "\n"
                << "cross talk |j-j'|>=2: "
                << audit["max_cross_talk_separated_blocks"] << "\n";
      const double err = audit["partition_max_error"].get<double>();
      return err <= 1e-13 ? kExitClean : kExitInternal;
    }

    if (cmd_props->parsed()) {
      const int failures = tcm::check_properties(std::cout, cp_n, cp_seed);
      return failures == 0 ? kExitClean : kExitInternal;
    }

    if (cmd_norms->parsed()) {
      const tcm::LoadedSnapshot snap = tcm::read_snapshot(norms_snapshot);
      const tcm::TCMState& st = snap.state;
      const tcm::DyadicFilterBank bank(st.grid());
      tcm::Json out;
      out["time"] = st.time;
      out["grid"] = {{"n", st.grid().n()},
                     {"domain_length", st.grid().length()}};
      const auto fields = std::vector<
          std::pair<std::string, const tcm::SpectralField*>>{
          {"u.x", &st.u.x}, {"u.y", &st.u.y}, {"v.x", &st.v.x},
          {"v.y", &st.v.y}, {"theta", &st.theta}};
      std::cout << "t = " << st.time << ", n = " << st.grid().n() << "\n";
      for (const auto& [name, f] : fields) {
        tcm::Json jf;
        jf["l2"] = tcm::l2_norm(*f);
        std::cout << name << ": l2 = " << tcm::l2_norm(*f);
        for (double s : norms_s) {
          const double v = tcm::sobolev_norm(*f, s);
          jf["h" + tcm::DiagnosticsCsv::fmt(s)] = v;
          std::cout << ", H^" << s << " = " << v;
        }
        for (const auto& triple : norms_besov) {
          std::istringstream is(triple);
          std::string a, b, c;
          if (!std::getline(is, a, ',') || !std::getline(is, b, ',') ||
              !std::getline(is, c))
            throw tcm::ConfigError("--besov expects s,p,r; got '" + triple +
                                   "'");
          const double s = std::stod(a);
          const double p = parse_p_or_r(b);
          const double r = parse_p_or_r(c);
          const double v = tcm::besov_norm(bank, *f, s, p, r);
          jf["besov(" + triple + ")"] = v;
          std::cout << ", B(" << triple << ") = " << v;
        }
        std::cout << "\n";
        out["fields"][name] = jf;
      }
      out["grad_u_linf"] = tcm::grad_u_linf(st);
      out["besov_majorant_grad_linf"] =
          tcm::besov_majorant_grad_linf(bank, st.u);
      std::cout << "grad u sup = " << out["grad_u_linf"]
                << ", besov majorant = "
                << out["besov_majorant_grad_linf"] << "\n";
      if (!norms_json.empty()) {
        std::ofstream os(norms_json, std::ios::binary);
        if (!os) throw tcm::IoError("cannot write " + norms_json);
        os << out.dump(2) << "\n";
      }
      return kExitClean;
    }
  } catch (const tcm::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const tcm::IoError& ex) {
    std::cerr << "io error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const tcm::DomainError& ex) {
    std::cerr << "invalid argument: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
