#pragma once

#include <functional>

#include "tcm/diagnostics.hpp"
#include "tcm/initial_data.hpp"

namespace tcm {

enum class Scheme { Etdrk2, Rk2 };

struct SchemeConfig {
  // Step cap; the CFL-adaptive step never exceeds it, and with
  // adaptive = false it is the fixed step.
  double dt = 0.01;
  double cfl_number = 0.4;
  bool adaptive = true;
  Scheme scheme = Scheme::Etdrk2;
  double t_end = 5.0;
  long max_steps = 1000000;
  // Evolve only the diagonal dissipation; the explicit tendency is
  // dropped entirely so each mode follows its exact semigroup.
  bool linear_only = false;

  void validate() const {
    if (!(dt > 0.0)) throw DomainError("scheme dt must be positive");
    if (!(cfl_number > 0.0) || cfl_number > 1.0)
      throw DomainError("cfl number must lie in (0, 1]");
    if (!(t_end >= 0.0)) throw DomainError("t_end must be non-negative");
    if (max_steps < 1) throw DomainError("max_steps must be >= 1");
  }
};

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2 for z <= 0.
// Near zero the closed forms cancel catastrophically, so a short Taylor
// series takes over.
inline double phi1(double z) {
  if (std::abs(z) < 0.5) {
    double term = 1.0, sum = 1.0;
    for (int m = 1; m <= 16; ++m) {
      term *= z / (m + 1);
      sum += term;
    }
    return sum;
  }
  return std::expm1(z) / z;
}

inline double phi2(double z) {
  if (std::abs(z) < 0.5) {
    double term = 0.5, sum = 0.5;
    for (int m = 1; m <= 16; ++m) {
      term *= z / (m + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

// CFL-limited step from the current peak speeds, capped by cfg.dt; the
// cap is what survives when the state is at rest.
inline double cfl_dt(const TCMState& state, const SchemeConfig& cfg) {
  const double speed = max_speed(state.u) + max_speed(state.v) + 1e-12;
  return std::min(cfg.dt, cfg.cfl_number * state.grid().dx() / speed);
}

namespace detail {

// Per-dt exponential tables; rebuilt only when dt changes.
struct EtdTables {
  double dt = -1.0;
  std::vector<double> a_u, p1_u, p2_u;
  std::vector<double> a_v, p1_v, p2_v;

  void build(const DissipationSpec& spec, double h) {
    if (h == dt && !a_u.empty()) return;
    dt = h;
    const auto fill = [h](const std::vector<double>& m, std::vector<double>& a,
                          std::vector<double>& p1, std::vector<double>& p2) {
      const std::size_t n = m.size();
      a.resize(n);
      p1.resize(n);
      p2.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double z = -h * m[i];
        a[i] = std::exp(z);
        p1[i] = h * phi1(z);
        p2[i] = h * phi2(z);
      }
    };
    fill(spec.m_u(), a_u, p1_u, p2_u);
    fill(spec.m_v(), a_v, p1_v, p2_v);
  }
};

inline TCMState step_etdrk2(const TCMState& state, const DissipationSpec& spec,
                            const SchemeConfig& cfg, double h,
                            EtdTables& tab) {
  tab.build(spec, h);
  const Grid2D& grid = state.grid();
  const std::size_t sz = grid.size();
  TCMState mid(grid);
  mid.time = state.time + h;

  if (cfg.linear_only) {
    TCMState out(grid);
    out.time = state.time + h;
    for (std::size_t i = 0; i < sz; ++i) {
      out.u.x.coeffs[i] = tab.a_u[i] * state.u.x.coeffs[i];
      out.u.y.coeffs[i] = tab.a_u[i] * state.u.y.coeffs[i];
      out.v.x.coeffs[i] = tab.a_v[i] * state.v.x.coeffs[i];
      out.v.y.coeffs[i] = tab.a_v[i] * state.v.y.coeffs[i];
      out.theta.coeffs[i] = state.theta.coeffs[i];
    }
    leray_project(out.u);
    return out;
  }

  Tendency n0 = explicit_tendency(state);
  for (std::size_t i = 0; i < sz; ++i) {
    mid.u.x.coeffs[i] =
        tab.a_u[i] * state.u.x.coeffs[i] + tab.p1_u[i] * n0.u.x.coeffs[i];
    mid.u.y.coeffs[i] =
        tab.a_u[i] * state.u.y.coeffs[i] + tab.p1_u[i] * n0.u.y.coeffs[i];
    mid.v.x.coeffs[i] =
        tab.a_v[i] * state.v.x.coeffs[i] + tab.p1_v[i] * n0.v.x.coeffs[i];
    mid.v.y.coeffs[i] =
        tab.a_v[i] * state.v.y.coeffs[i] + tab.p1_v[i] * n0.v.y.coeffs[i];
    mid.theta.coeffs[i] = state.theta.coeffs[i] + h * n0.theta.coeffs[i];
  }

  Tendency n1 = explicit_tendency(mid);
  TCMState out = std::move(mid);
  for (std::size_t i = 0; i < sz; ++i) {
    out.u.x.coeffs[i] += tab.p2_u[i] * (n1.u.x.coeffs[i] - n0.u.x.coeffs[i]);
    out.u.y.coeffs[i] += tab.p2_u[i] * (n1.u.y.coeffs[i] - n0.u.y.coeffs[i]);
    out.v.x.coeffs[i] += tab.p2_v[i] * (n1.v.x.coeffs[i] - n0.v.x.coeffs[i]);
    out.v.y.coeffs[i] += tab.p2_v[i] * (n1.v.y.coeffs[i] - n0.v.y.coeffs[i]);
    out.theta.coeffs[i] +=
        0.5 * h * (n1.theta.coeffs[i] - n0.theta.coeffs[i]);
  }
  leray_project(out.u);
  return out;
}

inline Tendency rk2_slope(const TCMState& state, const DissipationSpec& spec,
                          bool linear_only) {
  if (!linear_only) return rhs(state, spec);
  Tendency t(state.grid());
  const auto& mu = spec.m_u();
  const auto& mv = spec.m_v();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    t.u.x.coeffs[i] = -mu[i] * state.u.x.coeffs[i];
    t.u.y.coeffs[i] = -mu[i] * state.u.y.coeffs[i];
    t.v.x.coeffs[i] = -mv[i] * state.v.x.coeffs[i];
    t.v.y.coeffs[i] = -mv[i] * state.v.y.coeffs[i];
  }
  return t;
}

inline TCMState step_rk2(const TCMState& state, const DissipationSpec& spec,
                         const SchemeConfig& cfg, double h) {
  Tendency k1 = rk2_slope(state, spec, cfg.linear_only);
  TCMState mid(state.grid());
  mid.time = state.time + h;
  const std::size_t sz = state.grid().size();
  for (std::size_t i = 0; i < sz; ++i) {
    mid.u.x.coeffs[i] = state.u.x.coeffs[i] + h * k1.u.x.coeffs[i];
    mid.u.y.coeffs[i] = state.u.y.coeffs[i] + h * k1.u.y.coeffs[i];
    mid.v.x.coeffs[i] = state.v.x.coeffs[i] + h * k1.v.x.coeffs[i];
    mid.v.y.coeffs[i] = state.v.y.coeffs[i] + h * k1.v.y.coeffs[i];
    mid.theta.coeffs[i] = state.theta.coeffs[i] + h * k1.theta.coeffs[i];
  }
  Tendency k2 = rk2_slope(mid, spec, cfg.linear_only);
  TCMState out(state.grid());
  out.time = state.time + h;
  const double hh = 0.5 * h;
  for (std::size_t i = 0; i < sz; ++i) {
    out.u.x.coeffs[i] =
        state.u.x.coeffs[i] + hh * (k1.u.x.coeffs[i] + k2.u.x.coeffs[i]);
    out.u.y.coeffs[i] =
        state.u.y.coeffs[i] + hh * (k1.u.y.coeffs[i] + k2.u.y.coeffs[i]);
    out.v.x.coeffs[i] =
        state.v.x.coeffs[i] + hh * (k1.v.x.coeffs[i] + k2.v.x.coeffs[i]);
    out.v.y.coeffs[i] =
        state.v.y.coeffs[i] + hh * (k1.v.y.coeffs[i] + k2.v.y.coeffs[i]);
    out.theta.coeffs[i] =
        state.theta.coeffs[i] + hh * (k1.theta.coeffs[i] + k2.theta.coeffs[i]);
  }
  leray_project(out.u);
  return out;
}

}  // namespace detail

inline TCMState step(const TCMState& state, const DissipationSpec& spec,
                     const SchemeConfig& cfg, double h) {
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  if (state.grid() != spec.grid())
    throw ShapeError("step: dissipation tables built for a different grid");
  if (cfg.scheme == Scheme::Rk2) return detail::step_rk2(state, spec, cfg, h);
  detail::EtdTables tab;
  return detail::step_etdrk2(state, spec, cfg, h, tab);
}

struct RunCallbacks {
  std::function<void(const DiagnosticsRecord&)> on_record;
  // Called at snapshot steps with the running bkm integral, which the
  // resume path needs to continue the trapezoid sum.
  std::function<void(const TCMState&, long, double)> on_snapshot;
  int snapshot_interval = 0;  // steps between snapshots, 0 disables
};

struct RunSummary {
  TCMState final_state;
  std::vector<DiagnosticsRecord> records;
  HaltFlag halt = HaltFlag::Clean;
  long steps = 0;
  double bkm_integral = 0.0;
  std::map<double, double> max_hs;
};

// March to t_end, sampling diagnostics every sample_interval steps and
// always at the first and last step. The last emitted record carries the
// final halt flag; earlier ones are flagged Running.
inline RunSummary run(TCMState state, const DissipationSpec& spec,
                      const SchemeConfig& cfg, const RegularityMonitor& mon,
                      const DyadicFilterBank& bank,
                      const RunCallbacks& cb = {}, double bkm_start = 0.0) {
  cfg.validate();
  mon.validate();
  if (cb.snapshot_interval > 0 &&
      cb.snapshot_interval % mon.sample_interval != 0)
    throw ConfigError(
        "snapshot_interval must be a multiple of sample_interval so stored "
        "bkm integrals are exact at snapshot times");

  RunSummary sum;
  sum.bkm_integral = bkm_start;
  detail::EtdTables tab;
  const double t_eps = 1e-9 * std::max(1.0, std::abs(cfg.t_end));

  double prev_t = state.time, prev_energy = 0.0, prev_rate = 0.0,
         prev_grad = 0.0;
  bool have_prev = false;
  double energy0 = 0.0;

  const auto threshold_crossed = [&](const DiagnosticsRecord& r) {
    if (r.l2_energy > mon.blowup_threshold) return true;
    if (r.grad_u_linf > mon.blowup_threshold) return true;
    if (r.max_u > mon.blowup_threshold) return true;
    if (r.x_sigma > mon.blowup_threshold || r.y_sigma > mon.blowup_threshold)
      return true;
    if (r.besov_majorant > mon.blowup_threshold) return true;
    for (const auto& [s, v] : r.hs_norms)
      if (v > mon.blowup_threshold) return true;
    return false;
  };

  const auto emit = [&](DiagnosticsRecord r) {
    if (have_prev && r.t > prev_t) {
      const double e0 = (energy0 > 0.0) ? energy0 : 1.0;
      r.energy_balance_residual =
          ((r.l2_energy - prev_energy) / (r.t - prev_t) +
           0.5 * (r.dissipation_rate + prev_rate)) /
          e0;
      sum.bkm_integral += bkm_increment(prev_t, prev_grad, r.t, r.grad_u_linf);
    }
    r.bkm_integral = sum.bkm_integral;
    if (!have_prev) energy0 = r.l2_energy;
    prev_t = r.t;
    prev_energy = r.l2_energy;
    prev_rate = r.dissipation_rate;
    prev_grad = r.grad_u_linf;
    have_prev = true;
    for (const auto& [s, v] : r.hs_norms) {
      auto [it, fresh] = sum.max_hs.try_emplace(s, v);
      if (!fresh) it->second = std::max(it->second, v);
    }
    sum.records.push_back(std::move(r));
    if (cb.on_record) cb.on_record(sum.records.back());
  };

  // Initial sample. A horizon at or before the start time is a no-op
  // run; the single record still carries the final flag.
  {
    DiagnosticsRecord r0 = instantaneous_record(state, spec, mon, bank);
    if (threshold_crossed(r0)) {
      r0.halt = HaltFlag::BlowupThreshold;
      sum.halt = HaltFlag::BlowupThreshold;
      emit(r0);
      sum.final_state = std::move(state);
      return sum;
    }
    if (state.time >= cfg.t_end - t_eps) {
      r0.halt = HaltFlag::Clean;
      sum.halt = HaltFlag::Clean;
      emit(r0);
      sum.final_state = std::move(state);
      return sum;
    }
    emit(r0);
  }

  while (true) {
    if (state.time >= cfg.t_end - t_eps) {
      sum.halt = HaltFlag::Clean;
      break;
    }
    if (sum.steps >= cfg.max_steps) {
      sum.halt = HaltFlag::MaxSteps;
      break;
    }
    double h = cfg.adaptive ? cfl_dt(state, cfg) : cfg.dt;
    h = std::min(h, cfg.t_end - state.time);
    state = (cfg.scheme == Scheme::Etdrk2)
                ? detail::step_etdrk2(state, spec, cfg, h, tab)
                : detail::step_rk2(state, spec, cfg, h);
    ++sum.steps;

    if (has_nonfinite(state)) {
      DiagnosticsRecord r;
      r.t = state.time;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.l2_energy = r.dissipation_rate = r.grad_u_linf = r.max_u = nan;
      r.x_sigma = r.y_sigma = r.besov_majorant = nan;
      for (double s : mon.s_list) r.hs_norms[s] = nan;
      r.halt = HaltFlag::BlowupNonFinite;
      sum.halt = HaltFlag::BlowupNonFinite;
      emit(r);
      break;
    }

    const bool done = state.time >= cfg.t_end - t_eps ||
                      sum.steps >= cfg.max_steps;
    if (done || sum.steps % mon.sample_interval == 0) {
      DiagnosticsRecord r = instantaneous_record(state, spec, mon, bank);
      if (threshold_crossed(r)) {
        r.halt = HaltFlag::BlowupThreshold;
        sum.halt = HaltFlag::BlowupThreshold;
        emit(r);
        break;
      }
      if (done) {
        sum.halt = (state.time >= cfg.t_end - t_eps) ? HaltFlag::Clean
                                                     : HaltFlag::MaxSteps;
        r.halt = sum.halt;
        emit(r);
        if (cb.on_snapshot && cb.snapshot_interval > 0 &&
            sum.steps % cb.snapshot_interval == 0)
          cb.on_snapshot(state, sum.steps, sum.bkm_integral);
        break;
      }
      emit(r);
      if (cb.on_snapshot && cb.snapshot_interval > 0 &&
          sum.steps % cb.snapshot_interval == 0)
        cb.on_snapshot(state, sum.steps, sum.bkm_integral);
    }
  }

  sum.final_state = std::move(state);
  return sum;
}

}  // namespace tcm
