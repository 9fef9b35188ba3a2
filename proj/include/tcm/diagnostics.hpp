#pragma once

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "tcm/littlewood_paley.hpp"
#include "tcm/model.hpp"

namespace tcm {

enum class HaltFlag : int {
  Running = 0,
  Clean = 1,
  BlowupNonFinite = 2,
  BlowupThreshold = 3,
  MaxSteps = 4,
};

struct RegularityMonitor {
  double sigma = 0.5;
  std::vector<double> s_list = {1.0, 2.0};
  double blowup_threshold = 1e12;
  int sample_interval = 10;

  void validate() const {
    if (!(sigma > 0.0) || !(sigma < 1.0))
      throw DomainError("monitor sigma must lie in (0, 1)");
    if (!(blowup_threshold > 0.0))
      throw DomainError("blowup threshold must be positive");
    if (sample_interval < 1)
      throw DomainError("sample interval must be >= 1");
  }
};

struct DiagnosticsRecord {
  double t = 0.0;
  double l2_energy = 0.0;
  double dissipation_rate = 0.0;
  double energy_balance_residual = 0.0;
  double cancellation_r1 = 0.0;
  double cancellation_r2 = 0.0;
  double grad_u_linf = 0.0;
  double bkm_integral = 0.0;
  double x_sigma = 0.0;
  double y_sigma = 0.0;
  std::map<double, double> hs_norms;  // s -> ||(u, v, theta)||_{H^s}
  double besov_majorant = 0.0;
  double max_u = 0.0;
  double mean_v_x = 0.0;
  double mean_v_y = 0.0;
  double div_u_rel = 0.0;
  HaltFlag halt = HaltFlag::Running;
};

// (sum_{k != 0} |k|^{2s} |f(k)|^2 [+ |f(0)|^2 when s >= 0])^{1/2}.
// The mean enters with unit weight; for s < 0 it is excluded.
inline double sobolev_norm(const SpectralField& f, double s) {
  double acc = 0.0;
  const int n = f.grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = f.grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = f.grid.k(iy);
      const double ksq = kx * kx + ky * ky;
      const double m = std::norm(f(ix, iy));
      if (ksq == 0.0) {
        if (s >= 0.0) acc += m;
      } else {
        acc += std::pow(ksq, s) * m;
      }
    }
  }
  return std::sqrt(acc);
}

inline double sobolev_norm(const VectorField& w, double s) {
  const double a = sobolev_norm(w.x, s), b = sobolev_norm(w.y, s);
  return std::sqrt(a * a + b * b);
}

inline double sobolev_norm_triple(const TCMState& st, double s) {
  const double a = sobolev_norm(st.u, s);
  const double b = sobolev_norm(st.v, s);
  const double c = sobolev_norm(st.theta, s);
  return std::sqrt(a * a + b * b + c * c);
}

// X = ||L^sigma u||^2 + ||L^sigma v||^2 + ||L^sigma theta||^2 and
// Y = ||(root dissipation) L^sigma u||^2, where the root symbol squared
// is the u equation symbol. sigma restricted to (0, 1).
inline std::pair<double, double> sigma_energies(const TCMState& st,
                                                const DissipationSpec& spec,
                                                double sigma) {
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw DomainError("sigma_energies needs sigma in (0, 1)");
  const Grid2D& grid = st.grid();
  const auto& mu = spec.m_u();
  const int n = grid.n();
  double x = 0.0, y = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    const double kx = grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = grid.k(iy);
      const double ksq = kx * kx + ky * ky;
      if (ksq == 0.0) continue;
      const std::size_t i = grid.index(ix, iy);
      const double w = std::pow(ksq, sigma);
      const double uu =
          std::norm(st.u.x.coeffs[i]) + std::norm(st.u.y.coeffs[i]);
      const double vv =
          std::norm(st.v.x.coeffs[i]) + std::norm(st.v.y.coeffs[i]);
      x += w * (uu + vv + std::norm(st.theta.coeffs[i]));
      y += mu[i] * w * uu;
    }
  }
  return {x, y};
}

// Scale-free residuals of the two quadratic pairings whose cancellation
// drives the energy law.
inline std::pair<double, double> cancellation_residual(const TCMState& st) {
  const double r1_raw = inner(tensor_divergence(st.v), st.u) +
                        inner(stretch(st.v, st.u), st.v);
  const double r2_raw =
      inner(gradient(st.theta), st.v) + inner(divergence(st.v), st.theta);
  const double r1 =
      std::abs(r1_raw) / (1.0 + l2_norm_sq(st.v) * sobolev_norm(st.u, 1.0));
  const double r2 =
      std::abs(r2_raw) / (1.0 + l2_norm(st.v) * l2_norm(st.theta));
  return {r1, r2};
}

inline double l2_energy(const TCMState& st) {
  return 0.5 * (l2_norm_sq(st.u) + l2_norm_sq(st.v) + l2_norm_sq(st.theta));
}

inline double grad_u_linf(const TCMState& st) {
  VectorField gx = gradient(st.u.x);
  VectorField gy = gradient(st.u.y);
  RealVec a = to_physical(gx.x), b = to_physical(gx.y);
  RealVec c = to_physical(gy.x), d = to_physical(gy.y);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, a[i] * a[i] + b[i] * b[i] + c[i] * c[i] + d[i] * d[i]);
  return std::sqrt(m);
}

// One trapezoid increment of the accumulated sup-gradient integral.
inline double bkm_increment(double t_prev, double g_prev, double t,
                            double g) {
  return 0.5 * (t - t_prev) * (g_prev + g);
}

// Residual series of the sampled energy balance: [E_i - E_{i-1}]/dt plus
// the trapezoid of the dissipation rate, relative to E at the first
// record. Fewer than two records give an empty series.
inline std::vector<double> energy_balance_series(
    const std::vector<DiagnosticsRecord>& recs) {
  std::vector<double> out;
  if (recs.size() < 2) return out;
  const double e0 = recs.front().l2_energy > 0.0 ? recs.front().l2_energy : 1.0;
  out.reserve(recs.size() - 1);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const double dt = recs[i].t - recs[i - 1].t;
    const double dE = (recs[i].l2_energy - recs[i - 1].l2_energy) / dt;
    const double diss =
        0.5 * (recs[i].dissipation_rate + recs[i - 1].dissipation_rate);
    out.push_back((dE + diss) / e0);
  }
  return out;
}

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double eps,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps,
                              depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double eps) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, 48);
}

}  // namespace detail

// Partial integral from e to M of dtau / (tau sqrt(ln tau) g(tau)).
// The substitution tau = exp(w^2) removes the endpoint singularity and
// turns the integrand into 2 / g(exp(w^2)) on [1, sqrt(ln M)]. For
// g = 1 the closed form is 2 (sqrt(ln M) - 1).
inline double growth_condition_partial(const GFunction& g, double big_m) {
  const double e = std::numbers::e;
  if (!(big_m > e))
    throw DomainError("growth_condition_partial needs an upper limit > e");
  const double w_end = std::sqrt(std::log(big_m));
  const auto integrand = [&g](double w) {
    return 2.0 / g(std::exp(w * w));
  };
  const double eps = 1e-12 * std::max(1.0, w_end - 1.0);
  return detail::adaptive_simpson(integrand, 1.0, w_end, eps);
}

// Instantaneous part of a record; the caller supplies the accumulated
// bkm integral and the finite-difference energy residual.
inline DiagnosticsRecord instantaneous_record(const TCMState& st,
                                              const DissipationSpec& spec,
                                              const RegularityMonitor& mon,
                                              const DyadicFilterBank& bank) {
  DiagnosticsRecord r;
  r.t = st.time;
  r.l2_energy = l2_energy(st);
  r.dissipation_rate = dissipation_rate(st, spec);
  const auto [c1, c2] = cancellation_residual(st);
  r.cancellation_r1 = c1;
  r.cancellation_r2 = c2;
  r.grad_u_linf = grad_u_linf(st);
  const auto [x, y] = sigma_energies(st, spec, mon.sigma);
  r.x_sigma = x;
  r.y_sigma = y;
  for (double s : mon.s_list) r.hs_norms[s] = sobolev_norm_triple(st, s);
  r.besov_majorant = besov_majorant_grad_linf(bank, st.u);
  r.max_u = max_speed(st.u);
  r.mean_v_x = st.v.x.coeffs[0].real();
  r.mean_v_y = st.v.y.coeffs[0].real();
  r.div_u_rel = divergence_rel(st.u);
  return r;
}

// Fixed-schema CSV sink. Columns depend only on the monitored s list;
// every float is written as %.17g so reruns are byte-identical.
class DiagnosticsCsv {
public:
  DiagnosticsCsv(std::ostream& os, const RegularityMonitor& mon)
      : os_(os), s_list_(mon.s_list) {}

  void write_header() {
    os_ << "t,l2_energy,dissipation_rate,energy_residual,cancel_r1,cancel_r2,"
           "grad_u_linf,bkm_integral,x_sigma,y_sigma";
    for (double s : s_list_) os_ << ",h" << fmt(s);
    os_ << ",besov_majorant,max_u,mean_v_x,mean_v_y,div_u_rel,halt\n";
  }

  void write_row(const DiagnosticsRecord& r) {
    os_ << fmt(r.t) << ',' << fmt(r.l2_energy) << ','
        << fmt(r.dissipation_rate) << ',' << fmt(r.energy_balance_residual)
        << ',' << fmt(r.cancellation_r1) << ',' << fmt(r.cancellation_r2)
        << ',' << fmt(r.grad_u_linf) << ',' << fmt(r.bkm_integral) << ','
        << fmt(r.x_sigma) << ',' << fmt(r.y_sigma);
    for (double s : s_list_) {
      const auto it = r.hs_norms.find(s);
      os_ << ',' << fmt(it == r.hs_norms.end() ? 0.0 : it->second);
    }
    os_ << ',' << fmt(r.besov_majorant) << ',' << fmt(r.max_u) << ','
        << fmt(r.mean_v_x) << ',' << fmt(r.mean_v_y) << ','
        << fmt(r.div_u_rel) << ',' << int(r.halt) << '\n';
  }

  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

private:
  std::ostream& os_;
  std::vector<double> s_list_;
};

}  // namespace tcm
