#pragma once

#include <array>
#include <optional>

#include "tcm/operators.hpp"

namespace tcm {

// Prognostic fields: u is the divergence-free barotropic velocity, v the
// baroclinic velocity (not divergence-free), theta the temperature.
struct TCMState {
  VectorField u;
  VectorField v;
  SpectralField theta;
  double time = 0.0;

  TCMState() = default;
  explicit TCMState(const Grid2D& g) : u(g), v(g), theta(g) {}
  const Grid2D& grid() const { return u.grid(); }
};

struct Tendency {
  VectorField u;
  VectorField v;
  SpectralField theta;

  Tendency() = default;
  explicit Tendency(const Grid2D& g) : u(g), v(g), theta(g) {}
};

enum class DissipationVariant { None, Fractional, LogSupercritical };

// Diagonal dissipation symbols entering the equations with a minus sign:
// u gets m_u, v gets m_v, theta is never dissipated. Exponent 0 means no
// dissipation at all (identically zero symbol), matching the convention
// that beta = 0 drops the term rather than inserting the identity.
class DissipationSpec {
public:
  static DissipationSpec none(const Grid2D& grid) {
    DissipationSpec d;
    d.variant_ = DissipationVariant::None;
    d.m_u_.assign(grid.size(), 0.0);
    d.m_v_.assign(grid.size(), 0.0);
    d.grid_ = grid;
    return d;
  }

  static DissipationSpec fractional(const Grid2D& grid, double alpha,
                                    double beta) {
    if (alpha < 0.0 || alpha > 2.0 || beta < 0.0 || beta > 2.0)
      throw DomainError("fractional orders must lie in [0, 2]");
    DissipationSpec d;
    d.variant_ = DissipationVariant::Fractional;
    d.alpha_ = alpha;
    d.beta_ = beta;
    d.grid_ = grid;
    d.m_u_ = exponent_table(grid, alpha);
    d.m_v_ = exponent_table(grid, beta);
    return d;
  }

  static DissipationSpec log_supercritical(const Grid2D& grid,
                                           const GFunction& g) {
    g.validate();
    DissipationSpec d;
    d.variant_ = DissipationVariant::LogSupercritical;
    d.alpha_ = 2.0;
    d.beta_ = 0.0;
    d.g_ = g;
    d.grid_ = grid;
    d.m_u_ = log_dissipation_multiplier(grid, g, /*squared=*/true).symbol;
    d.m_v_.assign(grid.size(), 0.0);
    return d;
  }

  DissipationVariant variant() const { return variant_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const GFunction& g() const { return g_; }
  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& m_u() const { return m_u_; }
  const std::vector<double>& m_v() const { return m_v_; }

  std::string describe() const {
    switch (variant_) {
      case DissipationVariant::None:
        return "none";
      case DissipationVariant::Fractional:
        return "fractional(alpha=" + std::to_string(alpha_) +
               ",beta=" + std::to_string(beta_) + ")";
      case DissipationVariant::LogSupercritical:
        return "log_supercritical(g=" + g_.name() + ")";
    }
    return "unknown";
  }

private:
  static std::vector<double> exponent_table(const Grid2D& grid, double order) {
    if (order == 0.0) return std::vector<double>(grid.size(), 0.0);
    return fractional_multiplier(grid, order).symbol;
  }

  DissipationVariant variant_ = DissipationVariant::None;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  GFunction g_;
  Grid2D grid_;
  std::vector<double> m_u_;
  std::vector<double> m_v_;
};

// (w . grad) f from alias-free products.
inline SpectralField advect(const VectorField& w, const SpectralField& f) {
  require_same_grid(w.grid(), f.grid, "advect");
  const Grid2D& grid = f.grid;
  RealVec wx = masked_physical(w.x), wy = masked_physical(w.y);
  VectorField gf = gradient(f);
  RealVec fx = masked_physical(gf.x), fy = masked_physical(gf.y);
  RealVec sum(grid.size());
  for (std::size_t i = 0; i < sum.size(); ++i)
    sum[i] = wx[i] * fx[i] + wy[i] * fy[i];
  SpectralField out = to_spectral(grid, sum);
  apply_dealias_mask(out);
  return out;
}

inline VectorField advect(const VectorField& w, const VectorField& f) {
  return {advect(w, f.x), advect(w, f.y)};
}

// (v . grad) u, the baroclinic stretching of the barotropic shear.
inline VectorField stretch(const VectorField& v, const VectorField& u) {
  return advect(v, u);
}

// div(v (x) v), component j = d_i (v_i v_j).
inline VectorField tensor_divergence(const VectorField& v) {
  const Grid2D& grid = v.grid();
  RealVec v1 = masked_physical(v.x), v2 = masked_physical(v.y);
  RealVec p11(grid.size()), p12(grid.size()), p22(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p11[i] = v1[i] * v1[i];
    p12[i] = v1[i] * v2[i];
    p22[i] = v2[i] * v2[i];
  }
  SpectralField s11 = to_spectral(grid, p11);
  SpectralField s12 = to_spectral(grid, p12);
  SpectralField s22 = to_spectral(grid, p22);
  apply_dealias_mask(s11);
  apply_dealias_mask(s12);
  apply_dealias_mask(s22);

  VectorField out(grid);
  const int n = grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = grid.k(iy);
      const Complex a = kx * s11(ix, iy) + ky * s12(ix, iy);
      const Complex b = kx * s12(ix, iy) + ky * s22(ix, iy);
      out.x(ix, iy) = Complex(-a.imag(), a.real());
      out.y(ix, iy) = Complex(-b.imag(), b.real());
    }
  }
  return out;
}

namespace detail {

inline void spectral_derivative(const SpectralField& f, int axis,
                                SpectralField& out) {
  const Grid2D& grid = f.grid;
  const int n = grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double kk = (axis == 0) ? kx : grid.k(iy);
      const Complex c = f(ix, iy);
      out(ix, iy) = Complex(-kk * c.imag(), kk * c.real());
    }
  }
}

inline RealVec masked_physical_derivative(const SpectralField& f, int axis,
                                          SpectralField& scratch) {
  spectral_derivative(f, axis, scratch);
  return masked_physical(scratch);
}

}  // namespace detail

// Everything in the tendency except the diagonal dissipation: projected
// quadratic terms for u, transport plus stretching plus the temperature
// gradient for v, transport plus div v for theta. This is the part the
// exponential integrator treats explicitly. Transforms for the shared
// velocity samples and gradients are batched here.
inline Tendency explicit_tendency(const TCMState& state) {
  const Grid2D& grid = state.grid();
  const std::size_t sz = grid.size();
  Tendency out(grid);
  SpectralField scratch(grid);

  RealVec u1 = masked_physical(state.u.x), u2 = masked_physical(state.u.y);
  RealVec v1 = masked_physical(state.v.x), v2 = masked_physical(state.v.y);

  const auto d = [&](const SpectralField& f, int axis) {
    return detail::masked_physical_derivative(f, axis, scratch);
  };
  RealVec du1x = d(state.u.x, 0), du1y = d(state.u.x, 1);
  RealVec du2x = d(state.u.y, 0), du2y = d(state.u.y, 1);
  RealVec dv1x = d(state.v.x, 0), dv1y = d(state.v.x, 1);
  RealVec dv2x = d(state.v.y, 0), dv2y = d(state.v.y, 1);
  RealVec dthx = d(state.theta, 0), dthy = d(state.theta, 1);

  RealVec work(sz);
  const auto combine = [&](const RealVec& a, const RealVec& gx,
                           const RealVec& b, const RealVec& gy) {
    for (std::size_t i = 0; i < sz; ++i)
      work[i] = a[i] * gx[i] + b[i] * gy[i];
    SpectralField f = to_spectral(grid, work);
    apply_dealias_mask(f);
    return f;
  };

  // u: -P[(u.grad)u + div(v(x)v)]
  {
    VectorField nu(grid);
    nu.x = combine(u1, du1x, u2, du1y);
    nu.y = combine(u1, du2x, u2, du2y);
    VectorField vv = tensor_divergence(state.v);
    axpy(1.0, vv, nu);
    leray_project(nu);
    for (std::size_t i = 0; i < sz; ++i) {
      out.u.x.coeffs[i] = -nu.x.coeffs[i];
      out.u.y.coeffs[i] = -nu.y.coeffs[i];
    }
  }

  // v: -(u.grad)v - (v.grad)u - grad theta
  {
    SpectralField a1 = combine(u1, dv1x, u2, dv1y);
    SpectralField a2 = combine(u1, dv2x, u2, dv2y);
    SpectralField b1 = combine(v1, du1x, v2, du1y);
    SpectralField b2 = combine(v1, du2x, v2, du2y);
    const Grid2D& g = grid;
    const int n = g.n();
    for (int ix = 0; ix < n; ++ix) {
      const double kx = g.k(ix);
      for (int iy = 0; iy < n; ++iy) {
        const double ky = g.k(iy);
        const Complex th = state.theta(ix, iy);
        const Complex ith(-th.imag(), th.real());
        out.v.x(ix, iy) = -a1(ix, iy) - b1(ix, iy) - kx * ith;
        out.v.y(ix, iy) = -a2(ix, iy) - b2(ix, iy) - ky * ith;
      }
    }
  }

  // theta: -(u.grad)theta - div v
  {
    SpectralField adv = combine(u1, dthx, u2, dthy);
    SpectralField dv = divergence(state.v);
    for (std::size_t i = 0; i < sz; ++i)
      out.theta.coeffs[i] = -adv.coeffs[i] - dv.coeffs[i];
  }

  return out;
}

inline bool has_nonfinite(const SpectralField& f) {
  for (const auto& c : f.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return true;
  return false;
}

inline bool has_nonfinite(const TCMState& s) {
  return has_nonfinite(s.u.x) || has_nonfinite(s.u.y) ||
         has_nonfinite(s.v.x) || has_nonfinite(s.v.y) ||
         has_nonfinite(s.theta);
}

// Full right-hand side including dissipation. Refuses non-finite input
// so a blown-up state is flagged where it is detected instead of
// propagating quietly.
inline Tendency rhs(const TCMState& state, const DissipationSpec& spec) {
  if (state.grid() != spec.grid())
    throw ShapeError("rhs: dissipation tables built for a different grid");
  if (has_nonfinite(state))
    throw InvariantError("rhs: state contains non-finite values (blow-up)");
  Tendency t = explicit_tendency(state);
  const auto& mu = spec.m_u();
  const auto& mv = spec.m_v();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    t.u.x.coeffs[i] -= mu[i] * state.u.x.coeffs[i];
    t.u.y.coeffs[i] -= mu[i] * state.u.y.coeffs[i];
    t.v.x.coeffs[i] -= mv[i] * state.v.x.coeffs[i];
    t.v.y.coeffs[i] -= mv[i] * state.v.y.coeffs[i];
  }
  return t;
}

// || L_u u ||^2 + || L_v v ||^2 with the equation symbols; this is the
// instantaneous decay rate of the l2 energy.
inline double dissipation_rate(const TCMState& state,
                               const DissipationSpec& spec) {
  const auto& mu = spec.m_u();
  const auto& mv = spec.m_v();
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    s += mu[i] * (std::norm(state.u.x.coeffs[i]) +
                  std::norm(state.u.y.coeffs[i])) +
         mv[i] * (std::norm(state.v.x.coeffs[i]) +
                  std::norm(state.v.y.coeffs[i]));
  return s;
}

// Pressure from the divergence of the unprojected quadratic terms:
// -Laplacian p = div[(u.grad)u + div(v(x)v)]. Zero mean. A materially
// non-divergence-free u makes the recovered pressure meaningless, so the
// measured relative divergence is reported through div_u_rel.
inline SpectralField recover_pressure(const TCMState& state,
                                      double* div_u_rel = nullptr) {
  if (div_u_rel) *div_u_rel = divergence_rel(state.u);
  VectorField n = advect(state.u, state.u);
  axpy(1.0, tensor_divergence(state.v), n);
  return invert_neg_laplacian(divergence(n));
}

}  // namespace tcm
