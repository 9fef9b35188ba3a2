#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "tcm/operators.hpp"

namespace tcm {

namespace lp {

// C-infinity bump machinery: h vanishes to all orders at 0, so the
// smoothstep s is flat at both ends.
inline double bump_h(double t) { return t <= 0.0 ? 0.0 : std::exp(-1.0 / t); }

inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump_h(t);
  const double b = bump_h(1.0 - t);
  return a / (a + b);
}

// Radial low-pass profile: 1 on [0, 3/4], 0 on [4/3, inf), smooth and
// non-increasing in between.
inline double chi(double r) {
  constexpr double lo = 0.75;
  constexpr double hi = 4.0 / 3.0;
  if (r <= lo) return 1.0;
  if (r >= hi) return 0.0;
  return smoothstep((hi - r) / (hi - lo));
}

// Annular profile supported on (3/4, 8/3).
inline double phi(double r) { return chi(0.5 * r) - chi(r); }

}  // namespace lp

struct SemigroupDecay {
  std::vector<double> norms;
  double slope = 0.0;
};

// Dyadic partition tabulated on a grid: block -1 is the low-pass chi,
// block j >= 0 carries phi(2^-j |k|). j_max is chosen so the telescoped
// sum is identically 1 on every grid mode.
class DyadicFilterBank {
public:
  explicit DyadicFilterBank(const Grid2D& grid,
                            std::function<double(double)> profile = lp::chi)
      : grid_(grid) {
    validate_profile(profile);
    const double r_max = std::sqrt(2.0) * grid.k_max_axis();
    j_max_ = int(std::ceil(std::log2(r_max))) + 1;
    weights_.resize(j_max_ + 2);
    const int n = grid.n();
    for (int j = -1; j <= j_max_; ++j) {
      auto& w = weights_[j + 1];
      w.resize(grid.size());
      for (int ix = 0; ix < n; ++ix) {
        const double kx = grid.k(ix);
        for (int iy = 0; iy < n; ++iy) {
          const double ky = grid.k(iy);
          const double r = std::sqrt(kx * kx + ky * ky);
          w[grid.index(ix, iy)] =
              (j == -1) ? profile(r)
                        : profile(std::ldexp(r, -j - 1)) - profile(std::ldexp(r, -j));
        }
      }
    }
    partition_error_ = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double s = 0.0;
      for (const auto& w : weights_) s += w[i];
      partition_error_ = std::max(partition_error_, std::abs(s - 1.0));
    }
    if (partition_error_ > 1e-12)
      throw InvariantError("filter bank partition of unity off by " +
                           std::to_string(partition_error_));
    profile_ = std::move(profile);
  }

  const Grid2D& grid() const { return grid_; }
  int j_min() const { return -1; }
  int j_max() const { return j_max_; }
  double partition_error() const { return partition_error_; }
  double profile(double r) const { return profile_(r); }

  const std::vector<double>& weight(int j) const {
    require_j(j);
    return weights_[j + 1];
  }

  void require_j(int j) const {
    if (j < -1 || j > j_max_)
      throw DomainError("dyadic index " + std::to_string(j) +
                        " outside [-1, " + std::to_string(j_max_) + "]");
  }

private:
  static void validate_profile(const std::function<double(double)>& p) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 600; ++i) {
      const double r = 3.0 * i / 600.0;
      const double v = p(r);
      if (v < -1e-15 || v > 1.0 + 1e-15)
        throw InvariantError("profile leaves [0, 1] at r=" + std::to_string(r));
      if (v > prev + 1e-12)
        throw InvariantError("profile increases near r=" + std::to_string(r));
      if (r <= 0.75 && v < 1.0 - 1e-12)
        throw InvariantError("profile drops below 1 inside r<=3/4");
      if (r >= 4.0 / 3.0 && v > 1e-12)
        throw InvariantError("profile fails to vanish for r>=4/3");
      prev = v;
    }
  }

  Grid2D grid_;
  int j_max_ = 0;
  double partition_error_ = 0.0;
  std::vector<std::vector<double>> weights_;
  std::function<double(double)> profile_;
};

inline DyadicFilterBank build_filter_bank(
    const Grid2D& grid, std::function<double(double)> profile = lp::chi) {
  return DyadicFilterBank(grid, std::move(profile));
}

inline SpectralField dyadic_block(const DyadicFilterBank& bank, int j,
                                  const SpectralField& f) {
  require_same_grid(bank.grid(), f.grid, "dyadic_block");
  bank.require_j(j);
  const auto& w = bank.weight(j);
  SpectralField out = f;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= w[i];
  return out;
}

inline VectorField dyadic_block(const DyadicFilterBank& bank, int j,
                                const VectorField& f) {
  return {dyadic_block(bank, j, f.x), dyadic_block(bank, j, f.y)};
}

// Low-pass partial sum: multiplier chi(2^-j |k|), the telescoped sum of
// blocks below j.
inline SpectralField low_cutoff(const DyadicFilterBank& bank, int j,
                                const SpectralField& f) {
  require_same_grid(bank.grid(), f.grid, "low_cutoff");
  if (j < 0 || j > bank.j_max() + 1)
    throw DomainError("low_cutoff index " + std::to_string(j) +
                      " outside [0, " + std::to_string(bank.j_max() + 1) + "]");
  const Grid2D& grid = f.grid;
  SpectralField out = f;
  const int n = grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = grid.k(iy);
      const double r = std::sqrt(kx * kx + ky * ky);
      out(ix, iy) *= bank.profile(std::ldexp(r, -j));
    }
  }
  return out;
}

inline double block_l2(const DyadicFilterBank& bank, int j,
                       const SpectralField& f) {
  const auto& w = bank.weight(j);
  double s = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i)
    s += w[i] * w[i] * std::norm(f.coeffs[i]);
  return std::sqrt(s);
}

// Besov norm: l^r over j of 2^(j s) ||block_j f||_p. Only p = 2 and
// p = infinity are supported; other p would need physical-space
// quadrature rules this toolkit does not provide.
inline double besov_norm(const DyadicFilterBank& bank, const SpectralField& f,
                         double s, double p, double r) {
  require_same_grid(bank.grid(), f.grid, "besov_norm");
  const bool p_inf = std::isinf(p) && p > 0;
  if (!p_inf && p != 2.0)
    throw FeatureError("besov_norm supports p in {2, inf} only");
  if (std::isnan(r) || r < 1.0)
    throw DomainError("besov summability index r must satisfy r >= 1");
  const bool r_inf = std::isinf(r);
  double acc = 0.0;
  for (int j = -1; j <= bank.j_max(); ++j) {
    const double nj =
        p_inf ? linf_norm(dyadic_block(bank, j, f)) : block_l2(bank, j, f);
    const double term = nj * std::pow(2.0, j * s);
    if (r_inf)
      acc = std::max(acc, term);
    else
      acc += std::pow(term, r);
  }
  return r_inf ? acc : std::pow(acc, 1.0 / r);
}

// ||Lambda^kappa block_j f||_2 / (2^(j kappa) ||block_j f||_2). The
// input must already be annulus-supported; leakage past the closed
// annulus [3/4 2^j, 8/3 2^j] is a precondition violation.
inline double bernstein_ratio(const DyadicFilterBank& bank,
                              const SpectralField& f, int j, double kappa) {
  require_same_grid(bank.grid(), f.grid, "bernstein_ratio");
  if (j < 0 || j > bank.j_max())
    throw DomainError("bernstein_ratio needs an annular block, j in [0, " +
                      std::to_string(bank.j_max()) + "]");
  if (kappa < 0.0) throw DomainError("bernstein_ratio needs kappa >= 0");
  const Grid2D& grid = f.grid;
  const double lo = 0.75 * std::ldexp(1.0, j);
  const double hi = (8.0 / 3.0) * std::ldexp(1.0, j);
  const int n = grid.n();
  double total = 0.0, leaked = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    const double kx = grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = grid.k(iy);
      const double r = std::sqrt(kx * kx + ky * ky);
      const double m = std::norm(f(ix, iy));
      total += m;
      if (r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12)) leaked += m;
    }
  }
  if (total == 0.0) throw DomainError("bernstein_ratio on the zero field");
  if (leaked > 1e-24 * total)
    throw PreconditionError(
        "bernstein_ratio: spectrum leaks outside the dyadic annulus");

  const auto& w = bank.weight(j);
  double num = 0.0, den = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    const double kx = grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = grid.k(iy);
      const double ksq = kx * kx + ky * ky;
      const double ww = w[grid.index(ix, iy)];
      const double m = ww * ww * std::norm(f(ix, iy));
      den += m;
      num += m * std::pow(ksq, kappa);
    }
  }
  if (den == 0.0) throw DomainError("bernstein_ratio: block content is zero");
  return std::sqrt(num / den) / std::pow(2.0, j * kappa);
}

// Evolve block j of f under exp(-t Lambda^gamma) on a time grid and
// least-squares fit the log-norm decay slope.
inline SemigroupDecay semigroup_block_decay(const DyadicFilterBank& bank,
                                            const SpectralField& f, int j,
                                            double gamma,
                                            const std::vector<double>& t_grid) {
  require_same_grid(bank.grid(), f.grid, "semigroup_block_decay");
  if (j < 0 || j > bank.j_max())
    throw DomainError("semigroup_block_decay needs an annular block");
  if (!(gamma > 0.0)) throw DomainError("semigroup order gamma must be > 0");
  if (t_grid.size() < 2)
    throw DomainError("semigroup_block_decay needs at least two times");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
      throw DomainError("time grid must be non-negative and increasing");
  }
  const Grid2D& grid = f.grid;
  const auto& w = bank.weight(j);
  const int n = grid.n();

  SemigroupDecay out;
  out.norms.reserve(t_grid.size());
  for (double t : t_grid) {
    double s = 0.0;
    for (int ix = 0; ix < n; ++ix) {
      const double kx = grid.k(ix);
      for (int iy = 0; iy < n; ++iy) {
        const double ky = grid.k(iy);
        const double ksq = kx * kx + ky * ky;
        const double ww = w[grid.index(ix, iy)];
        if (ww == 0.0) continue;
        const double decay =
            (ksq == 0.0) ? 1.0 : std::exp(-t * std::pow(ksq, 0.5 * gamma));
        s += ww * ww * decay * decay * std::norm(f(ix, iy));
      }
    }
    out.norms.push_back(std::sqrt(s));
  }
  if (out.norms.front() == 0.0)
    throw DomainError("semigroup_block_decay on an empty block");
  for (double v : out.norms)
    if (v <= 0.0)
      throw DomainError("block decayed to zero; use a shorter time grid");

  // Least squares of ln(norm) against t.
  const std::size_t m = t_grid.size();
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double y = std::log(out.norms[i]);
    st += t_grid[i];
    sy += y;
    stt += t_grid[i] * t_grid[i];
    sty += t_grid[i] * y;
  }
  out.slope = (m * sty - st * sy) / (m * stt - st * st);
  return out;
}

// sum_j 2^(max(j,0)) ||block_j u||_inf, the gradient sup-norm majorant.
inline double besov_majorant_grad_linf(const DyadicFilterBank& bank,
                                       const VectorField& u) {
  require_same_grid(bank.grid(), u.grid(), "besov_majorant_grad_linf");
  double acc = 0.0;
  for (int j = -1; j <= bank.j_max(); ++j) {
    VectorField b = dyadic_block(bank, j, u);
    RealVec bx = to_physical(b.x), by = to_physical(b.y);
    double m = 0.0;
    for (std::size_t i = 0; i < bx.size(); ++i)
      m = std::max(m, bx[i] * bx[i] + by[i] * by[i]);
    acc += std::ldexp(std::sqrt(m), std::max(j, 0));
  }
  return acc;
}

}  // namespace tcm
