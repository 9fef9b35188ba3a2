#pragma once

#include <cstdint>
#include <random>

#include "tcm/model.hpp"

namespace tcm {

// u = (sin x1 cos x2, -cos x1 sin x2), v = 0, theta = 0. Exactly
// divergence free and supported on |k_int| = 1 modes; peak speed 1.
inline TCMState taylor_green_state(const Grid2D& grid) {
  TCMState s(grid);
  const int n = grid.n();
  const double h = grid.length() / n;
  const double scale = 2.0 * std::numbers::pi / grid.length();
  RealVec u1(grid.size()), u2(grid.size());
  for (int ix = 0; ix < n; ++ix) {
    const double x = scale * ix * h;
    for (int iy = 0; iy < n; ++iy) {
      const double y = scale * iy * h;
      u1[grid.index(ix, iy)] = std::sin(x) * std::cos(y);
      u2[grid.index(ix, iy)] = -std::cos(x) * std::sin(y);
    }
  }
  s.u.x = to_spectral(grid, u1);
  s.u.y = to_spectral(grid, u2);
  return s;
}

struct RandomSmoothParams {
  std::uint64_t seed = 1;
  // Target log-log slope of the shell energy spectrum.
  double spectrum_slope = -3.0;
  // Highest populated integer shell; must stay within the dealias band.
  int cutoff = 8;
  // Each field is rescaled to this peak pointwise magnitude.
  double amplitude = 1.0;
};

namespace detail {

// Engine bits mapped to [0, 1) explicitly; the standard distributions
// are implementation defined and would break cross-build determinism.
inline double uniform01(std::mt19937_64& eng) {
  return double(eng() >> 11) * 0x1.0p-53;
}

inline void fill_random_shells(SpectralField& f, std::mt19937_64& eng,
                               double slope, int cutoff) {
  const Grid2D& grid = f.grid;
  const int n = grid.n();
  // Per-mode amplitude r^((slope-1)/2) so that a shell at radius r,
  // holding O(r) lattice modes, carries energy ~ r^slope.
  const double q = 0.5 * (slope - 1.0);
  for (int ix = 0; ix < n; ++ix) {
    const double ki = grid.k_int(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double kj = grid.k_int(iy);
      const double r = std::sqrt(ki * ki + kj * kj);
      if (r == 0.0 || r > cutoff) continue;
      const double phase = 2.0 * std::numbers::pi * uniform01(eng);
      const double amp = std::pow(r, q);
      f(ix, iy) = Complex(amp * std::cos(phase), amp * std::sin(phase));
    }
  }
  hermitian_symmetrize(f);
}

}  // namespace detail

// Band-limited random fields, bitwise reproducible for a given seed and
// grid. u is projected before its amplitude normalization.
inline TCMState random_smooth_state(const Grid2D& grid,
                                    const RandomSmoothParams& p) {
  if (p.cutoff < 1 || p.cutoff > grid.dealias_cut())
    throw DomainError("random_smooth cutoff must lie in [1, n/3], got " +
                      std::to_string(p.cutoff));
  if (!(p.amplitude > 0.0))
    throw DomainError("random_smooth amplitude must be positive");
  TCMState s(grid);
  std::mt19937_64 eng(p.seed);
  detail::fill_random_shells(s.u.x, eng, p.spectrum_slope, p.cutoff);
  detail::fill_random_shells(s.u.y, eng, p.spectrum_slope, p.cutoff);
  detail::fill_random_shells(s.v.x, eng, p.spectrum_slope, p.cutoff);
  detail::fill_random_shells(s.v.y, eng, p.spectrum_slope, p.cutoff);
  detail::fill_random_shells(s.theta, eng, p.spectrum_slope, p.cutoff);
  leray_project(s.u);

  const auto rescale_vec = [&](VectorField& w) {
    const double m = max_speed(w);
    if (m > 0.0) {
      const double c = p.amplitude / m;
      for (auto& z : w.x.coeffs) z *= c;
      for (auto& z : w.y.coeffs) z *= c;
    }
  };
  rescale_vec(s.u);
  rescale_vec(s.v);
  const double mt = linf_norm(s.theta);
  if (mt > 0.0) {
    const double c = p.amplitude / mt;
    for (auto& z : s.theta.coeffs) z *= c;
  }
  return s;
}

}  // namespace tcm
