#pragma once

#include "tcm/multipliers.hpp"

namespace tcm {

// d/dx_j in Fourier space: multiply by i*k_j.
inline VectorField gradient(const SpectralField& f) {
  VectorField g(f.grid);
  const int n = f.grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = f.grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = f.grid.k(iy);
      const Complex c = f(ix, iy);
      const Complex ic(-c.imag(), c.real());
      g.x(ix, iy) = kx * ic;
      g.y(ix, iy) = ky * ic;
    }
  }
  return g;
}

inline SpectralField divergence(const VectorField& w) {
  require_same_grid(w.x.grid, w.y.grid, "divergence");
  SpectralField d(w.grid());
  const int n = d.grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = d.grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = d.grid.k(iy);
      const Complex cx = w.x(ix, iy), cy = w.y(ix, iy);
      const Complex s = kx * cx + ky * cy;
      d(ix, iy) = Complex(-s.imag(), s.real());
    }
  }
  return d;
}

// Divergence-free projection I - k k^T / |k|^2; the k = 0 mode passes
// through unchanged.
inline void leray_project(VectorField& w) {
  require_same_grid(w.x.grid, w.y.grid, "leray_project");
  const int n = w.grid().n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = w.grid().k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = w.grid().k(iy);
      const double ksq = kx * kx + ky * ky;
      if (ksq == 0.0) continue;
      const Complex dot = (kx * w.x(ix, iy) + ky * w.y(ix, iy)) / ksq;
      w.x(ix, iy) -= kx * dot;
      w.y(ix, iy) -= ky * dot;
    }
  }
}

inline VectorField leray_projected(VectorField w) {
  leray_project(w);
  return w;
}

// ||div w||_2 / ||w||_2, the scale used by the projection tests.
inline double divergence_rel(const VectorField& w) {
  const double nw = l2_norm(w);
  if (nw == 0.0) return 0.0;
  return l2_norm(divergence(w)) / nw;
}

// Solve -Laplacian p = f; the k = 0 mode of the result is 0.
inline SpectralField invert_neg_laplacian(const SpectralField& f) {
  SpectralField p(f.grid);
  const int n = f.grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = f.grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = f.grid.k(iy);
      const double ksq = kx * kx + ky * ky;
      p(ix, iy) = (ksq == 0.0) ? Complex(0.0) : f(ix, iy) / ksq;
    }
  }
  return p;
}

inline bool mode_in_dealias_band(const Grid2D& grid, int ix, int iy) {
  const int cut = grid.dealias_cut();
  return std::abs(grid.k_int(ix)) <= cut && std::abs(grid.k_int(iy)) <= cut;
}

inline void apply_dealias_mask(SpectralField& f) {
  const int n = f.grid.n();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      if (!mode_in_dealias_band(f.grid, ix, iy)) f(ix, iy) = 0.0;
}

inline void apply_dealias_mask(VectorField& w) {
  apply_dealias_mask(w.x);
  apply_dealias_mask(w.y);
}

// Physical samples of the mask-truncated field. Products are formed from
// these so that quadratic aliases never reach retained modes: on a
// power-of-two grid 3 * (n/3) <= n - 1.
inline RealVec masked_physical(const SpectralField& f) {
  SpectralField t = f;
  apply_dealias_mask(t);
  return to_physical(t);
}

// Transform a pointwise product back to coefficients and re-mask.
inline SpectralField product_to_spectral(const Grid2D& grid, const RealVec& a,
                                         const RealVec& b) {
  if (a.size() != grid.size() || b.size() != grid.size())
    throw ShapeError("product_to_spectral: sample arrays do not match grid");
  RealVec prod(grid.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a[i] * b[i];
  SpectralField f = to_spectral(grid, prod);
  apply_dealias_mask(f);
  return f;
}

// Alias-free product of two scalar fields; equals the exact convolution
// of the mask-truncated coefficient arrays.
inline SpectralField dealiased_product(const SpectralField& f,
                                       const SpectralField& g) {
  require_same_grid(f.grid, g.grid, "dealiased_product");
  return product_to_spectral(f.grid, masked_physical(f), masked_physical(g));
}

}  // namespace tcm
