#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

#include "tcm/grid.hpp"

namespace tcm {

// Scalar field stored as Fourier coefficients, row-major over
// (kx index, ky index). Forward transforms carry the 1/n^2 factor, so
// coeffs[0] is the mean and f(x) = sum_k c(k) exp(i k.x).
struct SpectralField {
  Grid2D grid;
  ComplexVec coeffs;

  SpectralField() = default;
  explicit SpectralField(const Grid2D& g) : grid(g), coeffs(g.size()) {}

  Complex& operator()(int ix, int iy) { return coeffs[grid.index(ix, iy)]; }
  const Complex& operator()(int ix, int iy) const {
    return coeffs[grid.index(ix, iy)];
  }
};

struct VectorField {
  SpectralField x, y;

  VectorField() = default;
  explicit VectorField(const Grid2D& g) : x(g), y(g) {}
  VectorField(SpectralField fx, SpectralField fy)
      : x(std::move(fx)), y(std::move(fy)) {}
  const Grid2D& grid() const { return x.grid; }
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b,
                              const char* where) {
  if (a != b)
    throw ShapeError(std::string(where) + ": operands live on different grids");
}

// Physical samples -> coefficients. Input is row-major over (x, y) with
// exactly n^2 entries.
inline SpectralField to_spectral(const Grid2D& grid,
                                 std::span<const double> physical) {
  if (physical.size() != grid.size())
    throw ShapeError("to_spectral: expected " + std::to_string(grid.size()) +
                     " samples, got " + std::to_string(physical.size()));
  SpectralField f(grid);
  ComplexVec buf(grid.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = physical[i];
  grid.plans().forward(buf.data(), f.coeffs.data());
  const double inv = 1.0 / double(grid.size());
  for (auto& c : f.coeffs) c *= inv;
  return f;
}

inline RealVec to_physical(const SpectralField& f) {
  ComplexVec buf(f.grid.size());
  f.grid.plans().backward(f.coeffs.data(), buf.data());
  RealVec out(f.grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return out;
}

// Largest deviation from conjugate symmetry c(-k) = conj(c(k)).
inline double hermitian_error(const SpectralField& f) {
  const int n = f.grid.n();
  double worst = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    const int jx = (n - ix) % n;
    for (int iy = 0; iy < n; ++iy) {
      const int jy = (n - iy) % n;
      const Complex d = f(ix, iy) - std::conj(f(jx, jy));
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

// Project onto the conjugate-symmetric subspace; self-paired modes keep
// only their real part. Used after direct spectral construction.
inline void hermitian_symmetrize(SpectralField& f) {
  const int n = f.grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const int jx = (n - ix) % n;
    for (int iy = 0; iy < n; ++iy) {
      const int jy = (n - iy) % n;
      if (ix == jx && iy == jy) {
        f(ix, iy) = Complex(f(ix, iy).real(), 0.0);
        continue;
      }
      if (std::make_pair(ix, iy) < std::make_pair(jx, jy)) {
        const Complex avg = 0.5 * (f(ix, iy) + std::conj(f(jx, jy)));
        f(ix, iy) = avg;
        f(jx, jy) = std::conj(avg);
      }
    }
  }
}

// L^2 inner product normalized per unit area: sum_k f(k) conj(g(k)),
// which equals (1/L^2) * integral f g for real fields.
inline double inner(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid, g.grid, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i)
    s += f.coeffs[i].real() * g.coeffs[i].real() +
         f.coeffs[i].imag() * g.coeffs[i].imag();
  return s;
}

inline double inner(const VectorField& f, const VectorField& g) {
  return inner(f.x, g.x) + inner(f.y, g.y);
}

inline double l2_norm_sq(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs) s += std::norm(c);
  return s;
}

inline double l2_norm_sq(const VectorField& f) {
  return l2_norm_sq(f.x) + l2_norm_sq(f.y);
}

inline double l2_norm(const SpectralField& f) { return std::sqrt(l2_norm_sq(f)); }
inline double l2_norm(const VectorField& f) { return std::sqrt(l2_norm_sq(f)); }

inline double max_abs_coeff(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs) m = std::max(m, std::abs(c));
  return m;
}

inline double linf_norm(const SpectralField& f) {
  RealVec p = to_physical(f);
  double m = 0.0;
  for (double v : p) m = std::max(m, std::abs(v));
  return m;
}

// Pointwise Euclidean speed maximum over the grid.
inline double max_speed(const VectorField& w) {
  RealVec px = to_physical(w.x), py = to_physical(w.y);
  double m = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i)
    m = std::max(m, px[i] * px[i] + py[i] * py[i]);
  return std::sqrt(m);
}

inline SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  SpectralField r = a;
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
  return r;
}

inline SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  SpectralField r = a;
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= b.coeffs[i];
  return r;
}

inline SpectralField operator*(double s, const SpectralField& a) {
  SpectralField r = a;
  for (auto& c : r.coeffs) c *= s;
  return r;
}

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a.x + b.x, a.y + b.y};
}

inline VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a.x - b.x, a.y - b.y};
}

inline VectorField operator*(double s, const VectorField& a) {
  return {s * a.x, s * a.y};
}

inline void axpy(double a, const SpectralField& x, SpectralField& y) {
  require_same_grid(x.grid, y.grid, "axpy");
  for (std::size_t i = 0; i < y.coeffs.size(); ++i)
    y.coeffs[i] += a * x.coeffs[i];
}

inline void axpy(double a, const VectorField& x, VectorField& y) {
  axpy(a, x.x, y.x);
  axpy(a, x.y, y.y);
}

inline double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "max_coeff_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
  return m;
}

inline double max_coeff_diff(const VectorField& a, const VectorField& b) {
  return std::max(max_coeff_diff(a.x, b.x), max_coeff_diff(a.y, b.y));
}

}  // namespace tcm
