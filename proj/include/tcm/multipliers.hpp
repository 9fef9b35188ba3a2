#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "tcm/field.hpp"

namespace tcm {

// Symbol of (-Laplacian)^gamma: |k|^(2 gamma), defined as 0 at k = 0.
inline double fractional_symbol_ksq(double gamma, double ksq) {
  if (gamma < 0.0)
    throw DomainError("fractional order must be nonnegative, got " +
                      std::to_string(gamma));
  if (ksq == 0.0) return 0.0;
  return std::pow(ksq, gamma);
}

inline double fractional_symbol(double gamma, double kx, double ky) {
  return fractional_symbol_ksq(gamma, kx * kx + ky * ky);
}

// Slowly growing radial weight g(tau) used to weaken the Laplacian.
// Required to be non-decreasing with g >= 1; validate() samples a log
// range and the named kinds satisfy it by construction.
class GFunction {
public:
  enum class Kind {
    Constant1,
    SqrtLog,
    SqrtLogLogLog,
    SqrtLogLogLogLogLog,
    Custom,
  };

  GFunction() : kind_(Kind::Constant1) {}

  static GFunction constant1() { return GFunction(Kind::Constant1); }
  static GFunction sqrt_log() { return GFunction(Kind::SqrtLog); }
  static GFunction sqrt_log_log_log() { return GFunction(Kind::SqrtLogLogLog); }
  static GFunction sqrt_log_log_log_log_log() {
    return GFunction(Kind::SqrtLogLogLogLogLog);
  }

  // Piecewise-linear table of (tau, g) pairs, clamped outside its range.
  static GFunction custom(std::vector<std::pair<double, double>> table) {
    GFunction g(Kind::Custom);
    if (table.size() < 2)
      throw DomainError("custom g table needs at least two points");
    std::sort(table.begin(), table.end());
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
      if (table[i].first == table[i + 1].first)
        throw DomainError("custom g table has duplicate abscissa " +
                          std::to_string(table[i].first));
      if (table[i].second > table[i + 1].second)
        throw InvariantError("custom g table is decreasing at tau=" +
                             std::to_string(table[i + 1].first));
    }
    for (const auto& [tau, val] : table) {
      (void)tau;
      if (val < 1.0)
        throw InvariantError("custom g table dips below 1");
    }
    g.table_ = std::move(table);
    return g;
  }

  Kind kind() const { return kind_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Constant1: return "constant1";
      case Kind::SqrtLog: return "sqrt_log";
      case Kind::SqrtLogLogLog: return "sqrt_log_log_log";
      case Kind::SqrtLogLogLogLogLog: return "sqrt_log_log_log_log_log";
      case Kind::Custom: return "custom";
    }
    return "unknown";
  }

  double operator()(double tau) const {
    const double e = std::numbers::e;
    switch (kind_) {
      case Kind::Constant1:
        return 1.0;
      case Kind::SqrtLog:
        return std::sqrt(std::log(e + tau));
      case Kind::SqrtLogLogLog: {
        const double l1 = std::log(e + tau);
        return std::sqrt(l1) * std::log(e + l1);
      }
      case Kind::SqrtLogLogLogLogLog: {
        const double l1 = std::log(e + tau);
        const double l2 = std::log(e + l1);
        return std::sqrt(l1) * l2 * std::log(e + l2);
      }
      case Kind::Custom:
        return interpolate(tau);
    }
    return 1.0;
  }

  // Sampled check of g >= 1 and monotonicity over [0, tau_max].
  void validate(double tau_max = 1.0e6, int samples = 400) const {
    double prev = -1.0;
    for (int i = 0; i <= samples; ++i) {
      const double tau =
          (i == 0) ? 0.0 : std::exp(std::log(tau_max) * double(i) / samples);
      const double val = (*this)(tau);
      if (val < 1.0)
        throw InvariantError("g(" + std::to_string(tau) + ") = " +
                             std::to_string(val) + " is below 1");
      if (val < prev - 1e-12 * std::max(1.0, prev))
        throw InvariantError("g is decreasing near tau=" + std::to_string(tau));
      prev = val;
    }
  }

private:
  explicit GFunction(Kind k) : kind_(k) {}

  double interpolate(double tau) const {
    if (tau <= table_.front().first) return table_.front().second;
    if (tau >= table_.back().first) return table_.back().second;
    auto hi = std::upper_bound(
        table_.begin(), table_.end(), tau,
        [](double t, const std::pair<double, double>& p) { return t < p.first; });
    auto lo = hi - 1;
    const double w = (tau - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }

  Kind kind_;
  std::vector<std::pair<double, double>> table_;
};

// Symbol of the weakened dissipation operator L: |k|^2 / g(|k|), or its
// square when the operator enters the equation twice. 0 at k = 0.
inline double log_dissipation_symbol_ksq(const GFunction& g, double ksq,
                                         bool squared) {
  if (ksq == 0.0) return 0.0;
  const double gval = g(std::sqrt(ksq));
  if (gval < 1.0)
    throw InvariantError("g(|k|) = " + std::to_string(gval) + " is below 1");
  const double m = ksq / gval;
  return squared ? m * m : m;
}

inline double log_dissipation_symbol(const GFunction& g, double kx, double ky,
                                     bool squared) {
  return log_dissipation_symbol_ksq(g, kx * kx + ky * ky, squared);
}

// Radial real multiplier tabulated over the grid.
struct FourierMultiplier {
  std::string name;
  std::vector<double> symbol;
};

template <typename SymbolFn>
FourierMultiplier tabulate_multiplier(const Grid2D& grid, std::string name,
                                      SymbolFn&& fn) {
  FourierMultiplier m;
  m.name = std::move(name);
  m.symbol.resize(grid.size());
  const int n = grid.n();
  for (int ix = 0; ix < n; ++ix) {
    const double kx = grid.k(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = grid.k(iy);
      m.symbol[grid.index(ix, iy)] = fn(kx * kx + ky * ky);
    }
  }
  return m;
}

inline FourierMultiplier fractional_multiplier(const Grid2D& grid,
                                               double gamma) {
  return tabulate_multiplier(
      grid, "fractional(" + std::to_string(gamma) + ")",
      [gamma](double ksq) { return fractional_symbol_ksq(gamma, ksq); });
}

inline FourierMultiplier log_dissipation_multiplier(const Grid2D& grid,
                                                    const GFunction& g,
                                                    bool squared) {
  g.validate();
  return tabulate_multiplier(
      grid, "log_dissipation(" + g.name() + (squared ? ",squared)" : ")"),
      [&g, squared](double ksq) {
        return log_dissipation_symbol_ksq(g, ksq, squared);
      });
}

inline void apply_multiplier(const FourierMultiplier& m, SpectralField& f) {
  if (m.symbol.size() != f.coeffs.size())
    throw ShapeError("apply_multiplier: symbol table does not match grid");
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] *= m.symbol[i];
}

inline SpectralField applied(const FourierMultiplier& m, SpectralField f) {
  apply_multiplier(m, f);
  return f;
}

}  // namespace tcm
