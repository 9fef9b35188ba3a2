#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <numbers>
#include <vector>

#include "tcm/errors.hpp"

namespace tcm {

using Complex = std::complex<double>;

// 64-byte aligned storage so FFTW's new-array execute sees the same
// alignment class as the arrays its plans were created with.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    void* p = std::aligned_alloc(64, ((n * sizeof(T) + 63) / 64) * 64);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { std::free(p); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using ComplexVec = std::vector<Complex, AlignedAllocator<Complex>>;
using RealVec = std::vector<double>;

namespace detail {

// Plan pair for one transform size, shared by every grid of that size.
// FFTW_ESTIMATE keeps planning deterministic; FFTW_MEASURE picks plans
// by wall-clock timing and can vary between runs.
class FftPlans {
public:
  explicit FftPlans(int n) : n_(n) {
    ComplexVec a(std::size_t(n) * n), b(std::size_t(n) * n);
    auto* ap = reinterpret_cast<fftw_complex*>(a.data());
    auto* bp = reinterpret_cast<fftw_complex*>(b.data());
    forward_ = fftw_plan_dft_2d(n, n, ap, bp, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(n, n, ap, bp, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_)
      throw Error("fftw plan creation failed for n=" + std::to_string(n));
  }
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void forward(const Complex* in, Complex* out) const {
    execute(forward_, in, out);
  }
  void backward(const Complex* in, Complex* out) const {
    execute(backward_, in, out);
  }
  int n() const { return n_; }

private:
  static void execute(fftw_plan plan, const Complex* in, Complex* out) {
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  int n_;
  fftw_plan forward_;
  fftw_plan backward_;
};

inline std::shared_ptr<const FftPlans> shared_plans(int n) {
  static std::mutex mu;
  static std::map<int, std::weak_ptr<const FftPlans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto p = cache[n].lock()) return p;
  auto p = std::make_shared<const FftPlans>(n);
  cache[n] = p;
  return p;
}

}  // namespace detail

// Square periodic grid, n x n collocation points on [0, L)^2.
// Integer wavenumbers run over {-n/2, ..., n/2 - 1} per axis and are
// scaled by 2*pi/L; index i maps to i for i < n/2 and i - n otherwise.
class Grid2D {
public:
  Grid2D() = default;

  explicit Grid2D(int n, double domain_length = 2.0 * std::numbers::pi)
      : n_(n), length_(domain_length) {
    if (n < 4 || (n & (n - 1)) != 0)
      throw DomainError("grid size must be a power of two >= 4, got " +
                        std::to_string(n));
    if (!(domain_length > 0.0))
      throw DomainError("domain length must be positive");
    plans_ = detail::shared_plans(n);
    k_int_.resize(n);
    k_.resize(n);
    const double scale = 2.0 * std::numbers::pi / length_;
    for (int i = 0; i < n; ++i) {
      k_int_[i] = (i < n / 2) ? i : i - n;
      k_[i] = scale * k_int_[i];
    }
  }

  int n() const { return n_; }
  double length() const { return length_; }
  std::size_t size() const { return std::size_t(n_) * n_; }
  double dx() const { return length_ / n_; }

  int k_int(int i) const { return k_int_[i]; }
  double k(int i) const { return k_[i]; }
  double k_scale() const { return 2.0 * std::numbers::pi / length_; }
  // Largest |k_i| representable, (n/2) * 2*pi/L.
  double k_max_axis() const { return k_scale() * (n_ / 2); }
  // Modes with |k_int| above this are zeroed after products.
  int dealias_cut() const { return n_ / 3; }

  std::size_t index(int ix, int iy) const { return std::size_t(ix) * n_ + iy; }

  const detail::FftPlans& plans() const { return *plans_; }

  bool operator==(const Grid2D& o) const {
    return n_ == o.n_ && length_ == o.length_;
  }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }

private:
  int n_ = 0;
  double length_ = 0.0;
  std::shared_ptr<const detail::FftPlans> plans_;
  std::vector<int> k_int_;
  std::vector<double> k_;
};

}  // namespace tcm
