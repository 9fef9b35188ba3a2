// Grid layout, transforms, multiplier symbols, projection, and the
// alias-free product, checked against closed forms and the brute-force
// oracles.

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace tcm;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("grid validates shape and lays out wavenumbers", "[grid]") {
  CHECK_THROWS_AS(Grid2D(0), DomainError);
  CHECK_THROWS_AS(Grid2D(3), DomainError);
  CHECK_THROWS_AS(Grid2D(6), DomainError);
  CHECK_THROWS_AS(Grid2D(-8), DomainError);
  CHECK_THROWS_AS(Grid2D(16, 0.0), DomainError);
  CHECK_THROWS_AS(Grid2D(16, -1.0), DomainError);

  const Grid2D g(8);
  const int expected[8] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int i = 0; i < 8; ++i) CHECK(g.k_int(i) == expected[i]);
  CHECK(g.k(1) == Approx(1.0));
  CHECK(g.dealias_cut() == 2);
  CHECK(g.k_max_axis() == Approx(4.0));

  // Physical length pi doubles every wavenumber.
  const Grid2D h(8, std::numbers::pi);
  CHECK(h.k(1) == Approx(2.0));
  CHECK(h.k(5) == Approx(-6.0));
  CHECK(h.dx() == Approx(std::numbers::pi / 8));
  CHECK(g != h);
  CHECK(g == Grid2D(8));
}

TEST_CASE("transform round-trips and matches the direct DFT", "[transform]") {
  std::mt19937_64 eng(17);

  SECTION("round trip at n = 64") {
    const Grid2D grid(64);
    RealVec phys(grid.size());
    for (auto& v : phys) v = 2.0 * detail::uniform01(eng) - 1.0;
    const SpectralField f = to_spectral(grid, phys);
    const RealVec back = to_physical(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i)
      worst = std::max(worst, std::abs(back[i] - phys[i]));
    CHECK(worst <= 1e-13);
    CHECK(hermitian_error(f) <= 1e-15);
  }

  SECTION("against the O(n^4) DFT at n = 8") {
    const Grid2D grid(8);
    RealVec phys(grid.size());
    for (auto& v : phys) v = 2.0 * detail::uniform01(eng) - 1.0;
    const SpectralField fast = to_spectral(grid, phys);
    const SpectralField slow = oracle::dft(grid, phys);
    CHECK(max_coeff_diff(fast, slow) <= 1e-13);
  }

  SECTION("parseval per unit area") {
    const Grid2D grid(32, 1.7);
    RealVec phys(grid.size());
    for (auto& v : phys) v = 2.0 * detail::uniform01(eng) - 1.0;
    double mean_sq = 0.0;
    for (double v : phys) mean_sq += v * v;
    mean_sq /= double(grid.size());
    const SpectralField f = to_spectral(grid, phys);
    CHECK(l2_norm_sq(f) == Approx(mean_sq).epsilon(1e-12));
  }

  SECTION("single cosine lands on its two modes") {
    const Grid2D grid(16);
    RealVec phys(grid.size());
    for (int ix = 0; ix < 16; ++ix)
      for (int iy = 0; iy < 16; ++iy)
        phys[grid.index(ix, iy)] = std::cos(2.0 * std::numbers::pi * ix / 16);
    const SpectralField f = to_spectral(grid, phys);
    CHECK(std::abs(f(1, 0) - Complex(0.5)) <= 1e-15);
    CHECK(std::abs(f(15, 0) - Complex(0.5)) <= 1e-15);
    double rest = 0.0;
    for (int ix = 0; ix < 16; ++ix)
      for (int iy = 0; iy < 16; ++iy)
        if (!(iy == 0 && (ix == 1 || ix == 15)))
          rest = std::max(rest, std::abs(f(ix, iy)));
    CHECK(rest <= 1e-15);
  }

  SECTION("shape mismatch is refused") {
    const Grid2D grid(8);
    RealVec phys(grid.size() - 1);
    CHECK_THROWS_AS(to_spectral(grid, phys), ShapeError);
  }
}

TEST_CASE("hermitian projector fixes asymmetric input", "[transform]") {
  const Grid2D grid(8);
  SpectralField f(grid);
  f(1, 0) = Complex(1.0, 0.0);  // no conjugate partner yet
  CHECK(hermitian_error(f) == Approx(1.0));
  hermitian_symmetrize(f);
  CHECK(hermitian_error(f) <= 1e-16);
  CHECK(std::abs(f(1, 0) - Complex(0.5)) <= 1e-16);
  CHECK(std::abs(f(7, 0) - Complex(0.5)) <= 1e-16);
  // Self-paired Nyquist mode keeps only its real part.
  f(4, 0) = Complex(0.25, 0.75);
  hermitian_symmetrize(f);
  CHECK(f(4, 0).imag() == 0.0);
  CHECK(f(4, 0).real() == Approx(0.25));
}

TEST_CASE("spectral derivative matches analytic gradients", "[operators]") {
  const Grid2D grid(32);
  RealVec phys(grid.size()), dx_ref(grid.size()), dy_ref(grid.size());
  const double w = 2.0 * std::numbers::pi / 32;
  for (int ix = 0; ix < 32; ++ix)
    for (int iy = 0; iy < 32; ++iy) {
      const double x = w * ix, y = w * iy;
      phys[grid.index(ix, iy)] = std::sin(2 * x) * std::cos(5 * y);
      dx_ref[grid.index(ix, iy)] = 2 * std::cos(2 * x) * std::cos(5 * y);
      dy_ref[grid.index(ix, iy)] = -5 * std::sin(2 * x) * std::sin(5 * y);
    }
  const VectorField g = gradient(to_spectral(grid, phys));
  const RealVec gx = to_physical(g.x), gy = to_physical(g.y);
  double worst = 0.0;
  for (std::size_t i = 0; i < phys.size(); ++i)
    worst = std::max({worst, std::abs(gx[i] - dx_ref[i]),
                      std::abs(gy[i] - dy_ref[i])});
  CHECK(worst <= 1e-12);
}

TEST_CASE("fractional symbol values and domain", "[multipliers]") {
  CHECK(fractional_symbol(1.0, 3.0, 4.0) == Approx(25.0));
  CHECK(fractional_symbol(1.5, 1.0, 2.0) ==
        Approx(11.180339887498949).epsilon(1e-14));
  CHECK(fractional_symbol(0.0, 3.0, 4.0) == 1.0);  // exponent 0, k != 0
  CHECK(fractional_symbol(0.0, 0.0, 0.0) == 0.0);
  CHECK(fractional_symbol(1.7, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(fractional_symbol(-0.1, 1.0, 0.0), DomainError);
}

TEST_CASE("slow-growth weights and the weakened symbol", "[multipliers]") {
  SECTION("named kinds satisfy the floor and monotonicity") {
    for (const GFunction& g :
         {GFunction::constant1(), GFunction::sqrt_log(),
          GFunction::sqrt_log_log_log(),
          GFunction::sqrt_log_log_log_log_log()}) {
      CHECK_NOTHROW(g.validate());
      CHECK(g(0.0) >= 1.0);
    }
    CHECK(GFunction::constant1()(1e9) == 1.0);
    CHECK(GFunction::sqrt_log()(0.0) == Approx(1.0));
    const GFunction sl = GFunction::sqrt_log();
    CHECK(sl(5.0) ==
          Approx(std::sqrt(std::log(std::numbers::e + 5.0))).epsilon(1e-15));
  }

  SECTION("custom tables are validated") {
    const GFunction g = GFunction::custom({{0.0, 1.0}, {10.0, 2.0}});
    CHECK(g(5.0) == Approx(1.5));
    CHECK(g(-3.0) == 1.0);   // clamped left
    CHECK(g(99.0) == 2.0);   // clamped right
    CHECK_THROWS_AS(GFunction::custom({{0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(GFunction::custom({{0.0, 2.0}, {1.0, 1.5}}),
                    InvariantError);
    CHECK_THROWS_AS(GFunction::custom({{0.0, 0.5}, {1.0, 2.0}}),
                    InvariantError);
    CHECK_THROWS_AS(GFunction::custom({{1.0, 1.0}, {1.0, 2.0}}), DomainError);
  }

  SECTION("weakened symbol at |k| = 5") {
    const GFunction one = GFunction::constant1();
    CHECK(log_dissipation_symbol(one, 3.0, 4.0, false) == Approx(25.0));
    CHECK(log_dissipation_symbol(one, 3.0, 4.0, true) == Approx(625.0));
    CHECK(log_dissipation_symbol(one, 0.0, 0.0, true) == 0.0);
    CHECK(log_dissipation_symbol(GFunction::sqrt_log(), 3.0, 4.0, false) ==
          Approx(17.488112374776863).epsilon(1e-13));
  }
}

TEST_CASE("projection removes divergence and is idempotent", "[operators]") {
  const Grid2D grid(32);
  std::mt19937_64 eng(23);
  VectorField w = oracle::random_vector(grid, eng);
  w.x.coeffs[0] = Complex(0.7, 0.0);  // nonzero mean must pass through
  w.y.coeffs[0] = Complex(-0.3, 0.0);
  leray_project(w);
  CHECK(divergence_rel(w) <= 1e-12);
  CHECK(std::abs(w.x.coeffs[0] - Complex(0.7)) == 0.0);
  CHECK(std::abs(w.y.coeffs[0] - Complex(-0.3)) == 0.0);
  const VectorField twice = leray_projected(w);
  CHECK(max_coeff_diff(twice, w) <= 1e-14);
}

TEST_CASE("negative laplacian inversion", "[operators]") {
  const Grid2D grid(16);
  std::mt19937_64 eng(5);
  SpectralField f = oracle::random_field(grid, eng);
  f.coeffs[0] = 0.0;
  const SpectralField p = invert_neg_laplacian(f);
  CHECK(std::abs(p.coeffs[0]) == 0.0);
  // div grad p = laplacian p = -f.
  const SpectralField lap = divergence(gradient(p));
  CHECK(max_coeff_diff(lap, -1.0 * f) <= 1e-12);
  // Single mode closed form.
  SpectralField m(grid);
  m(2, 1) = Complex(0.0, 3.0);
  m(14, 15) = Complex(0.0, -3.0);
  const SpectralField q = invert_neg_laplacian(m);
  CHECK(std::abs(q(2, 1) - Complex(0.0, 0.6)) <= 1e-15);
}

TEST_CASE("dealias mask and alias-free products", "[operators]") {
  const Grid2D grid(8);  // cut = 2
  std::mt19937_64 eng(31);

  SECTION("product of band-limited modes never aliases back") {
    RealVec phys(grid.size());
    const double w = 2.0 * std::numbers::pi / 8;
    for (int ix = 0; ix < 8; ++ix)
      for (int iy = 0; iy < 8; ++iy)
        phys[grid.index(ix, iy)] = std::cos(2 * w * ix);
    SpectralField f = to_spectral(grid, phys);
    const SpectralField sq = dealiased_product(f, f);
    // cos^2(2x) = 1/2 + cos(4x)/2; |k| = 4 is beyond the cut, so only
    // the mean survives.
    CHECK(std::abs(sq.coeffs[0] - Complex(0.5)) <= 1e-15);
    double rest = 0.0;
    for (std::size_t i = 1; i < sq.coeffs.size(); ++i)
      rest = std::max(rest, std::abs(sq.coeffs[i]));
    CHECK(rest <= 1e-15);
  }

  SECTION("matches the exact truncated convolution") {
    for (int trial = 0; trial < 5; ++trial) {
      const SpectralField a = oracle::random_field(grid, eng);
      const SpectralField b = oracle::random_field(grid, eng);
      const SpectralField fast = dealiased_product(a, b);
      const SpectralField slow = oracle::conv(a, b);
      CHECK(max_coeff_diff(fast, slow) <= 1e-12);
    }
  }

  SECTION("output is supported inside the band") {
    const SpectralField a = oracle::random_field(grid, eng);
    const SpectralField b = oracle::random_field(grid, eng);
    const SpectralField prod = dealiased_product(a, b);
    for (int ix = 0; ix < 8; ++ix)
      for (int iy = 0; iy < 8; ++iy)
        if (!mode_in_dealias_band(grid, ix, iy))
          CHECK(std::abs(prod(ix, iy)) == 0.0);
  }
}

TEST_CASE("pressure recovery on the analytic vortex", "[operators]") {
  const Grid2D grid(64);
  const TCMState tg = taylor_green_state(grid);
  double div_rel = 1.0;
  const SpectralField p = recover_pressure(tg, &div_rel);
  CHECK(div_rel <= 1e-12);
  // p = (cos 2x + cos 2y)/4: coefficient 1/8 on each of the four modes.
  CHECK(std::abs(p(2, 0) - Complex(0.125)) <= 1e-13);
  CHECK(std::abs(p(62, 0) - Complex(0.125)) <= 1e-13);
  CHECK(std::abs(p(0, 2) - Complex(0.125)) <= 1e-13);
  CHECK(std::abs(p(0, 62) - Complex(0.125)) <= 1e-13);
  CHECK(std::abs(p.coeffs[0]) == 0.0);
  double rest = 0.0;
  for (int ix = 0; ix < 64; ++ix)
    for (int iy = 0; iy < 64; ++iy) {
      const bool carrier = (iy == 0 && (ix == 2 || ix == 62)) ||
                           (ix == 0 && (iy == 2 || iy == 62));
      if (!carrier) rest = std::max(rest, std::abs(p(ix, iy)));
    }
  CHECK(rest <= 1e-13);
}

TEST_CASE("grid mismatch across operands is refused", "[operators]") {
  const Grid2D a(8), b(16);
  SpectralField fa(a), fb(b);
  CHECK_THROWS_AS(inner(fa, fb), ShapeError);
  CHECK_THROWS_AS(fa + fb, ShapeError);
  CHECK_THROWS_WITH(dealiased_product(fa, fb),
                    ContainsSubstring("different grids"));
}
