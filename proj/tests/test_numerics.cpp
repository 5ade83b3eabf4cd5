#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "specshare/numerics.hpp"
#include "specshare/rng.hpp"

using namespace specshare;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("bessel_i at the origin") {
  REQUIRE(bessel_i(0, 0.0) == 1.0);
  REQUIRE(bessel_i(1, 0.0) == 0.0);
}

TEST_CASE("bessel_i reference values") {
  // Frozen 17-digit values computed independently with mpmath.
  REQUIRE(rel_diff(bessel_i(0, 1.0), 1.2660658777520084) < 1e-12);
  REQUIRE(rel_diff(bessel_i(1, 1.0), 0.56515910399248503) < 1e-12);
  REQUIRE(rel_diff(bessel_i(0, 0.5), 1.0634833707413235) < 1e-12);
  REQUIRE(rel_diff(bessel_i(1, 0.5), 0.25789430539089632) < 1e-12);
  REQUIRE(rel_diff(bessel_i(0, 10.0), 2815.7166284662545) < 1e-12);
  REQUIRE(rel_diff(bessel_i(1, 10.0), 2670.9883037012546) < 1e-12);
  REQUIRE(rel_diff(bessel_i(0, 100.0), 1.0737517071310738e+42) < 1e-11);
  REQUIRE(rel_diff(bessel_i(0, 700.0), 1.5295933476718737e+302) < 1e-10);
}

TEST_CASE("bessel_i agrees with the standard library over the working range") {
  for (int order = 0; order <= 1; ++order) {
    for (double lx = -7.0; lx <= std::log(700.0); lx += 0.37) {
      const double x = std::exp(lx);
      const double ours = bessel_i(order, x);
      const double ref = std::cyl_bessel_i(static_cast<double>(order), x);
      REQUIRE(rel_diff(ours, ref) < 1e-10);
    }
  }
}

TEST_CASE("scaled bessel values") {
  REQUIRE(rel_diff(bessel_i_scaled(0, 50.0), 0.056561626647454193) < 1e-12);
  REQUIRE(rel_diff(bessel_i_scaled(1, 50.0), 0.055993123892895400) < 1e-12);
  // Asymptotic branch and series branch meet continuously near x = 700.
  REQUIRE(rel_diff(bessel_i_scaled(0, 720.0), 0.014870284185509175) < 1e-11);
  REQUIRE(rel_diff(bessel_i_scaled(1, 720.0), 0.014859954008658149) < 1e-11);
  REQUIRE(rel_diff(bessel_i_scaled(0, 1000.0), 0.012617240455891257) < 1e-11);
  REQUIRE(rel_diff(bessel_i_scaled(1, 1000.0), 0.012610930256928629) < 1e-11);
  REQUIRE(rel_diff(bessel_i_scaled(0, 699.5), bessel_i(0, 699.5) * std::exp(-699.5)) < 1e-11);
}

TEST_CASE("bessel_i is at least one and increasing for order zero") {
  double prev = bessel_i(0, 0.0);
  REQUIRE(prev >= 1.0);
  for (double x = 0.05; x <= 30.0; x += 0.05) {
    const double cur = bessel_i(0, x);
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("bessel_i rejects bad arguments") {
  REQUIRE_THROWS_AS(bessel_i(2, 1.0), std::domain_error);
  REQUIRE_THROWS_AS(bessel_i(0, -1.0), std::domain_error);
  REQUIRE_THROWS_AS(bessel_i(0, std::nan("")), std::domain_error);
  REQUIRE_THROWS_AS(bessel_i_scaled(-1, 1.0), std::domain_error);
}

TEST_CASE("laguerre_half reference values") {
  REQUIRE(laguerre_half(0.0) == 1.0);
  // e^{-1/2} (2 I_0(1/2) + I_1(1/2)), cross-checked against the confluent
  // hypergeometric definition.
  REQUIRE(rel_diff(laguerre_half(-1.0), 1.4464913440831718) < 1e-12);
  REQUIRE(rel_diff(laguerre_half(-100.0), 11.312036680682413) < 1e-11);
  REQUIRE(rel_diff(laguerre_half(-200.0), 15.977650844144484) < 1e-11);
  // Large-argument limit |x|^{1/2} / Gamma(3/2) within 1%.
  const double limit = std::sqrt(100.0) / 0.88622692545275801;
  REQUIRE(std::abs(laguerre_half(-100.0) - limit) / limit < 0.01);
}

TEST_CASE("laguerre_half is monotone in |x|") {
  double prev = laguerre_half(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double x = -200.0 * i / 1000.0;
    const double cur = laguerre_half(x);
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("laguerre_half rejects bad arguments") {
  REQUIRE_THROWS_AS(laguerre_half(0.5), std::domain_error);
  REQUIRE_THROWS_AS(laguerre_half(std::nan("")), std::domain_error);
}

TEST_CASE("integrate handles simple closed forms") {
  REQUIRE(std::abs(integrate([](double) { return 1.0; }, 0.0, 1.0) - 1.0) < 1e-12);
  REQUIRE(std::abs(integrate([](double z) { return std::exp(-z); }, 0.0, kInf) - 1.0) < 1e-8);
}

TEST_CASE("integrate normalizes the interference ratio density") {
  // Density of gamma_s/gamma_sp at K = 10 dB with unit powers, written out
  // directly here; the oracle is a fixed-grid trapezoid sum with 1e6 points.
  const double k = 10.0;
  const auto pdf = [k](double z) {
    const double d = (1.0 + k) + z;
    const double kp1 = 1.0 + k;
    return (kp1 * kp1 * kp1 + z * kp1) / (d * d * d) * std::exp(-k * z / d);
  };
  const int n = 1000000;
  const double upper = 2000.0;
  double trap = 0.5 * (pdf(0.0) + pdf(upper));
  for (int i = 1; i < n; ++i) trap += pdf(upper * i / n);
  trap *= upper / n;

  const double adaptive = integrate(pdf, 0.0, kInf);
  REQUIRE(std::abs(adaptive - 1.0) < 1e-6);
  REQUIRE(std::abs(adaptive - trap) < 1e-6);
}

TEST_CASE("integrate is additive on random polynomial pairs") {
  RngStream rng(7, 0);
  for (int trial = 0; trial < 25; ++trial) {
    double ca[5], cb[5];
    for (double& c : ca) c = 2.0 * sample_uniform(rng) - 1.0;
    for (double& c : cb) c = 2.0 * sample_uniform(rng) - 1.0;
    const double a = -3.0 + 3.0 * sample_uniform(rng);
    const double b = a + 0.5 + 2.5 * sample_uniform(rng);
    const auto poly = [](const double* c, double x) {
      return c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * c[4])));
    };
    const double fa = integrate([&](double x) { return poly(ca, x); }, a, b);
    const double fb = integrate([&](double x) { return poly(cb, x); }, a, b);
    const double fab =
        integrate([&](double x) { return poly(ca, x) + poly(cb, x); }, a, b);
    REQUIRE(std::abs(fa + fb - fab) < 2e-12);
  }
}

TEST_CASE("integrate reports non-convergence with a partial estimate") {
  QuadratureSpec spec;
  spec.max_subdivisions = 1;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-15;
  const auto spike = [](double x) {
    const double d = (x - 0.37) * 100.0;
    return std::exp(-d * d);
  };
  try {
    integrate(spike, 0.0, 1.0, spec);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& err) {
    REQUIRE(std::isfinite(err.partial_estimate));
    REQUIRE(err.error_estimate > 0.0);
  }
}

TEST_CASE("integrate refuses tails it cannot bound") {
  REQUIRE_THROWS_AS(integrate([](double x) { return 1.0 / (1.0 + x); }, 0.0, kInf),
                    QuadratureError);
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec spec;
  spec.tail_cutoff_mass = 1e-3;
  REQUIRE_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, spec),
                    std::invalid_argument);
  spec = QuadratureSpec{};
  spec.rel_tol = 0.0;
  REQUIRE_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, spec),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("compensated sums are permutation stable") {
  RngStream rng(9, 9);
  std::vector<double> xs(100000);
  for (double& x : xs) x = std::log2(1.0 + 100.0 * sample_uniform(rng));
  KahanSum fwd;
  for (double x : xs) fwd.add(x);
  KahanSum rev;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.add(*it);
  REQUIRE(std::abs(fwd.value() - rev.value()) <= 1e-10 * std::abs(fwd.value()));
}
