#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "specshare/channels.hpp"
#include "specshare/numerics.hpp"
#include "specshare/rng.hpp"

using namespace specshare;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_sq_gain(const FadingSpec& spec, int n, RngStream rng) {
  KahanSum acc;
  for (int i = 0; i < n; ++i) acc.add(std::norm(sample_gain(spec, rng)));
  return acc.value() / n;
}
}  // namespace

TEST_CASE("deterministic gain is exact") {
  RngStream rng(1, 1);
  const auto h = sample_gain(FadingSpec::awgn(1.0), rng);
  REQUIRE(h == std::complex<double>(1.0, 0.0));
  const auto h2 = sample_gain(FadingSpec::awgn(4.0, 1.5707963267948966), rng);
  REQUIRE(std::abs(h2 - std::complex<double>(0.0, 2.0)) < 1e-15);
}

TEST_CASE("gain power matches mean_power across K") {
  int stream = 10;
  for (double k : {0.0, 1.0, 10.0, 100.0}) {
    const FadingSpec spec = FadingSpec::rician(k, 1.0);
    const int n = 100000;
    const double mean = mean_sq_gain(spec, n, RngStream(77, stream++));
    // Var(|h|^2) = (2K+1)/(K+1)^2 for unit mean power.
    const double sd = std::sqrt((2.0 * k + 1.0) / ((k + 1.0) * (k + 1.0)) / n);
    REQUIRE(std::abs(mean - 1.0) < 3.0 * sd + 1e-12);
  }
}

TEST_CASE("rayleigh gain power has unit mean") {
  const double mean = mean_sq_gain(FadingSpec::rayleigh(1.0), 100000, RngStream(3, 0));
  REQUIRE(std::abs(mean - 1.0) < 0.01);
}

TEST_CASE("power_pdf closed-form values and guards") {
  REQUIRE(power_pdf(0.0, FadingSpec::rayleigh(1.0)) == 1.0);
  REQUIRE_THROWS_AS(power_pdf(1.0, FadingSpec::awgn(1.0)), std::domain_error);
  REQUIRE_THROWS_AS(power_pdf(-0.5, FadingSpec::rayleigh(1.0)), std::domain_error);
}

TEST_CASE("power_pdf integrates to one") {
  for (double k : {0.0, 1.0, 10.0}) {
    const FadingSpec spec = FadingSpec::rician(k, 1.0);
    const double mass =
        integrate([&](double g) { return power_pdf(g, spec); }, 0.0, kInf);
    REQUIRE(std::abs(mass - 1.0) < 1e-6);
  }
}

TEST_CASE("power_pdf stays finite at large K through log-space evaluation") {
  const FadingSpec spec = FadingSpec::rician(500.0, 1.0);
  const double v = power_pdf(1.0, spec);
  REQUIRE(std::isfinite(v));
  REQUIRE(v > 1.0);  // sharply concentrated near gamma = 1
  const double mass = integrate([&](double g) { return power_pdf(g, spec); }, 0.0, kInf);
  REQUIRE(std::abs(mass - 1.0) < 1e-6);
}

TEST_CASE("power_pdf matches a sampled histogram") {
  const FadingSpec spec = FadingSpec::rician(10.0, 1.0);
  const int n = 1000000, bins = 50;
  const double hi = 3.0;
  const double width = hi / bins;
  std::vector<double> hist(bins, 0.0);
  RngStream rng(5, 2);
  for (int i = 0; i < n; ++i) {
    const double g = std::norm(sample_gain(spec, rng));
    if (g < hi) hist[static_cast<int>(g / width)] += 1.0;
  }
  double sup = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double density = hist[b] / (n * width);
    const double center = (b + 0.5) * width;
    sup = std::max(sup, std::abs(density - power_pdf(center, spec)));
  }
  REQUIRE(sup < 0.02);
}

TEST_CASE("amplitude variance closed forms") {
  // Rayleigh amplitude variance (1 - pi/4) * mean_power.
  REQUIRE(std::abs(amplitude_variance(FadingSpec::rayleigh(1.0)) - 0.21460183660255172) <
          1e-12);
  // Vanishes as the specular part dominates.
  REQUIRE(amplitude_variance(FadingSpec::rician(1e4, 1.0)) < 1e-3);
  REQUIRE_THROWS_AS(amplitude_variance(FadingSpec::awgn(1.0)), std::domain_error);
}

TEST_CASE("amplitude variance matches sampling at K = 10") {
  const FadingSpec spec = FadingSpec::rician(10.0, 1.0);
  const int n = 1000000;
  RngStream rng(6, 3);
  KahanSum sum, sum_sq;
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(sample_gain(spec, rng));
    sum.add(a);
    sum_sq.add(a * a);
  }
  const double mean = sum.value() / n;
  const double var = sum_sq.value() / n - mean * mean;
  const double closed = amplitude_variance(spec);
  REQUIRE(std::abs(var - closed) / closed < 0.02);
}

TEST_CASE("ratio_pdf closed-form points") {
  REQUIRE(std::abs(ratio_pdf(0.0, 7.0, 1.0, 1.0) - 1.0) < 1e-14);
  REQUIRE(std::abs(ratio_pdf(1.0, 0.0, 1.0, 1.0) - 0.25) < 1e-14);
  REQUIRE_THROWS_AS(ratio_pdf(-1.0, 0.0, 1.0, 1.0), std::domain_error);
  REQUIRE_THROWS_AS(ratio_pdf(1.0, 0.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("ratio_pdf reduces to the log-logistic at K = 0") {
  for (int i = 0; i <= 2000; ++i) {
    const double z = 0.01 * i;
    const double c = 2.0 / 3.0;  // gbar_sp / gbar_s
    const double direct = c / ((1.0 + z * c) * (1.0 + z * c));
    REQUIRE(std::abs(ratio_pdf(z, 0.0, 3.0, 2.0) - direct) <= 1e-15 + 1e-14 * direct);
  }
}

TEST_CASE("ratio_pdf approaches the exponential limit at large K") {
  double sup = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double z = 0.01 * i;
    sup = std::max(sup, std::abs(ratio_pdf(z, 1000.0, 1.0, 1.0) - std::exp(-z)));
  }
  REQUIRE(sup < 0.01);
}

TEST_CASE("ratio_pdf integrates to one") {
  for (double k : {0.0, 1.0, 10.0, 100.0}) {
    const double mass =
        integrate([&](double z) { return ratio_pdf(z, k, 1.0, 1.0); }, 0.0, kInf);
    REQUIRE(std::abs(mass - 1.0) < 1e-6);
  }
}

TEST_CASE("ratio survival tails: fat at K = 0, near-exponential at K = 10") {
  const auto survival = [](double z, double k) {
    return integrate([&](double u) { return ratio_pdf(u, k, 1.0, 1.0); }, z, kInf);
  };
  // Log-logistic: z * P[Z > z] converges to gbar_s / gbar_sp = 1.
  const double t3 = 1e3 * survival(1e3, 0.0);
  const double t4 = 1e4 * survival(1e4, 0.0);
  REQUIRE(std::abs(t3 / t4 - 1.0) < 0.10);
  REQUIRE(std::abs(t4 - 1.0) < 0.05);

  // At K = 10 the survival decays like an exponential over the bulk of the
  // distribution: least-squares slope of log-survival on z in [1, 12].
  const auto slope = [&](double k) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int z = 1; z <= 12; ++z) {
      const double y = std::log(survival(z, k));
      sx += z;
      sy += y;
      sxx += z * z;
      sxy += z * y;
      ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  REQUIRE(slope(10.0) < -0.3);
  REQUIRE(slope(0.0) > -0.25);
}

TEST_CASE("sample_state on a deterministic scenario") {
  const ScenarioSpec scenario{FadingSpec::awgn(1.0), FadingSpec::awgn(1.0),
                              FadingSpec::awgn(1.0), 2.0};
  RngStream rng(1, 1);
  const ChannelState st = sample_state(scenario, rng);
  REQUIRE(st.gamma_s == 1.0);
  REQUIRE(st.gamma_sp == 1.0);
  REQUIRE(st.gamma_ps == 1.0);
}

TEST_CASE("rayleigh-rayleigh power ratio follows the log-logistic law") {
  const ScenarioSpec scenario{FadingSpec::rayleigh(1.0), FadingSpec::rayleigh(1.0),
                              FadingSpec::rayleigh(1.0), 1.0};
  const int n = 100000;
  std::vector<double> z(n);
  RngStream rng(11, 4);
  for (int i = 0; i < n; ++i) {
    const ChannelState st = sample_state(scenario, rng);
    z[i] = st.gamma_s / st.gamma_sp;
  }
  std::sort(z.begin(), z.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = z[i] / (1.0 + z[i]);
    d = std::max(d, std::max((i + 1.0) / n - f, f - static_cast<double>(i) / n));
  }
  REQUIRE(d < 0.006);  // 99% Kolmogorov threshold 1.63/sqrt(n)
}

TEST_CASE("rician-rayleigh power ratio matches ratio_pdf") {
  const double k = 10.0;
  const ScenarioSpec scenario{FadingSpec::rayleigh(1.0), FadingSpec::rician(k, 1.0),
                              FadingSpec::rician(k, 1.0), 1.0};
  const int n = 100000, bins = 50;
  const double hi = 5.0;
  const double width = hi / bins;
  std::vector<double> hist(bins, 0.0);
  RngStream rng(12, 5);
  for (int i = 0; i < n; ++i) {
    const ChannelState st = sample_state(scenario, rng);
    const double z = st.gamma_s / st.gamma_sp;
    if (z < hi) hist[static_cast<int>(z / width)] += 1.0;
  }
  double sup = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double density = hist[b] / (n * width);
    const double center = (b + 0.5) * width;
    sup = std::max(sup, std::abs(density - ratio_pdf(center, k, 1.0, 1.0)));
  }
  REQUIRE(sup < 0.02);
}

TEST_CASE("spec validation") {
  FadingSpec bad = FadingSpec::rayleigh(0.0);
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = FadingSpec::rician(-1.0, 1.0);
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = FadingSpec::rician(1.0, 1.0, 7.0);
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}
