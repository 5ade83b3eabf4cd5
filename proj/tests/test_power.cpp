#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "specshare/power.hpp"

using namespace specshare;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

PowerPolicy make_policy(double lambda, double q_av, double q_p, double pu_power) {
  return PowerPolicy{lambda, ConstraintSet{q_av, q_p, pu_power}, false};
}

// Independent check: maximize the per-state Lagrangian on a dense grid.
double grid_argmax(const ChannelState& st, const PowerPolicy& policy, int steps) {
  const double a = 1.0 + st.gamma_ps * policy.constraints.pu_power;
  double p_hi = policy.constraints.q_p / st.gamma_sp;
  if (!std::isfinite(p_hi))
    p_hi = 4.0 / (policy.lambda * kLn2 * st.gamma_sp);  // far beyond the interior optimum
  double best_p = 0.0, best_v = -kInf;
  for (int i = 0; i <= steps; ++i) {
    const double p = p_hi * i / steps;
    const double v = std::log2(1.0 + st.gamma_s * p / a) - policy.lambda * st.gamma_sp * p;
    if (v > best_v) {
      best_v = v;
      best_p = p;
    }
  }
  return best_p;
}
}  // namespace

TEST_CASE("water-filling branch by hand") {
  // lambda = 1/ln2 so the water level is 1; no primary interference.
  const PowerPolicy policy = make_policy(1.0 / kLn2, 1.0, 10.0, 1.0);
  const ChannelState st{2.0, 0.5, 0.0};
  REQUIRE(allocate(st, policy) == Catch::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("peak branch by hand") {
  const PowerPolicy policy = make_policy(1.0 / kLn2, 0.05, 0.1, 1.0);
  const ChannelState st{2.0, 0.5, 0.0};
  REQUIRE(allocate(st, policy) == Catch::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("zero branch when the interference ratio is too poor") {
  // lambda ln2 (1 + gamma_ps pu_power) = 2; any gamma_sp/gamma_s >= 2 shuts
  // the transmitter off.
  const PowerPolicy policy = make_policy(2.0 / kLn2, 1.0, 10.0, 1.0);
  REQUIRE(allocate({1.0, 2.0, 0.0}, policy) == 0.0);
  REQUIRE(allocate({0.5, 1.5, 0.0}, policy) == 0.0);
  // gamma_s = 0 maps to zero power.
  REQUIRE(allocate({0.0, 1.0, 1.0}, policy) == 0.0);
  REQUIRE(allocate({1.0, 0.0, 1.0}, policy) == 0.0);
}

TEST_CASE("allocation is continuous across both branch boundaries") {
  const double lambda = 1.0 / kLn2;  // water level t = 1
  const double q_p = 0.4;
  const PowerPolicy policy = make_policy(lambda, 0.2, q_p, 1.2589254117941673);
  const double gamma_ps = 0.7;
  const double a = 1.0 + gamma_ps * policy.constraints.pu_power;
  const double t = 1.0 / (lambda * kLn2);

  // Zero/water-filling boundary at z = a / t.
  {
    const double z_star = a / t;
    const double gamma_sp = 0.8;
    for (double eps : {-1e-9, 1e-9}) {
      const double z = z_star * (1.0 + eps);
      const double p_lo = allocate({z * gamma_sp, gamma_sp, gamma_ps}, policy);
      const double p_hi =
          allocate({z * gamma_sp * (1.0 + 1e-9), gamma_sp, gamma_ps}, policy);
      REQUIRE(std::abs(p_hi - p_lo) < 1e-6 * std::max(1.0, std::max(p_lo, p_hi)));
    }
  }
  // Water-filling/peak boundary at z = a / (t - q_p).
  {
    const double z_star = a / (t - q_p);
    const double gamma_sp = 0.8;
    const double p_lo = allocate({z_star * (1.0 - 1e-9) * gamma_sp, gamma_sp, gamma_ps}, policy);
    const double p_hi = allocate({z_star * (1.0 + 1e-9) * gamma_sp, gamma_sp, gamma_ps}, policy);
    REQUIRE(std::abs(p_hi - p_lo) < 1e-6 * std::max(1.0, std::max(p_lo, p_hi)));
  }
}

TEST_CASE("peak clip is unreachable once the water level drops below q_p") {
  // t = 1/(lambda ln2) = 0.5 < q_p = 0.6: no state may hit the peak.
  const PowerPolicy policy = make_policy(2.0 / kLn2, 0.5, 0.6, 1.0);
  RngStream rng(21, 0);
  for (int i = 0; i < 20000; ++i) {
    const double gs = -std::log(1.0 - sample_uniform(rng));
    const double gsp = -std::log(1.0 - sample_uniform(rng));
    const double gps = -std::log(1.0 - sample_uniform(rng));
    const double p = allocate({gs, gsp, gps}, policy);
    REQUIRE(p * gsp < policy.constraints.q_p * (1.0 - 1e-12) + 1e-15);
  }
}

TEST_CASE("allocation is nonnegative and respects the peak constraint") {
  RngStream rng(22, 0);
  const std::vector<PowerPolicy> policies = {
      make_policy(0.3, 1.0, 1.2, 1.2589254117941673),
      make_policy(1.0 / kLn2, 1.0, 1.2, 1.2589254117941673),
      make_policy(2.5, 1.0, 1.2, 1.2589254117941673),
  };
  for (int i = 0; i < 200000; ++i) {
    const double gs = -std::log(1.0 - sample_uniform(rng));
    const double gsp = -std::log(1.0 - sample_uniform(rng));
    const double gps = -std::log(1.0 - sample_uniform(rng));
    const PowerPolicy& policy = policies[i % policies.size()];
    const double p = allocate({gs, gsp, gps}, policy);
    REQUIRE(p >= 0.0);
    REQUIRE(gsp * p <= policy.constraints.q_p * (1.0 + 1e-12));
  }
}

TEST_CASE("allocation matches dense grid maximization of the Lagrangian") {
  RngStream rng(23, 0);
  double dev = 0.0, step_sum = 0.0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const double gs = -std::log(1.0 - sample_uniform(rng));
    const double gsp = -std::log(1.0 - sample_uniform(rng));
    const double gps = -std::log(1.0 - sample_uniform(rng));
    const PowerPolicy policy = make_policy(0.4 + 2.0 * sample_uniform(rng), 1.0, 1.2, 1.26);
    const ChannelState st{gs, gsp, gps};
    const double p_grid = grid_argmax(st, policy, 1000);
    dev += std::abs(allocate(st, policy) - p_grid);
    step_sum += policy.constraints.q_p / gsp / 1000.0;
  }
  REQUIRE(dev / n < step_sum / n);
}

TEST_CASE("solver recovers the closed-form multiplier on a deterministic scenario") {
  const double pu_power = 1.2589254117941673;  // 1 dB
  const ScenarioSpec scenario{FadingSpec::awgn(1.0), FadingSpec::awgn(1.0),
                              FadingSpec::awgn(1.0), pu_power};
  const ConstraintSet constraints{1.0, kInf, pu_power};
  const PowerPolicy policy = solve_lambda(scenario, constraints, 10000, RngStream(1, 1), 1e-3);
  const double expected = 1.0 / ((1.0 + 1.0 + pu_power) * kLn2);
  REQUIRE(!policy.slack);
  REQUIRE(std::abs(policy.lambda - expected) / expected < 2e-3);
}

TEST_CASE("doubling the average limit lowers the multiplier") {
  const double pu_power = 1.2589254117941673;
  const ScenarioSpec scenario{FadingSpec::rayleigh(1.0), FadingSpec::rayleigh(1.0),
                              FadingSpec::rayleigh(1.0), pu_power};
  const PowerPolicy p1 =
      solve_lambda(scenario, {1.0, kInf, pu_power}, 50000, RngStream(2, 2), 1e-3);
  const PowerPolicy p2 =
      solve_lambda(scenario, {2.0, kInf, pu_power}, 50000, RngStream(2, 2), 1e-3);
  REQUIRE(p2.lambda < p1.lambda);
}

TEST_CASE("solved policy meets the constraint on an independent sample set") {
  const double pu_power = 1.2589254117941673;
  const ScenarioSpec scenario{FadingSpec::rayleigh(1.0), FadingSpec::rayleigh(1.0),
                              FadingSpec::rayleigh(1.0), pu_power};
  const ConstraintSet constraints{1.0, kInf, pu_power};
  const PowerPolicy policy =
      solve_lambda(scenario, constraints, 100000, RngStream(3, 3), 2e-3);
  RngStream fresh(4, 4);
  KahanSum acc;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const ChannelState st = sample_state(scenario, fresh);
    acc.add(st.gamma_sp * allocate(st, policy));
  }
  REQUIRE(std::abs(acc.value() / n - 1.0) < 0.01);
}

TEST_CASE("slack constraint is flagged") {
  // A source that never interferes: the average constraint can never bind.
  const StateSampler sampler = [](RngStream& rng) {
    return ChannelState{-std::log(1.0 - sample_uniform(rng)), 0.0, 0.0};
  };
  const PowerPolicy policy =
      solve_lambda(sampler, {1.0, 2.0, 1.0}, 10000, RngStream(5, 5), 1e-3);
  REQUIRE(policy.slack);
}

TEST_CASE("solver rejects bad parameters") {
  const ScenarioSpec scenario{FadingSpec::rayleigh(1.0), FadingSpec::rayleigh(1.0),
                              FadingSpec::rayleigh(1.0), 1.0};
  REQUIRE_THROWS_AS(solve_lambda(scenario, {1.0, kInf, 1.0}, 100, RngStream(1, 1), 1e-3),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(solve_lambda(scenario, {1.0, kInf, 1.0}, 10000, RngStream(1, 1), 0.5),
                    std::invalid_argument);
  const ConstraintSet bad{1.0, 0.5, 1.0};
  REQUIRE_THROWS_AS(solve_lambda(scenario, bad, 10000, RngStream(1, 1), 1e-3),
                    std::invalid_argument);
}
