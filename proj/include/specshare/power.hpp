#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "specshare/channels.hpp"
#include "specshare/numerics.hpp"
#include "specshare/rng.hpp"

namespace specshare {

// Interference limits at the primary receiver. q_p may be infinite
// (no peak constraint); when finite it must exceed q_av.
struct ConstraintSet {
  double q_av = 1.0;
  double q_p = std::numeric_limits<double>::infinity();
  double pu_power = 1.0;

  void validate() const {
    if (!(q_av > 0.0)) throw std::invalid_argument("ConstraintSet: q_av must be > 0");
    if (!(q_p > q_av)) throw std::invalid_argument("ConstraintSet: q_p must exceed q_av");
    if (!(pu_power > 0.0)) throw std::invalid_argument("ConstraintSet: pu_power must be > 0");
  }
};

// Water-filling policy: the Lagrange multiplier of the average
// interference constraint plus the constraint set it was solved for.
// slack is set when even a vanishing multiplier cannot make the
// average constraint bind.
struct PowerPolicy {
  double lambda = 1.0;
  ConstraintSet constraints;
  bool slack = false;
};

// Optimal transmit power for one channel state: the argmax of
// log2(1 + gamma_s P / A) - lambda gamma_sp P over P in [0, Q_p/gamma_sp],
// A = 1 + gamma_ps * pu_power. Interior solution is
// 1/(lambda gamma_sp ln2) - A/gamma_s, clipped at zero from below and at
// the peak power from above; with 1/(lambda ln2) <= Q_p the peak clip is
// unreachable. gamma_s = 0 or gamma_sp = 0 (measure zero) map to zero power.
inline double allocate(const ChannelState& state, const PowerPolicy& policy) {
  if (!(state.gamma_s > 0.0) || !(state.gamma_sp > 0.0)) return 0.0;
  const double a = 1.0 + state.gamma_ps * policy.constraints.pu_power;
  const double t = 1.0 / (policy.lambda * kLn2);
  const double wf = t / state.gamma_sp - a / state.gamma_s;
  if (wf <= 0.0) return 0.0;
  const double qp = policy.constraints.q_p;
  if (std::isfinite(qp)) return std::min(wf, qp / state.gamma_sp);
  return wf;
}

using StateSampler = std::function<ChannelState(RngStream&)>;

// Thrown when the multiplier search cannot bracket the target average
// interference; reports the range the sample set can actually achieve.
struct SolveError : std::runtime_error {
  SolveError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), achievable_min(lo), achievable_max(hi) {}
  double achievable_min;
  double achievable_max;
};

// Bisect the Lagrange multiplier until the empirical average interference
// E[gamma_sp P] over a fixed sample set equals q_av within rel_tol. The
// sample set is drawn once (common random numbers), so the bisected
// function is continuous and monotone non-increasing in lambda and the
// root is deterministic for a given stream.
inline PowerPolicy solve_lambda(const StateSampler& sampler, const ConstraintSet& constraints,
                                std::size_t n_samples, RngStream rng, double rel_tol) {
  constraints.validate();
  if (n_samples < 10000) throw std::invalid_argument("solve_lambda: n_samples must be >= 1e4");
  if (!(rel_tol > 0.0) || rel_tol > 0.05)
    throw std::invalid_argument("solve_lambda: rel_tol must be in (0, 0.05]");

  std::vector<ChannelState> states;
  states.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) states.push_back(sampler(rng));

  const auto avg_interference = [&](double lambda) {
    PowerPolicy p{lambda, constraints, false};
    KahanSum acc;
    for (const ChannelState& st : states) acc.add(st.gamma_sp * allocate(st, p));
    return acc.value() / static_cast<double>(n_samples);
  };

  double lo = 1e-6, hi = 1e3;  // avg is decreasing in lambda: lo side high, hi side low
  while (avg_interference(lo) < constraints.q_av && lo > 1e-12) lo *= 0.1;
  while (avg_interference(hi) > constraints.q_av && hi < 1e9) hi *= 10.0;

  if (avg_interference(lo) < constraints.q_av) {
    // Even a vanishing multiplier leaves the constraint slack.
    return PowerPolicy{lo, constraints, true};
  }
  if (avg_interference(hi) > constraints.q_av)
    throw SolveError("solve_lambda: could not bracket q_av", avg_interference(hi),
                     avg_interference(lo));

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = std::sqrt(lo * hi);
    const double value = avg_interference(mid);
    if (std::abs(value - constraints.q_av) <= rel_tol * constraints.q_av)
      return PowerPolicy{mid, constraints, false};
    if (value > constraints.q_av)
      lo = mid;
    else
      hi = mid;
  }
  throw SolveError("solve_lambda: bisection did not converge", avg_interference(hi),
                   avg_interference(lo));
}

inline PowerPolicy solve_lambda(const ScenarioSpec& scenario, const ConstraintSet& constraints,
                                std::size_t n_samples, RngStream rng, double rel_tol) {
  scenario.validate();
  return solve_lambda([&scenario](RngStream& r) { return sample_state(scenario, r); },
                      constraints, n_samples, rng, rel_tol);
}

}  // namespace specshare
