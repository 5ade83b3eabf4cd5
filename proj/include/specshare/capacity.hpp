#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "specshare/channels.hpp"
#include "specshare/numerics.hpp"
#include "specshare/power.hpp"
#include "specshare/rng.hpp"

namespace specshare {

enum class CapacityMethod { monte_carlo, quadrature };

struct CapacityResult {
  double bits_per_hz = 0.0;
  double std_error = 0.0;
  CapacityMethod method = CapacityMethod::monte_carlo;
  std::size_t n_samples = 0;
};

// Sample mean of log2(1 + gamma_s P / (gamma_ps pu_power + 1)) under the
// given policy. Compensated summation keeps the reduction independent of
// evaluation order.
inline CapacityResult capacity_mc(const StateSampler& sampler, const PowerPolicy& policy,
                                  std::size_t n_samples, RngStream rng) {
  if (n_samples < 10000) throw std::invalid_argument("capacity_mc: n_samples must be >= 1e4");
  KahanSum sum, sum_sq;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const ChannelState st = sampler(rng);
    const double p = allocate(st, policy);
    const double rate =
        std::log2(1.0 + st.gamma_s * p / (st.gamma_ps * policy.constraints.pu_power + 1.0));
    sum.add(rate);
    sum_sq.add(rate * rate);
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, sum_sq.value() / n - mean * mean);
  return {mean, std::sqrt(var / n), CapacityMethod::monte_carlo, n_samples};
}

inline CapacityResult capacity_mc(const ScenarioSpec& scenario, const PowerPolicy& policy,
                                  std::size_t n_samples, RngStream rng) {
  scenario.validate();
  return capacity_mc([&scenario](RngStream& r) { return sample_state(scenario, r); }, policy,
                     n_samples, rng);
}

namespace detail {

// Rate achieved at ratio z = gamma_s/gamma_sp for a fixed gamma_ps:
// log2(z/z_lo) on the water-filling region, log2(1 + Q_p z / A) once the
// peak clip binds, zero below z_lo.
struct RatePieces {
  double z_lo;  // water-filling onset
  double z_hi;  // peak onset (infinite when the peak clip is unreachable)
  double a;     // 1 + gamma_ps * pu_power
  double q_p;

  double rate(double z) const {
    if (z <= z_lo) return 0.0;
    if (z <= z_hi) return std::log2(z / z_lo);
    return std::log2(1.0 + q_p * z / a);
  }
};

inline RatePieces make_rate_pieces(double gamma_ps, const PowerPolicy& policy) {
  RatePieces rp;
  rp.a = 1.0 + gamma_ps * policy.constraints.pu_power;
  rp.q_p = policy.constraints.q_p;
  const double t = 1.0 / (policy.lambda * kLn2);
  rp.z_lo = rp.a / t;
  rp.z_hi = (std::isfinite(rp.q_p) && t > rp.q_p)
                ? rp.a / (t - rp.q_p)
                : std::numeric_limits<double>::infinity();
  return rp;
}

}  // namespace detail

// Semi-analytic ergodic capacity: the expectation over z of the piecewise
// rate against the closed-form ratio density, then the expectation over
// gamma_ps (point evaluation when deterministic, otherwise quadrature
// against the Rician power density). Requires a Rayleigh or deterministic
// SU link; other combinations have no closed-form ratio density here.
inline CapacityResult capacity_quadrature(const ScenarioSpec& scenario,
                                          const PowerPolicy& policy,
                                          const QuadratureSpec& quad = QuadratureSpec{}) {
  scenario.validate();
  quad.validate();
  const FadingSpec& su = scenario.su_link;
  const FadingSpec& sp = scenario.su_to_pu;
  const FadingSpec& ps = scenario.pu_to_su;

  const bool su_rayleigh = !su.deterministic && su.k_factor == 0.0;
  if (!su_rayleigh && !su.deterministic)
    throw std::invalid_argument(
        "capacity_quadrature: SU link must be Rayleigh or deterministic (no closed-form ratio "
        "density otherwise)");
  if (su.deterministic && !sp.deterministic)
    throw std::invalid_argument(
        "capacity_quadrature: deterministic SU link requires a deterministic interference link");

  const auto inner = [&](double gamma_ps) {
    const detail::RatePieces rp = detail::make_rate_pieces(gamma_ps, policy);
    if (su.deterministic && sp.deterministic) {
      // Both links fixed: z is a point mass at gbar_s / gbar_sp.
      return rp.rate(su.mean_power / sp.mean_power);
    }
    const auto f_z = [&](double z) {
      if (sp.deterministic) {
        // gamma_sp fixed at its mean: z is exponential with rate c.
        const double c = sp.mean_power / su.mean_power;
        return c * std::exp(-c * z);
      }
      return ratio_pdf(z, sp.k_factor, su.mean_power, sp.mean_power);
    };
    double value = integrate([&](double z) { return rp.rate(z) * f_z(z); }, rp.z_lo,
                             std::isfinite(rp.z_hi) ? rp.z_hi : std::numeric_limits<double>::infinity(),
                             quad);
    if (std::isfinite(rp.z_hi))
      value += integrate([&](double z) { return rp.rate(z) * f_z(z); }, rp.z_hi,
                         std::numeric_limits<double>::infinity(), quad);
    return value;
  };

  double capacity;
  if (ps.deterministic) {
    capacity = inner(ps.mean_power);
  } else {
    capacity = integrate([&](double g) { return inner(g) * power_pdf(g, ps); }, 0.0,
                         std::numeric_limits<double>::infinity(), quad);
  }
  return {capacity, 0.0, CapacityMethod::quadrature, 0};
}

}  // namespace specshare
