#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "specshare/numerics.hpp"
#include "specshare/rng.hpp"

namespace specshare {

// Rician fading parameters for one link. k_factor = 0 is Rayleigh; the
// deterministic flag stands in for the K -> infinity (AWGN) limit, where
// the gain collapses to the constant sqrt(mean_power) e^{j los_phase}.
// Powers are linear and noise-normalized (N_o = 1).
struct FadingSpec {
  double k_factor = 0.0;
  double mean_power = 1.0;
  double los_phase = 0.0;
  bool deterministic = false;

  static FadingSpec rayleigh(double mean_power) { return {0.0, mean_power, 0.0, false}; }
  static FadingSpec rician(double k, double mean_power, double phase = 0.0) {
    return {k, mean_power, phase, false};
  }
  static FadingSpec awgn(double mean_power, double phase = 0.0) {
    return {0.0, mean_power, phase, true};
  }

  void validate() const {
    if (!(mean_power > 0.0)) throw std::invalid_argument("FadingSpec: mean_power must be > 0");
    if (!(k_factor >= 0.0)) throw std::invalid_argument("FadingSpec: k_factor must be >= 0");
    if (!(los_phase >= 0.0) || !(los_phase < 6.283185307179587))
      throw std::invalid_argument("FadingSpec: los_phase must be in [0, 2*pi)");
  }
};

// The three links that determine the secondary user's state, plus the
// constant primary transmit power.
struct ScenarioSpec {
  FadingSpec su_link;   // h_s
  FadingSpec su_to_pu;  // h_sp
  FadingSpec pu_to_su;  // h_ps
  double pu_power = 1.0;

  void validate() const {
    su_link.validate();
    su_to_pu.validate();
    pu_to_su.validate();
    if (!(pu_power > 0.0)) throw std::invalid_argument("ScenarioSpec: pu_power must be > 0");
  }
};

// Instantaneous channel powers (gamma_s, gamma_sp, gamma_ps).
struct ChannelState {
  double gamma_s = 0.0;
  double gamma_sp = 0.0;
  double gamma_ps = 0.0;
};

// One complex gain draw: sqrt(gbar) (sqrt(K/(K+1)) e^{j phi} + v) with
// v circularly symmetric Gaussian of total variance 1/(K+1).
inline std::complex<double> sample_gain(const FadingSpec& spec, RngStream& rng) {
  const double root_power = std::sqrt(spec.mean_power);
  const std::complex<double> los = std::polar(1.0, spec.los_phase);
  if (spec.deterministic) return root_power * los;
  const double k = spec.k_factor;
  const double sigma = std::sqrt(0.5 / (k + 1.0));
  const std::complex<double> v(sigma * sample_std_normal(rng), sigma * sample_std_normal(rng));
  return root_power * (std::sqrt(k / (k + 1.0)) * los + v);
}

// Density of the channel power gamma = |h|^2 for a Rician gain.
// Evaluated in log space; the Bessel factor would overflow near K ~ 700
// otherwise.
inline double power_pdf(double gamma, const FadingSpec& spec) {
  if (spec.deterministic)
    throw std::domain_error("power_pdf: deterministic spec has a point-mass density");
  if (!(gamma >= 0.0)) throw std::domain_error("power_pdf: gamma must be >= 0");
  const double k = spec.k_factor;
  const double gbar = spec.mean_power;
  const double arg = 2.0 * std::sqrt(k * (k + 1.0) * gamma / gbar);
  const double log_pdf = std::log((1.0 + k) / gbar) - k - (1.0 + k) * gamma / gbar + arg +
                         std::log(bessel_i_scaled(0, arg));
  return std::exp(log_pdf);
}

// Variance of the amplitude |h| from the standard Rician moments:
// E|h| = sigma sqrt(pi/2) L_{1/2}(-K), E|h|^2 = mean_power.
inline double amplitude_variance(const FadingSpec& spec) {
  if (spec.deterministic)
    throw std::domain_error("amplitude_variance: deterministic spec has zero variance");
  const double k = spec.k_factor;
  const double sigma2 = 0.5 * spec.mean_power / (k + 1.0);
  const double lag = laguerre_half(-k);
  return spec.mean_power - 0.5 * 3.14159265358979323846 * sigma2 * lag * lag;
}

// Density of z = gamma_s / gamma_sp when gamma_s is exponential (Rayleigh
// SU link) and gamma_sp is Rician with factor k_sp. At k_sp = 0 this is
// the log-logistic density (gsp/gs) / (1 + z gsp/gs)^2; as k_sp grows it
// approaches the exponential (gsp/gs) e^{-z gsp/gs}.
inline double ratio_pdf(double z, double k_sp, double gbar_s, double gbar_sp) {
  if (!(z >= 0.0) || !(k_sp >= 0.0) || !(gbar_s > 0.0) || !(gbar_sp > 0.0))
    throw std::domain_error("ratio_pdf: invalid arguments");
  const double c = gbar_sp / gbar_s;
  const double kp1 = 1.0 + k_sp;
  const double d = kp1 + z * c;
  return c * (kp1 * kp1 * kp1 + z * c * kp1) / (d * d * d) * std::exp(-k_sp * z * c / d);
}

// Draw the three link powers for one time instant.
inline ChannelState sample_state(const ScenarioSpec& scenario, RngStream& rng) {
  const auto power = [&](const FadingSpec& s) { return std::norm(sample_gain(s, rng)); };
  ChannelState st;
  st.gamma_s = power(scenario.su_link);
  st.gamma_sp = power(scenario.su_to_pu);
  st.gamma_ps = power(scenario.pu_to_su);
  return st;
}

}  // namespace specshare
