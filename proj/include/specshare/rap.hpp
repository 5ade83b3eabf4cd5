#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "specshare/channels.hpp"
#include "specshare/power.hpp"
#include "specshare/rng.hpp"

namespace specshare {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Per-instant transmit weights: common amplitude alpha = 1/m and one
// phase per basis pattern, so sum |w|^2 = 1 by construction.
struct TxWeights {
  std::vector<double> phases;
  double amplitude = 1.0;  // alpha, the squared magnitude of each weight

  std::size_t size() const { return phases.size(); }
  Complex weight(std::size_t i) const { return std::polar(std::sqrt(amplitude), phases[i]); }
};

inline TxWeights random_tx_weights(std::size_t m, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("random_tx_weights: m must be >= 1");
  TxWeights w;
  w.amplitude = 1.0 / static_cast<double>(m);
  w.phases.resize(m);
  for (std::size_t i = 0; i < m; ++i) w.phases[i] = kTwoPi * sample_uniform(rng);
  return w;
}

// Channel gains seen by the m basis patterns of one link at one instant.
// Marginals are Rician with a shared K-factor; the scattered parts are
// independent across patterns, the specular phases come from the fixed
// profile.
struct BasisChannelSet {
  std::vector<Complex> gains;
  double k_factor = 0.0;
  double mean_power = 1.0;
  std::vector<double> los_phases;
  bool deterministic = false;

  std::size_t size() const { return gains.size(); }
};

inline BasisChannelSet sample_basis_channels(std::size_t m, const FadingSpec& spec,
                                             const std::vector<double>& phase_profile,
                                             RngStream& rng) {
  if (phase_profile.size() != m)
    throw std::invalid_argument("sample_basis_channels: phase profile size mismatch");
  BasisChannelSet ch;
  ch.k_factor = spec.k_factor;
  ch.mean_power = spec.mean_power;
  ch.deterministic = spec.deterministic;
  ch.los_phases = phase_profile;
  ch.gains.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    FadingSpec per = spec;
    per.los_phase = phase_profile[i];
    ch.gains[i] = sample_gain(per, rng);
  }
  return ch;
}

// Equivalent scalar channel sum_m w_m h^m.
inline Complex equivalent_gain(const TxWeights& weights, const BasisChannelSet& channels) {
  if (weights.size() != channels.size())
    throw std::invalid_argument("equivalent_gain: size mismatch");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights.weight(i) * channels.gains[i];
  return acc;
}

// Specular part only: sum_m w_m e^{j phi_m} sqrt(K/(K+1)). Over random
// weight draws its real and imaginary parts each approach
// N(0, K/(2(K+1))) as m grows. Not scaled by the mean power.
inline Complex equivalent_los(const TxWeights& weights, const BasisChannelSet& channels) {
  if (weights.size() != channels.size())
    throw std::invalid_argument("equivalent_los: size mismatch");
  const double specular =
      channels.deterministic ? 1.0
                             : std::sqrt(channels.k_factor / (channels.k_factor + 1.0));
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < weights.size(); ++i)
    acc += weights.weight(i) * std::polar(specular, channels.los_phases[i]);
  return acc;
}

// Maximum-ratio combiner over the per-receive-basis specular components:
// w_u = conj(l_u) / ||l||. Needs no per-basis channel estimates, only the
// deterministic specular sums.
inline std::vector<Complex> mrc_receive_weights(const std::vector<Complex>& specular) {
  double norm_sq = 0.0;
  for (const Complex& l : specular) norm_sq += std::norm(l);
  if (!(norm_sq > 0.0))
    throw std::runtime_error("mrc_receive_weights: all-zero specular vector");
  const double inv = 1.0 / std::sqrt(norm_sq);
  std::vector<Complex> w(specular.size());
  for (std::size_t i = 0; i < specular.size(); ++i) w[i] = std::conj(specular[i]) * inv;
  return w;
}

// Frozen line-of-sight phase profiles for the three links. sp is indexed
// by transmit basis, ps by receive basis, s by (receive, transmit).
struct PhaseProfiles {
  std::size_t m_tx = 0, m_rx = 0;
  std::vector<double> sp;  // m_tx
  std::vector<double> ps;  // m_rx
  std::vector<double> s;   // m_rx * m_tx, row-major [u * m_tx + m]

  double s_at(std::size_t u, std::size_t m) const { return s[u * m_tx + m]; }

  void validate() const {
    if (m_tx < 1 || m_rx < 1) throw std::invalid_argument("PhaseProfiles: counts must be >= 1");
    if (sp.size() != m_tx || ps.size() != m_rx || s.size() != m_tx * m_rx)
      throw std::invalid_argument("PhaseProfiles: size mismatch");
  }
};

inline PhaseProfiles make_phase_profiles(std::size_t m_tx, std::size_t m_rx, RngStream& rng) {
  PhaseProfiles p;
  p.m_tx = m_tx;
  p.m_rx = m_rx;
  p.sp.resize(m_tx);
  p.ps.resize(m_rx);
  p.s.resize(m_tx * m_rx);
  for (auto& v : p.sp) v = kTwoPi * sample_uniform(rng);
  for (auto& v : p.ps) v = kTwoPi * sample_uniform(rng);
  for (auto& v : p.s) v = kTwoPi * sample_uniform(rng);
  return p;
}

// Equivalent channels for one time instant.
struct RapLinkState {
  Complex h_s{0.0, 0.0};
  Complex h_sp{0.0, 0.0};
  Complex h_ps{0.0, 0.0};
  std::uint64_t instant = 0;

  ChannelState to_channel_state() const {
    return {std::norm(h_s), std::norm(h_sp), std::norm(h_ps)};
  }
};

// One instant of randomized precoding. Fresh transmit phases randomize the
// SU-to-PU link; the PU-to-SU link goes through independent random receive
// weights. The SU-to-SU link uses an m_rx x m_tx gain matrix; with smart_rx
// the receive weights are the MRC combiner over the specular sums (which
// depend only on the transmit phases and the fixed phase profile), pinned
// to the desired link while the interference links stay randomized.
inline RapLinkState rap_link_step(const ScenarioSpec& scenario, std::size_t m_tx,
                                  std::size_t m_rx, bool smart_rx,
                                  const PhaseProfiles& profiles, RngStream& rng) {
  scenario.validate();
  profiles.validate();
  if (profiles.m_tx != m_tx || profiles.m_rx != m_rx)
    throw std::invalid_argument("rap_link_step: profile dimensions mismatch");
  if (smart_rx && !scenario.su_link.deterministic && !(scenario.su_link.k_factor > 0.0))
    throw std::invalid_argument(
        "rap_link_step: smart_rx requires a specular SU link (K_s > 0)");

  const TxWeights w_tx = random_tx_weights(m_tx, rng);
  const TxWeights w_rx_ps = random_tx_weights(m_rx, rng);
  TxWeights w_rx_s;
  if (!smart_rx) w_rx_s = random_tx_weights(m_rx, rng);

  RapLinkState out;
  out.h_sp = equivalent_gain(w_tx, sample_basis_channels(m_tx, scenario.su_to_pu,
                                                         profiles.sp, rng));
  out.h_ps = equivalent_gain(w_rx_ps, sample_basis_channels(m_rx, scenario.pu_to_su,
                                                            profiles.ps, rng));

  // SU link: transmit-combine each receive basis row, then receive-combine.
  std::vector<Complex> tx_combined(m_rx);
  std::vector<Complex> specular(m_rx);
  for (std::size_t u = 0; u < m_rx; ++u) {
    std::vector<double> row(profiles.s.begin() + u * m_tx,
                            profiles.s.begin() + (u + 1) * m_tx);
    const BasisChannelSet ch = sample_basis_channels(m_tx, scenario.su_link, row, rng);
    tx_combined[u] = equivalent_gain(w_tx, ch);
    if (smart_rx) specular[u] = equivalent_los(w_tx, ch);
  }
  if (smart_rx) {
    const std::vector<Complex> w_mrc = mrc_receive_weights(specular);
    Complex acc{0.0, 0.0};
    for (std::size_t u = 0; u < m_rx; ++u) acc += w_mrc[u] * tx_combined[u];
    out.h_s = acc;
  } else {
    Complex acc{0.0, 0.0};
    for (std::size_t u = 0; u < m_rx; ++u) acc += w_rx_s.weight(u) * tx_combined[u];
    out.h_s = acc;
  }
  return out;
}

// State source for the capacity machinery: equivalent channel powers from
// per-instant randomized precoding.
inline StateSampler make_rap_state_sampler(ScenarioSpec scenario, std::size_t m_tx,
                                           std::size_t m_rx, bool smart_rx,
                                           PhaseProfiles profiles) {
  return [scenario, m_tx, m_rx, smart_rx, profiles = std::move(profiles)](RngStream& rng) {
    return rap_link_step(scenario, m_tx, m_rx, smart_rx, profiles, rng).to_channel_state();
  };
}

namespace detail {

// Asymptotic Kolmogorov survival function Q(t) = 2 sum (-1)^{k-1} e^{-2 k^2 t^2},
// truncated at 100 terms and clamped to [0, 1].
inline double kolmogorov_survival(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace detail

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test of amplitude samples against the
// Rayleigh CDF 1 - e^{-a^2/mean_power}; asymptotic p-value.
inline KsResult ks_rayleigh(std::vector<double> amplitudes, double mean_power) {
  const std::size_t n = amplitudes.size();
  if (n < 100) throw std::invalid_argument("ks_rayleigh: need at least 100 samples");
  if (!(mean_power > 0.0)) throw std::invalid_argument("ks_rayleigh: mean_power must be > 0");
  std::sort(amplitudes.begin(), amplitudes.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(-amplitudes[i] * amplitudes[i] / mean_power);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - f;
    const double lo = f - static_cast<double>(i) / static_cast<double>(n);
    d = std::max(d, std::max(hi, lo));
  }
  const double t = std::sqrt(static_cast<double>(n)) * d;
  return {d, detail::kolmogorov_survival(t)};
}

}  // namespace specshare
