#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "specshare/capacity.hpp"
#include "specshare/channels.hpp"
#include "specshare/power.hpp"
#include "specshare/rap.hpp"
#include "specshare/rng.hpp"
#include "specshare/version.hpp"

namespace specshare {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key = value experiment description. Defaults: 0 dB link powers,
// 1 dB primary power, 10 dB K-factor, 100000 samples. The capacity grid
// defaults to 3..7 dB, the window on which the five scenario curves keep
// their canonical order (the chain breaks below ~2.5 dB and above ~7 dB,
// where the AWGN curve overtakes the Rician-Rayleigh one).
struct ExperimentConfig {
  std::vector<std::string> scenarios = {"rayleigh-rician", "rayleigh-rayleigh", "rician-rician",
                                        "rician-rayleigh", "awgn"};
  std::vector<double> q_av_db_grid = {3.0, 4.0, 5.0, 6.0, 7.0};
  std::vector<double> rhos = {1.2, std::numeric_limits<double>::infinity()};
  double k_factor_db = 10.0;
  double mean_power_s_db = 0.0;
  double mean_power_sp_db = 0.0;
  double mean_power_ps_db = 0.0;
  double pu_power_db = 1.0;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> m_grid = {1, 2, 3, 5, 8};
  std::string output_path = "out.csv";
  double basis_q_av_db = 0.0;      // operating point for the basis-pattern sweep
  std::size_t timeseries_duration = 500;
  std::size_t timeseries_m = 5;
  double solver_rel_tol = 0.002;

  void validate() const {
    if (scenarios.empty()) throw ConfigError("config: scenarios must be non-empty");
    if (q_av_db_grid.empty()) throw ConfigError("config: q_av_db_grid must be non-empty");
    if (rhos.empty()) throw ConfigError("config: rho must be non-empty");
    for (double r : rhos)
      if (!(r > 1.0)) throw ConfigError("config: rho values must be > 1");
    if (n_samples < 10000) throw ConfigError("config: n_samples must be >= 10000");
    if (m_grid.empty()) throw ConfigError("config: m_grid must be non-empty");
    for (std::size_t m : m_grid)
      if (m < 1) throw ConfigError("config: m_grid entries must be >= 1");
    if (timeseries_duration < 100)
      throw ConfigError("config: timeseries_duration must be >= 100");
    if (timeseries_m < 1) throw ConfigError("config: timeseries_m must be >= 1");
    if (!(solver_rel_tol > 0.0) || solver_rel_tol > 0.05)
      throw ConfigError("config: solver_rel_tol must be in (0, 0.05]");
    if (!(k_factor_db == k_factor_db)) throw ConfigError("config: bad k_factor_db");
  }
};

namespace detail {

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("config: trailing characters in number: " + s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse number: " + s);
  }
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string canonical(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "scenarios=";
  for (const auto& s : c.scenarios) os << s << ',';
  os << ";q=";
  for (double q : c.q_av_db_grid) os << format_double(q) << ',';
  os << ";rho=";
  for (double r : c.rhos) os << format_double(r) << ',';
  os << ";k=" << format_double(c.k_factor_db) << ";gs=" << format_double(c.mean_power_s_db)
     << ";gsp=" << format_double(c.mean_power_sp_db)
     << ";gps=" << format_double(c.mean_power_ps_db) << ";gp=" << format_double(c.pu_power_db)
     << ";n=" << c.n_samples << ";seed=" << c.seed << ";m=";
  for (std::size_t m : c.m_grid) os << m << ',';
  os << ";bq=" << format_double(c.basis_q_av_db) << ";td=" << c.timeseries_duration
     << ";tm=" << c.timeseries_m << ";tol=" << format_double(c.solver_rel_tol);
  return os.str();
}

// Stream ids are fixed per purpose; every scenario draws from the same
// stream so comparisons across scenarios ride on common random numbers.
enum StreamId : std::uint64_t {
  kStreamSolve = 11,
  kStreamCapacityEval = 12,
  kStreamValidation = 13,
  kStreamPdfBefore = 21,
  kStreamPdfAfter = 22,
  kStreamTimeseries = 31,
  kStreamBasisSolve = 41,
  kStreamBasisEval = 42,
  kStreamProfiles = 51,
};

}  // namespace detail

inline std::uint64_t config_hash(const ExperimentConfig& c) {
  return detail::fnv1a(detail::canonical(c));
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, eq;
    if (!(ls >> key)) continue;
    std::string value;
    if (!(ls >> eq) || eq != "=")
      throw ConfigError("config: expected 'key = value', got: " + line);
    std::getline(ls, value);
    const auto first = value.find_first_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("config: missing value for " + key);
    const auto last = value.find_last_not_of(" \t\r");
    value = value.substr(first, last - first + 1);

    using detail::parse_double;
    using detail::split_list;
    if (key == "scenarios") {
      cfg.scenarios = split_list(value);
    } else if (key == "q_av_db_grid") {
      cfg.q_av_db_grid.clear();
      for (const auto& v : split_list(value)) cfg.q_av_db_grid.push_back(parse_double(v));
    } else if (key == "rho") {
      cfg.rhos.clear();
      for (const auto& v : split_list(value)) cfg.rhos.push_back(parse_double(v));
    } else if (key == "k_factor_db") {
      cfg.k_factor_db = parse_double(value);
    } else if (key == "mean_power_s_db") {
      cfg.mean_power_s_db = parse_double(value);
    } else if (key == "mean_power_sp_db") {
      cfg.mean_power_sp_db = parse_double(value);
    } else if (key == "mean_power_ps_db") {
      cfg.mean_power_ps_db = parse_double(value);
    } else if (key == "pu_power_db") {
      cfg.pu_power_db = parse_double(value);
    } else if (key == "n_samples") {
      cfg.n_samples = static_cast<std::size_t>(parse_double(value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_double(value));
    } else if (key == "m_grid") {
      cfg.m_grid.clear();
      for (const auto& v : split_list(value))
        cfg.m_grid.push_back(static_cast<std::size_t>(parse_double(v)));
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else if (key == "basis_q_av_db") {
      cfg.basis_q_av_db = parse_double(value);
    } else if (key == "timeseries_duration") {
      cfg.timeseries_duration = static_cast<std::size_t>(parse_double(value));
    } else if (key == "timeseries_m") {
      cfg.timeseries_m = static_cast<std::size_t>(parse_double(value));
    } else if (key == "solver_rel_tol") {
      cfg.solver_rel_tol = parse_double(value);
    } else {
      throw ConfigError("config: unknown key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

inline ScenarioSpec scenario_by_name(const std::string& name, const ExperimentConfig& cfg) {
  const double k = db_to_linear(cfg.k_factor_db);
  const double gs = db_to_linear(cfg.mean_power_s_db);
  const double gsp = db_to_linear(cfg.mean_power_sp_db);
  const double gps = db_to_linear(cfg.mean_power_ps_db);
  const double gp = db_to_linear(cfg.pu_power_db);
  if (name == "rician-rician")
    return {FadingSpec::rician(k, gs), FadingSpec::rician(k, gsp), FadingSpec::rician(k, gps), gp};
  if (name == "rician-rayleigh")
    return {FadingSpec::rayleigh(gs), FadingSpec::rician(k, gsp), FadingSpec::rician(k, gps), gp};
  if (name == "rayleigh-rayleigh")
    return {FadingSpec::rayleigh(gs), FadingSpec::rayleigh(gsp), FadingSpec::rayleigh(gps), gp};
  if (name == "rayleigh-rician")
    return {FadingSpec::rician(k, gs), FadingSpec::rayleigh(gsp), FadingSpec::rayleigh(gps), gp};
  if (name == "awgn")
    return {FadingSpec::awgn(gs), FadingSpec::awgn(gsp), FadingSpec::awgn(gps), gp};
  throw ConfigError("config: unknown scenario: " + name);
}

struct RunStatus {
  int solver_failures = 0;
};

namespace detail {

inline void write_csv_header(const ExperimentConfig& cfg, std::ostream& out) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  out << "# specshare " << kVersion << " config_hash=" << hex << " seed=" << cfg.seed << "\n";
}

}  // namespace detail

// Ergodic capacity versus the average interference limit, one row per
// (scenario, rho, q_av) combination, sorted by that key. Solver failures
// become rows with an error status and the sweep continues.
inline RunStatus run_capacity_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  RunStatus status;
  detail::write_csv_header(cfg, out);
  out << "q_av_db,scenario,rho,capacity_bps_hz,std_error,status\n";

  std::vector<std::string> names = cfg.scenarios;
  std::sort(names.begin(), names.end());
  std::vector<double> rhos = cfg.rhos;
  std::sort(rhos.begin(), rhos.end());

  for (const std::string& name : names) {
    const ScenarioSpec scenario = scenario_by_name(name, cfg);
    for (double rho : rhos) {
      for (double q_db : cfg.q_av_db_grid) {
        const double q_av = db_to_linear(q_db);
        ConstraintSet constraints{q_av, rho * q_av, scenario.pu_power};
        out << detail::format_double(q_db) << ',' << name << ','
            << detail::format_double(rho) << ',';
        try {
          const PowerPolicy policy =
              solve_lambda(scenario, constraints, cfg.n_samples,
                           RngStream(cfg.seed, detail::kStreamSolve), cfg.solver_rel_tol);
          const CapacityResult cap = capacity_mc(
              scenario, policy, cfg.n_samples, RngStream(cfg.seed, detail::kStreamCapacityEval));
          out << detail::format_double(cap.bits_per_hz) << ','
              << detail::format_double(cap.std_error) << ",ok\n";
        } catch (const SolveError& err) {
          ++status.solver_failures;
          out << ",,\"error: " << err.what() << "\"\n";
        }
      }
    }
  }
  return status;
}

// Interference-channel amplitude histograms before and after randomized
// precoding, 50 bins, plus KS-against-Rayleigh summary rows per pattern
// count.
inline RunStatus run_pdf_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  detail::write_csv_header(cfg, out);
  out << "m,amplitude_bin,density_before,density_after\n";

  const ScenarioSpec scenario = scenario_by_name("rician-rician", cfg);
  const FadingSpec link = scenario.su_to_pu;
  const double gbar = link.mean_power;
  const double edge = 3.5 * std::sqrt(gbar);
  constexpr int kBins = 50;
  const double width = edge / kBins;

  std::vector<double> before(cfg.n_samples);
  {
    RngStream rng(cfg.seed, detail::kStreamPdfBefore);
    for (auto& a : before) a = std::abs(sample_gain(link, rng));
  }
  const auto histogram = [&](const std::vector<double>& samples) {
    std::vector<double> h(kBins, 0.0);
    for (double a : samples) {
      const int bin = std::min(kBins - 1, static_cast<int>(a / width));
      h[bin] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(samples.size()) * width;
    return h;
  };
  const std::vector<double> hist_before = histogram(before);
  const KsResult ks_before = ks_rayleigh(before, gbar);

  for (std::size_t m : cfg.m_grid) {
    RngStream profile_rng(cfg.seed, detail::kStreamProfiles);
    const PhaseProfiles profiles = make_phase_profiles(m, 1, profile_rng);
    RngStream rng(cfg.seed, detail::kStreamPdfAfter + 100 * m);
    std::vector<double> after(cfg.n_samples);
    for (auto& a : after) {
      const TxWeights w = random_tx_weights(m, rng);
      a = std::abs(equivalent_gain(w, sample_basis_channels(m, link, profiles.sp, rng)));
    }
    const std::vector<double> hist_after = histogram(after);
    const KsResult ks_after = ks_rayleigh(after, gbar);
    for (int b = 0; b < kBins; ++b) {
      out << m << ',' << detail::format_double((b + 0.5) * width) << ','
          << detail::format_double(hist_before[b]) << ','
          << detail::format_double(hist_after[b]) << '\n';
    }
    out << m << ",ks_statistic," << detail::format_double(ks_before.statistic) << ','
        << detail::format_double(ks_after.statistic) << '\n';
    out << m << ",ks_p_value," << detail::format_double(ks_before.p_value) << ','
        << detail::format_double(ks_after.p_value) << '\n';
  }
  return {};
}

// Paired amplitude trajectories: the same basis-channel draw seen by the
// active pattern alone (before) and through random weights (after).
inline RunStatus run_timeseries(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  detail::write_csv_header(cfg, out);
  out << "k,amplitude_before,amplitude_after\n";

  const ScenarioSpec scenario = scenario_by_name("rician-rician", cfg);
  const FadingSpec link = scenario.su_to_pu;
  const std::size_t m = cfg.timeseries_m;
  RngStream profile_rng(cfg.seed, detail::kStreamProfiles);
  const PhaseProfiles profiles = make_phase_profiles(m, 1, profile_rng);
  RngStream rng(cfg.seed, detail::kStreamTimeseries);

  const double threshold = 0.1 * std::sqrt(link.mean_power);
  std::size_t deep_before = 0, deep_after = 0;
  KahanSum sum_b, sum_a, sq_b, sq_a;
  for (std::size_t k = 0; k < cfg.timeseries_duration; ++k) {
    const BasisChannelSet ch = sample_basis_channels(m, link, profiles.sp, rng);
    const TxWeights w = random_tx_weights(m, rng);
    const double a_before = std::abs(ch.gains[0]);
    const double a_after = std::abs(equivalent_gain(w, ch));
    deep_before += a_before < threshold;
    deep_after += a_after < threshold;
    sum_b.add(a_before);
    sum_a.add(a_after);
    sq_b.add(a_before * a_before);
    sq_a.add(a_after * a_after);
    out << k << ',' << detail::format_double(a_before) << ','
        << detail::format_double(a_after) << '\n';
  }
  const double n = static_cast<double>(cfg.timeseries_duration);
  const double mean_b = sum_b.value() / n, mean_a = sum_a.value() / n;
  out << "deep_fades," << deep_before << ',' << deep_after << '\n';
  out << "variance," << detail::format_double(sq_b.value() / n - mean_b * mean_b) << ','
      << detail::format_double(sq_a.value() / n - mean_a * mean_a) << '\n';
  return {};
}

// Capacity as a function of the number of basis patterns. Scenarios with
// specular interference get the full sweep (smart receive combining when
// the SU link is itself specular); other scenarios contribute their plain
// single-pattern capacity as a reference row.
inline RunStatus run_basis_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  RunStatus status;
  detail::write_csv_header(cfg, out);
  out << "m,scenario,smart_rx,capacity_bps_hz,status\n";

  const double q_av = db_to_linear(cfg.basis_q_av_db);
  std::vector<std::string> names = cfg.scenarios;
  std::sort(names.begin(), names.end());

  for (const std::string& name : names) {
    const ScenarioSpec scenario = scenario_by_name(name, cfg);
    ConstraintSet constraints{q_av, std::numeric_limits<double>::infinity(),
                              scenario.pu_power};
    const bool rap_swept = !scenario.su_to_pu.deterministic && scenario.su_to_pu.k_factor > 0.0;
    const bool smart = rap_swept && scenario.su_link.k_factor > 0.0;

    const auto emit = [&](std::size_t m, const StateSampler& sampler) {
      out << m << ',' << name << ',' << (smart && m > 1 ? 1 : 0) << ',';
      try {
        const PowerPolicy policy =
            solve_lambda(sampler, constraints, cfg.n_samples,
                         RngStream(cfg.seed, detail::kStreamBasisSolve), cfg.solver_rel_tol);
        const CapacityResult cap = capacity_mc(
            sampler, policy, cfg.n_samples, RngStream(cfg.seed, detail::kStreamBasisEval));
        out << detail::format_double(cap.bits_per_hz) << ",ok\n";
      } catch (const SolveError& err) {
        ++status.solver_failures;
        out << ",\"error: " << err.what() << "\"\n";
      }
    };

    if (!rap_swept) {
      emit(1, [&scenario](RngStream& r) { return sample_state(scenario, r); });
      continue;
    }
    for (std::size_t m : cfg.m_grid) {
      RngStream profile_rng(cfg.seed, detail::kStreamProfiles);
      const PhaseProfiles profiles = make_phase_profiles(m, m, profile_rng);
      const StateSampler sampler =
          make_rap_state_sampler(scenario, m, m, smart && m > 1, profiles);
      emit(m, sampler);
    }
  }
  return status;
}

}  // namespace specshare
