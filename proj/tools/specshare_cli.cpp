// Command-line runner for the spectrum-sharing experiments: capacity
// sweeps, randomized-precoding statistics, and the acceptance checks.
// Exit codes: 0 success, 1 acceptance failure, 2 solver failure,
// 3 configuration error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "specshare/acceptance.hpp"
#include "specshare/experiments.hpp"
#include "specshare/specshare.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::string out_path;
  bool gnuplot = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Path to a key = value config file");
  cmd->add_option("--seed", opts.seed, "Override the config seed");
  cmd->add_option("--samples", opts.samples, "Override the Monte Carlo sample count");
  cmd->add_option("--out", opts.out_path, "Output CSV path (default from config)");
  cmd->add_flag("--gnuplot", opts.gnuplot, "Also emit a gnuplot script next to the CSV");
}

specshare::ExperimentConfig load_config(const CommonOpts& opts) {
  specshare::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw specshare::ConfigError("cannot open config file: " + opts.config_path);
    cfg = specshare::parse_config(in);
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.samples) cfg.n_samples = *opts.samples;
  if (!opts.out_path.empty()) cfg.output_path = opts.out_path;
  cfg.validate();
  return cfg;
}

void write_gnuplot(const std::string& csv_path, const std::string& subcommand) {
  const std::string script_path = csv_path + ".gp";
  std::ofstream gp(script_path);
  gp << "set datafile separator ','\n"
     << "set key outside\n"
     << "set grid\n";
  if (subcommand == "capacity-sweep") {
    gp << "set xlabel 'Q_av (dB)'\nset ylabel 'capacity (bps/Hz)'\n"
       << "plot '" << csv_path << "' every ::1 using 1:4 with linespoints title 'capacity'\n";
  } else if (subcommand == "rap-pdf") {
    gp << "set xlabel '|h|'\nset ylabel 'density'\n"
       << "plot '" << csv_path << "' every ::1 using 2:3 with lines title 'before', \\\n"
       << "     '" << csv_path << "' every ::1 using 2:4 with lines title 'after'\n";
  } else if (subcommand == "rap-timeseries") {
    gp << "set xlabel 'instant'\nset ylabel '|h|'\n"
       << "plot '" << csv_path << "' every ::1 using 1:2 with lines title 'before', \\\n"
       << "     '" << csv_path << "' every ::1 using 1:3 with lines title 'after'\n";
  } else {
    gp << "set xlabel 'basis patterns'\nset ylabel 'capacity (bps/Hz)'\n"
       << "plot '" << csv_path << "' every ::1 using 1:4 with linespoints title 'capacity'\n";
  }
}

template <class Runner>
int run_experiment(const CommonOpts& opts, const std::string& name, Runner&& runner) {
  const specshare::ExperimentConfig cfg = load_config(opts);
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output path " << cfg.output_path << "\n";
    return 3;
  }
  const specshare::RunStatus status = runner(cfg, out);
  if (opts.gnuplot) write_gnuplot(cfg.output_path, name);
  std::cout << name << ": wrote " << cfg.output_path << "\n";
  return status.solver_failures > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrum-sharing capacity and randomized-precoding toolkit"};
  app.require_subcommand(1);

  CommonOpts sweep_opts, pdf_opts, ts_opts, basis_opts, acc_opts;
  std::vector<std::string> acc_only;

  CLI::App* sweep = app.add_subcommand("capacity-sweep",
                                       "Ergodic capacity vs average interference limit");
  add_common(sweep, sweep_opts);
  CLI::App* pdf = app.add_subcommand("rap-pdf",
                                     "Equivalent-channel amplitude histograms");
  add_common(pdf, pdf_opts);
  CLI::App* ts = app.add_subcommand("rap-timeseries",
                                    "Paired amplitude trajectories before/after precoding");
  add_common(ts, ts_opts);
  CLI::App* basis = app.add_subcommand("basis-sweep",
                                       "Capacity vs number of basis patterns");
  add_common(basis, basis_opts);
  CLI::App* acc = app.add_subcommand("acceptance", "Run the acceptance checks");
  add_common(acc, acc_opts);
  acc->add_option("--criterion", acc_only, "Run only the named criteria");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed())
      return run_experiment(sweep_opts, "capacity-sweep", [](const auto& c, auto& o) {
        return specshare::run_capacity_sweep(c, o);
      });
    if (pdf->parsed())
      return run_experiment(pdf_opts, "rap-pdf", [](const auto& c, auto& o) {
        return specshare::run_pdf_experiment(c, o);
      });
    if (ts->parsed())
      return run_experiment(ts_opts, "rap-timeseries", [](const auto& c, auto& o) {
        return specshare::run_timeseries(c, o);
      });
    if (basis->parsed())
      return run_experiment(basis_opts, "basis-sweep", [](const auto& c, auto& o) {
        return specshare::run_basis_sweep(c, o);
      });
    if (acc->parsed()) {
      const specshare::ExperimentConfig cfg = load_config(acc_opts);
      const int failures = specshare::acceptance::run(cfg, acc_only, std::cout);
      return failures > 0 ? 1 : 0;
    }
  } catch (const specshare::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 3;
  } catch (const specshare::SolveError& err) {
    std::cerr << "solver error: " << err.what() << " (achievable ["
              << err.achievable_min << ", " << err.achievable_max << "])\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
