// sigmax command-line runner.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "sigmax/analysis.hpp"
#include "sigmax/config.hpp"
#include "sigmax/errors.hpp"
#include "sigmax/plots.hpp"
#include "sigmax/rates.hpp"
#include "sigmax/record_io.hpp"
#include "sigmax/scenario.hpp"
#include "sigmax/units.hpp"

using namespace sigmax;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string engine;
  std::string out;
  double duration_us = 0;
  std::string record_path;
  int levels = 2;
  int n_cavity = 10;
  bool binary = false;
  int bins = 0;
  int states = 3;
};

ScenarioConfig load(const Options& o, ScenarioKind fallback = ScenarioKind::custom) {
  ScenarioConfig c = o.config_path.empty() ? preset_config(fallback) : load_config(o.config_path);
  if (o.seed_set) c.seeds = {o.seed};
  if (!o.engine.empty()) c.engine = o.engine;
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.duration_us > 0) c.duration = units::us(o.duration_us);
  c.validate();
  return c;
}

IQRecord load_record(const std::string& path, std::vector<int>* hidden = nullptr) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw MissingOutput("cannot read " + path);
  char magic[8] = {};
  probe.read(magic, 8);
  if (std::string(magic, 8) == "SGXIQ001") return read_record_binary(path);
  LoadedRecord r = read_record_csv(path);
  if (hidden) *hidden = std::move(r.hidden);
  return std::move(r.record);
}

void show_params(const Options& o) {
  std::cout << format_config(load(o));
}

void show_rates(const Options& o) {
  const ScenarioConfig c = resolved(load(o));
  const SystemParams& p = c.params;
  const DerivedParams d = derive(p);
  const TransitionRates r = golden_rule_rates(p, d);
  const auto mhz = [](double w) { return units::to_mhz(w); };
  std::cout << std::setprecision(6);
  std::cout << "quantity                    value\n";
  std::cout << "n_sb                        " << d.n_bar_sb << "\n";
  std::cout << "g_eff/2pi [MHz]             " << mhz(d.g_eff) << "\n";
  std::cout << "Delta/2pi [MHz]             " << mhz(d.Delta) << "\n";
  std::cout << "Sigma/2pi [MHz]             " << mhz(d.Sigma) << "\n";
  if (p.Omega_R != 0 && d.Delta != 0 && d.Sigma != 0) {
    const ZetaShift z = zeta(p, d);
    std::cout << "zeta/2pi [MHz]              " << mhz(z.zeta) << "\n";
    std::cout << "zeta'/2pi [MHz]             " << mhz(z.zeta_prime) << "\n";
  }
  std::cout << "Gamma_+-^-1 [us]            " << units::to_us(1 / r.gamma_plus_minus) << "\n";
  std::cout << "Gamma_-+^-1 [us]            " << units::to_us(1 / r.gamma_minus_plus) << "\n";
  std::cout << "Purcell Gamma_+- [1/us]     " << r.gamma_purcell_pm * 1e-6 << "\n";
  std::cout << "Purcell Gamma_-+ [1/us]     " << r.gamma_purcell_mp * 1e-6 << "\n";
  std::cout << "T2 sideband [ns]            " << units::to_ns(r.t2_sideband) << "\n";
  std::cout << "signal_scale                " << c.readout.signal_scale << "\n";
  for (const auto& w : dispersive_validity_warnings(p, d)) std::cout << "warning: " << w << "\n";
}

void show_steady_state(const Options& o) {
  const ScenarioConfig c = load(o);
  const DensityMatrix rho = displaced_steady_state(c.params, o.levels, o.n_cavity);
  std::cout << std::setprecision(8);
  for (int k = 0; k < o.levels; ++k) {
    std::cout << "p_" << k << " " << rho.level_population(k) << "\n";
  }
  if (o.levels <= 3) {
    std::cout << "<sigma_x> " << expectation(sigma_ops(rho.space()).sx, rho).real() << "\n";
  }
  std::cout << "min_eigenvalue " << rho.min_eigenvalue() << "\n";
}

std::vector<cplx> expected_signals(const ScenarioConfig& c, int states) {
  const MarkovEmitter e = sigma_x_emitter(c.params, c.readout, f_rates_for_population(c.f_population, c.params.T1));
  return {e.signal.begin(), e.signal.begin() + std::min(states, e.n_states)};
}

void run_trace(const Options& o) {
  ScenarioConfig c = resolved(load(o));
  const std::uint64_t seed = c.seeds[0];
  IQRecord record;
  std::vector<int> hidden;
  if (c.engine == "markov") {
    const MarkovEmitter e = sigma_x_emitter(c.params, c.readout, f_rates_for_population(c.f_population, c.params.T1));
    MarkovTrace t = simulate_markov_trace(e, c.readout, c.duration, seed);
    record = std::move(t.record);
    hidden = std::move(t.hidden);
  } else {
    const HilbertSpace space(2, 6);
    const ReadoutFrameModel m = readout_frame_model(c.params, c.readout, space);
    const DiffusiveTrajectory t = simulate_diffusive_trajectory(
        m.hamiltonian, m.collapse, c.readout, DensityMatrix::pure(named_state(space, NamedState::plus)),
        c.duration, seed);
    record = t.record;
  }
  record.params_hash = params_hash(c.params);
  fs::create_directories(c.output_dir);
  const fs::path path = fs::path(c.output_dir) / (o.binary ? "record.bin" : "record.csv");
  if (o.binary) {
    write_record_binary(path.string(), record);
  } else {
    write_record_csv(path.string(), record, hidden);
  }
  std::cout << path.string() << " (" << record.samples.size() << " samples)\n";
}

void run_histogram(const Options& o) {
  const IQRecord record = load_record(o.record_path);
  const int bins = o.bins > 0 ? o.bins : AnalysisSettings{}.hist_bins;
  const Histogram2D h = histogram_iq(record.samples, bins, bins);
  const std::string dir = o.out.empty() ? "." : o.out;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / "histogram.csv";
  std::ofstream out(path);
  if (!out) throw MissingOutput("cannot write " + path.string());
  out << std::setprecision(12) << "i_center,q_center,count\n";
  for (int i = 0; i < h.bins_i(); ++i) {
    for (int q = 0; q < h.bins_q(); ++q) {
      out << h.center(i, q).real() << ',' << h.center(i, q).imag() << ',' << h.counts(i, q) << '\n';
    }
  }
  std::cout << path.string() << "\n";
}

void run_analyze(const Options& o) {
  const ScenarioConfig c = resolved(load(o));
  std::vector<int> hidden;
  const IQRecord record = load_record(o.record_path, &hidden);
  if (!hidden.empty() && hidden.front() < 0) hidden.clear();
  const JumpAnalysis ja = analyze_jumps(record, expected_signals(c, o.states), c.analysis, hidden);
  const char* names[] = {"minus", "plus", "f"};
  nlohmann::json j;
  j["bins"] = record.samples.size();
  j["fit_converged"] = ja.fit.converged;
  j["filter_accuracy"] = ja.accuracy;
  j["undecided_fraction"] =
      double(std::count(ja.filtered.states.begin(), ja.filtered.states.end(), kUndecided)) /
      double(ja.filtered.states.size());
  for (std::size_t k = 0; k < ja.centers.size(); ++k) {
    auto& s = j["states"][names[k]];
    s["center"] = {ja.centers[k].real(), ja.centers[k].imag()};
    s["occupancy"] = ja.dwell.occupancy(int(k));
    s["mean_dwell_us"] = ja.dwell.exit_rate(int(k)) > 0 ? units::to_us(ja.dwell.mean_dwell(int(k))) : -1.0;
  }
  j["insufficient_jumps"] = ja.dwell.insufficient_jumps;
  std::string text = j.dump(2) + "\n";
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / "analysis.json") << text;
  }
  std::cout << text;
}

void run_sweep(const Options& o) {
  const RunManifest m = run_scenario(load(o));
  for (const auto& f : m.outputs) std::cout << f.path << "\n";
  for (const auto& e : m.errors) std::cerr << "error: " << e << "\n";
}

void run_plot(const Options& o) {
  for (const auto& p : emit_plots(o.out.empty() ? "out" : o.out)) std::cout << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous sigma_x measurement simulator"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { o.seed = s; o.seed_set = true; },
                                            "base RNG seed");
    sub->add_option("--engine", o.engine, "markov or diffusive")->check(CLI::IsMember({"markov", "diffusive"}));
    sub->add_option("--out", o.out, "output directory");
  };

  auto* params = app.add_subcommand("params", "Parameter utilities");
  auto* show = params->add_subcommand("show", "Print the resolved configuration");
  params->require_subcommand(1);
  common(show);
  show->callback([&] { show_params(o); });

  auto* rates = app.add_subcommand("rates", "Print derived couplings and transition rates");
  common(rates);
  rates->callback([&] { show_rates(o); });

  auto* ss = app.add_subcommand("steady-state", "Displaced-frame steady state");
  common(ss);
  ss->add_option("--levels", o.levels, "transmon levels")->check(CLI::Range(2, 7));
  ss->add_option("--n-cavity", o.n_cavity, "cavity Fock cutoff")->check(CLI::PositiveNumber);
  ss->callback([&] { show_steady_state(o); });

  auto* trace = app.add_subcommand("trace", "Simulate a measurement record");
  common(trace);
  trace->add_option("--duration-us", o.duration_us, "record length");
  trace->add_flag("--binary", o.binary, "write the binary record format");
  trace->callback([&] { run_trace(o); });

  auto* hist = app.add_subcommand("histogram", "IQ histogram of a record");
  common(hist);
  hist->add_option("record", o.record_path, "record file (CSV or binary)")->required()->check(CLI::ExistingFile);
  hist->add_option("--bins", o.bins, "bins per axis");
  hist->callback([&] { run_histogram(o); });

  auto* analyze = app.add_subcommand("analyze", "Fit, filter and dwell statistics of a record");
  common(analyze);
  analyze->add_option("record", o.record_path, "record file (CSV or binary)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--states", o.states, "2 or 3 Gaussian components")->check(CLI::Range(2, 3));
  analyze->callback([&] { run_analyze(o); });

  auto* sweep = app.add_subcommand("sweep", "Run the configured scenario");
  common(sweep);
  sweep->callback([&] { run_sweep(o); });

  auto* plot = app.add_subcommand("plot", "Render SVG plots of a finished run");
  plot->add_option("--out", o.out, "run directory");
  plot->callback([&] { run_plot(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
