#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigmax/measurement.hpp"
#include "sigmax/params.hpp"

namespace sigmax {

enum class ScenarioKind {
  fig2_histograms,
  fig3_prep_sweeps,
  fig4_jumptrace,
  supp1a_zeta_sweep,
  supp1b_f_population,
  supp1c_sigmax_equilibrium,
  custom
};

std::string to_string(ScenarioKind k);
ScenarioKind scenario_from_string(const std::string& s);

struct AnalysisSettings {
  int hist_bins = 120;
  double filter_radius_sigmas = 3.0;
  int latch = 2;
  double imperfection_scale = 0.88;
  double imperfection_shift = -0.02;

  bool operator==(const AnalysisSettings&) const = default;
};

/// Everything a run needs. Frequencies are rad/s and times seconds in memory; files use MHz
/// (f/2pi) and microseconds.
struct ScenarioConfig {
  SystemParams params;
  ReadoutModel readout;
  ScenarioKind scenario = ScenarioKind::custom;
  std::string sweep_axis = "Omega_R";   ///< "Omega_R" (grid in rad/s) or "angle" (radians)
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds{1};
  double duration = 1.0;
  std::string engine = "markov";        ///< "markov" or "diffusive"
  std::string output_dir = "out";
  double f_population = 0.08;
  bool calibrate_scale = true;          ///< fit signal_scale to separation_target at load time
  double separation_target = 5.4;
  double delta_f = 0;
  int threads = 0;                      ///< 0 uses the hardware concurrency
  AnalysisSettings analysis;

  void validate() const;
};

/// Reference device with the default grid and settings of the given scenario.
ScenarioConfig preset_config(ScenarioKind kind);

/// Parses key = value lines grouped in [device], [drives], [readout], [scenario] and [analysis]
/// sections. Missing keys keep the preset defaults of the named scenario.
/// Throws SchemaError naming the offending field.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Writes every field, so that load_config(save_config(c)) reproduces c up to unit conversion.
std::string format_config(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::string& path);

/// Applies signal_scale calibration if requested.
ScenarioConfig resolved(ScenarioConfig config);

}  // namespace sigmax
