#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigmax/analysis.hpp"
#include "sigmax/config.hpp"
#include "sigmax/measurement.hpp"

namespace sigmax {

inline constexpr const char* kVersion = "0.1.0";

struct OutputFile {
  std::string path;   ///< relative to the run directory
  std::uint64_t checksum = 0;
};

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string version = kVersion;
  std::string scenario;
  std::string started, finished;   ///< UTC, ISO 8601
  std::vector<OutputFile> outputs;
  std::vector<std::string> errors;
};

/// Seed of one sweep point, derived from the base seed and the grid value so that a point's
/// output does not depend on how the grid is partitioned.
std::uint64_t point_seed(std::uint64_t base, double value);

/// Runs the configured scenario, writes its CSV/JSON outputs and manifest.json into
/// config.output_dir and returns the manifest. Module errors at a sweep point are recorded in
/// the manifest and the remaining points still run.
RunManifest run_scenario(const ScenarioConfig& config);

void write_manifest(const RunManifest& m, const std::string& dir);
RunManifest read_manifest(const std::string& dir);

// Pipelines shared by the scenarios, the CLI and the acceptance checks.

struct ZetaPoint {
  double Omega_R = 0;
  double zeta_theory = 0;
  double zeta_extracted = 0;
  double relative_gap = 0;
  bool converged = false;
};

/// Markov record at these parameters, histogrammed, fit with a Gaussian mixture started at the
/// expected signals, and converted back to zeta from the fitted plus/minus means.
ZetaPoint zeta_extraction_point(const SystemParams& p, const ReadoutModel& r, const FLevelRates& f,
                                double duration, std::uint64_t seed, int hist_bins);

struct JumpAnalysis {
  FitResult fit;
  std::vector<cplx> centers;      ///< fitted means in MarkovState order
  JumpTrace filtered;
  DwellStatistics dwell;
  double accuracy = -1;           ///< against the hidden sequence when one is available
};

/// Fit, two-point filter and dwell statistics on a record whose expected state signals are
/// known (used to start the fit and to label the fitted components).
JumpAnalysis analyze_jumps(const IQRecord& record, const std::vector<cplx>& expected,
                           const AnalysisSettings& settings, const std::vector<int>& hidden = {});

/// Steady state of the displaced-frame model at these parameters.
DensityMatrix displaced_steady_state(const SystemParams& p, int n_qubit, int n_cavity);

}  // namespace sigmax
