#include "sigmax/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "sigmax/rates.hpp"
#include "sigmax/record_io.hpp"

namespace sigmax {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::uint64_t point_seed(std::uint64_t base, double value) {
  const std::uint64_t h = fnv1a(std::string_view(reinterpret_cast<const char*>(&base), sizeof(base)));
  return fnv1a(std::string_view(reinterpret_cast<const char*>(&value), sizeof(value)), h);
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::string num(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

// Best assignment of fitted components to expected centers (k <= 3).
std::vector<int> match(const std::vector<GaussianComponent>& comps, const std::vector<cplx>& expected) {
  std::vector<int> perm(comps.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = int(k);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) cost += std::norm(comps[perm[k]].mean - expected[k]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

IQRange padded_range(const std::vector<cplx>& centers, double pad) {
  IQRange r{centers[0].real(), centers[0].real(), centers[0].imag(), centers[0].imag()};
  for (const cplx& c : centers) {
    r.i_min = std::min(r.i_min, c.real());
    r.i_max = std::max(r.i_max, c.real());
    r.q_min = std::min(r.q_min, c.imag());
    r.q_max = std::max(r.q_max, c.imag());
  }
  return {r.i_min - pad, r.i_max + pad, r.q_min - pad, r.q_max + pad};
}

SystemParams at_rabi(SystemParams p, double omega) {
  p.Omega_R = omega;
  return p;
}

// Runs f(k) for k in [0, n) on a small pool; results are placed by index by the caller.
void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int k = 0; k < n; ++k) f(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) f(k);
    });
  }
  for (auto& th : pool) th.join();
}

class RunContext {
 public:
  RunContext(const ScenarioConfig& c) : config(c), dir(c.output_dir) {
    fs::create_directories(dir);
    manifest.scenario = to_string(c.scenario);
    manifest.config_hash = fnv1a(format_config(c));
    manifest.started = utc_now();
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingOutput("cannot write " + path.string());
    out << content;
    out.close();
    manifest.outputs.push_back({name, fnv1a(content)});
  }

  void error(const std::string& where, const std::exception& e) {
    std::lock_guard<std::mutex> lock(mutex);
    manifest.errors.push_back(where + ": " + e.what());
  }

  const ScenarioConfig& config;
  fs::path dir;
  RunManifest manifest;
  std::mutex mutex;
};

FLevelRates f_rates(const ScenarioConfig& c) {
  return f_rates_for_population(c.f_population, c.params.T1);
}

// -- fig2 -------------------------------------------------------------------

void run_fig2(RunContext& ctx) {
  const auto& c = ctx.config;
  const int n = int(c.grid.size());
  std::vector<std::string> hist_csv(n), rows(n);
  std::vector<MarkovEmitter> emitters;
  for (double omega : c.grid) {
    emitters.push_back(regime_emitter(at_rabi(c.params, omega), c.readout, f_rates(c)));
  }
  // |pointer| <= 2 eps_r / kappa for any pull, so this square holds every regime and does not
  // depend on the rest of the grid
  const double reach = std::sqrt(c.readout.eta * c.params.kappa * c.readout.t_m) *
                           c.readout.signal_scale * 2 * std::abs(c.readout.epsilon_r) / c.params.kappa +
                       5 * c.readout.noise_sigma;
  const IQRange range{-reach, reach, -reach, reach};
  parallel_for(n, c.threads, [&](int k) {
    try {
      const MarkovEmitter& e = emitters[k];
      const MarkovTrace tr =
          simulate_markov_trace(e, c.readout, c.duration, point_seed(c.seeds[0], c.grid[k]));
      const Histogram2D h = histogram_iq(tr.record.samples, c.analysis.hist_bins,
                                         c.analysis.hist_bins, range);
      std::ostringstream o;
      o << "i_center,q_center,count\n";
      for (int i = 0; i < h.bins_i(); ++i) {
        for (int q = 0; q < h.bins_q(); ++q) {
          const cplx ctr = h.center(i, q);
          o << num(ctr.real()) << ',' << num(ctr.imag()) << ',' << h.counts(i, q) << '\n';
        }
      }
      hist_csv[k] = o.str();
      const bool sx = e.labels[0] == "minus";
      rows[k] = num(units::to_mhz(c.grid[k])) + ',' + (sx ? "sigma_x" : "sigma_z") + ',' +
                num(bimodality_coefficient(tr.record.samples)) + ',' +
                std::to_string(tr.record.samples.size()) + '\n';
    } catch (const Error& err) {
      ctx.error("fig2 Omega_R/2pi=" + num(units::to_mhz(c.grid[k])) + " MHz", err);
    }
  });
  std::string summary = "omega_mhz,regime,bimodality,samples\n";
  for (int k = 0; k < n; ++k) {
    if (hist_csv[k].empty()) continue;
    ctx.write("fig2_omega_" + num(units::to_mhz(c.grid[k])) + ".csv", hist_csv[k]);
    summary += rows[k];
  }
  ctx.write("fig2_summary.csv", summary);
}

// -- fig3 -------------------------------------------------------------------

// Bloch angles (theta, phi) for a signed angle a in a plane; ideal <sx> alongside.
struct PlanePoint {
  double theta, phi, ideal;
};

PlanePoint plane_point(const std::string& plane, double a) {
  const double pi = std::numbers::pi;
  if (plane == "xy") return {pi / 2, a, std::cos(a)};
  if (plane == "xz") return {std::abs(a), a >= 0 ? 0.0 : pi, std::sin(a)};
  // yz: positive angles use phi = +pi/2, the side that leans toward |+> during the pulse
  return {std::abs(a), a >= 0 ? pi / 2 : -pi / 2, 0.0};
}

void run_fig3(RunContext& ctx) {
  const auto& c = ctx.config;
  const std::vector<std::string> planes{"xy", "xz", "yz"};
  const int n = int(c.grid.size());
  std::vector<std::string> rows(planes.size() * n);
  const Imperfection imp{c.analysis.imperfection_scale, c.analysis.imperfection_shift};
  parallel_for(int(rows.size()), c.threads, [&](int idx) {
    const std::string& plane = planes[idx / n];
    const double a = c.grid[idx % n];
    try {
      const PlanePoint pp = plane_point(plane, a);
      const PreparedState st = state_prep_sequence(pp.theta, pp.phi, c.params);
      const double sim = expectation(sigma_ops(st.rho.space()).sx, st.rho).real();
      rows[idx] = plane + ',' + num(a * 180 / std::numbers::pi) + ',' + num(pp.ideal) + ',' +
                  num(sim) + ',' + num(imp.apply(sim)) + '\n';
    } catch (const Error& err) {
      ctx.error("fig3 " + plane + " angle " + num(a), err);
    }
  });
  std::string out = "plane,angle_deg,ideal,simulated,imperfect\n";
  for (const auto& r : rows) out += r;
  ctx.write("fig3_sweeps.csv", out);
}

// -- fig4 / custom ----------------------------------------------------------

json dwell_json(const DwellStatistics& d, const std::vector<std::string>& labels) {
  json j;
  for (int i = 0; i < d.n_states; ++i) {
    json s;
    s["occupancy"] = d.occupancy(i);
    s["exit_rate_per_us"] = d.exit_rate(i) * 1e-6;
    s["mean_dwell_us"] = d.exit_rate(i) > 0 ? units::to_us(d.mean_dwell(i)) : -1.0;
    s["naive_mean_dwell_us"] = std::isnan(d.naive_mean_dwell(i)) ? -1.0 : units::to_us(d.naive_mean_dwell(i));
    for (int k = 0; k < d.n_states; ++k) {
      if (k == i) continue;
      s["to_" + labels[k]]["count"] = d.transitions(i, k);
      s["to_" + labels[k]]["time_us"] = d.rates(i, k) > 0 ? units::to_us(1 / d.rates(i, k)) : -1.0;
    }
    j[labels[i]] = s;
  }
  j["insufficient_jumps"] = d.insufficient_jumps;
  return j;
}

void run_jump_trace(RunContext& ctx, const std::string& prefix) {
  const auto& c = ctx.config;
  const SystemParams p = at_rabi(c.params, c.grid[0]);
  const std::uint64_t seed = point_seed(c.seeds[0], c.grid[0]);
  IQRecord record;
  std::vector<int> hidden;
  std::vector<cplx> expected;
  std::vector<std::string> labels{"minus", "plus", "f"};
  if (c.engine == "markov") {
    const MarkovEmitter e = sigma_x_emitter(p, c.readout, f_rates(c));
    MarkovTrace tr = simulate_markov_trace(e, c.readout, c.duration, seed);
    record = std::move(tr.record);
    hidden = std::move(tr.hidden);
    for (int s = 0; s < e.n_states; ++s) expected.push_back(e.signal[s]);
  } else {
    const HilbertSpace space(2, 6);
    const ReadoutFrameModel m = readout_frame_model(p, c.readout, space);
    const DensityMatrix rho0 = DensityMatrix::pure(named_state(space, NamedState::minus));
    ReadoutModel r = c.readout;
    const DiffusiveTrajectory tr =
        simulate_diffusive_trajectory(m.hamiltonian, m.collapse, r, rho0, c.duration, seed);
    record = tr.record;
    r.signal_scale = 1.0;
    const IntegratedSignals s =
        integrated_signal(pointer_states(p, zeta(p, derive(p)).zeta, r), r, p.kappa);
    expected = {s.s_minus, s.s_plus};
    // the conditional <sx> plays the role of the hidden state
    for (double x : tr.sigma_x) hidden.push_back(x < 0 ? 0 : 1);
  }
  record.params_hash = params_hash(p);

  const JumpAnalysis ja = analyze_jumps(record, expected, c.analysis, hidden);
  labels.resize(expected.size());

  json summary;
  summary["engine"] = c.engine;
  summary["omega_mhz"] = units::to_mhz(p.Omega_R);
  summary["bins"] = record.samples.size();
  summary["seed"] = seed;
  summary["signal_scale"] = c.readout.signal_scale;
  summary["filter_accuracy"] = ja.accuracy;
  summary["fit_converged"] = ja.fit.converged;
  summary["dwell"] = dwell_json(ja.dwell, labels);
  const TransitionRates tr = golden_rule_rates(p, derive(p));
  summary["theory"]["plus_to_minus_us"] = units::to_us(1 / tr.gamma_plus_minus);
  summary["theory"]["minus_to_plus_us"] = units::to_us(1 / tr.gamma_minus_plus);
  for (std::size_t k = 0; k < ja.centers.size(); ++k) {
    summary["centers"][labels[k]] = {ja.centers[k].real(), ja.centers[k].imag()};
  }

  std::vector<double> psi;
  cplx cc = 0;
  if (ja.centers.size() == 3) {
    try {
      const PhaseAngleTrace pt = phase_angle_trace(record.samples, ja.centers[0], ja.centers[1], ja.centers[2]);
      psi = pt.psi;
      cc = pt.circumcenter;
      summary["circumcenter"] = {cc.real(), cc.imag()};
    } catch (const CollinearCenters& e) {
      ctx.error(prefix + " phase angle", e);
    }
  }
  std::ostringstream o;
  o << "t_us,I,Q,psi,filtered,hidden\n";
  const std::size_t window = std::min<std::size_t>(record.samples.size(), 2500);
  for (std::size_t k = 0; k < window; ++k) {
    o << num(units::to_us(k * record.t_m)) << ',' << num(record.samples[k].real()) << ','
      << num(record.samples[k].imag()) << ',' << (psi.empty() ? 0.0 : psi[k]) << ','
      << ja.filtered.states[k] << ',' << (hidden.empty() ? -1 : hidden[k]) << '\n';
  }
  ctx.write(prefix + "_trace.csv", o.str());
  ctx.write(prefix + "_summary.json", summary.dump(2) + "\n");
}

// -- supp1a -----------------------------------------------------------------

void run_supp1a(RunContext& ctx) {
  const auto& c = ctx.config;
  const int n = int(c.grid.size());
  std::vector<std::string> rows(n);
  parallel_for(n, c.threads, [&](int k) {
    try {
      const ZetaPoint z = zeta_extraction_point(at_rabi(c.params, c.grid[k]), c.readout, f_rates(c),
                                                c.duration, point_seed(c.seeds[0], c.grid[k]),
                                                c.analysis.hist_bins);
      rows[k] = num(units::to_mhz(z.Omega_R)) + ',' + num(units::to_mhz(z.zeta_extracted)) + ',' +
                num(units::to_mhz(z.zeta_theory)) + ',' + num(z.relative_gap) + '\n';
    } catch (const Error& err) {
      ctx.error("supp1a Omega_R/2pi=" + num(units::to_mhz(c.grid[k])) + " MHz", err);
    }
  });
  std::string out = "omega_mhz,zeta_extracted_mhz,zeta_theory_mhz,relative_gap\n";
  for (const auto& r : rows) out += r;
  ctx.write("supp1a_zeta.csv", out);
}

// -- supp1b / supp1c ----------------------------------------------------------

void run_supp1b(RunContext& ctx) {
  const auto& c = ctx.config;
  const int n = int(c.grid.size());
  std::vector<std::string> rows(n);
  parallel_for(n, c.threads, [&](int k) {
    try {
      const SystemParams p = at_rabi(c.params, c.grid[k]);
      const DensityMatrix three = displaced_steady_state(p, 3, 8);
      const DensityMatrix seven = displaced_steady_state(p, 7, 4);
      rows[k] = num(units::to_mhz(p.Omega_R)) + ',' + num(three.level_population(2)) + ',' +
                num(seven.level_population(2)) + ',' + num(seven.level_population(3)) + '\n';
    } catch (const Error& err) {
      ctx.error("supp1b Omega_R/2pi=" + num(units::to_mhz(c.grid[k])) + " MHz", err);
    }
  });
  std::string out = "omega_mhz,p_f_3level,p_f_7level,p_3_7level\n";
  for (const auto& r : rows) out += r;
  ctx.write("supp1b_f_population.csv", out);
}

void run_supp1c(RunContext& ctx) {
  const auto& c = ctx.config;
  const int n = int(c.grid.size());
  std::vector<std::string> rows(n);
  parallel_for(n, c.threads, [&](int k) {
    try {
      const SystemParams p = at_rabi(c.params, c.grid[k]);
      const DensityMatrix rho = displaced_steady_state(p, 2, 10);
      const double sx = expectation(sigma_ops(rho.space()).sx, rho).real();
      const TransitionRates tr = golden_rule_rates(p, derive(p));
      const double detailed = (tr.gamma_minus_plus - tr.gamma_plus_minus) /
                              (tr.gamma_minus_plus + tr.gamma_plus_minus);
      rows[k] = num(units::to_mhz(p.Omega_R)) + ',' + num(sx) + ',' + num(detailed) + '\n';
    } catch (const Error& err) {
      ctx.error("supp1c Omega_R/2pi=" + num(units::to_mhz(c.grid[k])) + " MHz", err);
    }
  });
  std::string out = "omega_mhz,sigma_x_steady_state,sigma_x_golden_rule\n";
  for (const auto& r : rows) out += r;
  ctx.write("supp1c_sigmax.csv", out);
}

}  // namespace

ZetaPoint zeta_extraction_point(const SystemParams& p, const ReadoutModel& r, const FLevelRates& f,
                                double duration, std::uint64_t seed, int hist_bins) {
  const MarkovEmitter e = sigma_x_emitter(p, r, f);
  const MarkovTrace tr = simulate_markov_trace(e, r, duration, seed);
  std::vector<cplx> expected(e.signal.begin(), e.signal.begin() + e.n_states);
  const Histogram2D h = histogram_iq(tr.record.samples, hist_bins, hist_bins,
                                     padded_range(expected, 6 * r.noise_sigma));
  FitOptions opt;
  opt.shared_covariance = true;
  const FitResult fit = fit_components(h, e.n_states, expected, opt);
  const std::vector<int> m = match(fit.components, expected);

  ZetaPoint z;
  z.Omega_R = p.Omega_R;
  z.zeta_theory = zeta(p, derive(p)).zeta;
  z.zeta_extracted = extract_zeta(fit.components[m[plus]].mean, fit.components[m[minus]].mean, p.kappa);
  z.relative_gap = std::abs(z.zeta_extracted - z.zeta_theory) / std::abs(z.zeta_theory);
  z.converged = fit.converged;
  return z;
}

JumpAnalysis analyze_jumps(const IQRecord& record, const std::vector<cplx>& expected,
                           const AnalysisSettings& settings, const std::vector<int>& hidden) {
  if (record.samples.empty()) throw EmptyRecord("analyze_jumps: empty record");
  JumpAnalysis out;
  const Histogram2D h = histogram_iq(record.samples, settings.hist_bins, settings.hist_bins);
  FitOptions opt;
  opt.shared_covariance = true;
  out.fit = fit_components(h, int(expected.size()), expected, opt);
  const std::vector<int> m = match(out.fit.components, expected);
  for (std::size_t k = 0; k < expected.size(); ++k) out.centers.push_back(out.fit.components[m[k]].mean);

  const Eigen::Matrix2d& cov = out.fit.components[0].covariance;
  FilterParams fp;
  fp.sigma = std::sqrt(cov.trace() / 2);
  fp.radius_sigmas = settings.filter_radius_sigmas;
  fp.latch = settings.latch;
  out.filtered = two_point_filter(record.samples, out.centers, fp);
  out.dwell = dwell_statistics(out.filtered.states, record.t_m, int(expected.size()),
                               DwellOptions{.dead_bins = settings.latch - 1});
  if (!hidden.empty()) out.accuracy = agreement(out.filtered.states, hidden);
  return out;
}

DensityMatrix displaced_steady_state(const SystemParams& p, int n_qubit, int n_cavity) {
  const HilbertSpace space(n_qubit, n_cavity);
  const HamiltonianModel h = n_qubit <= 3 ? build_jc_hamiltonian(p, derive(p), space)
                                          : build_n_level_transmon(p, n_qubit, space);
  return steady_state(h.static_part, dissipator_set(p, Frame::DisplacedJC, space));
}

void write_manifest(const RunManifest& m, const std::string& dir) {
  json j;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["scenario"] = m.scenario;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["outputs"] = json::array();
  for (const auto& o : m.outputs) j["outputs"].push_back({{"path", o.path}, {"fnv1a64", o.checksum}});
  j["errors"] = m.errors;
  const fs::path tmp = fs::path(dir) / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw MissingOutput("cannot write " + tmp.string());
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, fs::path(dir) / "manifest.json");
}

RunManifest read_manifest(const std::string& dir) {
  const fs::path path = fs::path(dir) / "manifest.json";
  std::ifstream in(path);
  if (!in) throw MissingOutput("no manifest.json in " + dir);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest.json: ") + e.what());
  }
  RunManifest m;
  m.config_hash = j.value("config_hash", std::uint64_t(0));
  m.version = j.value("version", "");
  m.scenario = j.value("scenario", "");
  m.started = j.value("started", "");
  m.finished = j.value("finished", "");
  for (const auto& o : j["outputs"]) m.outputs.push_back({o["path"], o["fnv1a64"]});
  for (const auto& e : j["errors"]) m.errors.push_back(e);
  return m;
}

RunManifest run_scenario(const ScenarioConfig& input) {
  input.validate();
  const ScenarioConfig config = resolved(input);
  RunContext ctx(config);
  ctx.write("config.ini", format_config(input));
  switch (config.scenario) {
    case ScenarioKind::fig2_histograms: run_fig2(ctx); break;
    case ScenarioKind::fig3_prep_sweeps: run_fig3(ctx); break;
    case ScenarioKind::fig4_jumptrace: run_jump_trace(ctx, "fig4"); break;
    case ScenarioKind::supp1a_zeta_sweep: run_supp1a(ctx); break;
    case ScenarioKind::supp1b_f_population: run_supp1b(ctx); break;
    case ScenarioKind::supp1c_sigmax_equilibrium: run_supp1c(ctx); break;
    case ScenarioKind::custom: run_jump_trace(ctx, "custom"); break;
  }
  ctx.manifest.finished = utc_now();
  write_manifest(ctx.manifest, config.output_dir);
  return ctx.manifest;
}

}  // namespace sigmax
