#include "sigmax/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "sigmax/hamiltonians.hpp"

namespace sigmax {

namespace {

const std::map<ScenarioKind, std::string> kNames = {
    {ScenarioKind::fig2_histograms, "fig2_histograms"},
    {ScenarioKind::fig3_prep_sweeps, "fig3_prep_sweeps"},
    {ScenarioKind::fig4_jumptrace, "fig4_jumptrace"},
    {ScenarioKind::supp1a_zeta_sweep, "supp1a_zeta_sweep"},
    {ScenarioKind::supp1b_f_population, "supp1b_f_population"},
    {ScenarioKind::supp1c_sigmax_equilibrium, "supp1c_sigmax_equilibrium"},
    {ScenarioKind::custom, "custom"},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<double> mhz_grid(std::initializer_list<double> values) {
  std::vector<double> out;
  for (double v : values) out.push_back(units::mhz(v));
  return out;
}

std::vector<double> range_grid(double lo, double hi, double step, double scale) {
  std::vector<double> out;
  const int n = int(std::llround((hi - lo) / step));
  for (int k = 0; k <= n; ++k) out.push_back(scale * (lo + k * step));
  return out;
}

// 15 digits hides the MHz <-> rad/s rounding noise; reloads agree to ~1e-15 relative.
std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(15) << v;
  return ss.str();
}

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  double number(const std::string& key, double fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    used_.insert(key);
    return parse_number(key, it->second);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    used_.insert(key);
    return it->second;
  }

  bool flag(const std::string& key, bool fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    used_.insert(key);
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw SchemaError(key + ": expected true or false, got '" + it->second + "'");
  }

  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    used_.insert(key);
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    return out;
  }

  void check_all_used() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) throw SchemaError(k + ": unknown key");
    }
  }

  static double parse_number(const std::string& key, const std::string& value) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw SchemaError(key + ": expected a number, got '" + value + "'");
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

}  // namespace

std::string to_string(ScenarioKind k) { return kNames.at(k); }

ScenarioKind scenario_from_string(const std::string& s) {
  for (const auto& [k, name] : kNames) {
    if (name == s) return k;
  }
  throw SchemaError("scenario.name: unknown scenario '" + s + "'");
}

void ScenarioConfig::validate() const {
  try {
    sigmax::validate(params);
    readout.validate();
  } catch (const InvalidParams& e) {
    throw SchemaError(e.what());
  }
  if (grid.empty()) throw SchemaError("scenario.grid: must not be empty");
  if (seeds.empty()) throw SchemaError("scenario.seeds: need at least one seed");
  if (!(duration > 0)) throw SchemaError("scenario.duration_us: must be > 0");
  if (engine != "markov" && engine != "diffusive") {
    throw SchemaError("scenario.engine: expected markov or diffusive");
  }
  if (engine == "diffusive" && duration > units::us(100) * (1 + 1e-12)) {
    throw SchemaError("scenario.duration_us: the diffusive engine is limited to 100 us");
  }
  if (sweep_axis != "Omega_R" && sweep_axis != "angle") {
    throw SchemaError("scenario.sweep_axis: expected Omega_R or angle");
  }
  if (f_population < 0 || f_population >= 1) throw SchemaError("scenario.f_population: outside [0, 1)");
  if (analysis.hist_bins < 2) throw SchemaError("analysis.hist_bins: must be >= 2");
  if (analysis.latch < 1) throw SchemaError("analysis.latch: must be >= 1");
  if (!(analysis.filter_radius_sigmas > 0)) throw SchemaError("analysis.filter_radius_sigmas: must be > 0");
}

ScenarioConfig preset_config(ScenarioKind kind) {
  ScenarioConfig c;
  c.params = reference_device();
  c.readout = default_readout(c.params);
  c.scenario = kind;
  switch (kind) {
    case ScenarioKind::fig2_histograms:
      c.grid = mhz_grid({0, 10, 25, 45, 70});
      break;
    case ScenarioKind::fig3_prep_sweeps:
      c.sweep_axis = "angle";
      c.grid = range_grid(-180, 180, 15, std::numbers::pi / 180);
      break;
    case ScenarioKind::fig4_jumptrace:
      c.grid = mhz_grid({70});
      break;
    case ScenarioKind::supp1a_zeta_sweep:
      c.grid = mhz_grid({40, 55, 70, 85, 100});
      break;
    case ScenarioKind::supp1b_f_population:
      c.grid = range_grid(10, 100, 10, units::mhz(1));
      break;
    case ScenarioKind::supp1c_sigmax_equilibrium:
      c.grid = range_grid(5, 100, 5, units::mhz(1));
      break;
    case ScenarioKind::custom:
      c.grid = {c.params.Omega_R};
      break;
  }
  return c;
}

ScenarioConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SchemaError("line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known{"device", "drives", "readout", "scenario", "analysis"};
      if (!known.count(section)) throw SchemaError("[" + section + "]: unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected key = value inside a section");
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (kv.count(key)) throw SchemaError(key + ": duplicate key");
    kv[key] = trim(line.substr(eq + 1));
  }

  Reader r(std::move(kv));
  const ScenarioKind kind = scenario_from_string(r.text("scenario.name", "custom"));
  ScenarioConfig c = preset_config(kind);
  const std::string preset = r.text("scenario.preset", "reference-device");
  if (preset != "reference-device" && preset != "paper-device") {
    throw SchemaError("scenario.preset: only reference-device is available");
  }

  using units::mhz;
  using units::to_mhz;
  using units::us;
  using units::to_us;
  SystemParams& p = c.params;
  p.omega_c = mhz(r.number("device.omega_c_mhz", to_mhz(p.omega_c)));
  p.omega_q = mhz(r.number("device.omega_q_mhz", to_mhz(p.omega_q)));
  p.chi = mhz(r.number("device.chi_mhz", to_mhz(p.chi)));
  p.kappa = mhz(r.number("device.kappa_mhz", to_mhz(p.kappa)));
  p.alpha_anh = mhz(r.number("device.alpha_mhz", to_mhz(p.alpha_anh)));
  p.T1 = us(r.number("device.T1_us", to_us(p.T1)));
  p.T2R = us(r.number("device.T2R_us", to_us(p.T2R)));
  p.p_e_thermal = r.number("device.p_e_thermal", p.p_e_thermal);
  if (!(p.kappa > 0)) throw SchemaError("device.kappa_mhz: must be > 0");
  if (!(p.T1 > 0)) throw SchemaError("device.T1_us: must be > 0");
  if (!(p.T2R > 0)) throw SchemaError("device.T2R_us: must be > 0");

  p.Omega_R = mhz(r.number("drives.Omega_R_mhz", to_mhz(p.Omega_R)));
  p.Delta_c = mhz(r.number("drives.Delta_c_mhz", to_mhz(p.Delta_c)));
  if (r.has("drives.n_sb") && r.has("drives.epsilon_sb_mhz")) {
    throw SchemaError("drives.n_sb: give either n_sb or epsilon_sb_mhz");
  }
  if (r.has("drives.n_sb")) {
    const double n = r.number("drives.n_sb", 12);
    if (n < 0) throw SchemaError("drives.n_sb: must be >= 0");
    p.epsilon_sb = sideband_amplitude_for_photons(n, p.Delta_c, p.kappa);
  } else {
    p.epsilon_sb = mhz(r.number("drives.epsilon_sb_mhz", to_mhz(p.epsilon_sb)));
  }
  p.frame_matched = r.flag("drives.frame_matched", true);
  if (p.frame_matched) {
    r.number("drives.Delta_q_mhz", 0);  // implied by the frame condition
    p = frame_matched(p);
  } else {
    p.Delta_q = mhz(r.number("drives.Delta_q_mhz", to_mhz(p.Delta_q)));
    p = sync_pump_frequencies(p);
  }

  ReadoutModel& ro = c.readout;
  ro.Delta_r = mhz(r.number("readout.Delta_r_mhz", to_mhz(ro.Delta_r)));
  if (r.has("readout.n_readout") && r.has("readout.epsilon_r_mhz")) {
    throw SchemaError("readout.n_readout: give either n_readout or epsilon_r_mhz");
  }
  if (r.has("readout.n_readout")) {
    const double n = r.number("readout.n_readout", 0.9);
    if (n < 0) throw SchemaError("readout.n_readout: must be >= 0");
    ro.epsilon_r = readout_amplitude_for_photons(n, ro.Delta_r, p.kappa);
  } else if (r.has("readout.epsilon_r_mhz")) {
    ro.epsilon_r = mhz(r.number("readout.epsilon_r_mhz", 0));
  } else {
    ro.epsilon_r = readout_amplitude_for_photons(0.9, ro.Delta_r, p.kappa);
  }
  p.epsilon_r = ro.epsilon_r;
  p.Delta_r = ro.Delta_r;
  ro.t_m = us(r.number("readout.t_m_us", to_us(ro.t_m)));
  ro.eta = r.number("readout.eta", ro.eta);
  ro.gamma_m = mhz(r.number("readout.gamma_m_mhz", to_mhz(ro.gamma_m)));
  ro.noise_sigma = r.number("readout.noise_sigma", ro.noise_sigma);
  const std::string scale = r.text("readout.signal_scale", "auto");
  if (scale == "auto") {
    c.calibrate_scale = true;
  } else {
    c.calibrate_scale = false;
    ro.signal_scale = Reader::parse_number("readout.signal_scale", scale);
  }
  c.separation_target = r.number("readout.separation_target", c.separation_target);
  c.delta_f = mhz(r.number("readout.delta_f_mhz", to_mhz(c.delta_f)));
  if (!(ro.t_m > 0)) throw SchemaError("readout.t_m_us: must be > 0");
  if (!(ro.eta > 0) || ro.eta > 1) throw SchemaError("readout.eta: must lie in (0, 1]");

  c.sweep_axis = r.text("scenario.sweep_axis", c.sweep_axis);
  const double grid_scale = c.sweep_axis == "angle" ? std::numbers::pi / 180 : units::mhz(1);
  std::vector<double> fallback;
  for (double g : c.grid) fallback.push_back(g / grid_scale);
  c.grid.clear();
  for (double g : r.list("scenario.grid", fallback)) c.grid.push_back(g * grid_scale);
  std::vector<double> seed_fallback(c.seeds.begin(), c.seeds.end());
  c.seeds.clear();
  for (double s : r.list("scenario.seeds", seed_fallback)) {
    if (s < 0 || s != std::floor(s)) throw SchemaError("scenario.seeds: must be nonnegative integers");
    c.seeds.push_back(std::uint64_t(s));
  }
  c.duration = us(r.number("scenario.duration_us", to_us(c.duration)));
  c.engine = r.text("scenario.engine", c.engine);
  c.output_dir = r.text("scenario.output_dir", c.output_dir);
  c.f_population = r.number("scenario.f_population", c.f_population);
  c.threads = int(r.number("scenario.threads", c.threads));

  AnalysisSettings& a = c.analysis;
  a.hist_bins = int(r.number("analysis.hist_bins", a.hist_bins));
  a.filter_radius_sigmas = r.number("analysis.filter_radius_sigmas", a.filter_radius_sigmas);
  a.latch = int(r.number("analysis.latch", a.latch));
  a.imperfection_scale = r.number("analysis.imperfection_scale", a.imperfection_scale);
  a.imperfection_shift = r.number("analysis.imperfection_shift", a.imperfection_shift);

  r.check_all_used();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ScenarioConfig& c) {
  using units::to_mhz;
  using units::to_us;
  const SystemParams& p = c.params;
  std::ostringstream o;
  o << "# frequencies in MHz (f/2pi), times in microseconds\n";
  o << "[device]\n";
  o << "omega_c_mhz = " << fmt(to_mhz(p.omega_c)) << "\n";
  o << "omega_q_mhz = " << fmt(to_mhz(p.omega_q)) << "\n";
  o << "chi_mhz = " << fmt(to_mhz(p.chi)) << "\n";
  o << "kappa_mhz = " << fmt(to_mhz(p.kappa)) << "\n";
  o << "alpha_mhz = " << fmt(to_mhz(p.alpha_anh)) << "\n";
  o << "T1_us = " << fmt(to_us(p.T1)) << "\n";
  o << "T2R_us = " << fmt(to_us(p.T2R)) << "\n";
  o << "p_e_thermal = " << fmt(p.p_e_thermal) << "\n\n";
  o << "[drives]\n";
  o << "Omega_R_mhz = " << fmt(to_mhz(p.Omega_R)) << "\n";
  o << "Delta_c_mhz = " << fmt(to_mhz(p.Delta_c)) << "\n";
  o << "epsilon_sb_mhz = " << fmt(to_mhz(p.epsilon_sb)) << "\n";
  o << "frame_matched = " << (p.frame_matched ? "true" : "false") << "\n";
  o << "Delta_q_mhz = " << fmt(to_mhz(p.Delta_q)) << "\n\n";
  o << "[readout]\n";
  o << "epsilon_r_mhz = " << fmt(to_mhz(c.readout.epsilon_r)) << "\n";
  o << "Delta_r_mhz = " << fmt(to_mhz(c.readout.Delta_r)) << "\n";
  o << "t_m_us = " << fmt(to_us(c.readout.t_m)) << "\n";
  o << "eta = " << fmt(c.readout.eta) << "\n";
  o << "gamma_m_mhz = " << fmt(to_mhz(c.readout.gamma_m)) << "\n";
  o << "noise_sigma = " << fmt(c.readout.noise_sigma) << "\n";
  o << "signal_scale = " << (c.calibrate_scale ? std::string("auto") : fmt(c.readout.signal_scale)) << "\n";
  o << "separation_target = " << fmt(c.separation_target) << "\n";
  o << "delta_f_mhz = " << fmt(to_mhz(c.delta_f)) << "\n\n";
  o << "[scenario]\n";
  o << "name = " << to_string(c.scenario) << "\n";
  o << "sweep_axis = " << c.sweep_axis << "\n";
  const double grid_scale = c.sweep_axis == "angle" ? std::numbers::pi / 180 : units::mhz(1);
  o << "grid = ";
  for (std::size_t k = 0; k < c.grid.size(); ++k) o << (k ? ", " : "") << fmt(c.grid[k] / grid_scale);
  o << "\nseeds = ";
  for (std::size_t k = 0; k < c.seeds.size(); ++k) o << (k ? ", " : "") << c.seeds[k];
  o << "\nduration_us = " << fmt(to_us(c.duration)) << "\n";
  o << "engine = " << c.engine << "\n";
  o << "output_dir = " << c.output_dir << "\n";
  o << "f_population = " << fmt(c.f_population) << "\n";
  o << "threads = " << c.threads << "\n\n";
  o << "[analysis]\n";
  o << "hist_bins = " << c.analysis.hist_bins << "\n";
  o << "filter_radius_sigmas = " << fmt(c.analysis.filter_radius_sigmas) << "\n";
  o << "latch = " << c.analysis.latch << "\n";
  o << "imperfection_scale = " << fmt(c.analysis.imperfection_scale) << "\n";
  o << "imperfection_shift = " << fmt(c.analysis.imperfection_shift) << "\n";
  return o.str();
}

void save_config(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MissingOutput("cannot write " + path);
  out << format_config(config);
}

ScenarioConfig resolved(ScenarioConfig c) {
  if (c.calibrate_scale) {
    const DerivedParams d = derive(c.params);
    const ZetaShift z = zeta(c.params, d);
    c.readout.signal_scale = calibrate_signal_scale(pointer_states(c.params, z.zeta, c.readout),
                                                    c.readout, c.params.kappa, c.separation_target);
  }
  return c;
}

}  // namespace sigmax
