#include "scenario.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace spvdg {

namespace {

std::vector<Step> steps1(double v) { return {{0.0, v}}; }

PvArrayParams ch2_panel() {
  return PvArrayParams{}; // defaults are the Ch. 2 / Ch. 3 module
}

// 200 W-class 54-cell module fitted to its datasheet MPP (26.3 V, 7.61 A) and
// V_oc = 32.9 V; used by the Ch. 4 / Ch. 5 scenarios (the thesis never prints
// its 200 W array parameters).
PvArrayParams ch45_panel() {
  PvArrayParams p;
  p.T_r = 298.15;
  p.lambda_r = 1000.0;
  p.p = 1.3;
  p.I_r = 9.825e-8;
  p.I_sc = 8.21;
  p.k_I = 0.0032;
  p.R_s = 0.221;
  p.R_sh = 415.405;
  p.n_s = 54;
  p.n_p = 1;
  return p;
}

SpvdgParams ch45_plant() {
  return SpvdgParams{}; // defaults are the Ch. 4 table
}

SpvdgParams ch3_plant() {
  SpvdgParams p;
  p.C_pvi = 100e-6;
  p.C_pvo = 500e-6;
  p.C_bo = 100e-6;
  p.C_L = 500e-6;
  p.L_pv = 0.35e-3;
  p.L_b = 0.3e-3;
  p.R_pv = 0.1;
  p.R_b = 0.3;
  p.R_pvo = 0.1;
  p.R_bo = 0.1;
  return p;
}

Preset make_ch45_case(const std::string& name, const std::string& description,
                      bool dob, int case_no) {
  Preset p;
  p.name = name;
  p.description = description;
  ScenarioSetup& s = p.setup;
  s.name = name;
  s.panel = ch45_panel();
  s.plant = ch45_plant();
  s.Vdc = 40.0;
  s.battery_v = 24.0;
  s.sim.dt = 1e-5;
  s.sim.duration = 7.5;
  s.sim.record_stride = 10;
  s.sim.controller = dob ? Controller::DobBackstep : Controller::Backstep;
  if (dob) {
    s.gains = {17.0, 5.0, 5.0, 5.0, 10.0, 19.0};
    s.ogains = {10.0, 1.0, 0.01};
  } else {
    s.gains = {10.0, 1.0, 1.0, 1.0, 3.0, 15.0};
  }
  const double T25 = 298.15;
  switch (case_no) {
    case 1:
      s.schedule.temperature = steps1(T25);
      s.schedule.irradiance = {{0.0, 1500.0}, {1.5, 1200.0}, {3.0, 1000.0},
                               {4.5, 500.0},  {6.0, 200.0}};
      s.schedule.load_R = steps1(8.0);
      break;
    case 2:
      s.schedule.temperature = {{0.0, 348.15}, {1.5, 323.15}, {3.0, 298.15},
                                {4.5, 283.15}, {6.0, 273.15}};
      s.schedule.irradiance = steps1(1000.0);
      s.schedule.load_R = steps1(dob ? 6.0 : 8.0);
      break;
    case 3:
      s.schedule.temperature = steps1(T25);
      s.schedule.irradiance = steps1(1000.0);
      s.schedule.load_R = {{0.0, 5.0}, {1.5, 7.0}, {3.0, 9.0},
                           {4.5, 11.0}, {6.0, 8.0}};
      break;
  }
  return p;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;

  {
    Preset p;
    p.name = "ch2-estimate";
    p.description = "Newton-Raphson (T, lambda) estimation accuracy table for "
                    "the four desired-value cases";
    p.estimate_table = true;
    p.setup.name = p.name;
    p.setup.panel = ch2_panel();
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "ch2-mppt";
    p.description = "Estimation-driven feedforward MPPT on the three-state "
                    "boost converter across the four (T, lambda) cases";
    ScenarioSetup& s = p.setup;
    s.name = p.name;
    s.panel = ch2_panel();
    s.sim.controller = Controller::FeedforwardMppt;
    s.sim.dt = 1e-5;
    s.sim.duration = 4.0;
    s.sim.record_stride = 10;
    s.schedule.temperature = {{0.0, 298.0}, {2.0, 323.0}};
    s.schedule.irradiance = {{0.0, 500.0}, {1.0, 1000.0}, {3.0, 500.0}};
    s.schedule.load_R = steps1(15.0);
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "ch3-unified";
    p.description = "Dual-loop PI battery control with direct-perturbation "
                    "MPPT, 20 V bus, stepped irradiance";
    ScenarioSetup& s = p.setup;
    s.name = p.name;
    s.panel = ch2_panel();
    s.plant = ch3_plant();
    s.Vdc = 20.0;
    s.battery_v = 15.0;
    s.sim.controller = Controller::PiPerturb;
    s.sim.dt = 1e-5;
    s.sim.duration = 1.0;
    s.sim.record_stride = 10;
    s.schedule.temperature = steps1(298.15);
    s.schedule.irradiance = {{0.0, 1000.0}, {0.25, 800.0}, {0.5, 500.0},
                             {0.75, 750.0}};
    s.schedule.load_R = steps1(10.0);
    out.push_back(p);
  }
  out.push_back(make_ch45_case(
      "ch4-case1", "Back-stepping, stepped irradiance 1500->200 W/m2, 40 V bus",
      false, 1));
  out.push_back(make_ch45_case(
      "ch4-case2", "Back-stepping, stepped temperature 75->0 C, 40 V bus",
      false, 2));
  out.push_back(make_ch45_case(
      "ch4-case3", "Back-stepping, stepped load 5->8 ohm, 40 V bus", false, 3));
  out.push_back(make_ch45_case(
      "ch5-case1",
      "Observer-based back-stepping, stepped irradiance 1500->200 W/m2", true,
      1));
  out.push_back(make_ch45_case(
      "ch5-case2", "Observer-based back-stepping, stepped temperature 75->0 C",
      true, 2));
  out.push_back(make_ch45_case(
      "ch5-case3", "Observer-based back-stepping, stepped load 5->8 ohm", true,
      3));
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::BadConfig, "bad numeric value for " + key + ": " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v))
    throw Error(ErrorKind::BadConfig, "expected integer for " + key);
  return static_cast<int>(v);
}

// "0:1500,1.5:1200" -> steps
std::vector<Step> parse_steps(const std::string& key, const std::string& value) {
  std::vector<Step> steps;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorKind::BadConfig, "expected t:value pairs for " + key);
    steps.push_back({parse_double(key, item.substr(0, colon)),
                     parse_double(key, item.substr(colon + 1))});
  }
  if (steps.empty())
    throw Error(ErrorKind::BadConfig, "empty schedule for " + key);
  return steps;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_steps(const std::vector<Step>& steps) {
  std::string out;
  for (const Step& s : steps) {
    if (!out.empty()) out += ",";
    out += fmt(s.t) + ":" + fmt(s.value);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

void apply_override(Preset& preset, const std::string& key,
                    const std::string& value) {
  ScenarioSetup& s = preset.setup;
  PvArrayParams& pv = s.panel;
  SpvdgParams& pl = s.plant;

  if (key == "panel.T_r") pv.T_r = parse_double(key, value);
  else if (key == "panel.lambda_r") pv.lambda_r = parse_double(key, value);
  else if (key == "panel.p") pv.p = parse_double(key, value);
  else if (key == "panel.I_r") pv.I_r = parse_double(key, value);
  else if (key == "panel.I_sc") pv.I_sc = parse_double(key, value);
  else if (key == "panel.k_I") pv.k_I = parse_double(key, value);
  else if (key == "panel.R_s") pv.R_s = parse_double(key, value);
  else if (key == "panel.R_sh") pv.R_sh = parse_double(key, value);
  else if (key == "panel.n_s") pv.n_s = parse_int(key, value);
  else if (key == "panel.n_p") pv.n_p = parse_int(key, value);
  else if (key == "plant.C_pvi") pl.C_pvi = parse_double(key, value);
  else if (key == "plant.C_pvo") pl.C_pvo = parse_double(key, value);
  else if (key == "plant.C_bo") pl.C_bo = parse_double(key, value);
  else if (key == "plant.C_L") pl.C_L = parse_double(key, value);
  else if (key == "plant.L_pv") pl.L_pv = parse_double(key, value);
  else if (key == "plant.L_b") pl.L_b = parse_double(key, value);
  else if (key == "plant.R_pv") pl.R_pv = parse_double(key, value);
  else if (key == "plant.R_b") pl.R_b = parse_double(key, value);
  else if (key == "plant.R_pvo") pl.R_pvo = parse_double(key, value);
  else if (key == "plant.R_bo") pl.R_bo = parse_double(key, value);
  else if (key == "boost.L") s.boost.L = parse_double(key, value);
  else if (key == "boost.r") s.boost.r = parse_double(key, value);
  else if (key == "boost.C_a") s.boost.C_a = parse_double(key, value);
  else if (key == "boost.C_b") s.boost.C_b = parse_double(key, value);
  else if (key == "boost.V_D") s.boost.V_D = parse_double(key, value);
  else if (key == "boost.R_ld") s.boost.R_ld = parse_double(key, value);
  else if (key == "sim.dt") s.sim.dt = parse_double(key, value);
  else if (key == "sim.duration") s.sim.duration = parse_double(key, value);
  else if (key == "sim.record_stride") s.sim.record_stride = parse_int(key, value);
  else if (key == "sim.controller") s.sim.controller = controller_from_name(value);
  else if (key == "Vdc") s.Vdc = parse_double(key, value);
  else if (key == "battery_v") s.battery_v = parse_double(key, value);
  else if (key == "K1") s.gains.K1 = parse_double(key, value);
  else if (key == "K2") s.gains.K2 = parse_double(key, value);
  else if (key == "K3") s.gains.K3 = parse_double(key, value);
  else if (key == "K4") s.gains.K4 = parse_double(key, value);
  else if (key == "K5") s.gains.K5 = parse_double(key, value);
  else if (key == "K6") s.gains.K6 = parse_double(key, value);
  else if (key == "rho1") s.ogains.rho1 = parse_double(key, value);
  else if (key == "rho2") s.ogains.rho2 = parse_double(key, value);
  else if (key == "rho3") s.ogains.rho3 = parse_double(key, value);
  else if (key == "pi.Kp_v") s.pi.Kp_v = parse_double(key, value);
  else if (key == "pi.Ki_v") s.pi.Ki_v = parse_double(key, value);
  else if (key == "pi.Kp_i") s.pi.Kp_i = parse_double(key, value);
  else if (key == "pi.Ki_i") s.pi.Ki_i = parse_double(key, value);
  else if (key == "pi.period") s.pi.period = parse_double(key, value);
  else if (key == "pert.delD") s.pert.delD = parse_double(key, value);
  else if (key == "pert.period") s.pert.period = parse_double(key, value);
  else if (key == "est.delta_t") s.est.delta_t = parse_double(key, value);
  else if (key == "est.max_iters") s.est.max_iters = parse_int(key, value);
  else if (key == "est.tol_T") s.est.tol_T = parse_double(key, value);
  else if (key == "est.tol_lambda") s.est.tol_lambda = parse_double(key, value);
  else if (key == "est.min_change") s.est.min_change = parse_double(key, value);
  else if (key == "constant_d1") s.constant_d1 = parse_int(key, value) != 0;
  else if (key == "schedule.temperature") s.schedule.temperature = parse_steps(key, value);
  else if (key == "schedule.irradiance") s.schedule.irradiance = parse_steps(key, value);
  else if (key == "schedule.load_R") s.schedule.load_R = parse_steps(key, value);
  else throw Error(ErrorKind::BadConfig, "unknown config key: " + key);
}

Preset load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config: " + path);

  // First pass: find the base scenario.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::BadConfig,
                  path + ":" + std::to_string(lineno) + ": expected key = value");
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  std::string base = "ch4-case1";
  for (const auto& [k, v] : pairs)
    if (k == "scenario") base = v;
  const Preset* found = find_preset(base);
  if (!found)
    throw Error(ErrorKind::BadConfig, "unknown scenario in config: " + base);

  Preset preset = *found;
  for (const auto& [k, v] : pairs)
    if (k != "scenario") apply_override(preset, k, v);
  return preset;
}

std::string serialize_preset(const Preset& p) {
  const ScenarioSetup& s = p.setup;
  std::ostringstream out;
  out << "scenario = " << p.name << "\n";
  out << "sim.controller = " << controller_name(s.sim.controller) << "\n";
  out << "sim.dt = " << fmt(s.sim.dt) << "\n";
  out << "sim.duration = " << fmt(s.sim.duration) << "\n";
  out << "sim.record_stride = " << s.sim.record_stride << "\n";
  out << "panel.T_r = " << fmt(s.panel.T_r) << "\n";
  out << "panel.lambda_r = " << fmt(s.panel.lambda_r) << "\n";
  out << "panel.p = " << fmt(s.panel.p) << "\n";
  out << "panel.I_r = " << fmt(s.panel.I_r) << "\n";
  out << "panel.I_sc = " << fmt(s.panel.I_sc) << "\n";
  out << "panel.k_I = " << fmt(s.panel.k_I) << "\n";
  out << "panel.R_s = " << fmt(s.panel.R_s) << "\n";
  out << "panel.R_sh = " << fmt(s.panel.R_sh) << "\n";
  out << "panel.n_s = " << s.panel.n_s << "\n";
  out << "panel.n_p = " << s.panel.n_p << "\n";
  out << "plant.C_pvi = " << fmt(s.plant.C_pvi) << "\n";
  out << "plant.C_pvo = " << fmt(s.plant.C_pvo) << "\n";
  out << "plant.C_bo = " << fmt(s.plant.C_bo) << "\n";
  out << "plant.C_L = " << fmt(s.plant.C_L) << "\n";
  out << "plant.L_pv = " << fmt(s.plant.L_pv) << "\n";
  out << "plant.L_b = " << fmt(s.plant.L_b) << "\n";
  out << "plant.R_pv = " << fmt(s.plant.R_pv) << "\n";
  out << "plant.R_b = " << fmt(s.plant.R_b) << "\n";
  out << "plant.R_pvo = " << fmt(s.plant.R_pvo) << "\n";
  out << "plant.R_bo = " << fmt(s.plant.R_bo) << "\n";
  out << "boost.L = " << fmt(s.boost.L) << "\n";
  out << "boost.r = " << fmt(s.boost.r) << "\n";
  out << "boost.C_a = " << fmt(s.boost.C_a) << "\n";
  out << "boost.C_b = " << fmt(s.boost.C_b) << "\n";
  out << "boost.V_D = " << fmt(s.boost.V_D) << "\n";
  out << "boost.R_ld = " << fmt(s.boost.R_ld) << "\n";
  out << "Vdc = " << fmt(s.Vdc) << "\n";
  out << "battery_v = " << fmt(s.battery_v) << "\n";
  out << "K1 = " << fmt(s.gains.K1) << "\n";
  out << "K2 = " << fmt(s.gains.K2) << "\n";
  out << "K3 = " << fmt(s.gains.K3) << "\n";
  out << "K4 = " << fmt(s.gains.K4) << "\n";
  out << "K5 = " << fmt(s.gains.K5) << "\n";
  out << "K6 = " << fmt(s.gains.K6) << "\n";
  out << "rho1 = " << fmt(s.ogains.rho1) << "\n";
  out << "rho2 = " << fmt(s.ogains.rho2) << "\n";
  out << "rho3 = " << fmt(s.ogains.rho3) << "\n";
  out << "pi.Kp_v = " << fmt(s.pi.Kp_v) << "\n";
  out << "pi.Ki_v = " << fmt(s.pi.Ki_v) << "\n";
  out << "pi.Kp_i = " << fmt(s.pi.Kp_i) << "\n";
  out << "pi.Ki_i = " << fmt(s.pi.Ki_i) << "\n";
  out << "pi.period = " << fmt(s.pi.period) << "\n";
  out << "pert.delD = " << fmt(s.pert.delD) << "\n";
  out << "pert.period = " << fmt(s.pert.period) << "\n";
  out << "est.delta_t = " << fmt(s.est.delta_t) << "\n";
  out << "est.max_iters = " << s.est.max_iters << "\n";
  out << "est.tol_T = " << fmt(s.est.tol_T) << "\n";
  out << "est.tol_lambda = " << fmt(s.est.tol_lambda) << "\n";
  out << "est.min_change = " << fmt(s.est.min_change) << "\n";
  out << "constant_d1 = " << (s.constant_d1 ? 1 : 0) << "\n";
  if (!s.schedule.temperature.empty()) {
    out << "schedule.temperature = " << fmt_steps(s.schedule.temperature) << "\n";
    out << "schedule.irradiance = " << fmt_steps(s.schedule.irradiance) << "\n";
    out << "schedule.load_R = " << fmt_steps(s.schedule.load_R) << "\n";
  }
  return out.str();
}

std::string config_hash(const Preset& preset) {
  const std::string body = serialize_preset(preset);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : body) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "t,x1,x2,x3,x4,x5,x6,u1,u2,d1,d2,d3,d1hat,d2hat,d3hat,P_pv,P_batt,P_load\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17e%c", v, sep);
    out << buf;
  };
  for (const TraceRow& r : trace.rows) {
    put(r.t, ',');
    for (double xi : r.x) put(xi, ',');
    put(r.u1, ',');
    put(r.u2, ',');
    put(r.d.d1, ',');
    put(r.d.d2, ',');
    put(r.d.d3, ',');
    if (trace.has_observer) {
      put(r.obs.d1hat, ',');
      put(r.obs.d2hat, ',');
      put(r.obs.d3hat, ',');
    } else {
      out << ",,,";
    }
    put(r.P_pv, ',');
    put(r.P_batt, ',');
    put(r.P_load, '\n');
  }
}

std::string estimate_table_report(const PvArrayParams& panel,
                                  const EstimatorConfig& cfg) {
  struct Case {
    double T, lambda;
  };
  const Case cases[] = {{298.0, 500.0}, {298.0, 1000.0},
                        {323.0, 1000.0}, {323.0, 500.0}};
  std::ostringstream out;
  out << "case  T_true  lambda_true  T_est      lambda_est  errT%    errL%    iters\n";
  int n = 1;
  for (const Case& c : cases) {
    const Environment env{c.T, c.lambda};
    const double v1 = 10.0, v2 = 12.0;
    const MeasurementPair pair{{v1, pv_current(panel, env, v1), 0.0},
                               {v2, pv_current(panel, env, v2), 0.0}};
    const EstimatorState got =
        estimate(panel, pair, {panel.T_r, panel.lambda_r}, cfg);
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%-4d  %-6.1f  %-11.1f  %-9.4f  %-10.4f  %-7.4f  %-7.4f  %d\n",
                  n++, c.T, c.lambda, got.T_k, got.lambda_k,
                  std::abs(got.T_k - c.T) / c.T * 100.0,
                  std::abs(got.lambda_k - c.lambda) / c.lambda * 100.0,
                  got.iterations_used);
    out << line;
  }
  return out.str();
}

std::string metrics_report(const Preset& preset, const Trace& trace) {
  const ScenarioSetup& s = preset.setup;
  std::ostringstream out;
  char line[256];

  const std::vector<double> events = schedule_events(s.schedule);
  std::vector<double> bounds{0.0};
  bounds.insert(bounds.end(), events.begin(), events.end());
  bounds.push_back(s.sim.duration);

  const bool six_state = s.sim.controller != Controller::FeedforwardMppt;
  const bool tracking = s.sim.controller == Controller::Backstep ||
                        s.sim.controller == Controller::DobBackstep;

  for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
    const double t0 = bounds[seg], t1 = bounds[seg + 1];
    const double T = schedule_value(s.schedule.temperature, t0);
    const double lambda = schedule_value(s.schedule.irradiance, t0);
    const double R = schedule_value(s.schedule.load_R, t0);
    const OperatingPoint mpp = find_mpp(s.panel, {T, lambda});

    // Last sample of the segment.
    const TraceRow* end = nullptr;
    for (const TraceRow& r : trace.rows)
      if (r.t <= t1 + 1e-9) end = &r;
      else break;
    if (!end) continue;

    std::snprintf(line, sizeof(line),
                  "segment %zu: t=[%g,%g) T=%.2fK lambda=%gW/m2 R=%gohm "
                  "Pmpp=%.2fW\n",
                  seg + 1, t0, t1, T, lambda, R, mpp.power);
    out << line;

    if (six_state) {
      std::string settle;
      try {
        const double ts =
            settling_time(trace, Signal::X6, s.Vdc, 0.01, t0, t1);
        char b[32];
        std::snprintf(b, sizeof(b), "%.1f ms", ts * 1000.0);
        settle = b;
      } catch (const Error&) {
        settle = "never (1% band)";
      }
      std::snprintf(line, sizeof(line),
                    "  x6 settling (1%% band): %s; x6 end = %.4f V (err %.3f%%)\n",
                    settle.c_str(), end->x[5],
                    std::abs(end->x[5] - s.Vdc) / s.Vdc * 100.0);
      out << line;
    }
    if (tracking) {
      std::snprintf(line, sizeof(line),
                    "  x1 end = %.4f V vs Vmpp %.4f V (err %.3f%%)\n",
                    end->x[0], mpp.v, std::abs(end->x[0] - mpp.v) / mpp.v * 100.0);
      out << line;
    }
    std::snprintf(line, sizeof(line),
                  "  P_pv end = %.2f W; P_batt end = %.2f W; P_load end = %.2f W\n",
                  end->P_pv, end->P_batt, end->P_load);
    out << line;
    if (trace.has_observer) {
      std::snprintf(
          line, sizeof(line),
          "  observers end: d1hat err %.3f%%, d2hat err %.3f%%, d3hat err %.3f%%\n",
          std::abs(end->obs.d1hat - end->d.d1) / std::max(end->d.d1, 1e-9) * 100.0,
          std::abs(end->obs.d2hat - end->d.d2) / end->d.d2 * 100.0,
          std::abs(end->obs.d3hat - end->d.d3) / end->d.d3 * 100.0);
      out << line;
    }
    if (s.sim.controller == Controller::PiPerturb) {
      // Battery current averaged over the last 50 ms of the segment
      // (perturbation ripple makes point samples sign-ambiguous).
      double sum = 0.0;
      int n = 0;
      for (const TraceRow& r : trace.rows)
        if (r.t > t1 - 0.05 && r.t <= t1 + 1e-9) {
          sum += r.x[3];
          ++n;
        }
      if (n > 0) {
        std::snprintf(line, sizeof(line),
                      "  x4 mean (last 50 ms) = %+.3f A (%s)\n", sum / n,
                      sum >= 0.0 ? "discharging" : "charging");
        out << line;
      }
    }
  }
  return out.str();
}

std::string manifest_text(const Preset& preset,
                          const std::vector<std::string>& output_paths,
                          const std::vector<std::string>& overrides) {
  std::ostringstream out;
  out << "scenario: " << preset.name << "\n";
  out << "description: " << preset.description << "\n";
  out << "config_hash: " << config_hash(preset) << "\n";
  const std::time_t now = std::time(nullptr);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "generated: " << stamp << "\n";
  out << "overrides:";
  if (overrides.empty()) out << " none";
  out << "\n";
  for (const std::string& o : overrides) out << "  " << o << "\n";
  out << "outputs:\n";
  for (const std::string& p : output_paths) out << "  " << p << "\n";
  out << "resolved parameters:\n";
  std::istringstream body(serialize_preset(preset));
  std::string l;
  while (std::getline(body, l)) out << "  " << l << "\n";
  return out.str();
}

} // namespace spvdg
