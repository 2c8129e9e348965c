#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "control.hpp"
#include "errors.hpp"
#include "estimator.hpp"
#include "power_stage.hpp"

namespace spvdg {

// ---- Schedules ----

struct Step {
  double t;     // segment start time (s)
  double value; // held until the next segment
};

struct Schedule {
  std::vector<Step> temperature; // K
  std::vector<Step> irradiance;  // W/m^2
  std::vector<Step> load_R;      // ohm
};

// Value held at time t (last segment whose start <= t).
double schedule_value(const std::vector<Step>& steps, double t);

// Union of all segment start times > 0, sorted and deduplicated.
std::vector<double> schedule_events(const Schedule& schedule);

// BadConfig unless every channel is non-empty, starts at t = 0, and has
// strictly increasing segment times.
void validate_schedule(const Schedule& schedule);

// ---- Simulation configuration ----

enum class Controller { Backstep, DobBackstep, PiPerturb, FeedforwardMppt };

Controller controller_from_name(const std::string& name); // BadConfig on unknown
std::string controller_name(Controller controller);

struct SimConfig {
  double dt = 1e-5;
  double duration = 1.0;
  Controller controller = Controller::Backstep;
  int record_stride = 10;
};

// ---- Traces ----

struct TraceRow {
  double t;
  SpvdgState x;
  double u1, u2;
  Disturbances d;    // true values
  ObserverState obs; // meaningful only when Trace::has_observer
  double P_pv, P_batt, P_load;
};

struct Trace {
  bool has_observer = false;
  std::vector<TraceRow> rows;
};

enum class Signal { X1, X2, X3, X4, X5, X6, U1, U2, D1hat, D2hat, D3hat };

double trace_signal(const TraceRow& row, Signal signal);

// ---- Integrator ----

// Classical RK4 with the derivative inputs held over the step (zero-order
// hold). Throws NonFinite if any component leaves the reals.
template <std::size_t N, class F>
std::array<double, N> rk4_step(F&& deriv, const std::array<double, N>& x,
                               double dt) {
  std::array<double, N> k1 = deriv(x);
  std::array<double, N> tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  std::array<double, N> k2 = deriv(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  std::array<double, N> k3 = deriv(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + dt * k3[i];
  std::array<double, N> k4 = deriv(tmp);
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(out[i]))
      throw Error(ErrorKind::NonFinite, "rk4_step: non-finite state component");
  }
  return out;
}

// ---- Scenario runner ----

struct ScenarioSetup {
  std::string name;
  PvArrayParams panel;
  SpvdgParams plant;  // six-state plant (backstep / dob-backstep / pi-perturb)
  BoostParams boost;  // three-state boost (feedforward-mppt)
  Schedule schedule;
  SimConfig sim;
  double Vdc = 40.0;       // DC bus reference (V)
  double battery_v = 24.0; // true battery voltage d2 (V)
  BackstepGains gains{17.0, 5.0, 5.0, 5.0, 10.0, 19.0};
  ObserverGains ogains{};
  PiGains pi{};
  PerturbState pert{};
  EstimatorConfig est{};   // feedforward-mppt estimation settings
  // Hold d1 at the segment MPP current instead of coupling through the PV
  // curve at x1 (the model's literal external-disturbance reading; test aid).
  bool constant_d1 = false;
};

// Advances the plant under the selected controller. d1 is computed from the
// PV curve at the scheduled (T, lambda) and the live x1 unless constant_d1 is
// set. References regenerate at schedule events for backstep; the observer
// variant regenerates each control step from the observer estimates (see
// README notes: event-frozen references let the load observer drift without
// bound, so the estimates feed the reference algebra continuously).
Trace run_scenario(const ScenarioSetup& setup);

// ---- Trace metrics ----

// First time in [from, until] at which the signal enters and remains within
// +-band*target through `until`. Throws NeverSettles if the band is never
// held; BadConfig if the window is empty.
double settling_time(const Trace& trace, Signal signal, double target,
                     double band, double from, double until);

// P_pv + P_batt - P_load - P_losses at the recorded sample nearest t.
// Resistive losses cover R_pv, R_b, R_pvo and R_bo paths.
double power_balance(const Trace& trace, const SpvdgParams& params, double t);

} // namespace spvdg
