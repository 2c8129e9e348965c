#include "sim.hpp"

#include <algorithm>
#include <cmath>

namespace spvdg {

double schedule_value(const std::vector<Step>& steps, double t) {
  double v = steps.front().value;
  for (const Step& s : steps) {
    if (s.t <= t + 1e-12) v = s.value;
    else break;
  }
  return v;
}

std::vector<double> schedule_events(const Schedule& schedule) {
  std::vector<double> events;
  for (const auto* channel :
       {&schedule.temperature, &schedule.irradiance, &schedule.load_R})
    for (const Step& s : *channel)
      if (s.t > 0.0) events.push_back(s.t);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               events.end());
  return events;
}

void validate_schedule(const Schedule& schedule) {
  for (const auto* channel :
       {&schedule.temperature, &schedule.irradiance, &schedule.load_R}) {
    if (channel->empty())
      throw Error(ErrorKind::BadConfig, "schedule: empty channel");
    if (channel->front().t != 0.0)
      throw Error(ErrorKind::BadConfig, "schedule: first segment must start at t=0");
    for (std::size_t i = 1; i < channel->size(); ++i)
      if ((*channel)[i].t <= (*channel)[i - 1].t)
        throw Error(ErrorKind::BadConfig, "schedule: segment times must increase");
  }
}

Controller controller_from_name(const std::string& name) {
  if (name == "backstep") return Controller::Backstep;
  if (name == "dob-backstep") return Controller::DobBackstep;
  if (name == "pi-perturb") return Controller::PiPerturb;
  if (name == "feedforward-mppt") return Controller::FeedforwardMppt;
  throw Error(ErrorKind::BadConfig, "unknown controller: " + name);
}

std::string controller_name(Controller controller) {
  switch (controller) {
    case Controller::Backstep: return "backstep";
    case Controller::DobBackstep: return "dob-backstep";
    case Controller::PiPerturb: return "pi-perturb";
    case Controller::FeedforwardMppt: return "feedforward-mppt";
  }
  return "unknown";
}

double trace_signal(const TraceRow& row, Signal signal) {
  switch (signal) {
    case Signal::X1: return row.x[0];
    case Signal::X2: return row.x[1];
    case Signal::X3: return row.x[2];
    case Signal::X4: return row.x[3];
    case Signal::X5: return row.x[4];
    case Signal::X6: return row.x[5];
    case Signal::U1: return row.u1;
    case Signal::U2: return row.u2;
    case Signal::D1hat: return row.obs.d1hat;
    case Signal::D2hat: return row.obs.d2hat;
    case Signal::D3hat: return row.obs.d3hat;
  }
  return 0.0;
}

namespace {

struct ScheduleCursor {
  std::vector<double> events;
  std::size_t next = 0;
  // True exactly once per event time, when t has reached it.
  bool fire(double t, double dt) {
    if (next < events.size() && t >= events[next] - dt / 2.0) {
      ++next;
      return true;
    }
    return false;
  }
};

void push_row(Trace& trace, double t, const SpvdgState& x, double u1, double u2,
              const Disturbances& d, const ObserverState& obs, double battery_v) {
  TraceRow row;
  row.t = t;
  row.x = x;
  row.u1 = u1;
  row.u2 = u2;
  row.d = d;
  row.obs = obs;
  row.P_pv = d.d1 * x[0];
  row.P_batt = battery_v * x[3];
  row.P_load = d.d3 * x[5] * x[5];
  trace.rows.push_back(row);
}

Trace run_backstep_family(const ScenarioSetup& s, bool dob) {
  Trace trace;
  trace.has_observer = dob;

  const double dt = s.sim.dt;
  ScheduleCursor cursor{schedule_events(s.schedule)};

  double T = schedule_value(s.schedule.temperature, 0.0);
  double lambda = schedule_value(s.schedule.irradiance, 0.0);
  double d3 = 1.0 / schedule_value(s.schedule.load_R, 0.0);

  OperatingPoint mpp = find_mpp(s.panel, {T, lambda});
  RefSet refs = generate_references(s.plant, s.Vdc, mpp, s.battery_v, d3);
  SpvdgState x = refs.x;
  BackstepDuties prev{refs.u1ss, refs.u2ss};
  ObserverState obs{mpp.i, s.battery_v, d3}; // observers start at truth

  const long steps = std::lround(s.sim.duration / dt);
  push_row(trace, 0.0, x, prev.u1, prev.u2, {mpp.i, s.battery_v, d3}, obs,
           s.battery_v);

  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    if (cursor.fire(t, dt)) {
      T = schedule_value(s.schedule.temperature, t);
      lambda = schedule_value(s.schedule.irradiance, t);
      d3 = 1.0 / schedule_value(s.schedule.load_R, t);
      mpp = find_mpp(s.panel, {T, lambda});
      if (!dob)
        refs = generate_references(s.plant, s.Vdc, mpp, s.battery_v, d3);
    }
    if (dob) {
      // The observer variant feeds its estimates into the reference algebra
      // every step; transiently infeasible estimates hold the previous refs.
      try {
        refs = generate_references(s.plant, s.Vdc, mpp, obs.d2hat, obs.d3hat);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InfeasibleReferences) throw;
      }
    }

    const double d1 =
        s.constant_d1 ? mpp.i : pv_current(s.panel, {T, lambda}, x[0]);
    const Disturbances d{d1, s.battery_v, d3};

    if (dob) {
      const DobResult res =
          dob_backstep_control(s.plant, x, refs, obs, s.gains, s.ogains, prev);
      prev = res.duties;
      obs.d1hat += dt * res.rates.d1hat; // forward-Euler observer update
      obs.d2hat += dt * res.rates.d2hat;
      obs.d3hat += dt * res.rates.d3hat;
    } else {
      prev = backstep_control(s.plant, x, refs, d, s.gains, prev);
    }

    x = rk4_step<6>(
        [&](const SpvdgState& xx) {
          return spvdg_derivatives(s.plant, xx, d, prev.u1, prev.u2);
        },
        x, dt);

    if ((k + 1) % s.sim.record_stride == 0)
      push_row(trace, (k + 1) * dt, x, prev.u1, prev.u2, d, obs, s.battery_v);
  }
  return trace;
}

Trace run_pi_perturb(const ScenarioSetup& s) {
  Trace trace;

  const double dt = s.sim.dt;
  ScheduleCursor cursor{schedule_events(s.schedule)};

  double T = schedule_value(s.schedule.temperature, 0.0);
  double lambda = schedule_value(s.schedule.irradiance, 0.0);
  double d3 = 1.0 / schedule_value(s.schedule.load_R, 0.0);

  OperatingPoint mpp = find_mpp(s.panel, {T, lambda});
  const RefSet refs = generate_references(s.plant, s.Vdc, mpp, s.battery_v, d3);
  // PV side starts at its MPP equilibrium; battery idle, bus at reference.
  SpvdgState x{refs.x[0], refs.x[1], refs.x[2], 0.0, s.Vdc, s.Vdc};

  PerturbState pert = s.pert;
  pert.D_pv = pert.D_pv_old = refs.u1ss;
  PiState pist;
  double u1 = pert.D_pv;
  double u2 = 0.5;

  const long n_pi = std::lround(s.pi.period / dt);
  const long n_pert = std::lround(pert.period / dt);
  const long steps = std::lround(s.sim.duration / dt);

  push_row(trace, 0.0, x, u1, u2, {mpp.i, s.battery_v, d3}, {}, s.battery_v);

  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    if (cursor.fire(t, dt)) {
      T = schedule_value(s.schedule.temperature, t);
      lambda = schedule_value(s.schedule.irradiance, t);
      d3 = 1.0 / schedule_value(s.schedule.load_R, t);
      mpp = find_mpp(s.panel, {T, lambda});
    }
    if (k % n_pi == 0) u2 = dual_loop_pi(x[5], s.Vdc, x[3], s.pi, pist).u2;
    if (k > 0 && k % n_pert == 0) {
      perturb_step(pert, pist);
      u1 = pert.D_pv;
    }

    const double d1 =
        s.constant_d1 ? mpp.i : pv_current(s.panel, {T, lambda}, x[0]);
    const Disturbances d{d1, s.battery_v, d3};
    x = rk4_step<6>(
        [&](const SpvdgState& xx) {
          return spvdg_derivatives(s.plant, xx, d, u1, u2);
        },
        x, dt);

    if ((k + 1) % s.sim.record_stride == 0)
      push_row(trace, (k + 1) * dt, x, u1, u2, d, {}, s.battery_v);
  }
  return trace;
}

void push_boost_row(Trace& trace, double t, const std::array<double, 3>& x,
                    double u, double i_pv, double R_ld) {
  TraceRow row;
  row.t = t;
  row.x = {x[1], 0.0, x[0], 0.0, 0.0, x[2]}; // v_pv->x1, i_L->x3, v_o->x6
  row.u1 = u;
  row.u2 = 0.0;
  row.d = {i_pv, 0.0, 1.0 / R_ld};
  row.obs = {};
  row.P_pv = x[1] * i_pv;
  row.P_batt = 0.0;
  row.P_load = x[2] * x[2] / R_ld;
  trace.rows.push_back(row);
}

Trace run_feedforward_mppt(const ScenarioSetup& s) {
  Trace trace;

  const double dt = s.sim.dt;
  ScheduleCursor cursor{schedule_events(s.schedule)};

  double T = schedule_value(s.schedule.temperature, 0.0);
  double lambda = schedule_value(s.schedule.irradiance, 0.0);
  BoostParams boost = s.boost;
  boost.R_ld = schedule_value(s.schedule.load_R, 0.0);

  // Pre-converged start: estimate equals truth, converter at the MPP refs.
  EstimatorState est{T, lambda};
  OperatingPoint mpp = find_mpp(s.panel, {T, lambda});
  BoostRefs refs = boost_steady_refs(mpp.v, mpp.i, boost);
  std::array<double, 3> x{refs.i_Lr, mpp.v, refs.v_or}; // i_L, v_pv, v_o
  double u = refs.u_r;

  OperatingPoint prev_meas{x[1], pv_current(s.panel, {T, lambda}, x[1]), 0.0};
  const long n_est = std::lround(s.est.delta_t / dt);
  const long steps = std::lround(s.sim.duration / dt);

  push_boost_row(trace, 0.0, x, u, prev_meas.i, boost.R_ld);

  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    if (cursor.fire(t, dt)) {
      T = schedule_value(s.schedule.temperature, t);
      lambda = schedule_value(s.schedule.irradiance, t);
      boost.R_ld = schedule_value(s.schedule.load_R, t);
    }
    const double i_pv = pv_current(s.panel, {T, lambda}, x[1]);

    if (k > 0 && k % n_est == 0) {
      const OperatingPoint cur{x[1], i_pv, x[1] * i_pv};
      if (should_reestimate(prev_meas, cur, s.est.min_change)) {
        try {
          est = estimate(s.panel, {prev_meas, cur},
                         initial_guess(s.panel, {prev_meas, cur}), s.est);
          mpp = find_mpp(s.panel, {est.T_k, est.lambda_k});
          refs = boost_steady_refs(mpp.v, mpp.i, boost);
          u = refs.u_r;
        } catch (const Error&) {
          // Indistinguishable or non-converging pair: keep the last estimate
          // and duty, try again next tick.
        }
      }
      prev_meas = cur;
    }

    // i_pv held over the step, matching the six-state runners' d1 treatment.
    x = rk4_step<3>(
        [&](const std::array<double, 3>& xx) {
          const BoostState rate =
              boost_derivatives(boost, {xx[0], xx[1], xx[2]}, i_pv, u);
          return std::array<double, 3>{rate.i_L, rate.v_pv, rate.v_o};
        },
        x, dt);

    if ((k + 1) % s.sim.record_stride == 0)
      push_boost_row(trace, (k + 1) * dt, x, u,
                     pv_current(s.panel, {T, lambda}, x[1]), boost.R_ld);
  }
  return trace;
}

} // namespace

Trace run_scenario(const ScenarioSetup& setup) {
  validate_schedule(setup.schedule);
  if (setup.sim.dt <= 0.0 || setup.sim.duration <= 0.0 ||
      setup.sim.record_stride < 1)
    throw Error(ErrorKind::BadConfig, "run_scenario: invalid sim config");

  switch (setup.sim.controller) {
    case Controller::Backstep: return run_backstep_family(setup, false);
    case Controller::DobBackstep: return run_backstep_family(setup, true);
    case Controller::PiPerturb: return run_pi_perturb(setup);
    case Controller::FeedforwardMppt: return run_feedforward_mppt(setup);
  }
  throw Error(ErrorKind::BadConfig, "run_scenario: unknown controller");
}

double settling_time(const Trace& trace, Signal signal, double target,
                     double band, double from, double until) {
  const double tol = band * std::abs(target);
  std::size_t begin = trace.rows.size();
  for (std::size_t i = 0; i < trace.rows.size(); ++i)
    if (trace.rows[i].t >= from - 1e-12) {
      begin = i;
      break;
    }
  if (begin == trace.rows.size())
    throw Error(ErrorKind::BadConfig, "settling_time: window outside trace");

  std::size_t settled_at = trace.rows.size();
  for (std::size_t i = begin; i < trace.rows.size(); ++i) {
    const TraceRow& row = trace.rows[i];
    if (row.t > until + 1e-12) break;
    if (std::abs(trace_signal(row, signal) - target) <= tol) {
      if (settled_at == trace.rows.size()) settled_at = i;
    } else {
      settled_at = trace.rows.size();
    }
  }
  if (settled_at == trace.rows.size())
    throw Error(ErrorKind::NeverSettles, "settling_time: band never held");
  return trace.rows[settled_at].t - from;
}

double power_balance(const Trace& trace, const SpvdgParams& p, double t) {
  if (trace.rows.empty())
    throw Error(ErrorKind::BadConfig, "power_balance: empty trace");
  const TraceRow* best = &trace.rows.front();
  for (const TraceRow& row : trace.rows)
    if (std::abs(row.t - t) < std::abs(best->t - t)) best = &row;
  const SpvdgState& x = best->x;
  const double losses = p.R_pv * x[2] * x[2] + p.R_b * x[3] * x[3] +
                        (x[1] - x[5]) * (x[1] - x[5]) / p.R_pvo +
                        (x[4] - x[5]) * (x[4] - x[5]) / p.R_bo;
  return best->P_pv + best->P_batt - best->P_load - losses;
}

} // namespace spvdg
