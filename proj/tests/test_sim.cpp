#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "spvdg/errors.hpp"
#include "spvdg/pv_model.hpp"
#include "spvdg/sim.hpp"

using namespace spvdg;

TEST_CASE("rk4 single step matches the fourth-order Taylor polynomial") {
  // dx/dt = x, one step of dt = 0.1 from x = 1 gives sum_{k<=4} dt^k / k!.
  auto deriv = [](const std::array<double, 1>& x) {
    return std::array<double, 1>{x[0]};
  };
  const auto out = rk4_step<1>(deriv, {1.0}, 0.1);
  CHECK(out[0] == doctest::Approx(1.1051708333333333).epsilon(1e-15));
}

TEST_CASE("rk4 integrates exponential decay to near machine accuracy") {
  auto deriv = [](const std::array<double, 1>& x) {
    return std::array<double, 1>{-x[0]};
  };
  std::array<double, 1> x{1.0};
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) x = rk4_step<1>(deriv, x, dt);
  CHECK(std::abs(x[0] - 0.36787944117144233) <= 1e-12);
}

TEST_CASE("rk4 integrates the harmonic oscillator") {
  // x1' = x2, x2' = -x1 from (1, 0): x1 = cos t, x2 = -sin t.
  auto deriv = [](const std::array<double, 2>& x) {
    return std::array<double, 2>{x[1], -x[0]};
  };
  std::array<double, 2> x{1.0, 0.0};
  const double T = M_PI / 2.0;
  const int n = 2000;
  for (int k = 0; k < n; ++k) x = rk4_step<2>(deriv, x, T / n);
  CHECK(std::abs(x[0] - 0.0) <= 1e-10);
  CHECK(std::abs(x[1] + 1.0) <= 1e-10);
}

TEST_CASE("rk4 refuses non-finite states") {
  auto deriv = [](const std::array<double, 1>&) {
    return std::array<double, 1>{std::numeric_limits<double>::quiet_NaN()};
  };
  CHECK_THROWS_AS((rk4_step<1>(deriv, {1.0}, 1e-3)), Error);
}

TEST_CASE("schedule values hold the last segment") {
  const std::vector<Step> s{{0.0, 1.0}, {1.0, 2.0}, {3.0, 0.5}};
  CHECK(schedule_value(s, 0.0) == doctest::Approx(1.0));
  CHECK(schedule_value(s, 0.99) == doctest::Approx(1.0));
  CHECK(schedule_value(s, 1.0) == doctest::Approx(2.0));
  CHECK(schedule_value(s, 2.9) == doctest::Approx(2.0));
  CHECK(schedule_value(s, 3.0) == doctest::Approx(0.5));
  CHECK(schedule_value(s, 100.0) == doctest::Approx(0.5));
}

TEST_CASE("schedule events are the sorted deduplicated union") {
  Schedule sch;
  sch.temperature = {{0.0, 298.0}, {2.0, 323.0}};
  sch.irradiance = {{0.0, 1000.0}, {1.0, 500.0}, {2.0, 800.0}};
  sch.load_R = {{0.0, 8.0}};
  const std::vector<double> ev = schedule_events(sch);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(2.0));
}

TEST_CASE("schedule validation") {
  Schedule good;
  good.temperature = {{0.0, 298.0}};
  good.irradiance = {{0.0, 1000.0}};
  good.load_R = {{0.0, 8.0}};
  CHECK_NOTHROW(validate_schedule(good));

  Schedule empty = good;
  empty.load_R.clear();
  CHECK_THROWS_AS(validate_schedule(empty), Error);

  Schedule late = good;
  late.irradiance = {{0.5, 1000.0}};
  CHECK_THROWS_AS(validate_schedule(late), Error);

  Schedule unsorted = good;
  unsorted.irradiance = {{0.0, 1000.0}, {2.0, 500.0}, {1.0, 800.0}};
  CHECK_THROWS_AS(validate_schedule(unsorted), Error);
}

TEST_CASE("controller names round-trip") {
  for (Controller c : {Controller::Backstep, Controller::DobBackstep,
                       Controller::PiPerturb, Controller::FeedforwardMppt})
    CHECK(controller_from_name(controller_name(c)) == c);
  CHECK(controller_name(Controller::DobBackstep) == "dob-backstep");
  CHECK_THROWS_AS(controller_from_name("sliding-mode"), Error);
}

static Trace first_order_trace(double target, double tau, double dt, double T) {
  Trace tr;
  for (double t = 0.0; t <= T + 1e-12; t += dt) {
    TraceRow row{};
    row.t = t;
    row.x[5] = target * (1.0 - std::exp(-t / tau));
    tr.rows.push_back(row);
  }
  return tr;
}

TEST_CASE("settling time of a first-order rise") {
  // v(t) = V (1 - e^{-t/tau}) enters the 2% band at tau ln 50 = 39.12 ms and
  // never leaves; the answer is that instant rounded up to the sample grid.
  const Trace tr = first_order_trace(40.0, 0.010, 1e-4, 0.2);
  const double ts = settling_time(tr, Signal::X6, 40.0, 0.02, 0.0, 0.2);
  CHECK(ts == doctest::Approx(0.0392).epsilon(1e-12));
  // 1% band: tau ln 100 = 46.05 ms -> 46.1 ms on the grid.
  const double ts1 = settling_time(tr, Signal::X6, 40.0, 0.01, 0.0, 0.2);
  CHECK(ts1 == doctest::Approx(0.0461).epsilon(1e-12));
}

TEST_CASE("settling time is measured from the window start") {
  const Trace tr = first_order_trace(40.0, 0.010, 1e-4, 0.2);
  const double ts = settling_time(tr, Signal::X6, 40.0, 0.02, 0.01, 0.2);
  CHECK(ts == doctest::Approx(0.0392 - 0.01).epsilon(1e-9));
}

TEST_CASE("constant trace at the target settles immediately") {
  Trace tr;
  for (int k = 0; k <= 100; ++k) {
    TraceRow row{};
    row.t = k * 1e-3;
    row.x[5] = 40.0;
    tr.rows.push_back(row);
  }
  CHECK(settling_time(tr, Signal::X6, 40.0, 0.01, 0.0, 0.095) ==
        doctest::Approx(0.0));
}

TEST_CASE("a persistent oscillation outside the band never settles") {
  Trace tr;
  for (int k = 0; k <= 1000; ++k) {
    TraceRow row{};
    row.t = k * 1e-4;
    row.x[5] = 40.0 * (1.0 + 0.05 * std::sin(2.0 * M_PI * 50.0 * row.t));
    tr.rows.push_back(row);
  }
  CHECK_THROWS_AS(settling_time(tr, Signal::X6, 40.0, 0.01, 0.0, 0.095), Error);
  try {
    settling_time(tr, Signal::X6, 40.0, 0.01, 0.0, 0.095);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NeverSettles);
  }
  // A window past the end of the trace is a configuration error.
  CHECK_THROWS_AS(settling_time(tr, Signal::X6, 40.0, 0.01, 1.0, 2.0), Error);
}

static ScenarioSetup equilibrium_setup() {
  ScenarioSetup s;
  s.name = "equilibrium";
  s.schedule.temperature = {{0.0, 298.0}};
  s.schedule.irradiance = {{0.0, 1000.0}};
  s.schedule.load_R = {{0.0, 8.0}};
  s.sim.duration = 0.05;
  s.sim.controller = Controller::Backstep;
  s.gains = {10.0, 1.0, 1.0, 1.0, 1.0, 15.0};
  return s;
}

TEST_CASE("a run started at the references stays there") {
  const ScenarioSetup s = equilibrium_setup();
  const Trace tr = run_scenario(s);
  REQUIRE(!tr.rows.empty());
  CHECK_FALSE(tr.has_observer);
  // 5000 steps at stride 10 plus the initial sample.
  CHECK(tr.rows.size() == 501);
  CHECK(tr.rows.back().t == doctest::Approx(0.05));

  const OperatingPoint mpp = find_mpp(s.panel, {298.0, 1000.0});
  const TraceRow& last = tr.rows.back();
  CHECK(std::abs(last.x[0] - mpp.v) <= 1e-6 * mpp.v);
  CHECK(std::abs(last.x[5] - s.Vdc) <= 1e-6 * s.Vdc);
  CHECK(last.P_pv == doctest::Approx(mpp.power).epsilon(1e-6));
  CHECK(last.P_load == doctest::Approx(s.Vdc * s.Vdc / 8.0).epsilon(1e-6));

  // At equilibrium the recorded powers close the balance sheet exactly.
  const double pb = power_balance(tr, s.plant, 0.05);
  CHECK(std::abs(pb) <= 1e-3 * last.P_load);
}

TEST_CASE("observer variant reports observer columns") {
  ScenarioSetup s = equilibrium_setup();
  s.sim.controller = Controller::DobBackstep;
  s.gains = {17.0, 1.0, 1.0, 1.0, 10.0, 19.0};
  s.sim.duration = 0.02;
  const Trace tr = run_scenario(s);
  CHECK(tr.has_observer);
  const TraceRow& last = tr.rows.back();
  // Observers start at the truth and the plant starts at equilibrium, so the
  // estimates have nothing to move for.
  CHECK(last.obs.d1hat == doctest::Approx(last.d.d1).epsilon(1e-6));
  CHECK(last.obs.d3hat == doctest::Approx(last.d.d3).epsilon(1e-6));
}

TEST_CASE("trace_signal maps every enum member") {
  TraceRow row{};
  row.x = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  row.u1 = 0.25;
  row.u2 = 0.75;
  row.obs = {7.0, 8.0, 9.0};
  CHECK(trace_signal(row, Signal::X1) == doctest::Approx(1.0));
  CHECK(trace_signal(row, Signal::X4) == doctest::Approx(4.0));
  CHECK(trace_signal(row, Signal::X6) == doctest::Approx(6.0));
  CHECK(trace_signal(row, Signal::U1) == doctest::Approx(0.25));
  CHECK(trace_signal(row, Signal::U2) == doctest::Approx(0.75));
  CHECK(trace_signal(row, Signal::D1hat) == doctest::Approx(7.0));
  CHECK(trace_signal(row, Signal::D3hat) == doctest::Approx(9.0));
}
