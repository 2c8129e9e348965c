#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spvdg/errors.hpp"
#include "spvdg/power_stage.hpp"
#include "spvdg/pv_model.hpp"

using namespace spvdg;

TEST_CASE("boost derivatives match the averaged equations by hand") {
  const BoostParams p{}; // L=5mH, r=0.2, C=200uF, V_D=0.6, R_ld=15
  const BoostState st{2.0, 14.0, 28.0};
  const BoostState rate = boost_derivatives(p, st, 4.0, 0.5);
  CHECK(rate.i_L == doctest::Approx((14.0 - 0.2 * 2.0 - 0.6 + 0.5 * 0.6 - 28.0 + 0.5 * 28.0) / 5e-3));
  CHECK(rate.v_pv == doctest::Approx((4.0 - 2.0) / 200e-6));
  CHECK(rate.v_o == doctest::Approx((2.0 * 0.5 - 28.0 / 15.0) / 200e-6));
}

TEST_CASE("boost steady refs zero out the derivatives") {
  const BoostParams p{};
  const double v_pvr = 14.721489984045133, i_pvr = 4.40748106980608; // Ch. 2 MPP
  const BoostRefs refs = boost_steady_refs(v_pvr, i_pvr, p);
  const BoostState rate =
      boost_derivatives(p, {refs.i_Lr, v_pvr, refs.v_or}, i_pvr, refs.u_r);
  CHECK(std::abs(rate.i_L) <= 1e-6 * 1e3);  // state scale ~A over L in mH
  CHECK(std::abs(rate.v_pv) <= 1e-9);
  CHECK(std::abs(rate.v_o) <= 1e-6 * 1e4);
  CHECK(refs.u_r > 0.0);
  CHECK(refs.u_r < 1.0);
  CHECK(refs.v_or > v_pvr); // boost steps up
}

TEST_CASE("boost refs reject infeasible operating points") {
  BoostParams p{};
  CHECK_THROWS_AS(boost_steady_refs(0.1, 500.0, p), Error); // negative discriminant
}

TEST_CASE("six-state derivatives match the model by hand") {
  const SpvdgParams p{};
  const SpvdgState x{26.0, 41.0, 7.5, 2.0, 40.5, 40.0};
  const Disturbances d{7.6, 24.0, 0.125};
  const SpvdgState rate = spvdg_derivatives(p, x, d, 0.3, 0.4);
  CHECK(rate[0] == doctest::Approx((7.6 - 7.5) / 3e-3));
  CHECK(rate[1] == doctest::Approx((7.5 - (41.0 - 40.0) / 0.1 - 7.5 * 0.3) / 3e-3));
  CHECK(rate[2] == doctest::Approx((26.0 - 41.0 - 7.5 * 0.5 + 41.0 * 0.3) / 10e-3));
  CHECK(rate[3] == doctest::Approx((24.0 - 2.0 * 0.5 - 40.5 + 40.5 * 0.4) / 10e-3));
  CHECK(rate[4] == doctest::Approx((2.0 - (40.5 - 40.0) / 0.1 - 2.0 * 0.4) / 3e-3));
  CHECK(rate[5] == doctest::Approx((41.0 / 0.1 + 40.5 / 0.1 -
                                    40.0 * (1.0 / 0.1 + 1.0 / 0.1 + 0.125)) / 3e-3));
}

TEST_CASE("generated references are an equilibrium of the model") {
  const SpvdgParams p{};
  const OperatingPoint mpp{26.373601048641014, 7.59186468172401,
                           200.22481033105703};
  const RefSet refs = generate_references(p, 40.0, mpp, 24.0, 1.0 / 8.0);
  const Disturbances d{mpp.i, 24.0, 1.0 / 8.0};
  const SpvdgState rate =
      spvdg_derivatives(p, refs.x, d, refs.u1ss, refs.u2ss);
  for (double r : rate) CHECK(std::abs(r) <= 1e-9);
  CHECK(refs.x[0] == doctest::Approx(mpp.v));
  CHECK(refs.x[2] == doctest::Approx(mpp.i));
  CHECK(refs.x[5] == doctest::Approx(40.0));
  CHECK(refs.u1ss > 0.0);
  CHECK(refs.u1ss < 1.0);
  CHECK(refs.u2ss > 0.0);
  CHECK(refs.u2ss < 1.0);
}

TEST_CASE("x4 takes the smaller quadratic root") {
  const SpvdgParams p{};
  const OperatingPoint mpp{26.373601048641014, 7.59186468172401,
                           200.22481033105703};
  const RefSet refs = generate_references(p, 40.0, mpp, 24.0, 1.0 / 8.0);
  // Larger root of R_b x4^2 - d2 x4 + c = 0 would exceed d2 / (2 R_b) = 24 A;
  // the physical battery current is well below that.
  CHECK(refs.x[3] < 24.0 / (2.0 * 0.5));
  // Battery discharges here: bus load 200 W at 40 V exceeds nothing (PV
  // supplies 200 W), so x4 is small in magnitude.
  CHECK(std::abs(refs.x[3]) < 5.0);
}

TEST_CASE("load steps move the battery reference the right way") {
  const SpvdgParams p{};
  const OperatingPoint mpp{26.373601048641014, 7.59186468172401,
                           200.22481033105703};
  const RefSet r8 = generate_references(p, 40.0, mpp, 24.0, 1.0 / 8.0);
  const RefSet r5 = generate_references(p, 40.0, mpp, 24.0, 1.0 / 5.0);
  // Heavier load (5 ohm, 320 W) needs more battery discharge current.
  CHECK(r5.x[3] > r8.x[3]);
}

TEST_CASE("infeasible references throw") {
  const SpvdgParams p{};
  const OperatingPoint mpp{26.0, 7.6, 197.6};
  // Battery voltage far too low to push the required current.
  CHECK_THROWS_AS(generate_references(p, 40.0, mpp, 0.5, 1.0 / 2.0), Error);
}
