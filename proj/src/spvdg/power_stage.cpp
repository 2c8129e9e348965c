#include "power_stage.hpp"

#include <cmath>

#include "errors.hpp"

namespace spvdg {

BoostState boost_derivatives(const BoostParams& params, const BoostState& state,
                             double i_pv, double u) {
  BoostState rate;
  rate.i_L = (state.v_pv - params.r * state.i_L - params.V_D + u * params.V_D -
              state.v_o + u * state.v_o) /
             params.L;
  rate.v_pv = (i_pv - state.i_L) / params.C_a;
  rate.v_o = (state.i_L * (1.0 - u) - state.v_o / params.R_ld) / params.C_b;
  return rate;
}

BoostRefs boost_steady_refs(double v_pvr, double i_pvr, const BoostParams& params) {
  const double disc =
      params.V_D * params.V_D +
      4.0 * i_pvr * params.R_ld * (v_pvr - params.r * i_pvr);
  if (disc < 0.0)
    throw Error(ErrorKind::InfeasibleOperatingPoint, "boost_steady_refs: negative discriminant");

  BoostRefs refs;
  refs.i_Lr = i_pvr; // Eq. (17)
  refs.v_or = (-params.V_D + std::sqrt(disc)) / 2.0; // Eq. (18)
  refs.u_r = 1.0 - (v_pvr - i_pvr * params.r) / (params.V_D + refs.v_or); // Eq. (19)
  if (!(refs.u_r > 0.0 && refs.u_r < 1.0))
    throw Error(ErrorKind::InfeasibleOperatingPoint, "boost_steady_refs: duty outside (0,1)");
  return refs;
}

SpvdgState spvdg_derivatives(const SpvdgParams& p, const SpvdgState& x,
                             const Disturbances& d, double u1, double u2) {
  return SpvdgState{
      (d.d1 - x[2]) / p.C_pvi,
      (x[2] - (x[1] - x[5]) / p.R_pvo - x[2] * u1) / p.C_pvo,
      (x[0] - x[1] - x[2] * p.R_pv + x[1] * u1) / p.L_pv,
      (d.d2 - x[3] * p.R_b - x[4] + x[4] * u2) / p.L_b,
      (x[3] - (x[4] - x[5]) / p.R_bo - x[3] * u2) / p.C_bo,
      (x[1] / p.R_pvo + x[4] / p.R_bo - x[5] * (1.0 / p.R_pvo + 1.0 / p.R_bo + d.d3)) /
          p.C_L,
  };
}

RefSet generate_references(const SpvdgParams& p, double Vdc,
                           const OperatingPoint& mpp, double d2, double d3) {
  RefSet refs;
  const double x1r = mpp.v;
  const double x3r = mpp.i;
  const double x6r = Vdc;

  // x2ref: x2^2 - x6 x2 + (x3^2 R_pvo R_pv - x1 x3 R_pvo) = 0, larger root.
  const double b1 = -x6r;
  const double c1 = x3r * x3r * p.R_pvo * p.R_pv - x1r * x3r * p.R_pvo;
  const double disc1 = b1 * b1 - 4.0 * c1;
  if (disc1 < 0.0)
    throw Error(ErrorKind::InfeasibleReferences, "generate_references: x2 discriminant < 0");
  const double x2r = (-b1 + std::sqrt(disc1)) / 2.0;

  // x5ref from the bus equation at equilibrium.
  const double x5r = -(p.R_bo / p.R_pvo) * x2r +
                     x6r * (1.0 + p.R_bo / p.R_pvo + p.R_bo * d3);

  // x4ref: R_b x4^2 - d2 x4 + (x5^2 - x5 x6)/R_bo = 0, smaller root (the
  // physical battery current; see header).
  const double a2 = p.R_b;
  const double b2 = -d2;
  const double c2 = (x5r * x5r - x5r * x6r) / p.R_bo;
  const double disc2 = b2 * b2 - 4.0 * a2 * c2;
  if (disc2 < 0.0)
    throw Error(ErrorKind::InfeasibleReferences, "generate_references: x4 discriminant < 0");
  const double x4r = (-b2 - std::sqrt(disc2)) / (2.0 * a2);

  if (x2r <= 0.0 || x5r <= 0.0)
    throw Error(ErrorKind::InfeasibleReferences, "generate_references: non-physical reference");

  refs.x = {x1r, x2r, x3r, x4r, x5r, x6r};
  // Steady duties recovered from x3dot = 0 and x4dot = 0.
  refs.u1ss = 1.0 - (x1r - x3r * p.R_pv) / x2r;
  refs.u2ss = 1.0 - (d2 - x4r * p.R_b) / x5r;
  return refs;
}

} // namespace spvdg
