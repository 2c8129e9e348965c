#pragma once

#include <array>

#include "pv_model.hpp"

namespace spvdg {

// ---- Ch. 2 three-state boost converter ----

struct BoostParams {
  double L = 5e-3;    // inductance (H)
  double r = 0.2;     // inductor resistance (ohm)
  double C_a = 200e-6; // input capacitance (F)
  double C_b = 200e-6; // output capacitance (F)
  double V_D = 0.6;   // diode drop (V)
  double R_ld = 15.0; // load resistance (ohm)
};

struct BoostState {
  double i_L;  // inductor current (A)
  double v_pv; // PV capacitor voltage (V)
  double v_o;  // output voltage (V)
};

struct BoostRefs {
  double i_Lr;
  double v_or;
  double u_r;
};

// Averaged boost dynamics, Eqs. (4)-(6).
BoostState boost_derivatives(const BoostParams& params, const BoostState& state,
                             double i_pv, double u);

// Steady-state references from an MPP target, Eqs. (17)-(19).
BoostRefs boost_steady_refs(double v_pvr, double i_pvr, const BoostParams& params);

// ---- Ch. 4 six-state PV + battery microgrid ----

struct SpvdgParams {
  double C_pvi = 3e-3;
  double C_pvo = 3e-3;
  double C_bo = 3e-3;
  double C_L = 3e-3;
  double L_pv = 10e-3;
  double L_b = 10e-3;
  double R_pv = 0.5;
  double R_b = 0.5;
  double R_pvo = 0.1;
  double R_bo = 0.1;
};

// x1: PV input cap voltage, x2: PV output cap voltage, x3: PV inductor
// current, x4: battery inductor current, x5: battery output cap voltage,
// x6: DC bus voltage.
using SpvdgState = std::array<double, 6>;

struct Disturbances {
  double d1; // PV source current (A)
  double d2; // battery voltage (V)
  double d3; // load admittance (1/ohm)
};

struct RefSet {
  std::array<double, 6> x; // x1ref..x6ref
  double u1ss;
  double u2ss;
};

// Six averaged state rates exactly as in the Ch. 4 model.
SpvdgState spvdg_derivatives(const SpvdgParams& params, const SpvdgState& state,
                             const Disturbances& d, double u1, double u2);

// Steady-state references for a desired bus voltage and MPP operating point.
// The x2 quadratic takes the (-b + sqrt(D))/2a root; the x4 quadratic takes
// the (-b - sqrt(D))/2a root — the branch selection is validated by
// equilibrium back-substitution (the smaller battery current is the physical
// operating point; the larger root dumps the excess into resistive loss).
// Throws InfeasibleReferences on negative discriminants or non-physical refs.
RefSet generate_references(const SpvdgParams& params, double Vdc,
                           const OperatingPoint& mpp, double d2, double d3);

} // namespace spvdg
