#pragma once

#include "power_stage.hpp"

namespace spvdg {

struct BackstepGains {
  double K1, K2, K3, K4, K5, K6;
};

struct ObserverGains {
  double rho1 = 10.0;
  double rho2 = 1.0;
  double rho3 = 0.01;
};

struct ObserverState {
  double d1hat; // estimated PV current (A)
  double d2hat; // estimated battery voltage (V)
  double d3hat; // estimated load admittance (1/ohm)
};

// Result of a back-stepping control evaluation. When a denominator guard
// fires the corresponding duty holds the caller-provided previous value and
// the flag is set (DegenerateDenominator handled in-band so simulation loops
// stay branch-free).
struct BackstepDuties {
  double u1;
  double u2;
  bool guard1 = false;
  bool guard2 = false;
};

struct DobResult {
  BackstepDuties duties;
  ObserverState rates; // d/dt of the observer estimates
};

// Denominator guard threshold (natural units of each denominator).
inline constexpr double kDenEps = 1e-4;

// Virtual control for the PV input stage: alpha3 = d1 + K1 e1.
double backstep_virtual_alpha3(double e1, double d1, double K1);

// Ch. 4 back-stepping law with known disturbances. `prev` supplies the duties
// held when a guard fires. Outputs are saturated to [0, 1].
BackstepDuties backstep_control(const SpvdgParams& params, const SpvdgState& x,
                                const RefSet& refs, const Disturbances& d,
                                const BackstepGains& gains,
                                const BackstepDuties& prev);

// Ch. 5 disturbance-observer variant: disturbances replaced by estimates,
// alpha3_dot picks up the observer rate rho1*e1, and the observer update laws
// (rho1 e1, rho2 e4, -rho3 x6 e6) are returned alongside the duties.
DobResult dob_backstep_control(const SpvdgParams& params, const SpvdgState& x,
                               const RefSet& refs, const ObserverState& obs,
                               const BackstepGains& gains,
                               const ObserverGains& ogains,
                               const BackstepDuties& prev);

// ---- Ch. 3 dual-loop PI + direct perturbation ----

struct PiGains {
  double Kp_v = 0.2;
  double Ki_v = 0.1;
  double Kp_i = 0.2;
  double Ki_i = 0.01;
  double period = 2e-4; // inner-loop period (s)
};

enum class BdcMode { Charge, Discharge };

struct PiState {
  double sum_v = 0.0; // outer-loop error accumulator
  double sum_i = 0.0; // inner-loop error accumulator
  double D_b = 0.3;   // boost-mode (discharge) duty
  double D_bp = 0.7;  // buck-mode (charge) duty
  BdcMode mode = BdcMode::Charge;
};

struct PiOutput {
  double i_l_ref;
  double u2; // averaged BDC duty: D_b when discharging, 1 - D_bp when charging
};

// One tick of the discrete dual-loop PI (Eqs. 21-24). Accumulators follow the
// paper's raw summation (sum += e per tick); accumulation is undone when the
// produced duty saturates (clamping anti-windup).
PiOutput dual_loop_pi(double VG, double Vref, double i_l, const PiGains& gains,
                      PiState& st);

// Direct-perturbation decision from the two sign tables. Returns the sign of
// the next D_pv perturbation: the buck table perturbs up on a positive
// dDpv*dDbp product and down on a negative one; the boost table is the
// mirror image. A zero product keeps the previous direction.
int perturb_decision(double dDpv, double dDb, BdcMode mode, int last_dir);

struct PerturbState {
  double D_pv = 0.5;
  double D_pv_old = 0.5;
  double D_b_old = 0.3;
  double D_bp_old = 0.7;
  double delD = 0.005;
  double period = 0.05; // perturbation interval (s)
  int last_dir = +1;
};

// Applies one perturbation update at a period boundary using the latest duty
// deltas and the PI state's mode; D_pv is clamped to [0, 1].
void perturb_step(PerturbState& st, const PiState& pi);

} // namespace spvdg
