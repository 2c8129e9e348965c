#pragma once

namespace spvdg {

// Physical constants shared by the single-diode equations.
inline constexpr double kElectronCharge = 1.6e-19; // C
inline constexpr double kBoltzmann = 1.38e-23;     // J/K

// Single-diode PV array parameters.
struct PvArrayParams {
  double T_r = 298.0;      // reference temperature (K)
  double lambda_r = 1000.0; // reference irradiance (W/m^2)
  double p = 1.0;          // diode ideality factor
  double I_r = 1.37e-8;    // reverse saturation current at T_r (A)
  double I_sc = 4.8;       // short-circuit current at STC (A)
  double k_I = 0.010;      // short-circuit temperature coefficient (A/K)
  double R_s = 0.2;        // series resistance (ohm)
  double R_sh = 150.0;     // shunt resistance (ohm)
  int n_s = 36;            // series cell count
  int n_p = 1;             // parallel cell count
  double E_gp = 1.1;       // bandgap (eV)
};

struct Environment {
  double T;      // cell temperature (K)
  double lambda; // irradiance (W/m^2)
};

struct OperatingPoint {
  double v = 0.0;
  double i = 0.0;
  double power = 0.0;
};

struct Sensitivities {
  double dI_dT;      // A/K
  double dI_dlambda; // A*m^2/W
};

// Photo-generated current per cell string, Eq. (2): (I_sc + k_I (T - T_r)) * lambda / lambda_r.
double photo_current(const PvArrayParams& params, const Environment& env);

// Reverse saturation current, Eq. (3): I_r (T/T_r)^3 exp(q E_gp (1/T_r - 1/T) / (p K_B)).
double saturation_current(const PvArrayParams& params, double T);

// Solves the implicit I-V relation Eq. (1) for terminal current at voltage v_pv.
// Bisection on a bracket guaranteed by monotonicity of the residual in i;
// residual at the returned current is <= 1e-9 A. Throws NoBracket if no sign
// change can be found.
double pv_current(const PvArrayParams& params, const Environment& env, double v_pv);

// Closed-form partials di/dT and di/dlambda at an on-curve operating point
// (Eqs. 9-11). Throws OffCurve when the point's residual exceeds 1e-6 A.
Sensitivities pv_current_sensitivities(const PvArrayParams& params,
                                       const Environment& env,
                                       const OperatingPoint& op);

// Open-circuit voltage: the root of pv_current(v) = 0.
double open_circuit_voltage(const PvArrayParams& params, const Environment& env);

// Maximum power point by coarse sweep + golden-section refinement on P(V).
// Voltage located to within 1 mV.
OperatingPoint find_mpp(const PvArrayParams& params, const Environment& env);

} // namespace spvdg
