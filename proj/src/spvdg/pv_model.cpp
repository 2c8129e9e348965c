#include "pv_model.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace spvdg {

double photo_current(const PvArrayParams& params, const Environment& env) {
  return (params.I_sc + params.k_I * (env.T - params.T_r)) * env.lambda / params.lambda_r;
}

double saturation_current(const PvArrayParams& params, double T) {
  const double ratio = T / params.T_r;
  const double expo = kElectronCharge * params.E_gp *
                      (1.0 / params.T_r - 1.0 / T) / (params.p * kBoltzmann);
  return params.I_r * ratio * ratio * ratio * std::exp(expo);
}

namespace {

// Residual of Eq. (1) as a function of the trial current i. Strictly
// decreasing in i for R_s >= 0, R_sh > 0, which makes bisection safe.
struct IvResidual {
  const PvArrayParams& params;
  double i_g;   // photo current
  double i_s;   // saturation current
  double a;     // q / (n_s p K_B T)
  double v;     // terminal voltage

  double operator()(double i) const {
    const double vd = v + i * params.R_s;
    // exp() overflows for strongly forward-biased trial points; the residual
    // is -inf there which still has a well-defined sign for bisection.
    const double e = std::exp(std::min(a * vd, 700.0));
    return params.n_p * i_g - params.n_p * i_s * (e - 1.0) - vd / params.R_sh - i;
  }
};

} // namespace

double pv_current(const PvArrayParams& params, const Environment& env, double v_pv) {
  const double i_g = photo_current(params, env);
  const double i_s = saturation_current(params, env.T);
  const double a = kElectronCharge / (params.n_s * params.p * kBoltzmann * env.T);
  const IvResidual f{params, i_g, i_s, a, v_pv};

  double lo = -params.n_p * i_g - 1.0;
  double hi = params.n_p * i_g + 1.0;
  double flo = f(lo);
  double fhi = f(hi);
  // Widen geometrically if the initial bracket misses the root (possible at
  // voltages beyond V_oc where the diode term dominates).
  for (double w = 1.0; flo < 0.0; w *= 2.0) {
    if (w > 1e12) throw Error(ErrorKind::NoBracket, "pv_current: no sign change (low side)");
    lo -= w;
    flo = f(lo);
  }
  for (double w = 1.0; fhi > 0.0; w *= 2.0) {
    if (w > 1e12) throw Error(ErrorKind::NoBracket, "pv_current: no sign change (high side)");
    hi += w;
    fhi = f(hi);
  }
  if (!(flo >= 0.0 && fhi <= 0.0))
    throw Error(ErrorKind::NoBracket, "pv_current: inconsistent bracket");

  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= 1e-12 && hi - lo < 1e-12) break;
    if (fm >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Sensitivities pv_current_sensitivities(const PvArrayParams& params,
                                       const Environment& env,
                                       const OperatingPoint& op) {
  const double i_g = photo_current(params, env);
  const double i_s = saturation_current(params, env.T);
  const double a = kElectronCharge / (params.n_s * params.p * kBoltzmann * env.T);
  const double vd = op.v + op.i * params.R_s;
  const double e = std::exp(a * vd);

  // Precondition: the point must lie on the model curve.
  const double resid = params.n_p * i_g - params.n_p * i_s * (e - 1.0) -
                       vd / params.R_sh - op.i;
  if (std::abs(resid) > 1e-6)
    throw Error(ErrorKind::OffCurve, "pv_current_sensitivities: operating point off curve");

  const double q = kElectronCharge;
  const double pK = params.p * kBoltzmann;
  const double T = env.T;

  // dI_s/dT (Eq. 10). The exponent matches Eq. (3): q E_gp/(p K) (1/T_r - 1/T),
  // which grows with T; both the cubic prefactor and the exponential push the
  // derivative positive.
  const double dIs_dT = params.I_r / (params.T_r * params.T_r * params.T_r) *
                        (3.0 * T * T + q * params.E_gp * T / pK) *
                        std::exp(q * params.E_gp / pK * (1.0 / params.T_r - 1.0 / T));

  // di/dT (Eq. 9). Implicit differentiation of Eq. (1) at fixed v: the shared
  // denominator collects every term that multiplies di/dT.
  const double diode_slope = params.n_p * i_s * a * e; // d(diode term)/d(vd)
  const double denomT = 1.0 + diode_slope * params.R_s + params.R_s / params.R_sh;
  const double numT = params.n_p * params.k_I * env.lambda / params.lambda_r -
                      params.n_p * dIs_dT * (e - 1.0) +
                      params.n_p * i_s * q * vd / (pK * params.n_s * T * T) * e;
  const double dI_dT = numT / denomT;

  // di/dlambda (Eq. 11), with the same implicit-differentiation denominator.
  // (The printed equation drops the R_s/R_sh term; it is retained here so the
  // partial agrees with finite differences of the solved curve.)
  const double dI_dlambda = params.n_p * (params.I_sc + params.k_I * (T - params.T_r)) /
                            (params.lambda_r * denomT);

  return {dI_dT, dI_dlambda};
}

double open_circuit_voltage(const PvArrayParams& params, const Environment& env) {
  double lo = 0.0;
  double hi = 100.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (pv_current(params, env, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

OperatingPoint find_mpp(const PvArrayParams& params, const Environment& env) {
  const double voc = open_circuit_voltage(params, env);

  // Coarse sweep to bracket the (unimodal) power peak.
  constexpr int kSweep = 256;
  double best_v = 0.0;
  double best_p = 0.0;
  for (int k = 0; k <= kSweep; ++k) {
    const double v = voc * k / kSweep;
    const double p = v * pv_current(params, env, v);
    if (p > best_p) {
      best_p = p;
      best_v = v;
    }
  }

  // Golden-section refinement inside the bracketing pair of sweep cells.
  double a = std::max(0.0, best_v - voc / kSweep);
  double b = std::min(voc, best_v + voc / kSweep);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = c * pv_current(params, env, c);
  double fd = d * pv_current(params, env, d);
  while (b - a > 1e-7) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = c * pv_current(params, env, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = d * pv_current(params, env, d);
    }
  }
  OperatingPoint op;
  op.v = 0.5 * (a + b);
  op.i = pv_current(params, env, op.v);
  op.power = op.v * op.i;
  return op;
}

} // namespace spvdg
