#include "estimator.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace spvdg {

EstimatorState nr_step(const PvArrayParams& params, const EstimatorState& state,
                       const MeasurementPair& pair) {
  const Environment env{state.T_k, state.lambda_k};

  // Model currents at the measured voltages for the current estimate.
  const double i1k = pv_current(params, env, pair.p1.v);
  const double i2k = pv_current(params, env, pair.p2.v);

  const Sensitivities s1 =
      pv_current_sensitivities(params, env, {pair.p1.v, i1k, pair.p1.v * i1k});
  const Sensitivities s2 =
      pv_current_sensitivities(params, env, {pair.p2.v, i2k, pair.p2.v * i2k});

  const double det = s1.dI_dT * s2.dI_dlambda - s1.dI_dlambda * s2.dI_dT;
  if (std::abs(det) < 1e-12)
    throw Error(ErrorKind::SingularJacobian, "nr_step: indistinguishable measurements");

  const double r1 = pair.p1.i - i1k;
  const double r2 = pair.p2.i - i2k;
  double dT = (s2.dI_dlambda * r1 - s1.dI_dlambda * r2) / det;
  double dl = (-s2.dI_dT * r1 + s1.dI_dT * r2) / det;

  // The paper never addresses infeasible iterates; halve the step until the
  // update stays in the physical region.
  double T_next = state.T_k + dT;
  double l_next = state.lambda_k + dl;
  for (int halvings = 0; T_next <= 0.0 || l_next < 0.0; ++halvings) {
    if (halvings >= 20)
      throw Error(ErrorKind::NoConvergence, "nr_step: could not find feasible step");
    dT *= 0.5;
    dl *= 0.5;
    T_next = state.T_k + dT;
    l_next = state.lambda_k + dl;
  }

  EstimatorState next = state;
  next.T_k = T_next;
  next.lambda_k = l_next;
  return next;
}

namespace {

// Irradiance that makes measurement (v, i) exact at temperature T.
double lambda_of_T(const PvArrayParams& p, double T, double v, double i) {
  const double vd = v + i * p.R_s;
  const double a = kElectronCharge / (p.n_s * p.p * kBoltzmann * T);
  const double I_g = i / p.n_p + saturation_current(p, T) * (std::exp(a * vd) - 1.0) +
                     vd / (p.n_p * p.R_sh);
  return p.lambda_r * I_g / (p.I_sc + p.k_I * (T - p.T_r));
}

} // namespace

EstimatorState initial_guess(const PvArrayParams& p, const MeasurementPair& m) {
  double bestT = p.T_r, bestL = p.lambda_r, bestR = 1e300;
  for (double T = 260.0; T <= 365.0; T += 5.0) {
    const double l = lambda_of_T(p, T, m.p1.v, m.p1.i);
    if (l < 0.0) continue;
    const double vd = m.p2.v + m.p2.i * p.R_s;
    const double a = kElectronCharge / (p.n_s * p.p * kBoltzmann * T);
    const double r = p.n_p * photo_current(p, {T, l}) -
                     p.n_p * saturation_current(p, T) * (std::exp(a * vd) - 1.0) -
                     vd / p.R_sh - m.p2.i;
    if (std::abs(r) < bestR) {
      bestR = std::abs(r);
      bestT = T;
      bestL = l;
    }
  }
  return {bestT, bestL};
}

EstimatorState estimate(const PvArrayParams& params, const MeasurementPair& pair,
                        const EstimatorState& init, const EstimatorConfig& cfg) {
  EstimatorState state = init;
  state.iterations_used = 0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const EstimatorState next = nr_step(params, state, pair);
    const double dT = std::abs(next.T_k - state.T_k);
    const double dl = std::abs(next.lambda_k - state.lambda_k);
    state = next;
    state.iterations_used = k + 1;
    if (dT <= cfg.tol_T && dl <= cfg.tol_lambda) return state;
  }
  throw Error(ErrorKind::NoConvergence, "estimate: iteration cap reached");
}

bool should_reestimate(const OperatingPoint& prev, const OperatingPoint& current,
                       double min_change) {
  const double dv = std::abs(current.v - prev.v) / std::max(std::abs(prev.v), 1e-12);
  const double di = std::abs(current.i - prev.i) / std::max(std::abs(prev.i), 1e-12);
  return dv > min_change || di > min_change;
}

} // namespace spvdg
