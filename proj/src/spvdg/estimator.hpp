#pragma once

#include "pv_model.hpp"

namespace spvdg {

struct MeasurementPair {
  OperatingPoint p1; // measured at time t
  OperatingPoint p2; // measured at time t + delta_t
};

struct EstimatorConfig {
  double delta_t = 0.05;    // update interval (s)
  int max_iters = 20;
  double tol_T = 1e-4;      // K
  double tol_lambda = 1e-3; // W/m^2
  double min_change = 0.02; // re-estimation trigger (fractional)
};

struct EstimatorState {
  double T_k;            // temperature estimate (K)
  double lambda_k;       // irradiance estimate (W/m^2)
  int iterations_used = 0;
};

// One Newton-Raphson update of (T, lambda) from a pair of measured operating
// points, Eqs. (7)-(8). Jacobian rows are the analytic partials at the model
// currents for the current estimate. Throws SingularJacobian when the two
// measurements cannot be distinguished. Infeasible iterates (T <= 0 or
// lambda < 0) are handled by step halving.
EstimatorState nr_step(const PvArrayParams& params, const EstimatorState& state,
                       const MeasurementPair& pair);

// Robust initial guess for estimate(): sweeps a coarse temperature grid,
// using the closed-form irradiance that reproduces the first measurement at
// each trial temperature, and keeps the pair that best explains the second
// measurement. Plain Newton from a fixed cold start diverges for hot, dim
// truths; seeded this way it converges in ~4 iterations across the whole
// operating box.
EstimatorState initial_guess(const PvArrayParams& params,
                             const MeasurementPair& pair);

// Iterates nr_step until both increments fall below tolerance or max_iters is
// reached (throws NoConvergence in the latter case).
EstimatorState estimate(const PvArrayParams& params, const MeasurementPair& pair,
                        const EstimatorState& init, const EstimatorConfig& cfg);

// True when the relative change in voltage or current exceeds min_change.
bool should_reestimate(const OperatingPoint& prev, const OperatingPoint& current,
                       double min_change);

} // namespace spvdg
