#include "control.hpp"

#include <algorithm>
#include <cmath>

namespace spvdg {

namespace {
double clamp01(double u) { return std::clamp(u, 0.0, 1.0); }
} // namespace

double backstep_virtual_alpha3(double e1, double d1, double K1) {
  return d1 + K1 * e1;
}

// Shared core of the two back-stepping variants. `d1hat_dot` is zero for the
// known-disturbance controller and rho1*e1 for the observer variant; `d` holds
// whichever disturbance values the law may use (true or estimated).
static BackstepDuties backstep_core(const SpvdgParams& p, const SpvdgState& x,
                                    const RefSet& refs, const Disturbances& d,
                                    double d1hat_dot, double d3hat_dot,
                                    const BackstepGains& g,
                                    const BackstepDuties& prev) {
  BackstepDuties out;

  const double e1 = x[0] - refs.x[0];
  const double alpha3 = backstep_virtual_alpha3(e1, d.d1, g.K1);
  const double e2 = x[1] - refs.x[1];
  const double e3 = x[2] - alpha3;
  const double e6 = x[5] - refs.x[5];

  const double x1dot = (d.d1 - x[2]) / p.C_pvi;
  const double alpha3dot = g.K1 * x1dot + d1hat_dot;

  const double num1 = e2 * x[2] - e2 * x[1] / p.R_pvo + e2 * x[5] / p.R_pvo +
                      e3 * x[0] - e3 * x[1] - e3 * x[2] * p.R_pv -
                      e3 * p.L_pv * alpha3dot;
  const double den1 = e3 * x[1] - e2 * x[2];
  if (std::abs(den1) < kDenEps) {
    out.u1 = prev.u1;
    out.guard1 = true;
  } else {
    out.u1 = clamp01((-num1 - g.K2 * e2 * e2 - g.K3 * e3 * e3) / den1);
  }

  const double alpha5 =
      -(p.R_bo / p.R_pvo) * x[1] +
      p.R_bo * x[5] * (1.0 / p.R_pvo + 1.0 / p.R_bo + d.d3) -
      g.K6 * e6 * p.R_bo;
  const double e4 = x[3] - refs.x[3];
  const double e5 = x[4] - alpha5;

  // State rates that alpha5_dot needs, at the duty just computed.
  const double x2dot = (x[2] - (x[1] - x[5]) / p.R_pvo - x[2] * out.u1) / p.C_pvo;
  const double x6dot = (x[1] / p.R_pvo + x[4] / p.R_bo -
                        x[5] * (1.0 / p.R_pvo + 1.0 / p.R_bo + d.d3)) /
                       p.C_L;
  const double alpha5dot =
      -(p.R_bo / p.R_pvo) * x2dot + p.R_bo * x[5] * d3hat_dot +
      x6dot * (-g.K6 * p.R_bo + p.R_bo / p.R_pvo + 1.0 + p.R_bo * d.d3);

  const double num2 =
      e5 * (x[3] + (x[5] - x[4]) / p.R_bo - p.C_bo * alpha5dot) +
      e4 * (d.d2 - x[4] - p.R_b * x[3]);
  const double den2 = e4 * x[4] - e5 * x[3];
  if (std::abs(den2) < kDenEps) {
    out.u2 = prev.u2;
    out.guard2 = true;
  } else {
    out.u2 = clamp01((-num2 - g.K4 * e4 * e4 - g.K5 * e5 * e5) / den2);
  }
  return out;
}

BackstepDuties backstep_control(const SpvdgParams& params, const SpvdgState& x,
                                const RefSet& refs, const Disturbances& d,
                                const BackstepGains& gains,
                                const BackstepDuties& prev) {
  // Disturbances are piecewise constant between events, so d1_dot = d3_dot = 0.
  return backstep_core(params, x, refs, d, 0.0, 0.0, gains, prev);
}

DobResult dob_backstep_control(const SpvdgParams& params, const SpvdgState& x,
                               const RefSet& refs, const ObserverState& obs,
                               const BackstepGains& gains,
                               const ObserverGains& ogains,
                               const BackstepDuties& prev) {
  DobResult res;
  const double e1 = x[0] - refs.x[0];
  const double e4 = x[3] - refs.x[3];
  const double e6 = x[5] - refs.x[5];

  res.rates.d1hat = ogains.rho1 * e1;
  res.rates.d2hat = ogains.rho2 * e4;
  res.rates.d3hat = -ogains.rho3 * x[5] * e6;

  const Disturbances dhat{obs.d1hat, obs.d2hat, obs.d3hat};
  res.duties = backstep_core(params, x, refs, dhat, res.rates.d1hat,
                             res.rates.d3hat, gains, prev);
  return res;
}

PiOutput dual_loop_pi(double VG, double Vref, double i_l, const PiGains& gains,
                      PiState& st) {
  // Outer voltage loop: error accumulates as a raw discrete sum per tick.
  const double ev = Vref - VG;
  st.sum_v += ev;
  const double i_l_ref = gains.Kp_v * ev + gains.Ki_v * st.sum_v;

  // Inner current loop on the battery inductor.
  const double e_bat = i_l_ref - i_l;
  st.sum_i += e_bat;
  const double out = gains.Kp_i * e_bat + gains.Ki_i * st.sum_i;

  PiOutput res;
  res.i_l_ref = i_l_ref;
  if (i_l_ref > 0.0) {
    st.mode = BdcMode::Discharge;
    const double raw = out;
    st.D_b = clamp01(raw);
    if (st.D_b != raw) st.sum_i -= e_bat; // clamping anti-windup
    res.u2 = st.D_b;
  } else {
    st.mode = BdcMode::Charge;
    const double raw = -out;
    st.D_bp = clamp01(raw);
    if (st.D_bp != raw) st.sum_i -= e_bat;
    res.u2 = 1.0 - st.D_bp;
  }
  return res;
}

int perturb_decision(double dDpv, double dDb, BdcMode mode, int last_dir) {
  const double product = dDpv * dDb;
  if (product == 0.0) return last_dir; // deltas carry no information
  if (mode == BdcMode::Charge) return product > 0.0 ? +1 : -1;
  return product > 0.0 ? -1 : +1;
}

void perturb_step(PerturbState& st, const PiState& pi) {
  const double dDpv = st.D_pv - st.D_pv_old;
  const double dDb = pi.mode == BdcMode::Charge ? pi.D_bp - st.D_bp_old
                                                : pi.D_b - st.D_b_old;
  const int dir = perturb_decision(dDpv, dDb, pi.mode, st.last_dir);
  st.D_pv_old = st.D_pv;
  st.D_b_old = pi.D_b;
  st.D_bp_old = pi.D_bp;
  st.D_pv = clamp01(st.D_pv + dir * st.delD);
  st.last_dir = dir;
}

} // namespace spvdg
