#pragma once

// The existence gate: the cutoff triple (f, psi, FF), the conformal
// exhaustion metric h0 = e^{2F} g0, and a bisection estimator for the
// barrier threshold
//
//   S_max(u, theta) = sup { S > 0 : g0 - S beta(g0) + Hess u >= theta g0 }.
//
// The estimator searches over S for the GIVEN u only, so its result lower
// bounds the true threshold (which optimizes over all bounded u).

#include <utility>
#include <vector>

#include "hk/geometry.hpp"

namespace hk {

struct CutoffProfile {
  double kappa = 0.0;
  double a = 0.0, b = 0.0;  // psi ramps 0 -> 1 on [a, b]
  std::vector<double> s, f, psi, F;  // tabulation on [0, 1)

  // f(s) = -log[1 - ((s - 1 + kappa)/kappa)^2] past 1 - kappa, else 0.
  double f_eval(double s) const;
  double fprime_eval(double s) const;
  // exp(-1/x)-type smoothstep between a and b.
  double psi_eval(double s) const;
  // FF(s) = int_0^s psi f' by adaptive Simpson, abs error <= 1e-10.
  double F_eval(double s) const;
  // linear interpolation of the tabulated FF
  double F_interp(double s) const;
};

CutoffProfile build_cutoff(double kappa, int mesh = 4096);

struct CutoffReport {
  std::vector<double> k_sup;  // sup |e^{-k FF} FF^{(k)}|, k = 1..k_max
  double fprime_min = 0.0;    // min FF' on the mesh
  double flat_max_abs = 0.0;  // max |FF| on [0, 1 - kappa + kappa^2]
  double psi_prime_max = 0.0;
  double psi_prime_bound = 0.0;  // 2 / kappa^2
  double c2 = 0.0, c3 = 0.0;  // measured ramp constants
  bool support_ok = false, sign_ok = false, ramp_ok = false;
};

CutoffReport cutoff_property_check(const CutoffProfile& profile, int k_max = 3);

struct GateResult {
  bool unbounded = false;
  double s_max = 0.0;
  double theta = 0.0;
  ScalarField margin;  // per-node min eigenvalue of the barrier at s_max
  std::vector<std::pair<double, bool>> trace;  // (S probed, feasible)
};

GateResult sb_estimate(const MetricField& g0, const ScalarField& u,
                       double theta, double delta_bis = 1e-4,
                       double cap = 1e6);

struct ExhaustReport {
  double sup_d_g0 = 0.0, sup_d2_g0 = 0.0;
  double sup_d_h0 = 0.0, sup_d2_h0 = 0.0;
};

// h0 = e^{2 FF(rho/rho0)} g0; BadParameter if rho/rho0 reaches 1.
std::pair<MetricField, ExhaustReport> conformal_exhaust(const MetricField& g0,
                                                        const ScalarField& rho,
                                                        double rho0,
                                                        double kappa);

}  // namespace hk
