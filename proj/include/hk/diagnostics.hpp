#pragma once

// Trajectory monitors: the barrier quantities Psi/Lambda and their evolution
// identities, maximum-principle and trace bounds, T-tensor conservation,
// beta-eigenvalue probes, and normalized-flow decay rates.
//
// Tensor-scheme trajectories carry no potential; phi and phi_dot are then
// reconstructed from the stored log-det fields (phi_dot = log det g - log
// det g0 pointwise, phi by trapezoid quadrature), so every monitor works on
// either scheme.

#include <cstdint>
#include <utility>
#include <vector>

#include "hk/flow.hpp"

namespace hk {

// Psi = t phi_dot - phi - n t,  Lambda = (S1 - t) phi_dot + phi + n t.
std::pair<ScalarField, ScalarField> psi_lambda(const GridSpec& grid, double t,
                                               const ScalarField& phi,
                                               const ScalarField& phi_dot,
                                               double S1);

// Max-node residuals of the Psi/Lambda evolution identities per snapshot:
//   r_psi    = |d_t Psi - L_g Psi + tr_g g0|
//   r_lambda = |d_t Lambda - L_g Lambda + S1 tr_g beta0 - tr_g g0|
// Time derivatives use 3-point differencing (one-sided at the ends), so at
// least 3 snapshots are required.
std::vector<std::array<double, 2>> evolution_residuals(const Trajectory& traj,
                                                     const FlowRefs& refs,
                                                     double S1);

// Sampled derivative bound of the initial metric: max over nodes and
// components of |D g0| and |D D g0|.
double measure_K(const MetricField& g0);

struct BarrierRow {
  double t = 0.0;
  double mp_sup = 0.0;  // sup(t phi_dot - phi - n t), expected <= tol_mp
  bool mp_ok = false;
  double phi_sup = 0.0;
  double phi_bound = 0.0;  // (log(1 + c(n) K t)^n + 1) t + tol_mp, c(n) = n
  bool phi_ok = false;
  double upsilon_sup = 0.0;     // sup tr_{g0} g
  double upsilon_log_margin = 0.0;  // log-space slack against the trace bound
  bool upsilon_ok = false;
};

// The trace bound is evaluated with u = 0, c1 = c2 = n, S2 = S1 = t_end and
// S = 2 S1 (so alpha = 1/2), in log space to stay finite:
//   tr_{g0} g - n <= exp(L + A),
//   A = 2 (2m + 1)^2 (n K + 1),
//   L = log(n K / 2 + sqrt(n^2 K^2 + 4 n K^2 A (1 + 2m)^3) / 2),
//   m = sup |(S1 - t) phi_dot + phi + n t|  over the run.
std::vector<BarrierRow> barrier_checks(const Trajectory& traj,
                                       const FlowRefs& refs, double K,
                                       double tol_mp = 1e-6);

// max-node |T(g(t)) - T(g0)| per snapshot.
std::vector<double> t_conservation(const Trajectory& traj);

// Eigenvalues of beta with respect to g at one node (Cholesky whitening),
// descending.
std::vector<double> beta_eigenvalues(const MetricField& g,
                                     const SymTensorField& beta,
                                     std::size_t probe);

struct DecaySeries {
  std::vector<double> t;
  std::vector<double> value;  // (1/t) log(|v|^2_t / |v|^2_0)
  double last = 0.0;
  double limit_estimate = 0.0;  // Richardson in 1/t from the last two entries
};

DecaySeries decay_rate(const Trajectory& normalized_traj,
                       const std::array<double, 3>& v, std::size_t probe);

struct ProbeSet {
  std::vector<std::size_t> nodes;

  static ProbeSet defaults(const GridSpec& grid, std::uint64_t seed);
};

struct DiagnosticsRow {
  double t = 0.0;
  double sup_psi = 0.0;
  double sup_lambda = 0.0;
  double inf_lambda = 0.0;
  double r_psi = 0.0;
  double r_lambda = 0.0;
  double max_t_dev = 0.0;
  double sup_upsilon = 0.0;
  double sup_theta = 0.0;
  double min_eig_g = 0.0;       // min node eigenvalue of g
  double min_gap_beta = 0.0;    // min node eigenvalue of beta(g)
  std::vector<double> probe_eigs;  // probe-major, descending per probe
};

struct DiagnosticsReport {
  double S1 = 0.0;
  std::vector<std::size_t> probes;
  std::vector<DiagnosticsRow> rows;

  // Appended by the tangent-lift stage; zero until then.
  double lift_ricci_dev = 0.0;
  double lift_defect = 0.0;
  double lift_scan_min = 0.0;
};

DiagnosticsReport diagnose(const Trajectory& traj, const FlowRefs& refs,
                           const ProbeSet& probes, double S1);

}  // namespace hk
