#pragma once

// Time integration of the flow dg/dt = -beta(g) in tensor form, in scalar
// Monge-Ampere potential form, and in normalized form dg/dt = -beta(g) - g.
//
// The tensor scheme recomputes beta from the current metric each stage; the
// scalar scheme differentiates the log-det ratio of the assembled metric
// g0 - t beta(g0) + Hess(phi). The two are independent code paths and serve
// as mutual oracles.
//
// Positivity loss aborts the step (NotPositiveDefinite); nothing is clamped.

#include <string>
#include <vector>

#include "hk/geometry.hpp"

namespace hk {

enum class Scheme { tensor, scalar };

// Frozen t = 0 data shared by every stage of a scalar-scheme run.
struct FlowRefs {
  GridSpec grid;
  SymTensorField g0;
  SymTensorField beta0;
  ScalarField logdet0;
  double eps_pos = 1e-10;
};

FlowRefs make_flow_refs(const MetricField& g0);
FlowRefs make_flow_refs(const HessianStructure& hs, double eps_pos = 1e-10);

struct FlowState {
  double t = 0.0;
  ScalarField phi;      // accumulated potential, 0 at t = 0
  ScalarField phi_dot;  // ma_rhs at (t, phi)
  MetricField g;        // g0 - t beta0 + Hess(phi)
};

FlowState initial_state(const FlowRefs& refs);

struct FlowConfig {
  Scheme scheme = Scheme::tensor;
  double dt = 1e-4;
  double t_end = 1e-2;
  double c_dt = 0.2;  // parabolic bound factor: dt <= c_dt h^2 / Lambda_max
  int stride = 1;     // snapshot every `stride` steps
  bool normalized = false;

  void validate() const;
};

// phi_dot = log det(g0 - t beta0 + Hess phi) - log det g0, pointwise.
ScalarField ma_rhs(const FlowRefs& refs, double t, const ScalarField& phi);

// One classical 4-stage explicit step of the respective right-hand side.
// All three enforce dt <= c_dt h^2 / Lambda_max(g) before moving.
FlowState step_scalar(const FlowRefs& refs, const FlowState& s, double dt,
                      double c_dt = 0.2);
MetricField step_tensor(const MetricField& g, double dt, double c_dt = 0.2);
MetricField normalized_step(const MetricField& g, double dt, double c_dt = 0.2);

struct Snapshot {
  double t = 0.0;
  SymTensorField g;
  ScalarField logdet;   // log det g, same stencil family as beta
  ScalarField phi;      // scalar scheme only (empty otherwise)
  ScalarField phi_dot;  // scalar scheme only
};

struct FailureRecord {
  bool failed = false;
  double t = 0.0;
  std::string reason;
};

struct Trajectory {
  GridSpec grid;
  FlowConfig cfg;
  std::vector<Snapshot> snapshots;
  FailureRecord failure;
};

// Runs from t = 0 to cfg.t_end in fixed steps of cfg.dt, snapshotting every
// cfg.stride steps (and always at t = 0 and the final time). On a step
// error the partial trajectory is returned with the failure record set.
Trajectory run_flow(const FlowRefs& refs, const FlowConfig& cfg);

// phi(x, t_k) = integral_0^{t_k} log(det g / det g0) ds by trapezoid rule
// over the stored snapshot log-det fields; one field per snapshot.
std::vector<ScalarField> potential_from_trajectory(const Trajectory& traj);

}  // namespace hk
