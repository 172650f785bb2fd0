#include "hk/flow.hpp"

#include <cmath>
#include <cstdlib>

namespace hk {

namespace {

SymTensorField assemble(const FlowRefs& refs, double t, const ScalarField& phi) {
  SymTensorField hess = hessian(phi);
  SymTensorField out(refs.grid);
  for (std::size_t k = 0; k < out.v.size(); ++k)
    out.v[k] = refs.g0.v[k] - t * refs.beta0.v[k] + hess.v[k];
  return out;
}

void check_step(const MetricField& g, double dt, double c_dt) {
  if (dt < 0.0) throw BadParameter("step: dt must be nonnegative");
  if (!(c_dt > 0.0)) throw BadParameter("step: c_dt must be positive");
  if (dt == 0.0) return;
  const double h = g.grid().spacing();
  const double bound = c_dt * h * h / max_inverse_spectral_radius(g);
  if (dt > bound * (1.0 + 1e-12))
    throw StepTooLarge("step: dt " + std::to_string(dt) +
                       " exceeds parabolic bound " + std::to_string(bound));
}

}  // namespace

FlowRefs make_flow_refs(const MetricField& g0) {
  FlowRefs refs;
  refs.grid = g0.grid();
  refs.g0 = g0.g;
  refs.beta0 = beta_tensor(g0);
  refs.logdet0 = log_det_field(g0);
  refs.eps_pos = g0.eps_pos;
  return refs;
}

FlowRefs make_flow_refs(const HessianStructure& hs, double eps_pos) {
  return make_flow_refs(metric_from_potential(hs, eps_pos));
}

FlowState initial_state(const FlowRefs& refs) {
  FlowState s;
  s.t = 0.0;
  s.phi = ScalarField(refs.grid);
  s.g = make_metric(assemble(refs, 0.0, s.phi), refs.eps_pos);
  s.phi_dot = ma_rhs(refs, 0.0, s.phi);
  return s;
}

void FlowConfig::validate() const {
  if (!(dt > 0.0)) throw BadParameter("FlowConfig: dt must be positive");
  if (!(t_end > 0.0)) throw BadParameter("FlowConfig: t_end must be positive");
  if (!(c_dt > 0.0)) throw BadParameter("FlowConfig: c_dt must be positive");
  if (stride < 1) throw BadParameter("FlowConfig: stride must be >= 1");
  if (normalized && scheme == Scheme::scalar)
    throw BadParameter("FlowConfig: normalized flow is tensor-scheme only");
}

ScalarField ma_rhs(const FlowRefs& refs, double t, const ScalarField& phi) {
  MetricField g = make_metric(assemble(refs, t, phi), refs.eps_pos);
  ScalarField rhs = log_det_field(g);
  for (std::size_t k = 0; k < rhs.v.size(); ++k) rhs.v[k] -= refs.logdet0.v[k];
  return rhs;
}

FlowState step_scalar(const FlowRefs& refs, const FlowState& s, double dt,
                      double c_dt) {
  check_step(s.g, dt, c_dt);

  const auto advance = [&](const ScalarField& k, double w) {
    ScalarField p = s.phi;
    for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] += w * k.v[i];
    return p;
  };
  ScalarField k1 = ma_rhs(refs, s.t, s.phi);
  ScalarField k2 = ma_rhs(refs, s.t + 0.5 * dt, advance(k1, 0.5 * dt));
  ScalarField k3 = ma_rhs(refs, s.t + 0.5 * dt, advance(k2, 0.5 * dt));
  ScalarField k4 = ma_rhs(refs, s.t + dt, advance(k3, dt));

  FlowState out;
  out.t = s.t + dt;
  out.phi = s.phi;
  for (std::size_t i = 0; i < out.phi.v.size(); ++i)
    out.phi.v[i] +=
        dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
  out.g = make_metric(assemble(refs, out.t, out.phi), refs.eps_pos);
  out.phi_dot = ma_rhs(refs, out.t, out.phi);
  return out;
}

namespace {

// RK4 on the packed symmetric components; rhs(g) must itself be symmetric,
// so symmetry is preserved exactly.
template <class Rhs>
MetricField rk4_metric(const MetricField& g, double dt, double c_dt, Rhs rhs) {
  check_step(g, dt, c_dt);

  const auto advance = [&](const SymTensorField& k, double w) {
    SymTensorField s = g.g;
    for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] += w * k.v[i];
    return make_metric(std::move(s), g.eps_pos);
  };
  SymTensorField k1 = rhs(g);
  SymTensorField k2 = rhs(advance(k1, 0.5 * dt));
  SymTensorField k3 = rhs(advance(k2, 0.5 * dt));
  SymTensorField k4 = rhs(advance(k3, dt));

  SymTensorField out = g.g;
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] += dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
  return make_metric(std::move(out), g.eps_pos);
}

}  // namespace

MetricField step_tensor(const MetricField& g, double dt, double c_dt) {
  return rk4_metric(g, dt, c_dt, [](const MetricField& m) {
    SymTensorField b = beta_tensor(m);
    for (double& x : b.v) x = -x;
    return b;
  });
}

MetricField normalized_step(const MetricField& g, double dt, double c_dt) {
  return rk4_metric(g, dt, c_dt, [](const MetricField& m) {
    SymTensorField b = beta_tensor(m);
    for (std::size_t i = 0; i < b.v.size(); ++i) b.v[i] = -b.v[i] - m.g.v[i];
    return b;
  });
}

namespace {

Snapshot take_snapshot(double t, const MetricField& g) {
  Snapshot s;
  s.t = t;
  s.g = g.g;
  s.logdet = log_det_field(g);
  return s;
}

Snapshot take_snapshot(const FlowState& st) {
  Snapshot s = take_snapshot(st.t, st.g);
  s.phi = st.phi;
  s.phi_dot = st.phi_dot;
  return s;
}

}  // namespace

Trajectory run_flow(const FlowRefs& refs, const FlowConfig& cfg) {
  cfg.validate();
  const long long steps = std::llround(cfg.t_end / cfg.dt);
  if (steps < 1 ||
      std::fabs(steps * cfg.dt - cfg.t_end) > 1e-9 * std::max(cfg.dt, cfg.t_end))
    throw BadParameter("run_flow: t_end must be a positive multiple of dt");

  Trajectory traj;
  traj.grid = refs.grid;
  traj.cfg = cfg;

  if (cfg.scheme == Scheme::scalar) {
    FlowState state = initial_state(refs);
    traj.snapshots.push_back(take_snapshot(state));
    for (long long i = 1; i <= steps; ++i) {
      try {
        state = step_scalar(refs, state, cfg.dt, cfg.c_dt);
      } catch (const HkError& e) {
        traj.failure = {true, state.t, e.what()};
        return traj;
      }
      state.t = static_cast<double>(i) * cfg.dt;
      if (i % cfg.stride == 0 || i == steps)
        traj.snapshots.push_back(take_snapshot(state));
    }
  } else {
    MetricField g = make_metric(refs.g0, refs.eps_pos);
    double t = 0.0;
    traj.snapshots.push_back(take_snapshot(t, g));
    for (long long i = 1; i <= steps; ++i) {
      try {
        g = cfg.normalized ? normalized_step(g, cfg.dt, cfg.c_dt)
                           : step_tensor(g, cfg.dt, cfg.c_dt);
      } catch (const HkError& e) {
        traj.failure = {true, t, e.what()};
        return traj;
      }
      t = static_cast<double>(i) * cfg.dt;
      if (i % cfg.stride == 0 || i == steps)
        traj.snapshots.push_back(take_snapshot(t, g));
    }
  }
  return traj;
}

std::vector<ScalarField> potential_from_trajectory(const Trajectory& traj) {
  if (traj.snapshots.empty())
    throw BadParameter("potential_from_trajectory: empty trajectory");
  const ScalarField& ld0 = traj.snapshots.front().logdet;
  std::vector<ScalarField> out;
  out.emplace_back(traj.grid);
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const Snapshot& a = traj.snapshots[k - 1];
    const Snapshot& b = traj.snapshots[k];
    const double half_dt = 0.5 * (b.t - a.t);
    ScalarField phi = out.back();
    for (std::size_t i = 0; i < phi.v.size(); ++i)
      phi.v[i] += half_dt * ((a.logdet.v[i] - ld0.v[i]) +
                             (b.logdet.v[i] - ld0.v[i]));
    out.push_back(std::move(phi));
  }
  return out;
}

}  // namespace hk
