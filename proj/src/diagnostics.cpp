#include "hk/diagnostics.hpp"

#include <cmath>
#include <random>

namespace hk {

namespace {

struct PhiSeries {
  std::vector<ScalarField> phi;
  std::vector<ScalarField> phi_dot;
};

// Scalar-scheme snapshots carry phi/phi_dot; tensor-scheme ones are
// reconstructed from the log-det fields.
PhiSeries phi_series(const Trajectory& traj) {
  if (traj.snapshots.empty())
    throw InsufficientSnapshots("phi_series: empty trajectory");
  PhiSeries out;
  const bool stored = !traj.snapshots.front().phi.v.empty();
  if (stored) {
    for (const Snapshot& s : traj.snapshots) {
      out.phi.push_back(s.phi);
      out.phi_dot.push_back(s.phi_dot);
    }
    return out;
  }
  out.phi = potential_from_trajectory(traj);
  const ScalarField& ld0 = traj.snapshots.front().logdet;
  for (const Snapshot& s : traj.snapshots) {
    ScalarField pd(traj.grid);
    for (std::size_t i = 0; i < pd.v.size(); ++i)
      pd.v[i] = s.logdet.v[i] - ld0.v[i];
    out.phi_dot.push_back(std::move(pd));
  }
  return out;
}

// tr_a b = a^{ij} b_ij nodewise; `a` must be SPD.
ScalarField trace_field(const SymTensorField& a, const SymTensorField& b) {
  ScalarField out(a.grid);
  const int n = a.grid.dim;
  double m[9], inv[9], bm[9];
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    a.full(idx, m);
    spd_inverse(n, m, inv);
    b.full(idx, bm);
    double s = 0.0;
    for (int i = 0; i < n * n; ++i) s += inv[i] * bm[i];
    out[idx] = s;
  }
  return out;
}

// Lagrange 3-point derivative weights at tau for abscissae t0 < t1 < t2.
std::array<double, 3> d_weights(double t0, double t1, double t2, double tau) {
  return {(2.0 * tau - t1 - t2) / ((t0 - t1) * (t0 - t2)),
          (2.0 * tau - t0 - t2) / ((t1 - t0) * (t1 - t2)),
          (2.0 * tau - t0 - t1) / ((t2 - t0) * (t2 - t1))};
}

double field_max(const ScalarField& f) { return pairwise_max(f.v); }
double field_min(const ScalarField& f) { return pairwise_min(f.v); }

ScalarField psi_field(const GridSpec& grid, double t, const ScalarField& phi,
                      const ScalarField& phi_dot) {
  ScalarField out(grid);
  const double n = grid.dim;
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = t * phi_dot.v[i] - phi.v[i] - n * t;
  return out;
}

ScalarField lambda_field(const GridSpec& grid, double t, const ScalarField& phi,
                         const ScalarField& phi_dot, double S1) {
  ScalarField out(grid);
  const double n = grid.dim;
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = (S1 - t) * phi_dot.v[i] + phi.v[i] + n * t;
  return out;
}

// L_g f = g^{ij} D_i D_j f nodewise.
ScalarField laplace_like(const SymTensorField& g, const ScalarField& f) {
  return trace_field(g, hessian(f));
}

}  // namespace

std::pair<ScalarField, ScalarField> psi_lambda(const GridSpec& grid, double t,
                                               const ScalarField& phi,
                                               const ScalarField& phi_dot,
                                               double S1) {
  return {psi_field(grid, t, phi, phi_dot),
          lambda_field(grid, t, phi, phi_dot, S1)};
}

std::vector<std::array<double, 2>> evolution_residuals(const Trajectory& traj,
                                                     const FlowRefs& refs,
                                                     double S1) {
  const std::size_t m = traj.snapshots.size();
  if (m < 3)
    throw InsufficientSnapshots(
        "evolution_residuals: need at least 3 snapshots");
  PhiSeries series = phi_series(traj);

  std::vector<ScalarField> psi(m), lam(m);
  for (std::size_t k = 0; k < m; ++k) {
    psi[k] = psi_field(traj.grid, traj.snapshots[k].t, series.phi[k],
                       series.phi_dot[k]);
    lam[k] = lambda_field(traj.grid, traj.snapshots[k].t, series.phi[k],
                          series.phi_dot[k], S1);
  }

  std::vector<std::array<double, 2>> out(m);
  std::vector<double> rp(traj.grid.node_count()), rl(traj.grid.node_count());
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t c = k == 0 ? 1 : (k == m - 1 ? m - 2 : k);
    const auto w =
        d_weights(traj.snapshots[c - 1].t, traj.snapshots[c].t,
                  traj.snapshots[c + 1].t, traj.snapshots[k].t);

    const SymTensorField& g = traj.snapshots[k].g;
    ScalarField lg_psi = laplace_like(g, psi[k]);
    ScalarField lg_lam = laplace_like(g, lam[k]);
    ScalarField tr_g0 = trace_field(g, refs.g0);
    ScalarField tr_b0 = trace_field(g, refs.beta0);

    for (std::size_t i = 0; i < rp.size(); ++i) {
      const double dpsi = w[0] * psi[c - 1].v[i] + w[1] * psi[c].v[i] +
                          w[2] * psi[c + 1].v[i];
      const double dlam = w[0] * lam[c - 1].v[i] + w[1] * lam[c].v[i] +
                          w[2] * lam[c + 1].v[i];
      rp[i] = std::fabs(dpsi - lg_psi.v[i] + tr_g0.v[i]);
      rl[i] = std::fabs(dlam - lg_lam.v[i] + S1 * tr_b0.v[i] - tr_g0.v[i]);
    }
    out[k] = {pairwise_max(rp), pairwise_max(rl)};
  }
  return out;
}

double measure_K(const MetricField& g0) {
  const int n = g0.grid().dim;
  std::vector<double> sups;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField c = component(g0.g, i, j);
      for (int k = 0; k < n; ++k) {
        sups.push_back(max_abs(diff1(c, k).v));
        for (int l = k; l < n; ++l)
          sups.push_back(max_abs(hess_comp(c, k, l).v));
      }
    }
  return pairwise_max(sups);
}

std::vector<BarrierRow> barrier_checks(const Trajectory& traj,
                                       const FlowRefs& refs, double K,
                                       double tol_mp) {
  PhiSeries series = phi_series(traj);
  const double n = traj.grid.dim;
  const double S1 = traj.snapshots.back().t;

  double m_sup = 0.0;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    ScalarField lam = lambda_field(traj.grid, traj.snapshots[k].t,
                                   series.phi[k], series.phi_dot[k], S1);
    m_sup = std::max(m_sup, max_abs(lam.v));
  }

  // Trace-barrier constants with u = 0, c1 = c2 = n, alpha = 1/2 (S = 2 S1).
  const double Kc = std::max(K, 1e-12);
  const double A = 2.0 * (2.0 * m_sup + 1.0) * (2.0 * m_sup + 1.0) *
                   (n * Kc + 1.0);
  const double L = std::log(
      0.5 * n * Kc +
      0.5 * std::sqrt(n * n * Kc * Kc +
                      4.0 * n * Kc * Kc * A * std::pow(1.0 + 2.0 * m_sup, 3)));
  const double rhs_log = L + A;

  std::vector<BarrierRow> rows;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Snapshot& s = traj.snapshots[k];
    BarrierRow row;
    row.t = s.t;
    row.mp_sup =
        field_max(psi_field(traj.grid, s.t, series.phi[k], series.phi_dot[k]));
    row.mp_ok = row.mp_sup <= tol_mp;

    row.phi_sup = field_max(series.phi[k]);
    row.phi_bound = (n * std::log1p(n * Kc * s.t) + 1.0) * s.t + tol_mp;
    row.phi_ok = row.phi_sup <= row.phi_bound;

    row.upsilon_sup = field_max(trace_field(refs.g0, s.g));
    const double excess = row.upsilon_sup - n;
    const double lhs_log = std::log(std::max(excess, 1e-300));
    row.upsilon_log_margin = rhs_log - lhs_log;
    row.upsilon_ok = row.upsilon_log_margin >= 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> t_conservation(const Trajectory& traj) {
  if (traj.snapshots.empty())
    throw InsufficientSnapshots("t_conservation: empty trajectory");
  Tensor3Field T0 = t_tensor(traj.snapshots.front().g);
  std::vector<double> out;
  std::vector<double> diff(T0.v.size());
  for (const Snapshot& s : traj.snapshots) {
    Tensor3Field T = t_tensor(s.g);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = T.v[i] - T0.v[i];
    out.push_back(max_abs(diff));
  }
  return out;
}

std::vector<double> beta_eigenvalues(const MetricField& g,
                                     const SymTensorField& beta,
                                     std::size_t probe) {
  const int n = g.grid().dim;
  double gm[9], L[9], b[9];
  g.g.full(probe, gm);
  if (!cholesky(n, gm, L))
    throw NotPositiveDefinite("beta_eigenvalues: metric not SPD at probe");
  beta.full(probe, b);
  // W = L^{-1} B L^{-T}: forward-solve the columns, then the rows.
  double W[9];
  for (int c = 0; c < n; ++c) {
    double col[3];
    for (int r = 0; r < n; ++r) col[r] = b[r * n + c];
    forward_subst(n, L, col);
    for (int r = 0; r < n; ++r) W[r * n + c] = col[r];
  }
  for (int r = 0; r < n; ++r) {
    double row[3];
    for (int c = 0; c < n; ++c) row[c] = W[r * n + c];
    forward_subst(n, L, row);
    for (int c = 0; c < n; ++c) W[r * n + c] = row[c];
  }
  double ev[3];
  jacobi_eigen(n, W, ev);
  std::vector<double> out(ev, ev + n);
  std::reverse(out.begin(), out.end());
  return out;
}

DecaySeries decay_rate(const Trajectory& normalized_traj,
                       const std::array<double, 3>& v, std::size_t probe) {
  const int n = normalized_traj.grid.dim;
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) norm2 += v[i] * v[i];
  if (!(norm2 > 0.0)) throw ZeroVector("decay_rate: zero tangent vector");
  if (normalized_traj.snapshots.empty())
    throw InsufficientSnapshots("decay_rate: empty trajectory");

  const auto vnorm = [&](const SymTensorField& g) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g.at(probe, i, j) * v[i] * v[j];
    return s;
  };
  const double v0 = vnorm(normalized_traj.snapshots.front().g);

  DecaySeries out;
  for (const Snapshot& s : normalized_traj.snapshots) {
    if (!(s.t > 0.0)) continue;
    out.t.push_back(s.t);
    out.value.push_back(std::log(vnorm(s.g) / v0) / s.t);
  }
  if (out.value.empty())
    throw InsufficientSnapshots("decay_rate: no positive-time snapshots");
  out.last = out.value.back();
  out.limit_estimate = out.last;
  if (out.value.size() >= 2) {
    const double t1 = out.t[out.t.size() - 2], t2 = out.t.back();
    const double s1 = out.value[out.value.size() - 2], s2 = out.value.back();
    out.limit_estimate = (t2 * s2 - t1 * s1) / (t2 - t1);
  }
  return out;
}

ProbeSet ProbeSet::defaults(const GridSpec& grid, std::uint64_t seed) {
  ProbeSet p;
  p.nodes.push_back(0);
  std::mt19937_64 gen(seed);
  for (int k = 0; k < 3; ++k)
    p.nodes.push_back(static_cast<std::size_t>(gen() % grid.node_count()));
  return p;
}

DiagnosticsReport diagnose(const Trajectory& traj, const FlowRefs& refs,
                           const ProbeSet& probes, double S1) {
  if (traj.snapshots.empty())
    throw InsufficientSnapshots("diagnose: empty trajectory");
  DiagnosticsReport rep;
  rep.S1 = S1;
  rep.probes = probes.nodes;

  PhiSeries series = phi_series(traj);
  std::vector<std::array<double, 2>> residuals;
  if (traj.snapshots.size() >= 3)
    residuals = evolution_residuals(traj, refs, S1);
  std::vector<double> tdev = t_conservation(traj);

  const int n = traj.grid.dim;
  std::vector<double> mins(traj.grid.node_count());
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Snapshot& s = traj.snapshots[k];
    DiagnosticsRow row;
    row.t = s.t;
    ScalarField psi = psi_field(traj.grid, s.t, series.phi[k], series.phi_dot[k]);
    ScalarField lam =
        lambda_field(traj.grid, s.t, series.phi[k], series.phi_dot[k], S1);
    row.sup_psi = field_max(psi);
    row.sup_lambda = field_max(lam);
    row.inf_lambda = field_min(lam);
    if (!residuals.empty()) {
      row.r_psi = residuals[k][0];
      row.r_lambda = residuals[k][1];
    }
    row.max_t_dev = tdev[k];
    row.sup_upsilon = field_max(trace_field(refs.g0, s.g));
    row.sup_theta = field_max(trace_field(s.g, refs.g0));

    MetricField g = make_metric(s.g, refs.eps_pos);
    SymTensorField beta = beta_tensor(g);
    double gm[9], bm[9];
    for (std::size_t idx = 0; idx < mins.size(); ++idx) {
      s.g.full(idx, gm);
      mins[idx] = sym_min_eigenvalue(n, gm);
    }
    row.min_eig_g = pairwise_min(mins);
    for (std::size_t idx = 0; idx < mins.size(); ++idx) {
      beta.full(idx, bm);
      mins[idx] = sym_min_eigenvalue(n, bm);
    }
    row.min_gap_beta = pairwise_min(mins);

    for (std::size_t pnode : probes.nodes)
      for (double ev : beta_eigenvalues(g, beta, pnode))
        row.probe_eigs.push_back(ev);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace hk
