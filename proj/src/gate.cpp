#include "hk/gate.hpp"

#include <cmath>
#include <functional>
#include <tuple>

namespace hk {

namespace {

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double e0 = std::exp(-1.0 / x);
  const double e1 = std::exp(-1.0 / (1.0 - x));
  return e0 / (e0 + e1);
}

double adaptive_simpson(const std::function<double(double)>& fn, double lo,
                        double hi, double tol, int depth, double flo,
                        double fmid, double fhi, double whole) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(fn, lo, mid, 0.5 * tol, depth - 1, flo, flm, fmid,
                          left) +
         adaptive_simpson(fn, mid, hi, 0.5 * tol, depth - 1, fmid, frm, fhi,
                          right);
}

double integrate(const std::function<double(double)>& fn, double lo, double hi,
                 double tol) {
  if (!(hi > lo)) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double flo = fn(lo), fmid = fn(mid), fhi = fn(hi);
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return adaptive_simpson(fn, lo, hi, tol, 48, flo, fmid, fhi, whole);
}

}  // namespace

double CutoffProfile::f_eval(double sv) const {
  if (sv < 0.0 || sv >= 1.0) throw BadParameter("cutoff f: s outside [0,1)");
  if (sv <= 1.0 - kappa) return 0.0;
  const double w = (sv - 1.0 + kappa) / kappa;
  return -std::log1p(-w * w);
}

double CutoffProfile::fprime_eval(double sv) const {
  if (sv < 0.0 || sv >= 1.0) throw BadParameter("cutoff f': s outside [0,1)");
  if (sv <= 1.0 - kappa) return 0.0;
  const double w = (sv - 1.0 + kappa) / kappa;
  return (2.0 * w / kappa) / (1.0 - w * w);
}

double CutoffProfile::psi_eval(double sv) const {
  return smoothstep((sv - a) / (b - a));
}

double CutoffProfile::F_eval(double sv) const {
  if (sv < 0.0 || sv >= 1.0) throw BadParameter("cutoff FF: s outside [0,1)");
  if (sv <= a) return 0.0;
  return integrate([this](double t) { return psi_eval(t) * fprime_eval(t); },
                   a, sv, 1e-10);
}

double CutoffProfile::F_interp(double sv) const {
  const double m = static_cast<double>(s.size());
  double x = sv * m;
  if (x <= 0.0) return F.front();
  if (x >= m - 1.0) return F.back();
  const std::size_t i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  return F[i] * (1.0 - frac) + F[i + 1] * frac;
}

CutoffProfile build_cutoff(double kappa, int mesh) {
  if (!(kappa > 0.0 && kappa < 0.125))
    throw BadParameter("build_cutoff: kappa must lie in (0, 1/8)");
  if (mesh < 64) throw BadParameter("build_cutoff: mesh too coarse");
  CutoffProfile p;
  p.kappa = kappa;
  p.a = 1.0 - kappa + kappa * kappa;
  p.b = 1.0 - kappa + 2.0 * kappa * kappa;
  p.s.resize(mesh);
  p.f.resize(mesh);
  p.psi.resize(mesh);
  p.F.resize(mesh);
  const double seg_tol = 1e-10 / mesh;
  double acc = 0.0;
  for (int m = 0; m < mesh; ++m) {
    const double sv = static_cast<double>(m) / mesh;
    p.s[m] = sv;
    p.f[m] = p.f_eval(sv);
    p.psi[m] = p.psi_eval(sv);
    if (m > 0)
      acc += integrate(
          [&p](double t) { return p.psi_eval(t) * p.fprime_eval(t); },
          p.s[m - 1], sv, seg_tol);
    p.F[m] = acc;
  }
  return p;
}

CutoffReport cutoff_property_check(const CutoffProfile& profile, int k_max) {
  if (k_max < 1 || k_max > 3)
    throw BadParameter("cutoff_property_check: k_max must be in [1,3]");
  const std::size_t m = profile.s.size();
  const double h = 1.0 / static_cast<double>(m);
  CutoffReport rep;

  // successive central differences of the tabulated FF; the ends are
  // trimmed since FF is not periodic
  std::vector<std::vector<double>> d(static_cast<std::size_t>(k_max) + 1);
  d[0] = profile.F;
  for (int k = 1; k <= k_max; ++k) {
    d[k].assign(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i)
      d[k][i] = (d[k - 1][i + 1] - d[k - 1][i - 1]) / (2.0 * h);
  }
  const std::size_t trim = static_cast<std::size_t>(k_max) + 1;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<double> vals;
    for (std::size_t i = trim; i + trim < m; ++i)
      vals.push_back(std::fabs(std::exp(-k * profile.F[i]) * d[k][i]));
    rep.k_sup.push_back(pairwise_max(vals));
  }
  {
    std::vector<double> vals;
    for (std::size_t i = trim; i + trim < m; ++i) vals.push_back(d[1][i]);
    rep.fprime_min = pairwise_min(vals);
  }

  std::vector<double> flat;
  for (std::size_t i = 0; i < m; ++i)
    if (profile.s[i] <= profile.a) flat.push_back(std::fabs(profile.F[i]));
  rep.flat_max_abs = pairwise_max(flat);

  std::vector<double> dpsi;
  for (std::size_t i = 1; i + 1 < m; ++i)
    dpsi.push_back((profile.psi[i + 1] - profile.psi[i - 1]) / (2.0 * h));
  rep.psi_prime_max = pairwise_max(dpsi);
  rep.psi_prime_bound = 2.0 / (profile.kappa * profile.kappa);

  // Ramp constants: for each sampled s in (1 - 2 kappa, 1), take the largest
  // tau keeping exp(FF(s+tau) - FF(s-tau)) <= 1 + kappa; report the achieved
  // constants.
  const double kap = profile.kappa;
  double c2 = 0.0, c3 = 0.0;
  bool c3_first = true;
  for (int j = 0; j < 64; ++j) {
    const double sv = 1.0 - 2.0 * kap + (j + 0.5) / 64.0 * (2.0 * kap - h);
    const double tau_cap = std::min(sv, 1.0 - h - sv);
    double best_tau = 0.0, best_ratio = 1.0;
    for (int i = 1; i <= 512; ++i) {
      const double tau = tau_cap * i / 512.0;
      const double ratio = std::exp(profile.F_interp(sv + tau) -
                                    profile.F_interp(sv - tau));
      if (ratio - 1.0 <= kap) {
        best_tau = tau;
        best_ratio = ratio;
      } else {
        break;
      }
    }
    c2 = std::max(c2, (best_ratio - 1.0) / kap);
    const double v =
        best_tau * std::exp(profile.F_interp(sv - best_tau)) / (kap * kap);
    if (c3_first || v < c3) c3 = v;
    c3_first = false;
  }
  rep.c2 = c2;
  rep.c3 = c3;

  rep.support_ok = rep.flat_max_abs <= 1e-12;
  rep.sign_ok = rep.fprime_min >= -1e-12;
  rep.ramp_ok = rep.psi_prime_max >= 0.0 &&
                rep.psi_prime_max <= rep.psi_prime_bound + 1e-8;
  return rep;
}

GateResult sb_estimate(const MetricField& g0, const ScalarField& u,
                       double theta, double delta_bis, double cap) {
  if (!(theta > 0.0 && theta < 1.0))
    throw BadParameter("sb_estimate: theta must lie in (0, 1)");
  if (!(u.grid == g0.grid()))
    throw BadParameter("sb_estimate: u grid mismatch");

  const SymTensorField beta0 = beta_tensor(g0);
  const SymTensorField hess_u = hessian(u);
  const GridSpec& grid = g0.grid();
  const int n = grid.dim;

  const auto barrier_min = [&](double S, ScalarField* field) {
    std::vector<double> mins(grid.node_count());
    double m[9];
    for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const double v = (1.0 - theta) * g0.g.at(idx, i, j) -
                           S * beta0.at(idx, i, j) + hess_u.at(idx, i, j);
          m[i * n + j] = m[j * n + i] = v;
        }
      mins[idx] = sym_min_eigenvalue(n, m);
      if (field) (*field)[idx] = mins[idx];
    }
    return pairwise_min(mins);
  };

  GateResult res;
  res.theta = theta;
  const auto feasible = [&](double S) {
    const bool ok = barrier_min(S, nullptr) >= 0.0;
    res.trace.emplace_back(S, ok);
    return ok;
  };

  if (!feasible(0.0)) {
    // u spoils the barrier even at S = 0; threshold is zero for this u
    res.s_max = 0.0;
    res.margin = ScalarField(grid);
    barrier_min(0.0, &res.margin);
    return res;
  }
  double hi = delta_bis;
  while (hi < cap && feasible(hi)) hi *= 2.0;
  if (hi >= cap) {
    res.unbounded = true;
    res.s_max = cap;
    res.margin = ScalarField(grid);
    barrier_min(cap, &res.margin);
    return res;
  }
  double lo = hi * 0.5;
  while (hi - lo > delta_bis) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  res.s_max = lo;
  res.margin = ScalarField(grid);
  barrier_min(lo, &res.margin);
  return res;
}

namespace {

std::pair<double, double> derivative_sups(const SymTensorField& g) {
  const int n = g.grid.dim;
  std::vector<double> d1s, d2s;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField c = component(g, i, j);
      for (int k = 0; k < n; ++k) {
        d1s.push_back(max_abs(diff1(c, k).v));
        for (int l = k; l < n; ++l)
          d2s.push_back(max_abs(hess_comp(c, k, l).v));
      }
    }
  return {pairwise_max(d1s), pairwise_max(d2s)};
}

}  // namespace

std::pair<MetricField, ExhaustReport> conformal_exhaust(const MetricField& g0,
                                                        const ScalarField& rho,
                                                        double rho0,
                                                        double kappa) {
  if (!(rho.grid == g0.grid()))
    throw BadParameter("conformal_exhaust: rho grid mismatch");
  if (!(rho0 > 0.0)) throw BadParameter("conformal_exhaust: rho0 must be > 0");
  for (double r : rho.v)
    if (r < 0.0) throw BadParameter("conformal_exhaust: rho must be >= 0");
  if (pairwise_max(rho.v) / rho0 >= 1.0)
    throw BadParameter("conformal_exhaust: rho/rho0 reaches 1");
  CutoffProfile profile = build_cutoff(kappa);

  SymTensorField h0 = g0.g;
  for (std::size_t idx = 0; idx < rho.v.size(); ++idx) {
    const double w = std::exp(2.0 * profile.F_eval(rho.v[idx] / rho0));
    for (int c = 0; c < h0.m; ++c) h0.comp(idx, c) *= w;
  }

  ExhaustReport rep;
  std::tie(rep.sup_d_g0, rep.sup_d2_g0) = derivative_sups(g0.g);
  std::tie(rep.sup_d_h0, rep.sup_d2_h0) = derivative_sups(h0);
  return {make_metric(std::move(h0), g0.eps_pos), rep};
}

}  // namespace hk
