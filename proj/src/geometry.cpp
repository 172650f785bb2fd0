#include "hk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace hk {

namespace {

void check_spd_everywhere(const SymTensorField& g, double eps_pos, const char* who) {
  const int n = g.grid.dim;
  double a[9];
  for (std::size_t idx = 0; idx < g.grid.node_count(); ++idx) {
    g.full(idx, a);
    const double lmin = sym_min_eigenvalue(n, a);
    if (!(lmin > eps_pos))
      throw NotPositiveDefinite(std::string(who) + ": min eigenvalue " +
                                std::to_string(lmin) + " at node " +
                                std::to_string(idx));
  }
}

}  // namespace

MetricField make_metric(SymTensorField g, double eps_pos) {
  check_spd_everywhere(g, eps_pos, "make_metric");
  return MetricField{std::move(g), eps_pos};
}

HessianStructure::HessianStructure(const GridSpec& grid_,
                                   const std::array<double, 9>& G0_,
                                   ScalarField phi_)
    : grid(grid_), G0(G0_), phi(std::move(phi_)) {
  grid.validate();
  if (!(phi.grid == grid)) throw BadParameter("HessianStructure: phi grid mismatch");
  if (sym_min_eigenvalue(grid.dim, G0.data()) <= 0.0)
    throw NotPositiveDefinite("HessianStructure: G0 is not positive definite");
  // induced-metric positivity is checked on construction
  metric_from_potential(*this);
}

MetricField metric_from_potential(const HessianStructure& hs, double eps_pos) {
  const int n = hs.grid.dim;
  SymTensorField g = hessian(hs.phi);
  for (std::size_t idx = 0; idx < g.grid.node_count(); ++idx)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g.at(idx, i, j) += hs.G0[i * n + j];
  check_spd_everywhere(g, eps_pos, "metric_from_potential");
  return MetricField{std::move(g), eps_pos};
}

ScalarField log_det_field(const MetricField& g) {
  const int n = g.grid().dim;
  ScalarField out(g.grid());
  double a[9];
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    g.g.full(idx, a);
    out[idx] = spd_log_det(n, a);
  }
  return out;
}

SymTensorField beta_tensor(const MetricField& g) {
  SymTensorField beta = hessian(log_det_field(g));
  for (double& x : beta.v) x = -x;
  return beta;
}

std::pair<VectorField, SymTensorField> koszul_forms(const MetricField& g) {
  const ScalarField s = log_det_field(g);
  const int n = g.grid().dim;
  VectorField alpha(g.grid());
  for (int i = 0; i < n; ++i) {
    ScalarField d = diff1(s, i);
    for (std::size_t idx = 0; idx < d.size(); ++idx) alpha.at(idx, i) = 0.5 * d[idx];
  }
  SymTensorField kappa = hessian(s);
  for (double& x : kappa.v) x *= 0.5;
  return {std::move(alpha), std::move(kappa)};
}

Tensor3Field phi_third(const ScalarField& phi) {
  const int n = phi.grid.dim;
  Tensor3Field out(phi.grid);
  // one stencil evaluation per sorted triple i <= j <= k, mirrored to all
  // permutations so the lowered tensor is exactly symmetric
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        ScalarField d = diff1(hess_comp(phi, i, j), k);
        int tri[3] = {i, j, k};
        for (std::size_t idx = 0; idx < d.size(); ++idx) {
          const double v = d[idx];
          int p[3] = {tri[0], tri[1], tri[2]};
          std::sort(p, p + 3);
          do {
            out.at(idx, p[0], p[1], p[2]) = v;
          } while (std::next_permutation(p, p + 3));
        }
      }
  return out;
}

Tensor4Field phi_fourth(const ScalarField& phi) {
  const int n = phi.grid.dim;
  Tensor4Field out(phi.grid);
  // two second-difference passes per unordered pair of sorted index pairs
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = a; c < n; ++c)
        for (int d = c; d < n; ++d) {
          if (c * n + d < a * n + b) continue;
          ScalarField f = hess_comp(hess_comp(phi, a, b), c, d);
          for (std::size_t idx = 0; idx < f.size(); ++idx) {
            const double v = f[idx];
            const int ijs[2] = {a, b};
            const int kls[2] = {c, d};
            for (int s1 = 0; s1 < 2; ++s1)
              for (int s2 = 0; s2 < 2; ++s2) {
                const int i = ijs[s1], j = ijs[1 - s1];
                const int k = kls[s2], l = kls[1 - s2];
                out.at(idx, i, j, k, l) = v;
                out.at(idx, k, l, i, j) = v;
              }
          }
        }
  return out;
}

namespace {

Tensor4Field hessian_curvature_core(const SymTensorField& g, const Tensor3Field& p3,
                                    const Tensor4Field& p4, double eps_pos) {
  const int n = g.grid.dim;
  check_spd_everywhere(g, eps_pos, "hessian_curvature");
  Tensor4Field Q(g.grid);
  double a[9], ginv[9];
  for (std::size_t idx = 0; idx < g.grid.node_count(); ++idx) {
    g.full(idx, a);
    spd_inverse(n, a, ginv);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double corr = 0.0;
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q)
                corr += ginv[p * n + q] * p3.at(idx, i, k, p) * p3.at(idx, j, l, q);
            Q.at(idx, i, j, k, l) = 0.5 * p4.at(idx, i, j, k, l) - 0.5 * corr;
          }
  }
  return Q;
}

}  // namespace

Tensor4Field hessian_curvature(const HessianStructure& hs, double eps_pos) {
  const MetricField g = metric_from_potential(hs, eps_pos);
  return hessian_curvature_core(g.g, phi_third(hs.phi), phi_fourth(hs.phi), eps_pos);
}

Tensor3Field lowered_gamma(const HessianStructure& hs) {
  Tensor3Field p3 = phi_third(hs.phi);
  for (double& x : p3.v) x *= 0.5;
  return p3;
}

namespace {

Tensor3Field raise_first_index(const SymTensorField& g, const Tensor3Field& low) {
  const int n = g.grid.dim;
  Tensor3Field out(g.grid);
  double a[9], ginv[9];
  for (std::size_t idx = 0; idx < g.grid.node_count(); ++idx) {
    g.full(idx, a);
    spd_inverse(n, a, ginv);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += ginv[i * n + l] * low.at(idx, l, j, k);
          out.at(idx, i, j, k) = s;
        }
  }
  return out;
}

}  // namespace

Tensor3Field christoffel_gamma(const HessianStructure& hs, double eps_pos) {
  const MetricField g = metric_from_potential(hs, eps_pos);
  return raise_first_index(g.g, lowered_gamma(hs));
}

Tensor4Field riemann_from_Q(const Tensor4Field& Q) {
  const int n = Q.grid.dim;
  Tensor4Field R(Q.grid);
  for (std::size_t idx = 0; idx < Q.grid.node_count(); ++idx)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            R.at(idx, i, j, k, l) =
                0.5 * (Q.at(idx, i, j, k, l) - Q.at(idx, j, i, k, l));
  return R;
}

Tensor3Field t_tensor(const SymTensorField& g) {
  const int n = g.grid.dim;
  Tensor3Field T(g.grid);
  // one evaluation per k and unordered (j < l); mirrored with a sign so the
  // antisymmetry in (j, l) is exact
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int l = j + 1; l < n; ++l) {
        ScalarField dj = diff1(component(g, k, l), j);
        ScalarField dl = diff1(component(g, k, j), l);
        for (std::size_t idx = 0; idx < dj.size(); ++idx) {
          const double v = dj[idx] - dl[idx];
          T.at(idx, k, j, l) = v;
          T.at(idx, k, l, j) = -v;
        }
      }
  return T;
}

double min_eigen_gap(const SymTensorField& g, const SymTensorField& h) {
  detail::check_grid_match(g, h, "min_eigen_gap");
  const int n = g.grid.dim;
  std::vector<double> per_node(g.grid.node_count());
  double a[9], b[9];
  for (std::size_t idx = 0; idx < per_node.size(); ++idx) {
    g.full(idx, a);
    h.full(idx, b);
    for (int i = 0; i < n * n; ++i) a[i] -= b[i];
    per_node[idx] = sym_min_eigenvalue(n, a);
  }
  return pairwise_min(per_node);
}

double max_inverse_spectral_radius(const MetricField& g) {
  const int n = g.grid().dim;
  std::vector<double> per_node(g.grid().node_count());
  double a[9];
  for (std::size_t idx = 0; idx < per_node.size(); ++idx) {
    g.g.full(idx, a);
    const double lmin = sym_min_eigenvalue(n, a);
    if (!(lmin > 0.0))
      throw NotPositiveDefinite("max_inverse_spectral_radius: degenerate metric");
    per_node[idx] = 1.0 / lmin;
  }
  return pairwise_max(per_node);
}

// ---- analytic sampling mode -------------------------------------------

namespace {

// d_i log det g and d_i d_j log det g from sampled derivative arrays:
//   d_i log det = tr(g^-1 d_i g)
//   d_i d_j log det = tr(g^-1 d_i d_j g) - tr(g^-1 d_j g g^-1 d_i g)
void logdet_derivs(const AnalyticGeometry& a, VectorField& d1, SymTensorField& d2) {
  const int n = a.g.grid.dim;
  d1 = VectorField(a.g.grid);
  d2 = SymTensorField(a.g.grid);
  double mat[9], ginv[9];
  for (std::size_t idx = 0; idx < a.g.grid.node_count(); ++idx) {
    a.g.full(idx, mat);
    spd_inverse(n, mat, ginv);
    for (int i = 0; i < n; ++i) {
      double tr = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) tr += ginv[p * n + q] * a.dg.at(idx, i, q, p);
      d1.at(idx, i) = tr;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double tr2 = 0.0, cross = 0.0;
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) {
            tr2 += ginv[p * n + q] * a.d2g.at(idx, i, j, q, p);
            for (int r = 0; r < n; ++r)
              for (int s = 0; s < n; ++s)
                cross += ginv[p * n + q] * a.dg.at(idx, j, q, r) * ginv[r * n + s] *
                         a.dg.at(idx, i, s, p);
          }
        d2.at(idx, i, j) = tr2 - cross;
      }
  }
}

}  // namespace

SymTensorField beta_tensor(const AnalyticGeometry& a) {
  VectorField d1;
  SymTensorField d2;
  logdet_derivs(a, d1, d2);
  for (double& x : d2.v) x = -x;
  return d2;
}

std::pair<VectorField, SymTensorField> koszul_forms(const AnalyticGeometry& a) {
  VectorField d1;
  SymTensorField d2;
  logdet_derivs(a, d1, d2);
  for (double& x : d1.v) x *= 0.5;
  for (double& x : d2.v) x *= 0.5;
  return {std::move(d1), std::move(d2)};
}

Tensor3Field lowered_gamma(const AnalyticGeometry& a) {
  Tensor3Field low = a.phi3;
  for (double& x : low.v) x *= 0.5;
  return low;
}

Tensor3Field christoffel_gamma(const AnalyticGeometry& a) {
  return raise_first_index(a.g, lowered_gamma(a));
}

Tensor4Field hessian_curvature(const AnalyticGeometry& a) {
  return hessian_curvature_core(a.g, a.phi3, a.phi4, a.eps_pos);
}

}  // namespace hk
