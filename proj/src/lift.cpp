#include "hk/lift.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace hk {

HermitianLift lift_metric(const MetricField& g) {
  HermitianLift lift;
  lift.grid = g.grid();
  lift.h = g.g;
  // revalidate positivity on the lifted chart
  make_metric(lift.h, g.eps_pos);
  return lift;
}

SymTensorField kahler_ricci(const HermitianLift& lift) {
  MetricField g = make_metric(lift.h);
  SymTensorField ricci = hessian(log_det_field(g));
  for (double& x : ricci.v) x *= -0.25;
  return ricci;
}

KahlerCurvature kahler_curvature(const HermitianLift& lift,
                                 const HessianStructure& hs, double eps_pos) {
  const GridSpec& grid = lift.grid;
  const int n = grid.dim;

  // first differences of every component, d1[k][sym(i,j)]
  std::vector<std::vector<ScalarField>> d1(n);
  for (int k = 0; k < n; ++k) {
    d1[k].resize(sym_component_count(n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        d1[k][sym_index(n, i, j)] = diff1(component(lift.h, i, j), k);
  }

  KahlerCurvature out;
  out.R = Tensor4Field(grid);
  double hm[9], hinv[9];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          ScalarField d2 = diff1(d1[k][sym_index(n, i, j)], l);
          for (std::size_t idx = 0; idx < d2.size(); ++idx)
            out.R.at(idx, i, j, k, l) = -0.25 * d2[idx];
        }
  for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
    lift.h.full(idx, hm);
    spd_inverse(n, hm, hinv);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q)
                s += hinv[p * n + q] * d1[k][sym_index(n, i, q)][idx] *
                     d1[l][sym_index(n, p, j)][idx];
            out.R.at(idx, i, j, k, l) += 0.25 * s;
          }
  }

  Tensor4Field Q = hessian_curvature(hs, eps_pos);
  std::vector<double> diff(Q.v.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = out.R.v[i] + 0.5 * Q.v[i];
  out.defect = max_abs(diff);
  return out;
}

namespace {

double unit_double(std::mt19937_64& gen) {
  // uniform in [-1, 1), identical across platforms
  return static_cast<double>(gen() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

}  // namespace

double bisectional_sign_scan(const Tensor4Field& Q, const MetricField& g,
                             int frames, std::uint64_t seed) {
  if (!(Q.grid == g.grid()))
    throw BadParameter("bisectional_sign_scan: grid mismatch");
  const GridSpec& grid = g.grid();
  const int n = grid.dim;
  std::mt19937_64 gen(seed);

  double gm[9];
  double e[3][3];  // frame vectors, rows
  std::vector<double> node_min(grid.node_count());
  const auto gdot = [&](const double* a, const double* b) {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) s += gm[p * n + q] * a[p] * b[q];
    return s;
  };

  for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
    g.g.full(idx, gm);
    double best = 0.0;
    bool first = true;
    for (int f = 0; f < frames; ++f) {
      // Gram-Schmidt a random basis into a g-orthonormal frame
      for (int i = 0; i < n; ++i) {
        for (int a = 0; a < n; ++a) e[i][a] = unit_double(gen);
        for (int j = 0; j < i; ++j) {
          const double c = gdot(e[i], e[j]);
          for (int a = 0; a < n; ++a) e[i][a] -= c * e[j][a];
        }
        const double nrm = std::sqrt(gdot(e[i], e[i]));
        if (nrm < 1e-8) {  // degenerate draw; retry this vector
          --i;
          continue;
        }
        for (int a = 0; a < n; ++a) e[i][a] /= nrm;
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double q = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                  q += Q.at(idx, a, b, c, d) * e[i][a] * e[i][b] * e[j][c] *
                       e[j][d];
          if (first || -q < best) best = -q;
          first = false;
        }
    }
    node_min[idx] = best;
  }
  return pairwise_min(node_min);
}

}  // namespace hk
