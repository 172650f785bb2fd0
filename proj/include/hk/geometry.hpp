#pragma once

// Pointwise differential geometry of an affine Riemannian metric on a
// periodic grid: the metric from a convex potential, log-det, the beta
// tensor, Koszul forms, Christoffel/gamma, the Hessian curvature tensor Q,
// the curvature antisymmetrization, and the T-tensor.
//
// Fixtures on non-periodic charts go through AnalyticGeometry instead:
// derivative arrays sampled from closed forms, combined with the same
// pointwise algebra and no stencils.

#include <array>
#include <utility>

#include "hk/grid.hpp"
#include "hk/linalg.hpp"
#include "hk/stencil.hpp"

namespace hk {

struct MetricField {
  SymTensorField g;
  double eps_pos = 1e-10;

  const GridSpec& grid() const { return g.grid; }
};

// Validates positivity: min eigenvalue at every node must exceed eps_pos.
MetricField make_metric(SymTensorField g, double eps_pos = 1e-10);

struct HessianStructure {
  GridSpec grid;
  std::array<double, 9> G0{};  // constant SPD base form, row-major dim x dim
  ScalarField phi;             // periodic potential

  HessianStructure(const GridSpec& grid_, const std::array<double, 9>& G0_,
                   ScalarField phi_);
};

MetricField metric_from_potential(const HessianStructure& hs, double eps_pos = 1e-10);

ScalarField log_det_field(const MetricField& g);

// beta_ij = -D_i D_j log det g
SymTensorField beta_tensor(const MetricField& g);

// alpha_i = 1/2 D_i log det g,  kappa_ij = 1/2 D_i D_j log det g.
// Shares the log-det field and stencils with beta_tensor, so beta = -2 kappa
// holds to rounding.
std::pair<VectorField, SymTensorField> koszul_forms(const MetricField& g);

// Lowered gamma_ijk = 1/2 phi_ijk, fully symmetric by construction
// (canonical sorted-triple stencil composition).
Tensor3Field lowered_gamma(const HessianStructure& hs);

// gamma^i_jk = g^{il} gamma_ljk
Tensor3Field christoffel_gamma(const HessianStructure& hs, double eps_pos = 1e-10);

// Third/fourth derivative lattices of the potential. phi3 composes a first
// difference with a compact Hessian pass per sorted index triple; phi4
// composes two Hessian passes per sorted index pair of pairs.
Tensor3Field phi_third(const ScalarField& phi);
Tensor4Field phi_fourth(const ScalarField& phi);

// Q_ijkl = 1/2 phi_ijkl - 1/2 g^{pq} phi_ikp phi_jlq, computed as written.
Tensor4Field hessian_curvature(const HessianStructure& hs, double eps_pos = 1e-10);

// Rhat_ijkl = 1/2 (Q_ijkl - Q_jikl); exactly antisymmetric in (i,j).
Tensor4Field riemann_from_Q(const Tensor4Field& Q);

// T^k_jl = D_j g_kl - D_l g_kj, stored at (k,j,l); antisymmetric in (j,l).
Tensor3Field t_tensor(const SymTensorField& g);
inline Tensor3Field t_tensor(const MetricField& g) { return t_tensor(g.g); }

// min over nodes of the smallest eigenvalue of (g - h); >= 0 iff g >= h.
double min_eigen_gap(const SymTensorField& g, const SymTensorField& h);

// Largest spectral radius of g^{-1} over all nodes.
double max_inverse_spectral_radius(const MetricField& g);

// ---- analytic sampling mode -------------------------------------------

struct AnalyticGeometry {
  SymTensorField g;    // sampled metric
  Tensor3Field dg;     // dg(k, i, j)   = d_k g_ij
  Tensor4Field d2g;    // d2g(k, l, i, j) = d_k d_l g_ij
  Tensor3Field phi3;   // third potential derivatives (fully symmetric)
  Tensor4Field phi4;   // fourth potential derivatives
  double eps_pos = 1e-10;
};

SymTensorField beta_tensor(const AnalyticGeometry& a);
std::pair<VectorField, SymTensorField> koszul_forms(const AnalyticGeometry& a);
Tensor3Field lowered_gamma(const AnalyticGeometry& a);
Tensor3Field christoffel_gamma(const AnalyticGeometry& a);
Tensor4Field hessian_curvature(const AnalyticGeometry& a);

}  // namespace hk
