#pragma once

// Hermitian lift of the metric to the tangent-bundle chart z^j = xi^j +
// i xi^{n+j}, and the two curvature correspondences it satisfies:
//
//   Ricci:      R^T_{ij}  = 1/4 beta_ij      (identical stencils, exact)
//   curvature:  R^T_{ijkl} = -1/2 Q_ijkl     (independent derivative
//                                             compositions, O(h^2) defect)
//
// Holomorphic derivative convention d_k = 1/2 (d_{xi^k} - i d_{xi^{n+k}});
// fiber-independent components collapse each holomorphic pair to 1/4 of a
// base second derivative.

#include <cstdint>

#include "hk/geometry.hpp"

namespace hk {

struct HermitianLift {
  GridSpec grid;
  SymTensorField h;  // h_ij(x) = g_ij(pi(z)), real symmetric
};

HermitianLift lift_metric(const MetricField& g);

// R^T_{ij} = -1/4 D_i D_j log det h; shares beta's stencils exactly.
SymTensorField kahler_ricci(const HermitianLift& lift);

struct KahlerCurvature {
  Tensor4Field R;  // R^T_{ij k l} = -1/4 D_k D_l h_ij
                   //               + 1/4 h^{pq} (D_k h_iq)(D_l h_pj)
  double defect = 0.0;  // max-node |R + 1/2 Q| against hessian_curvature
};

// The second derivatives here compose two first differences (the lift's own
// path), while Q composes Hessian passes; the defect is pure stencil
// mismatch and refines at second order.
KahlerCurvature kahler_curvature(const HermitianLift& lift,
                                 const HessianStructure& hs,
                                 double eps_pos = 1e-10);

// Min over nodes, seeded g-orthonormal frames (e_i), and index pairs of
// -Q(e_i, e_i, e_j, e_j); >= -tol certifies sampled nonnegative Hessian
// bisectional curvature.
double bisectional_sign_scan(const Tensor4Field& Q, const MetricField& g,
                             int frames = 32, std::uint64_t seed = 1);

}  // namespace hk
