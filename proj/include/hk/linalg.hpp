#pragma once

// Dense symmetric kernels for n <= 3: Cholesky log-det, SPD inverse and
// cyclic Jacobi eigenvalues. Matrices are row-major n x n in a double[9].

#include <algorithm>
#include <array>
#include <cmath>

#include "hk/errors.hpp"

namespace hk {

// Lower-triangular Cholesky factor; returns false on a nonpositive pivot.
inline bool cholesky(int n, const double* a, double* L) {
  for (int i = 0; i < n * n; ++i) L[i] = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
    if (!(d > 0.0)) return false;
    L[j * n + j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      L[i * n + j] = s / L[j * n + j];
    }
  }
  return true;
}

// log det of an SPD matrix via its Cholesky factor; throws if not SPD.
inline double spd_log_det(int n, const double* a) {
  double L[9];
  if (!cholesky(n, a, L))
    throw NotPositiveDefinite("spd_log_det: Cholesky factorization failed");
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::log(L[i * n + i]);
  return 2.0 * s;
}

// Solve L y = b in place (forward substitution).
inline void forward_subst(int n, const double* L, double* b) {
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L[i * n + k] * b[k];
    b[i] = s / L[i * n + i];
  }
}

// Solve L^T y = b in place (back substitution).
inline void back_subst(int n, const double* L, double* b) {
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= L[k * n + i] * b[k];
    b[i] = s / L[i * n + i];
  }
}

// SPD inverse via Cholesky; throws NotPositiveDefinite.
inline void spd_inverse(int n, const double* a, double* inv) {
  double L[9];
  if (!cholesky(n, a, L))
    throw NotPositiveDefinite("spd_inverse: Cholesky factorization failed");
  for (int c = 0; c < n; ++c) {
    double e[3] = {0.0, 0.0, 0.0};
    e[c] = 1.0;
    forward_subst(n, L, e);
    back_subst(n, L, e);
    for (int r = 0; r < n; ++r) inv[r * n + c] = e[r];
  }
  // symmetrize rounding
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double m = 0.5 * (inv[i * n + j] + inv[j * n + i]);
      inv[i * n + j] = inv[j * n + i] = m;
    }
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
// Optionally accumulates eigenvectors (columns of V).
inline void jacobi_eigen(int n, const double* a_in, double* evals,
                         double* V = nullptr, double tol = 1e-13) {
  double a[9];
  for (int i = 0; i < n * n; ++i) a[i] = a_in[i];
  if (V) {
    for (int i = 0; i < n * n; ++i) V[i] = 0.0;
    for (int i = 0; i < n; ++i) V[i * n + i] = 1.0;
  }
  if (n == 1) {
    evals[0] = a[0];
    return;
  }
  double scale = 0.0;
  for (int i = 0; i < n * n; ++i) scale = std::max(scale, std::fabs(a[i]));
  const double thresh = tol * std::max(scale, 1.0);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::fabs(a[p * n + q]));
    if (off <= thresh) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) <= thresh * 1e-3) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        if (V)
          for (int k = 0; k < n; ++k) {
            const double vkp = V[k * n + p], vkq = V[k * n + q];
            V[k * n + p] = c * vkp - s * vkq;
            V[k * n + q] = s * vkp + c * vkq;
          }
      }
  }
  for (int i = 0; i < n; ++i) evals[i] = a[i * n + i];
  // insertion sort ascending, permuting V columns along
  for (int i = 1; i < n; ++i)
    for (int j = i; j > 0 && evals[j - 1] > evals[j]; --j) {
      std::swap(evals[j - 1], evals[j]);
      if (V)
        for (int k = 0; k < n; ++k) std::swap(V[k * n + j - 1], V[k * n + j]);
    }
}

inline double sym_min_eigenvalue(int n, const double* a) {
  double ev[3];
  jacobi_eigen(n, a, ev);
  return ev[0];
}

inline double sym_max_eigenvalue(int n, const double* a) {
  double ev[3];
  jacobi_eigen(n, a, ev);
  return ev[n - 1];
}

}  // namespace hk
