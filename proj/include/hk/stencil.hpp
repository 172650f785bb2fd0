#pragma once

// Second-order central differences on periodic grids.
//
// diff1      : (f(x+h) - f(x-h)) / 2h
// hess_comp  : compact 3-point stencil on the diagonal, 4-point cross
//              stencil off the diagonal
//
// Higher derivatives are built by composing these passes; see geometry.cpp.

#include "hk/grid.hpp"

namespace hk {

inline ScalarField diff1(const ScalarField& f, int axis) {
  ScalarField out(f.grid);
  const double inv2h = 1.0 / (2.0 * f.grid.spacing());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const std::size_t p = f.grid.shift(idx, axis, +1);
    const std::size_t m = f.grid.shift(idx, axis, -1);
    out[idx] = (f[p] - f[m]) * inv2h;
  }
  return out;
}

inline ScalarField diff2_axis(const ScalarField& f, int axis) {
  ScalarField out(f.grid);
  const double h = f.grid.spacing();
  const double invh2 = 1.0 / (h * h);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const std::size_t p = f.grid.shift(idx, axis, +1);
    const std::size_t m = f.grid.shift(idx, axis, -1);
    out[idx] = (f[p] - 2.0 * f[idx] + f[m]) * invh2;
  }
  return out;
}

inline ScalarField cross_diff(const ScalarField& f, int a, int b) {
  ScalarField out(f.grid);
  const double h = f.grid.spacing();
  const double inv4h2 = 1.0 / (4.0 * h * h);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const std::size_t pp = f.grid.shift(f.grid.shift(idx, a, +1), b, +1);
    const std::size_t pm = f.grid.shift(f.grid.shift(idx, a, +1), b, -1);
    const std::size_t mp = f.grid.shift(f.grid.shift(idx, a, -1), b, +1);
    const std::size_t mm = f.grid.shift(f.grid.shift(idx, a, -1), b, -1);
    out[idx] = (f[pp] - f[pm] - f[mp] + f[mm]) * inv4h2;
  }
  return out;
}

inline ScalarField hess_comp(const ScalarField& f, int a, int b) {
  return a == b ? diff2_axis(f, a) : cross_diff(f, a, b);
}

// Full discrete Hessian D_i D_j f, symmetric by stencil symmetry.
inline SymTensorField hessian(const ScalarField& f) {
  SymTensorField out(f.grid);
  const int n = f.grid.dim;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField c = hess_comp(f, i, j);
      for (std::size_t idx = 0; idx < f.size(); ++idx) out.at(idx, i, j) = c[idx];
    }
  return out;
}

// Component of a symmetric tensor field as a standalone scalar lattice.
inline ScalarField component(const SymTensorField& t, int i, int j) {
  ScalarField out(t.grid);
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = t.at(idx, i, j);
  return out;
}

}  // namespace hk
