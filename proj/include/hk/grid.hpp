#pragma once

// Uniform periodic grids (1 <= dim <= 3) and per-node field containers.
// Node ordering is row-major with axis 0 slowest; all index arithmetic
// wraps modulo N on every axis.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hk/errors.hpp"

namespace hk {

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

struct GridSpec {
  int dim = 1;
  int nodes_per_axis = 16;
  double length = 1.0;

  GridSpec() = default;
  GridSpec(int dim_, int nodes_, double length_ = 1.0)
      : dim(dim_), nodes_per_axis(nodes_), length(length_) {
    validate();
  }

  void validate() const {
    if (dim < 1 || dim > 3) throw BadParameter("GridSpec: dim must be in [1,3]");
    if (nodes_per_axis < 16 || !is_power_of_two(nodes_per_axis))
      throw BadParameter("GridSpec: nodes_per_axis must be a power of two >= 16");
    if (!(length > 0.0)) throw BadParameter("GridSpec: period must be positive");
  }

  double spacing() const { return length / nodes_per_axis; }

  std::size_t node_count() const {
    std::size_t c = 1;
    for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(nodes_per_axis);
    return c;
  }

  std::array<int, 3> coords(std::size_t idx) const {
    std::array<int, 3> x{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = static_cast<int>(idx % nodes_per_axis);
      idx /= nodes_per_axis;
    }
    return x;
  }

  std::size_t flatten(const std::array<int, 3>& x) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a)
      idx = idx * nodes_per_axis + static_cast<std::size_t>(x[a]);
    return idx;
  }

  // Index of the node shifted by `offset` cells along `axis`, wrapped.
  std::size_t shift(std::size_t idx, int axis, int offset) const {
    auto x = coords(idx);
    int v = (x[axis] + offset) % nodes_per_axis;
    if (v < 0) v += nodes_per_axis;
    x[axis] = v;
    return flatten(x);
  }

  // Physical coordinate of a node.
  std::array<double, 3> position(std::size_t idx) const {
    auto x = coords(idx);
    return {x[0] * spacing(), x[1] * spacing(), x[2] * spacing()};
  }

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && nodes_per_axis == o.nodes_per_axis && length == o.length;
  }
};

inline int sym_component_count(int n) { return n * (n + 1) / 2; }

// Upper-triangle packing for symmetric n x n values, i <= j.
inline int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

namespace detail {
template <class T>
void check_grid_match(const T& a, const T& b, const char* op) {
  if (!(a.grid == b.grid)) throw BadParameter(std::string(op) + ": grid mismatch");
}
}  // namespace detail

struct ScalarField {
  GridSpec grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0)
      : grid(g), v(g.node_count(), fill) {}

  double& operator[](std::size_t idx) { return v[idx]; }
  double operator[](std::size_t idx) const { return v[idx]; }
  std::size_t size() const { return v.size(); }
};

struct VectorField {
  GridSpec grid;
  std::vector<double> v;

  VectorField() = default;
  explicit VectorField(const GridSpec& g)
      : grid(g), v(g.node_count() * g.dim, 0.0) {}

  double& at(std::size_t idx, int i) { return v[idx * grid.dim + i]; }
  double at(std::size_t idx, int i) const { return v[idx * grid.dim + i]; }
};

struct SymTensorField {
  GridSpec grid;
  int m = 0;  // components per node
  std::vector<double> v;

  SymTensorField() = default;
  explicit SymTensorField(const GridSpec& g)
      : grid(g), m(sym_component_count(g.dim)), v(g.node_count() * m, 0.0) {}

  double& at(std::size_t idx, int i, int j) {
    return v[idx * m + sym_index(grid.dim, i, j)];
  }
  double at(std::size_t idx, int i, int j) const {
    return v[idx * m + sym_index(grid.dim, i, j)];
  }
  double& comp(std::size_t idx, int c) { return v[idx * m + c]; }
  double comp(std::size_t idx, int c) const { return v[idx * m + c]; }

  // Full matrix at a node, row-major n x n.
  void full(std::size_t idx, double* a) const {
    const int n = grid.dim;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[i * n + j] = at(idx, i, j);
  }
};

struct Tensor3Field {
  GridSpec grid;
  int m = 0;
  std::vector<double> v;

  Tensor3Field() = default;
  explicit Tensor3Field(const GridSpec& g)
      : grid(g), m(g.dim * g.dim * g.dim), v(g.node_count() * m, 0.0) {}

  double& at(std::size_t idx, int i, int j, int k) {
    const int n = grid.dim;
    return v[idx * m + (i * n + j) * n + k];
  }
  double at(std::size_t idx, int i, int j, int k) const {
    const int n = grid.dim;
    return v[idx * m + (i * n + j) * n + k];
  }
};

struct Tensor4Field {
  GridSpec grid;
  int m = 0;
  std::vector<double> v;

  Tensor4Field() = default;
  explicit Tensor4Field(const GridSpec& g)
      : grid(g), m(g.dim * g.dim * g.dim * g.dim), v(g.node_count() * m, 0.0) {}

  double& at(std::size_t idx, int i, int j, int k, int l) {
    const int n = grid.dim;
    return v[idx * m + ((i * n + j) * n + k) * n + l];
  }
  double at(std::size_t idx, int i, int j, int k, int l) const {
    const int n = grid.dim;
    return v[idx * m + ((i * n + j) * n + k) * n + l];
  }
};

// Fixed-shape pairwise tree reductions over the canonical ordering.
// The reduction shape depends only on the length, so results are
// bit-reproducible no matter how the values were produced.
namespace detail {
template <class Op>
double pairwise_reduce(std::span<const double> a, Op op) {
  if (a.size() == 1) return a[0];
  if (a.size() <= 8) {
    double r = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) r = op(r, a[i]);
    return r;
  }
  const std::size_t half = a.size() / 2;
  return op(pairwise_reduce(a.first(half), op),
            pairwise_reduce(a.subspan(half), op));
}
}  // namespace detail

inline double pairwise_sum(std::span<const double> a) {
  if (a.empty()) return 0.0;
  return detail::pairwise_reduce(a, [](double x, double y) { return x + y; });
}

inline double pairwise_max(std::span<const double> a) {
  if (a.empty()) throw BadParameter("pairwise_max: empty range");
  return detail::pairwise_reduce(a, [](double x, double y) { return x > y ? x : y; });
}

inline double pairwise_min(std::span<const double> a) {
  if (a.empty()) throw BadParameter("pairwise_min: empty range");
  return detail::pairwise_reduce(a, [](double x, double y) { return x < y ? x : y; });
}

inline double max_abs(std::span<const double> a) {
  if (a.empty()) return 0.0;
  std::vector<double> tmp(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) tmp[i] = std::fabs(a[i]);
  return pairwise_max(tmp);
}

template <class F>
bool all_finite(const F& field) {
  for (double x : field.v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace hk
