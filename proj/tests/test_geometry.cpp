#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "hk/fixtures.hpp"

using namespace hk;

namespace {

nlohmann::json oracle_json() {
  static nlohmann::json doc = [] {
    std::ifstream in(std::string(HK_ASSETS_DIR) + "/oracle_values.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
  }();
  return doc;
}

double field_max_err(const Fixture& f, const std::string& key) {
  ScalarField num = evaluate_component(f, key);
  const auto& fn = f.oracle.at(key);
  std::vector<double> diff(num.v.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = num.v[i] - fn(num.grid.position(i));
  return max_abs(diff);
}

std::size_t node_at(const GridSpec& g, double x, double y = 0.0) {
  std::array<int, 3> c{};
  c[0] = static_cast<int>(std::lround(x * g.nodes_per_axis));
  if (g.dim > 1) c[1] = static_cast<int>(std::lround(y * g.nodes_per_axis));
  return g.flatten(c);
}

}  // namespace

TEST_CASE("grid and linalg basics") {
  CHECK_THROWS_AS(GridSpec(4, 16), BadParameter);
  CHECK_THROWS_AS(GridSpec(2, 48), BadParameter);
  GridSpec g(2, 16);
  CHECK(g.node_count() == 256);
  CHECK(g.shift(0, 0, -1) == g.flatten({15, 0, 0}));

  const double a[4] = {2.0, 1.0, 1.0, 2.0};
  double ev[2];
  jacobi_eigen(2, a, ev);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(spd_log_det(2, a) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  const double bad[4] = {1.0, 2.0, 2.0, 1.0};
  CHECK_THROWS_AS(spd_log_det(2, bad), NotPositiveDefinite);
}

TEST_CASE("F1 flat fixture: everything vanishes") {
  Fixture f = make_fixture("F1", 16);
  MetricField g = fixture_metric(f);
  CHECK(max_abs(beta_tensor(g).v) <= 1e-14);
  CHECK(max_abs(t_tensor(g).v) <= 1e-14);
  CHECK(max_abs(hessian_curvature(*f.hs).v) <= 1e-14);
  CHECK(min_eigen_gap(g.g, SymTensorField(g.grid())) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("beta = -2 kappa on every fixture") {
  for (const char* id : {"F1", "F3", "F4", "F5"}) {
    Fixture f = make_fixture(id, 32);
    MetricField g = fixture_metric(f);
    SymTensorField beta = beta_tensor(g);
    auto [alpha, kappa] = koszul_forms(g);
    double scale = std::max(1.0, max_abs(beta.v));
    for (std::size_t i = 0; i < beta.v.size(); ++i)
      CHECK(std::fabs(beta.v[i] + 2.0 * kappa.v[i]) <= 1e-12 * scale);
  }
  Fixture f2 = make_fixture("F2", 32);
  SymTensorField beta = beta_tensor(*f2.analytic);
  auto [alpha, kappa] = koszul_forms(*f2.analytic);
  for (std::size_t i = 0; i < beta.v.size(); ++i)
    CHECK(std::fabs(beta.v[i] + 2.0 * kappa.v[i]) <= 1e-12);
}

TEST_CASE("gamma full symmetry and Rhat antisymmetry") {
  Fixture f = make_fixture("F5", 32);
  Tensor3Field gam = lowered_gamma(*f.hs);
  const int n = 2;
  for (std::size_t idx = 0; idx < f.grid.node_count(); idx += 7)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          CHECK(gam.at(idx, i, j, k) == gam.at(idx, j, i, k));
          CHECK(gam.at(idx, i, j, k) == gam.at(idx, i, k, j));
        }

  Tensor4Field Q = hessian_curvature(*f.hs);
  Tensor4Field R = riemann_from_Q(Q);
  for (std::size_t idx = 0; idx < f.grid.node_count(); idx += 7)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            CHECK(R.at(idx, i, j, k, l) == -R.at(idx, j, i, k, l));

  // n = 1: Rhat vanishes identically
  Fixture f3 = make_fixture("F3", 32);
  Tensor4Field R1 = riemann_from_Q(hessian_curvature(*f3.hs));
  CHECK(max_abs(R1.v) == 0.0);
}

TEST_CASE("F2 analytic sampling of e^x") {
  Fixture f = make_fixture("F2", 64);
  auto doc = oracle_json();
  auto [alpha, kappa] = koszul_forms(*f.analytic);
  Tensor3Field gam = christoffel_gamma(*f.analytic);
  Tensor4Field Q = hessian_curvature(*f.analytic);
  for (std::size_t idx = 0; idx < f.grid.node_count(); ++idx) {
    CHECK(alpha.at(idx, 0) ==
          doctest::Approx(doc["f2"]["alpha1"].get<double>()).epsilon(1e-12));
    CHECK(gam.at(idx, 0, 0, 0) ==
          doctest::Approx(doc["f2"]["gamma111"].get<double>()).epsilon(1e-12));
  }
  CHECK(max_abs(Q.v) <= 1e-10);
  CHECK(max_abs(beta_tensor(*f.analytic).v) <= 1e-10);
}

TEST_CASE("F3 point oracles at N = 64") {
  Fixture f = make_fixture("F3", 64);
  auto doc = oracle_json()["f3"];
  const std::size_t origin = 0;
  const std::size_t quarter = node_at(f.grid, 0.25);
  const std::size_t half = node_at(f.grid, 0.5);

  MetricField g = fixture_metric(f);
  CHECK(g.g.at(origin, 0, 0) ==
        doctest::Approx(doc["g_at_0"].get<double>()).epsilon(2e-3));

  SymTensorField beta = beta_tensor(g);
  CHECK(std::fabs(beta.at(origin, 0, 0) - doc["beta11_at_0"].get<double>()) <=
        0.05);
  auto [alpha, kappa] = koszul_forms(g);
  CHECK(std::fabs(kappa.at(origin, 0, 0) - doc["kappa11_at_0"].get<double>()) <=
        0.025);
  CHECK(std::fabs(alpha.at(quarter, 0) - doc["alpha1_at_quarter"].get<double>()) <=
        0.01);

  Tensor3Field gl = lowered_gamma(*f.hs);
  CHECK(std::fabs(gl.at(quarter, 0, 0, 0) -
                  doc["gamma111_lower_at_quarter"].get<double>()) <= 0.02);
  Tensor3Field gc = christoffel_gamma(*f.hs);
  CHECK(std::fabs(gc.at(quarter, 0, 0, 0) -
                  doc["gamma111_at_quarter"].get<double>()) <= 0.02);

  Tensor4Field Q = hessian_curvature(*f.hs);
  CHECK(std::fabs(Q.at(origin, 0, 0, 0, 0) - doc["Q1111_at_0"].get<double>()) <=
        0.1);
  CHECK(std::fabs(Q.at(half, 0, 0, 0, 0) - doc["Q1111_at_half"].get<double>()) <=
        0.1);

  CHECK(max_inverse_spectral_radius(g) == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("F3 refinement orders in [1.9, 2.1]") {
  for (const char* key : {"beta_00", "kappa_00", "Q_0000", "gamma_000"}) {
    double prev = 0.0;
    for (int level = 0; level < 2; ++level) {
      Fixture f = make_fixture("F3", 64 << level);
      const double err = field_max_err(f, key);
      if (level == 1) {
        const double order = std::log2(prev / err);
        INFO(key, " coarse=", prev, " fine=", err, " order=", order);
        CHECK(order >= 1.9);
        CHECK(order <= 2.1);
      }
      prev = err;
    }
  }
}

TEST_CASE("F4 direct-metric oracles") {
  Fixture f = make_fixture("F4", 64);
  auto doc = oracle_json()["f4"];
  CHECK(field_max_err(f, "T_010") <= 0.01);
  CHECK(field_max_err(f, "beta_11") <= 0.02);
  CHECK(field_max_err(f, "beta_00") <= 1e-10);
  CHECK(field_max_err(f, "beta_01") <= 1e-10);

  MetricField g = fixture_metric(f);
  Tensor3Field T = t_tensor(g);
  CHECK(std::fabs(T.at(0, 0, 1, 0) - doc["T121_at_0"].get<double>()) <= 0.01);
  SymTensorField beta = beta_tensor(g);
  CHECK(std::fabs(beta.at(0, 1, 1) - doc["beta22_at_0"].get<double>()) <= 0.02);
  // non-Hessian discriminator
  CHECK(max_abs(T.v) > 0.1);
}

TEST_CASE("F5 two-dimensional Hessian fixture") {
  Fixture f = make_fixture("F5", 64);
  auto doc = oracle_json()["f5"];
  CHECK(field_max_err(f, "g_00") <= 0.02);
  CHECK(field_max_err(f, "g_01") <= 0.02);
  CHECK(field_max_err(f, "g_11") <= 0.02);
  // max|beta| ~ 268 on F5; 3-4% absolute error is the honest h^2 floor here
  CHECK(field_max_err(f, "beta_00") <= 10.0);
  CHECK(field_max_err(f, "beta_11") <= 10.0);
  CHECK(field_max_err(f, "Q_0101") <= 0.25);
  CHECK(field_max_err(f, "Rhat_0101") <= 0.5);

  MetricField g = fixture_metric(f);
  const std::size_t probe = node_at(f.grid, 0.25, 0.125);
  Tensor4Field R = riemann_from_Q(hessian_curvature(*f.hs));
  CHECK(std::fabs(R.at(probe, 0, 1, 0, 1) -
                  doc["Rhat1212_at_quarter_eighth"].get<double>()) <= 0.5);

  std::vector<double> mins(f.grid.node_count());
  double m[9];
  for (std::size_t idx = 0; idx < mins.size(); ++idx) {
    g.g.full(idx, m);
    mins[idx] = sym_min_eigenvalue(2, m);
  }
  CHECK(pairwise_min(mins) ==
        doctest::Approx(doc["min_metric_eigenvalue"].get<double>())
            .epsilon(2e-2));

  // Hessian fixture: T-tensor at discretization floor, refining at order 2
  const double t64 = max_abs(t_tensor(g).v);
  Fixture f128 = make_fixture("F5", 128);
  const double t128 = max_abs(t_tensor(fixture_metric(f128)).v);
  const double order = std::log2(t64 / t128);
  INFO("T dev: ", t64, " -> ", t128, " order=", order);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("F5 refinement orders for beta and Q") {
  for (const char* key : {"beta_00", "Q_0101"}) {
    Fixture fc = make_fixture("F5", 64);
    Fixture ff = make_fixture("F5", 128);
    const double ec = field_max_err(fc, key);
    const double ef = field_max_err(ff, key);
    const double order = std::log2(ec / ef);
    INFO(key, " coarse=", ec, " fine=", ef, " order=", order);
    CHECK(order >= 1.9);
    CHECK(order <= 2.1);
  }
}
