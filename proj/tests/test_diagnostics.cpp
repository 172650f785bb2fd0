#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "hk/diagnostics.hpp"
#include "hk/fixtures.hpp"

using namespace hk;

namespace {

nlohmann::json oracle_json() {
  std::ifstream in(std::string(HK_ASSETS_DIR) + "/oracle_values.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

FlowRefs refs_for(const std::string& id, int n) {
  Fixture f = make_fixture(id, n);
  if (f.hs) return make_flow_refs(*f.hs);
  return make_flow_refs(fixture_metric(f));
}

Trajectory run(const FlowRefs& refs, Scheme scheme, double dt, double t_end,
               double c_dt = 0.5, int stride = 1, bool normalized = false) {
  FlowConfig cfg;
  cfg.scheme = scheme;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.c_dt = c_dt;
  cfg.stride = stride;
  cfg.normalized = normalized;
  Trajectory t = run_flow(refs, cfg);
  REQUIRE(!t.failure.failed);
  return t;
}

}  // namespace

TEST_CASE("psi_lambda substitution values on F1") {
  GridSpec grid(2, 16);
  ScalarField zero(grid);
  auto [psi, lam] = psi_lambda(grid, 0.5, zero, zero, 1.0);
  for (double v : psi.v) CHECK(v == doctest::Approx(-1.0).epsilon(1e-14));
  auto [psi2, lam2] = psi_lambda(grid, 0.25, zero, zero, 1.0);
  for (double v : lam2.v) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
  auto [psi0, lam0] = psi_lambda(grid, 0.0, zero, zero, 1.0);
  CHECK(max_abs(psi0.v) == 0.0);
}

TEST_CASE("evolution identity residuals") {
  FlowRefs f1 = refs_for("F1", 16);
  Trajectory t1 = run(f1, Scheme::scalar, 5e-4, 5e-3);
  for (const auto& r : evolution_residuals(t1, f1, 5e-3)) {
    CHECK(r[0] <= 1e-10);
    CHECK(r[1] <= 1e-10);
  }

  FlowRefs f3 = refs_for("F3", 64);
  Trajectory t3 = run(f3, Scheme::scalar, 1e-4, 0.01);
  auto res = evolution_residuals(t3, f3, 0.01);
  for (const auto& r : res) {
    CHECK(r[0] <= 1e-3);
    CHECK(r[1] <= 1e-3);
  }

  Trajectory single;
  single.grid = t3.grid;
  single.snapshots.push_back(t3.snapshots.front());
  CHECK_THROWS_AS(evolution_residuals(single, f3, 0.01), InsufficientSnapshots);
}

TEST_CASE("residual order under simultaneous refinement") {
  FlowRefs coarse = refs_for("F3", 32);
  FlowRefs fine = refs_for("F3", 64);
  Trajectory tc = run(coarse, Scheme::scalar, 4e-4, 0.01);
  Trajectory tf = run(fine, Scheme::scalar, 1e-4, 0.01);
  const double rc = evolution_residuals(tc, coarse, 0.01).back()[0];
  const double rf = evolution_residuals(tf, fine, 0.01).back()[0];
  const double order = std::log2(rc / rf);
  INFO("r_psi ", rc, " -> ", rf, " order=", order);
  CHECK(order >= 1.9);
}

TEST_CASE("measure_K") {
  Fixture f1 = make_fixture("F1", 16);
  CHECK(measure_K(fixture_metric(f1)) == 0.0);
  Fixture f3 = make_fixture("F3", 64);
  const double tau = 2.0 * std::acos(-1.0);
  CHECK(measure_K(fixture_metric(f3)) ==
        doctest::Approx(tau * tau).epsilon(0.01));
}

TEST_CASE("barrier checks hold on Hessian runs") {
  FlowRefs f3 = refs_for("F3", 64);
  Trajectory t3 = run(f3, Scheme::scalar, 1e-4, 0.05, 0.5, 50);
  const double K = measure_K(make_metric(f3.g0, f3.eps_pos));
  for (const BarrierRow& row : barrier_checks(t3, f3, K)) {
    CHECK(row.mp_ok);
    CHECK(row.phi_ok);
    CHECK(row.upsilon_ok);
  }

  FlowRefs f1 = refs_for("F1", 16);
  Trajectory t1 = run(f1, Scheme::scalar, 5e-4, 0.01);
  for (const BarrierRow& row : barrier_checks(t1, f1, 0.0)) {
    CHECK(row.mp_ok);
    CHECK(row.phi_ok);
    CHECK(row.upsilon_ok);
  }
}

TEST_CASE("T-tensor conservation series") {
  FlowRefs f1 = refs_for("F1", 16);
  Trajectory t1 = run(f1, Scheme::tensor, 5e-4, 5e-3);
  for (double d : t_conservation(t1)) CHECK(d <= 1e-14);

  FlowRefs f4 = refs_for("F4", 64);
  Trajectory t4 = run(f4, Scheme::tensor, 1e-4, 0.01, 0.5, 20);
  auto series = t_conservation(t4);
  CHECK(series.front() == 0.0);
  CHECK(series.back() <= 1e-4);

  FlowRefs f3 = refs_for("F3", 64);
  Trajectory t3 = run(f3, Scheme::tensor, 1e-4, 0.01, 0.5, 20);
  MetricField g0 = make_metric(f3.g0, f3.eps_pos);
  const double t_init = max_abs(t_tensor(g0).v);
  Tensor3Field t_last = t_tensor(t3.snapshots.back().g);
  CHECK(max_abs(t_last.v) <= 3.0 * std::max(t_init, 1e-14));
}

TEST_CASE("beta eigenvalues at probes") {
  auto doc = oracle_json();
  Fixture f1 = make_fixture("F1", 16);
  MetricField g1 = fixture_metric(f1);
  for (double ev : beta_eigenvalues(g1, beta_tensor(g1), 0))
    CHECK(std::fabs(ev) <= 1e-12);

  Fixture f3 = make_fixture("F3", 64);
  MetricField g3 = fixture_metric(f3);
  auto ev3 = beta_eigenvalues(g3, beta_tensor(g3), 0);
  REQUIRE(ev3.size() == 1);
  CHECK(std::fabs(ev3[0] - doc["f3"]["lambda1_at_0"].get<double>()) <= 0.02);

  Fixture f4 = make_fixture("F4", 64);
  MetricField g4 = fixture_metric(f4);
  auto ev4 = beta_eigenvalues(g4, beta_tensor(g4), 0);
  REQUIRE(ev4.size() == 2);
  CHECK(std::fabs(ev4[0] - doc["f4"]["lambda1_at_0"].get<double>()) <= 0.01);
  CHECK(std::fabs(ev4[1]) <= 0.01);
}

TEST_CASE("decay rate on F1 is exactly -1") {
  FlowRefs f1 = refs_for("F1", 16);
  Trajectory t1 = run(f1, Scheme::tensor, 5e-4, 0.1, 0.5, 20, true);
  DecaySeries ds = decay_rate(t1, {1.0, 0.0, 0.0}, 0);
  for (double v : ds.value) CHECK(std::fabs(v + 1.0) <= 1e-10);
  CHECK(std::fabs(ds.limit_estimate + 1.0) <= 1e-9);
  CHECK_THROWS_AS(decay_rate(t1, {0.0, 0.0, 0.0}, 0), ZeroVector);
}

TEST_CASE("decay rate series on F3 is finite") {
  FlowRefs f3 = refs_for("F3", 64);
  Trajectory t3 = run(f3, Scheme::tensor, 1e-4, 0.05, 0.5, 100, true);
  DecaySeries ds = decay_rate(t3, {1.0, 0.0, 0.0}, 0);
  CHECK(!ds.value.empty());
  for (double v : ds.value) CHECK(std::isfinite(v));
  CHECK(std::isfinite(ds.limit_estimate));
}

TEST_CASE("full report: monotone, finite, probe count") {
  FlowRefs f3 = refs_for("F3", 64);
  Trajectory t3 = run(f3, Scheme::scalar, 1e-4, 0.01, 0.5, 25);
  ProbeSet probes = ProbeSet::defaults(t3.grid, 7);
  REQUIRE(probes.nodes.size() == 4);
  DiagnosticsReport rep = diagnose(t3, f3, probes, 0.01);
  REQUIRE(!rep.rows.empty());
  double prev = -1.0;
  for (const DiagnosticsRow& r : rep.rows) {
    CHECK(r.t > prev);
    prev = r.t;
    for (double v : {r.sup_psi, r.sup_lambda, r.inf_lambda, r.r_psi,
                     r.r_lambda, r.max_t_dev, r.sup_upsilon, r.sup_theta,
                     r.min_eig_g, r.min_gap_beta})
      CHECK(std::isfinite(v));
    CHECK(r.probe_eigs.size() == probes.nodes.size());
    CHECK(r.min_eig_g > 0.9);
    CHECK(r.sup_psi <= 1e-6);
  }
  // same seed, same probes
  ProbeSet again = ProbeSet::defaults(t3.grid, 7);
  CHECK(again.nodes == probes.nodes);
}
