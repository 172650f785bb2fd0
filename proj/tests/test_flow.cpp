#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hk/fixtures.hpp"
#include "hk/flow.hpp"

using namespace hk;

namespace {

double max_dev(const SymTensorField& a, const SymTensorField& b) {
  std::vector<double> d(a.v.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.v[i] - b.v[i];
  return max_abs(d);
}

FlowRefs refs_for(const std::string& id, int n) {
  Fixture f = make_fixture(id, n);
  if (f.hs) return make_flow_refs(*f.hs);
  return make_flow_refs(fixture_metric(f));
}

}  // namespace

TEST_CASE("ma_rhs: stationary cases and the F3 bump") {
  FlowRefs f1 = refs_for("F1", 16);
  ScalarField zero(f1.grid);
  CHECK(max_abs(ma_rhs(f1, 0.0, zero).v) <= 1e-14);
  CHECK(max_abs(ma_rhs(f1, 0.3, zero).v) <= 1e-14);

  FlowRefs f3 = refs_for("F3", 64);
  ScalarField bump(f3.grid);
  const double tau = 2.0 * std::acos(-1.0);
  for (std::size_t i = 0; i < bump.v.size(); ++i)
    bump.v[i] = -0.1 * std::cos(tau * f3.grid.position(i)[0]) / (tau * tau);
  ScalarField rhs = ma_rhs(f3, 0.0, bump);
  CHECK(std::fabs(rhs[0] - std::log(3.1 / 3.0)) <= 1e-3);

  // a bump deep enough to leave the cone
  for (double& v : bump.v) v *= 50.0;
  CHECK_THROWS_AS(ma_rhs(f3, 0.0, bump), NotPositiveDefinite);
}

TEST_CASE("step guard") {
  Fixture f = make_fixture("F3", 64);
  MetricField g = fixture_metric(f);
  CHECK_THROWS_AS(step_tensor(g, 1e-3, 0.2), StepTooLarge);
  FlowRefs refs = make_flow_refs(*f.hs);
  FlowState s = initial_state(refs);
  CHECK_THROWS_AS(step_scalar(refs, s, 1e-3, 0.2), StepTooLarge);
  // dt = 0 is an identity step for the normalized scheme too
  MetricField g2 = normalized_step(g, 0.0, 0.2);
  CHECK(max_dev(g.g, g2.g) == 0.0);
}

TEST_CASE("F1 stays exactly flat under the scalar scheme") {
  FlowRefs refs = refs_for("F1", 16);
  FlowConfig cfg;
  cfg.scheme = Scheme::scalar;
  cfg.dt = 5e-4;
  cfg.t_end = 0.01;
  Trajectory traj = run_flow(refs, cfg);
  CHECK(!traj.failure.failed);
  CHECK(max_abs(traj.snapshots.back().phi.v) <= 1e-14);
  CHECK(max_dev(traj.snapshots.back().g, refs.g0) <= 1e-14);
}

TEST_CASE("cross-scheme equivalence on F3") {
  FlowRefs refs = refs_for("F3", 64);
  FlowConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.01;
  cfg.c_dt = 0.5;
  cfg.stride = 10;

  cfg.scheme = Scheme::scalar;
  Trajectory ts = run_flow(refs, cfg);
  cfg.scheme = Scheme::tensor;
  Trajectory tt = run_flow(refs, cfg);
  REQUIRE(!ts.failure.failed);
  REQUIRE(!tt.failure.failed);
  REQUIRE(ts.snapshots.size() == tt.snapshots.size());
  for (std::size_t k = 0; k < ts.snapshots.size(); ++k)
    CHECK(max_dev(ts.snapshots[k].g, tt.snapshots[k].g) <= 1e-6);

  // scalar-scheme decomposition invariant: g rebuilt from phi matches by
  // construction; check the stored state is consistent
  const Snapshot& last = ts.snapshots.back();
  SymTensorField hp = hessian(last.phi);
  std::vector<double> d(hp.v.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = last.g.v[i] -
           (refs.g0.v[i] - last.t * refs.beta0.v[i] + hp.v[i]);
  CHECK(max_abs(d) <= 1e-12);
}

TEST_CASE("potential reconstruction from a tensor trajectory") {
  FlowRefs refs = refs_for("F3", 64);
  FlowConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.01;
  cfg.c_dt = 0.5;
  cfg.stride = 1;

  cfg.scheme = Scheme::tensor;
  Trajectory tt = run_flow(refs, cfg);
  cfg.scheme = Scheme::scalar;
  Trajectory ts = run_flow(refs, cfg);
  auto rec = potential_from_trajectory(tt);
  REQUIRE(rec.size() == tt.snapshots.size());
  std::vector<double> d(rec.back().v.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = rec.back().v[i] - ts.snapshots.back().phi.v[i];
  CHECK(max_abs(d) <= 1e-6);

  // single snapshot: empty integral
  Trajectory single;
  single.grid = refs.grid;
  single.snapshots.push_back(tt.snapshots.front());
  CHECK(max_abs(potential_from_trajectory(single).back().v) == 0.0);
}

TEST_CASE("F4 tensor step moves g22 by -dt beta22") {
  Fixture f = make_fixture("F4", 64);
  MetricField g = fixture_metric(f);
  const double dt = 1e-4;
  MetricField g1 = step_tensor(g, dt, 0.5);
  const double beta22 = beta_tensor(g).at(0, 1, 1);
  const double change = g1.g.at(0, 1, 1) - g.g.at(0, 1, 1);
  CHECK(change == doctest::Approx(-dt * beta22).epsilon(1e-4));
  CHECK(change < 0.0);
  CHECK(std::fabs(change + dt * 0.8883) <= 3e-6);
}

TEST_CASE("time order: dt halving against a dt/4 reference") {
  FlowRefs refs = refs_for("F3", 16);
  const double t_end = 0.016;
  const auto run_dt = [&](double dt) {
    FlowConfig cfg;
    cfg.scheme = Scheme::tensor;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.c_dt = 0.5;
    cfg.stride = 1 << 20;
    Trajectory t = run_flow(refs, cfg);
    REQUIRE(!t.failure.failed);
    return t.snapshots.back().g;
  };
  SymTensorField ref = run_dt(2e-4);
  const double e1 = max_dev(run_dt(8e-4), ref);
  const double e2 = max_dev(run_dt(4e-4), ref);
  const double ratio = e1 / e2;
  INFO("defect ratio ", ratio);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("normalized flow on F1 is pure exponential decay") {
  FlowRefs refs = refs_for("F1", 16);
  FlowConfig cfg;
  cfg.scheme = Scheme::tensor;
  cfg.normalized = true;
  cfg.dt = 5e-4;
  cfg.t_end = 0.1;
  Trajectory traj = run_flow(refs, cfg);
  REQUIRE(!traj.failure.failed);
  CHECK(traj.snapshots.back().g.at(0, 0, 0) ==
        doctest::Approx(std::exp(-0.1)).epsilon(1e-8));
}

TEST_CASE("rescale consistency on F3 (Eq. 6.8)") {
  FlowRefs refs = refs_for("F3", 64);
  const double t = 0.05;
  FlowConfig cfg;
  cfg.scheme = Scheme::tensor;
  cfg.normalized = true;
  cfg.dt = 1e-4;
  cfg.t_end = t;
  cfg.c_dt = 0.5;
  cfg.stride = 1 << 20;
  Trajectory norm = run_flow(refs, cfg);
  REQUIRE(!norm.failure.failed);

  const double s_end = std::exp(t) - 1.0;
  cfg.normalized = false;
  cfg.t_end = s_end;
  cfg.dt = s_end / 512.0;
  Trajectory plain = run_flow(refs, cfg);
  REQUIRE(!plain.failure.failed);

  SymTensorField expect = plain.snapshots.back().g;
  for (double& v : expect.v) v *= std::exp(-t);
  CHECK(max_dev(norm.snapshots.back().g, expect) <= 1e-5);
}

TEST_CASE("run_flow failure leaves a partial trajectory") {
  FlowRefs refs = refs_for("F3", 64);
  FlowConfig cfg;
  cfg.scheme = Scheme::tensor;
  cfg.dt = 0.05;
  cfg.t_end = 1.0;
  Trajectory traj = run_flow(refs, cfg);
  CHECK(traj.failure.failed);
  CHECK(traj.failure.reason.find("parabolic") != std::string::npos);
  CHECK(traj.snapshots.size() == 1);

  FlowConfig bad;
  bad.dt = -1.0;
  CHECK_THROWS_AS(bad.validate(), BadParameter);
  bad.dt = 1e-4;
  bad.normalized = true;
  bad.scheme = Scheme::scalar;
  CHECK_THROWS_AS(bad.validate(), BadParameter);
}
