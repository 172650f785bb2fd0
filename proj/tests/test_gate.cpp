#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "hk/fixtures.hpp"
#include "hk/gate.hpp"

using namespace hk;

namespace {

nlohmann::json oracle_json() {
  std::ifstream in(std::string(HK_ASSETS_DIR) + "/oracle_values.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("cutoff profile construction") {
  CHECK_THROWS_AS(build_cutoff(0.2), BadParameter);
  CHECK_THROWS_AS(build_cutoff(0.125), BadParameter);
  CHECK_THROWS_AS(build_cutoff(0.0), BadParameter);

  CutoffProfile p = build_cutoff(0.1);
  auto doc = oracle_json();
  CHECK(p.f_eval(0.95) ==
        doctest::Approx(doc["misc"]["cutoff_f_at_0p95_k0p1"].get<double>())
            .epsilon(1e-12));
  // FF = 0 up to 1 - kappa + kappa^2 = 0.91
  CHECK(std::fabs(p.F_eval(0.91)) <= 1e-12);
  CHECK(std::fabs(p.F_eval(0.5)) == 0.0);
  CHECK(p.F_eval(0.99) > 0.0);
  // tabulation is nondecreasing
  for (std::size_t i = 1; i < p.F.size(); ++i) CHECK(p.F[i] >= p.F[i - 1]);
  // tabulated quadrature agrees with the analytic evaluator
  CHECK(std::fabs(p.F.back() - p.F_eval(p.s.back())) <= 1e-9);
}

TEST_CASE("cutoff property report") {
  for (double kappa : {0.05, 0.1}) {
    CutoffProfile p = build_cutoff(kappa);
    CutoffReport rep = cutoff_property_check(p, 3);
    CHECK(rep.support_ok);
    CHECK(rep.sign_ok);
    CHECK(rep.ramp_ok);
    CHECK(rep.flat_max_abs <= 1e-12);
    CHECK(rep.fprime_min >= -1e-12);
    CHECK(rep.psi_prime_max <= rep.psi_prime_bound + 1e-8);
    REQUIRE(rep.k_sup.size() == 3);
    for (double v : rep.k_sup) CHECK(std::isfinite(v));
    CHECK(rep.c3 > 0.0);
    CHECK(rep.c2 <= 1.0 + 1e-12);
  }
  CutoffProfile p = build_cutoff(0.1);
  CHECK_THROWS_AS(cutoff_property_check(p, 4), BadParameter);
}

TEST_CASE("sb_estimate on F1 is unbounded") {
  Fixture f = make_fixture("F1", 16);
  MetricField g = fixture_metric(f);
  GateResult res = sb_estimate(g, ScalarField(g.grid()), 0.5);
  CHECK(res.unbounded);
  CHECK(res.s_max >= 1e6);
  CHECK_THROWS_AS(sb_estimate(g, ScalarField(g.grid()), 1.5), BadParameter);
  CHECK_THROWS_AS(sb_estimate(g, ScalarField(g.grid()), 0.0), BadParameter);
}

TEST_CASE("sb_estimate matches the F3 closed form") {
  Fixture f = make_fixture("F3", 64);
  MetricField g = fixture_metric(f);
  ScalarField u0(g.grid());
  const double sb_factor = oracle_json()["f3"]["sb_factor"].get<double>();

  GateResult lo = sb_estimate(g, u0, 1e-6);
  CHECK(!lo.unbounded);
  CHECK(std::fabs(lo.s_max - (1.0 - 1e-6) * sb_factor) <= 1e-3);
  CHECK(pairwise_min(lo.margin.v) >= 0.0);

  GateResult hi = sb_estimate(g, u0, 0.5);
  CHECK(std::fabs(hi.s_max - 0.5 * sb_factor) <= 1e-3);

  // monotone in theta
  CHECK(hi.s_max <= lo.s_max + 1e-12);

  // bracket property from the bisection trace
  bool saw_infeasible = false;
  for (const auto& [s, ok] : lo.trace) {
    if (!ok) saw_infeasible = true;
    if (ok) CHECK(s <= lo.s_max + 1e-4 + 1e-12);
  }
  CHECK(saw_infeasible);
}

TEST_CASE("conformal exhaustion") {
  Fixture f = make_fixture("F1", 16);
  MetricField g = fixture_metric(f);
  ScalarField rho(g.grid());
  for (std::size_t i = 0; i < rho.v.size(); ++i) {
    const auto p = g.grid().position(i);
    const double dx = p[0] - 0.5, dy = p[1] - 0.5;
    rho.v[i] = std::exp(-(dx * dx + dy * dy) / 0.02);
  }

  // rho/rho0 below the cutoff support: h0 == g0 exactly
  auto [h_far, rep_far] = conformal_exhaust(g, rho, 100.0, 0.1);
  CHECK(h_far.g.v == g.g.v);

  CHECK_THROWS_AS(conformal_exhaust(g, rho, 1.0, 0.1), BadParameter);
  CHECK_THROWS_AS(conformal_exhaust(g, rho, 10.0, 0.5), BadParameter);

  // doubling rho0 deflates the derivative sups toward g0's (= 0 for F1)
  double prev = -1.0;
  bool monotone = true;
  for (double rho0 : {1.02, 2.04, 4.08}) {
    auto [h0, rep] = conformal_exhaust(g, rho, rho0, 0.1);
    CHECK(rep.sup_d_g0 == 0.0);
    if (prev >= 0.0 && rep.sup_d_h0 > prev + 1e-12) monotone = false;
    prev = rep.sup_d_h0;
  }
  CHECK(monotone);

  ScalarField neg(g.grid());
  neg.v[0] = -1.0;
  CHECK_THROWS_AS(conformal_exhaust(g, neg, 10.0, 0.1), BadParameter);
}
