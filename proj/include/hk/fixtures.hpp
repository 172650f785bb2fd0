#pragma once

// Built-in fixture library F1..F5.
//
//   F1: n=2, G0 = I, phi = 0 (flat)
//   F2: n=1, analytic sampling of g = e^x on a non-periodic chart
//   F3: n=1, G0 = [2], phi = -cos(2 pi x)/(2 pi)^2  => g = 2 + cos(2 pi x)
//   F4: n=2, direct non-Hessian metric g00 = 2 + 0.3 sin(2 pi y), g11 = 2
//   F5: n=2, G0 = 3I, phi = [cos(2 pi x) + cos(2 pi (x+y))]/(2 pi)^2
//
// Each fixture ships closed-form component evaluators for the quantities it
// can be checked against; the frozen point values in the test assets are
// regenerated from the same formulas by tests/assets/gen_oracles.py.

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "hk/geometry.hpp"

namespace hk {

using PointFn = std::function<double(const std::array<double, 3>&)>;

struct Fixture {
  std::string id;
  GridSpec grid;
  bool hessian = true;
  std::optional<HessianStructure> hs;
  std::optional<MetricField> metric;        // direct-metric fixtures
  std::optional<AnalyticGeometry> analytic; // analytic sampling mode
  // closed-form component evaluators, keyed e.g. "beta_00", "Q_0101",
  // "gamma_lower_000", "alpha_0", "T_010", "g_00"
  std::map<std::string, PointFn> oracle;
};

Fixture make_fixture(const std::string& id, int nodes_per_axis = 64);

// The metric a fixture puts under the flow / gate.
MetricField fixture_metric(const Fixture& f);

// Component of a named quantity evaluated numerically on the fixture's grid.
// Understands the same keys as Fixture::oracle.
ScalarField evaluate_component(const Fixture& f, const std::string& key);

}  // namespace hk
