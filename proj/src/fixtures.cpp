#include "hk/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace hk {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;  // 2 pi

ScalarField sample(const GridSpec& grid, const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    auto p = grid.position(idx);
    out[idx] = f(p[0], p[1]);
  }
  return out;
}

Fixture make_f1(int N) {
  Fixture f;
  f.id = "F1";
  f.grid = GridSpec(2, N);
  f.hessian = true;
  std::array<double, 9> G0{1, 0, 0, 1, 0, 0, 0, 0, 0};
  f.hs.emplace(f.grid, G0, ScalarField(f.grid, 0.0));
  auto zero = [](const std::array<double, 3>&) { return 0.0; };
  for (const char* k : {"beta_00", "beta_01", "beta_11", "alpha_0", "alpha_1",
                        "kappa_00", "kappa_01", "kappa_11", "Q_0000", "Q_0101"})
    f.oracle[k] = zero;
  f.oracle["g_00"] = [](const std::array<double, 3>&) { return 1.0; };
  f.oracle["g_11"] = [](const std::array<double, 3>&) { return 1.0; };
  f.oracle["g_01"] = zero;
  return f;
}

Fixture make_f2(int N) {
  Fixture f;
  f.id = "F2";
  f.grid = GridSpec(1, N);
  f.hessian = true;
  AnalyticGeometry a;
  a.g = SymTensorField(f.grid);
  a.dg = Tensor3Field(f.grid);
  a.d2g = Tensor4Field(f.grid);
  a.phi3 = Tensor3Field(f.grid);
  a.phi4 = Tensor4Field(f.grid);
  for (std::size_t idx = 0; idx < f.grid.node_count(); ++idx) {
    const double ex = std::exp(f.grid.position(idx)[0]);
    a.g.at(idx, 0, 0) = ex;
    a.dg.at(idx, 0, 0, 0) = ex;
    a.d2g.at(idx, 0, 0, 0, 0) = ex;
    a.phi3.at(idx, 0, 0, 0) = ex;
    a.phi4.at(idx, 0, 0, 0, 0) = ex;
  }
  f.analytic = std::move(a);
  f.oracle["g_00"] = [](const std::array<double, 3>& p) { return std::exp(p[0]); };
  f.oracle["beta_00"] = [](const std::array<double, 3>&) { return 0.0; };
  f.oracle["alpha_0"] = [](const std::array<double, 3>&) { return 0.5; };
  f.oracle["gamma_000"] = [](const std::array<double, 3>&) { return 0.5; };
  f.oracle["Q_0000"] = [](const std::array<double, 3>&) { return 0.0; };
  return f;
}

Fixture make_f3(int N) {
  Fixture f;
  f.id = "F3";
  f.grid = GridSpec(1, N);
  f.hessian = true;
  std::array<double, 9> G0{2, 0, 0, 0, 0, 0, 0, 0, 0};
  ScalarField phi = sample(f.grid, [](double x, double) {
    return -std::cos(kTau * x) / (kTau * kTau);
  });
  f.hs.emplace(f.grid, G0, std::move(phi));
  auto g = [](double x) { return 2.0 + std::cos(kTau * x); };
  f.oracle["g_00"] = [g](const std::array<double, 3>& p) { return g(p[0]); };
  auto beta00 = [g](const std::array<double, 3>& p) {
    const double c = std::cos(kTau * p[0]);
    return kTau * kTau * (2.0 * c + 1.0) / (g(p[0]) * g(p[0]));
  };
  f.oracle["beta_00"] = beta00;
  f.oracle["kappa_00"] = [beta00](const std::array<double, 3>& p) {
    return -0.5 * beta00(p);
  };
  f.oracle["alpha_0"] = [g](const std::array<double, 3>& p) {
    return -std::numbers::pi * std::sin(kTau * p[0]) / g(p[0]);
  };
  f.oracle["gamma_lower_000"] = [](const std::array<double, 3>& p) {
    return -std::numbers::pi * std::sin(kTau * p[0]);
  };
  f.oracle["gamma_000"] = [g](const std::array<double, 3>& p) {
    return -std::numbers::pi * std::sin(kTau * p[0]) / g(p[0]);
  };
  f.oracle["Q_0000"] = [g](const std::array<double, 3>& p) {
    const double s = std::sin(kTau * p[0]);
    return -0.5 * kTau * kTau * std::cos(kTau * p[0]) -
           0.5 * kTau * kTau * s * s / g(p[0]);
  };
  return f;
}

Fixture make_f4(int N) {
  Fixture f;
  f.id = "F4";
  f.grid = GridSpec(2, N);
  f.hessian = false;
  SymTensorField g(f.grid);
  for (std::size_t idx = 0; idx < f.grid.node_count(); ++idx) {
    const double y = f.grid.position(idx)[1];
    g.at(idx, 0, 0) = 2.0 + 0.3 * std::sin(kTau * y);
    g.at(idx, 1, 1) = 2.0;
    g.at(idx, 0, 1) = 0.0;
  }
  f.metric = make_metric(std::move(g));
  f.oracle["g_00"] = [](const std::array<double, 3>& p) {
    return 2.0 + 0.3 * std::sin(kTau * p[1]);
  };
  f.oracle["T_010"] = [](const std::array<double, 3>& p) {
    // d_y g_00 - d_x g_01
    return 0.6 * std::numbers::pi * std::cos(kTau * p[1]);
  };
  f.oracle["beta_11"] = [](const std::array<double, 3>& p) {
    const double s = std::sin(kTau * p[1]), c = std::cos(kTau * p[1]);
    const double w = 2.0 + 0.3 * s;
    return kTau * kTau * (0.3 * s * w + 0.09 * c * c) / (w * w);
  };
  f.oracle["beta_00"] = [](const std::array<double, 3>&) { return 0.0; };
  f.oracle["beta_01"] = [](const std::array<double, 3>&) { return 0.0; };
  return f;
}

// F5 potential derivatives: with A = 2 pi x, B = 2 pi (x+y), a derivative of
// order m of the B-part is (2 pi)^(m-2) cos(B + m pi/2); the A-part only
// survives pure-x derivatives.
double f5_phi_deriv(double x, double y, int p, int q) {
  const int m = p + q;
  const double phase = m * std::numbers::pi / 2.0;
  const double A = kTau * x, B = kTau * (x + y);
  double v = std::pow(kTau, m - 2) * std::cos(B + phase);
  if (q == 0) v += std::pow(kTau, m - 2) * std::cos(A + phase);
  return v;
}

double f5_phi3(double x, double y, int i, int j, int k) {
  const int q = (i == 1) + (j == 1) + (k == 1);
  return f5_phi_deriv(x, y, 3 - q, q);
}

double f5_phi4(double x, double y, int i, int j, int k, int l) {
  const int q = (i == 1) + (j == 1) + (k == 1) + (l == 1);
  return f5_phi_deriv(x, y, 4 - q, q);
}

void f5_metric(double x, double y, double m[4]) {
  const double a = std::cos(kTau * x), b = std::cos(kTau * (x + y));
  m[0] = 3.0 - a - b;
  m[1] = m[2] = -b;
  m[3] = 3.0 - b;
}

double f5_Q(double x, double y, int i, int j, int k, int l) {
  double m[4];
  f5_metric(x, y, m);
  const double det = m[0] * m[3] - m[1] * m[1];
  const double ginv[4] = {m[3] / det, -m[1] / det, -m[1] / det, m[0] / det};
  double corr = 0.0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      corr += ginv[p * 2 + q] * f5_phi3(x, y, i, k, p) * f5_phi3(x, y, j, l, q);
  return 0.5 * f5_phi4(x, y, i, j, k, l) - 0.5 * corr;
}

Fixture make_f5(int N) {
  Fixture f;
  f.id = "F5";
  f.grid = GridSpec(2, N);
  f.hessian = true;
  std::array<double, 9> G0{3, 0, 0, 3, 0, 0, 0, 0, 0};
  ScalarField phi = sample(f.grid, [](double x, double y) {
    return (std::cos(kTau * x) + std::cos(kTau * (x + y))) / (kTau * kTau);
  });
  f.hs.emplace(f.grid, G0, std::move(phi));
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      f.oracle["g_" + std::to_string(i) + std::to_string(j)] =
          [i, j](const std::array<double, 3>& p) {
            double m[4];
            f5_metric(p[0], p[1], m);
            return m[i * 2 + j];
          };
  // beta from det = 9 - 3a - 6b + ab, a = cos A, b = cos B
  auto beta = [](const std::array<double, 3>& pos, int i, int j) {
    const double x = pos[0], y = pos[1];
    const double a = std::cos(kTau * x), b = std::cos(kTau * (x + y));
    const double ax = -kTau * std::sin(kTau * x);
    const double bd = -kTau * std::sin(kTau * (x + y));  // b_x = b_y
    const double det = 9.0 - 3.0 * a - 6.0 * b + a * b;
    const double det_a = -3.0 + b, det_b = -6.0 + a;
    const double da[2] = {ax, 0.0};
    const double db[2] = {bd, bd};
    const double d2a[2][2] = {{-kTau * kTau * a, 0.0}, {0.0, 0.0}};
    const double d2b_v = -kTau * kTau * b;
    const double ddet_i = det_a * da[i] + det_b * db[i];
    const double ddet_j = det_a * da[j] + det_b * db[j];
    const double d2det =
        da[i] * db[j] + da[j] * db[i] + det_a * d2a[i][j] + det_b * d2b_v;
    return -(d2det / det - ddet_i * ddet_j / (det * det));
  };
  f.oracle["beta_00"] = [beta](const std::array<double, 3>& p) { return beta(p, 0, 0); };
  f.oracle["beta_01"] = [beta](const std::array<double, 3>& p) { return beta(p, 0, 1); };
  f.oracle["beta_11"] = [beta](const std::array<double, 3>& p) { return beta(p, 1, 1); };
  f.oracle["kappa_00"] = [beta](const std::array<double, 3>& p) { return -0.5 * beta(p, 0, 0); };
  f.oracle["kappa_01"] = [beta](const std::array<double, 3>& p) { return -0.5 * beta(p, 0, 1); };
  f.oracle["kappa_11"] = [beta](const std::array<double, 3>& p) { return -0.5 * beta(p, 1, 1); };
  f.oracle["gamma_lower_000"] = [](const std::array<double, 3>& p) {
    return 0.5 * f5_phi3(p[0], p[1], 0, 0, 0);
  };
  f.oracle["gamma_lower_011"] = [](const std::array<double, 3>& p) {
    return 0.5 * f5_phi3(p[0], p[1], 0, 1, 1);
  };
  f.oracle["Q_0000"] = [](const std::array<double, 3>& p) {
    return f5_Q(p[0], p[1], 0, 0, 0, 0);
  };
  f.oracle["Q_0101"] = [](const std::array<double, 3>& p) {
    return f5_Q(p[0], p[1], 0, 1, 0, 1);
  };
  f.oracle["Q_1001"] = [](const std::array<double, 3>& p) {
    return f5_Q(p[0], p[1], 1, 0, 0, 1);
  };
  f.oracle["Rhat_0101"] = [](const std::array<double, 3>& p) {
    return 0.5 * (f5_Q(p[0], p[1], 0, 1, 0, 1) - f5_Q(p[0], p[1], 1, 0, 0, 1));
  };
  return f;
}

}  // namespace

Fixture make_fixture(const std::string& id, int nodes_per_axis) {
  if (id == "F1") return make_f1(nodes_per_axis);
  if (id == "F2") return make_f2(nodes_per_axis);
  if (id == "F3") return make_f3(nodes_per_axis);
  if (id == "F4") return make_f4(nodes_per_axis);
  if (id == "F5") return make_f5(nodes_per_axis);
  throw BadParameter("unknown fixture id: " + id);
}

MetricField fixture_metric(const Fixture& f) {
  if (f.hs) return metric_from_potential(*f.hs);
  if (f.metric) return *f.metric;
  if (f.analytic) return make_metric(f.analytic->g, f.analytic->eps_pos);
  throw BadParameter("fixture " + f.id + " has no metric");
}

namespace {

std::vector<int> parse_indices(const std::string& key) {
  auto pos = key.find_last_of('_');
  std::vector<int> out;
  for (char c : key.substr(pos + 1)) out.push_back(c - '0');
  return out;
}

}  // namespace

ScalarField evaluate_component(const Fixture& f, const std::string& key) {
  const auto ix = parse_indices(key);
  ScalarField out(f.grid);
  auto fill_sym = [&](const SymTensorField& t) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.at(i, ix[0], ix[1]);
  };
  if (key.starts_with("g_")) {
    fill_sym(fixture_metric(f).g);
  } else if (key.starts_with("beta_")) {
    fill_sym(f.analytic ? beta_tensor(*f.analytic) : beta_tensor(fixture_metric(f)));
  } else if (key.starts_with("kappa_")) {
    fill_sym(f.analytic ? koszul_forms(*f.analytic).second
                        : koszul_forms(fixture_metric(f)).second);
  } else if (key.starts_with("alpha_")) {
    VectorField a = f.analytic ? koszul_forms(*f.analytic).first
                               : koszul_forms(fixture_metric(f)).first;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i, ix[0]);
  } else if (key.starts_with("gamma_lower_")) {
    if (!f.hs && !f.analytic) throw BadParameter("gamma needs a potential: " + f.id);
    Tensor3Field t = f.hs ? lowered_gamma(*f.hs) : lowered_gamma(*f.analytic);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.at(i, ix[0], ix[1], ix[2]);
  } else if (key.starts_with("gamma_")) {
    if (!f.hs && !f.analytic) throw BadParameter("gamma needs a potential: " + f.id);
    Tensor3Field t = f.hs ? christoffel_gamma(*f.hs) : christoffel_gamma(*f.analytic);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.at(i, ix[0], ix[1], ix[2]);
  } else if (key.starts_with("Q_")) {
    if (!f.hs && !f.analytic) throw BadParameter("Q needs a potential: " + f.id);
    Tensor4Field t = f.hs ? hessian_curvature(*f.hs) : hessian_curvature(*f.analytic);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = t.at(i, ix[0], ix[1], ix[2], ix[3]);
  } else if (key.starts_with("Rhat_")) {
    if (!f.hs && !f.analytic) throw BadParameter("Rhat needs a potential: " + f.id);
    Tensor4Field Q = f.hs ? hessian_curvature(*f.hs) : hessian_curvature(*f.analytic);
    Tensor4Field t = riemann_from_Q(Q);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = t.at(i, ix[0], ix[1], ix[2], ix[3]);
  } else if (key.starts_with("T_")) {
    Tensor3Field t = t_tensor(fixture_metric(f).g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.at(i, ix[0], ix[1], ix[2]);
  } else {
    throw BadParameter("evaluate_component: unknown key " + key);
  }
  return out;
}

}  // namespace hk
