// hk: fixture runs, refinement studies, gate estimates, plot export.
//
// Configuration is a single JSON document (schema_version 1); unknown keys
// are rejected. CLI flags override individual fields. Exit codes: 0 all
// enabled assertions pass, 1 a named invariant failed, 2 bad configuration.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hk/diagnostics.hpp"
#include "hk/fixtures.hpp"
#include "hk/flow.hpp"
#include "hk/gate.hpp"
#include "hk/io.hpp"
#include "hk/lift.hpp"

using nlohmann::json;

namespace {

struct AssertionFailure {
  std::string invariant;
};

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key))
      throw hk::ConfigError("unknown config key '" + key + "' in " + where);
}

struct Config {
  std::string fixture = "F3";
  int nodes = 64;
  std::uint64_t seed = 1;
  std::string scheme = "tensor";  // tensor | scalar | both
  double dt = 0.0;                // 0 => CFL-derived from c_dt
  double t_end = 0.01;
  double c_dt = 0.2;
  int stride = 0;  // 0 => auto (~32 snapshots)
  bool normalized = false;
  bool diagnostics = true;
  double tol_mp = 1e-6;
  double cross_tol = 1e-5;
  bool gate = false;
  double theta = 0.5;
  double kappa = 0.1;
  std::string out = "hk_out";

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hk::ConfigError("cannot open config: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
      throw hk::ConfigError("config is not valid JSON: " + path);
    reject_unknown(doc, {"schema_version", "fixture", "nodes", "seed", "flow",
                         "diagnostics", "gate", "out"},
                   "top level");
    if (!doc.contains("schema_version") || doc["schema_version"] != 1)
      throw hk::ConfigError("config schema_version must be 1");
    Config c;
    c.fixture = doc.value("fixture", c.fixture);
    c.nodes = doc.value("nodes", c.nodes);
    c.seed = doc.value("seed", c.seed);
    c.out = doc.value("out", c.out);
    if (doc.contains("flow")) {
      const json& f = doc["flow"];
      reject_unknown(
          f, {"scheme", "dt", "t_end", "c_dt", "stride", "normalized"},
          "flow");
      c.scheme = f.value("scheme", c.scheme);
      c.dt = f.value("dt", c.dt);
      c.t_end = f.value("t_end", c.t_end);
      c.c_dt = f.value("c_dt", c.c_dt);
      c.stride = f.value("stride", c.stride);
      c.normalized = f.value("normalized", c.normalized);
    }
    if (doc.contains("diagnostics")) {
      const json& d = doc["diagnostics"];
      reject_unknown(d, {"enabled", "tol_mp", "cross_tol"}, "diagnostics");
      c.diagnostics = d.value("enabled", c.diagnostics);
      c.tol_mp = d.value("tol_mp", c.tol_mp);
      c.cross_tol = d.value("cross_tol", c.cross_tol);
    }
    if (doc.contains("gate")) {
      const json& g = doc["gate"];
      reject_unknown(g, {"enabled", "theta", "kappa"}, "gate");
      c.gate = g.value("enabled", c.gate);
      c.theta = g.value("theta", c.theta);
      c.kappa = g.value("kappa", c.kappa);
    }
    return c;
  }

  void validate() const {
    if (scheme != "tensor" && scheme != "scalar" && scheme != "both")
      throw hk::ConfigError("scheme must be tensor, scalar or both");
    if (!(t_end > 0.0) || dt < 0.0 || !(c_dt > 0.0) || stride < 0)
      throw hk::ConfigError("flow parameters out of range");
    if (!(tol_mp > 0.0) || !(cross_tol > 0.0))
      throw hk::ConfigError("tolerances must be positive");
  }
};

hk::Fixture make_run_fixture(const Config& cfg) {
  hk::Fixture fx = hk::make_fixture(cfg.fixture, cfg.nodes);
  if (!fx.hs && !fx.metric)
    throw hk::ConfigError("fixture " + cfg.fixture +
                          " is analytic-only and cannot be integrated");
  return fx;
}

hk::FlowConfig flow_config(const Config& cfg, const hk::MetricField& g0,
                           hk::Scheme scheme) {
  hk::FlowConfig fc;
  fc.scheme = scheme;
  fc.c_dt = cfg.c_dt;
  fc.t_end = cfg.t_end;
  fc.normalized = cfg.normalized;
  double dt = cfg.dt;
  if (dt == 0.0) {
    const double h = g0.grid().spacing();
    dt = cfg.c_dt * h * h / hk::max_inverse_spectral_radius(g0);
  }
  const long long steps =
      std::max<long long>(1, static_cast<long long>(std::ceil(cfg.t_end / dt)));
  fc.dt = cfg.t_end / static_cast<double>(steps);
  fc.stride =
      cfg.stride > 0 ? cfg.stride : std::max<long long>(1, steps / 32);
  return fc;
}

std::string failure_invariant(const std::string& reason) {
  if (reason.find("parabolic bound") != std::string::npos) return "StepTooLarge";
  if (reason.find("Cholesky") != std::string::npos ||
      reason.find("positive") != std::string::npos)
    return "NotPositiveDefinite";
  return "FlowFailure";
}

double cross_scheme_dev(const hk::Trajectory& a, const hk::Trajectory& b) {
  const std::size_t m = std::min(a.snapshots.size(), b.snapshots.size());
  double dev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> diff(a.snapshots[k].g.v.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
      diff[i] = a.snapshots[k].g.v[i] - b.snapshots[k].g.v[i];
    dev = std::max(dev, hk::max_abs(diff));
  }
  return dev;
}

int cmd_run(const Config& cfg) {
  cfg.validate();
  hk::Fixture fx = make_run_fixture(cfg);
  hk::MetricField g0 = hk::fixture_metric(fx);
  hk::FlowRefs refs =
      fx.hs ? hk::make_flow_refs(*fx.hs) : hk::make_flow_refs(g0);

  const std::filesystem::path out(cfg.out);
  std::filesystem::create_directories(out);

  std::vector<hk::Trajectory> trajs;
  if (cfg.scheme == "scalar" || cfg.scheme == "both") {
    if (!fx.hs)
      throw hk::ConfigError("scalar scheme requires a Hessian fixture");
    hk::FlowConfig fc = flow_config(cfg, g0, hk::Scheme::scalar);
    trajs.push_back(hk::run_flow(refs, fc));
  }
  if (cfg.scheme == "tensor" || cfg.scheme == "both") {
    hk::FlowConfig fc = flow_config(cfg, g0, hk::Scheme::tensor);
    trajs.push_back(hk::run_flow(refs, fc));
  }

  json summary;
  summary["fixture"] = cfg.fixture;
  summary["seed"] = cfg.seed;

  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const std::string name =
        trajs[i].cfg.scheme == hk::Scheme::scalar ? "scalar" : "tensor";
    hk::io::write_trajectory(out / ("traj_" + name), trajs[i]);
    if (trajs[i].failure.failed)
      throw AssertionFailure{failure_invariant(trajs[i].failure.reason)};
  }

  if (trajs.size() == 2) {
    const double dev = cross_scheme_dev(trajs[0], trajs[1]);
    summary["cross_scheme_dev"] = dev;
    if (!(dev <= cfg.cross_tol)) throw AssertionFailure{"SchemeEquivalence"};
  }

  const hk::Trajectory& traj = trajs.back();
  if (cfg.diagnostics) {
    hk::ProbeSet probes = hk::ProbeSet::defaults(traj.grid, cfg.seed);
    hk::DiagnosticsReport rep =
        hk::diagnose(traj, refs, probes, traj.cfg.t_end);

    if (fx.hessian && fx.hs) {
      hk::HermitianLift lift = hk::lift_metric(g0);
      hk::SymTensorField ricci = hk::kahler_ricci(lift);
      std::vector<double> dev(ricci.v.size());
      for (std::size_t i = 0; i < dev.size(); ++i)
        dev[i] = ricci.v[i] - 0.25 * refs.beta0.v[i];
      rep.lift_ricci_dev = hk::max_abs(dev);
      hk::KahlerCurvature kc = hk::kahler_curvature(lift, *fx.hs);
      rep.lift_defect = kc.defect;
      rep.lift_scan_min = hk::bisectional_sign_scan(
          hk::hessian_curvature(*fx.hs), g0, 32, cfg.seed);
    }

    hk::io::write_diagnostics_csv(out / "diagnostics.csv", rep);
    hk::io::write_diagnostics_json(out / "diagnostics.json", rep);

    double prev_t = -1.0;
    for (const hk::DiagnosticsRow& r : rep.rows) {
      if (!(r.t > prev_t)) throw AssertionFailure{"ReportMonotonicity"};
      prev_t = r.t;
      for (double v : {r.sup_psi, r.sup_lambda, r.inf_lambda, r.r_psi,
                       r.r_lambda, r.max_t_dev, r.sup_upsilon, r.sup_theta,
                       r.min_eig_g, r.min_gap_beta})
        if (!std::isfinite(v)) throw AssertionFailure{"ReportFinite"};
      if (fx.hessian && !(r.sup_psi <= cfg.tol_mp))
        throw AssertionFailure{"MaximumPrinciple"};
    }
  }

  if (cfg.gate) {
    hk::GateResult gr =
        hk::sb_estimate(g0, hk::ScalarField(g0.grid()), cfg.theta);
    hk::io::write_gate_json(out / "gate.json", gr, "zero");
    hk::io::write_cutoff_csv(out / "cutoff.csv", hk::build_cutoff(cfg.kappa));
  }

  {
    std::ofstream s(out / "run.json");
    s << summary.dump(2) << "\n";
  }
  hk::io::write_manifest(out);
  std::cout << "run complete: " << out.string() << "\n";
  return 0;
}

int cmd_refine(const Config& cfg, int levels) {
  cfg.validate();
  if (levels < 2) throw hk::ConfigError("refine-study needs >= 2 levels");

  struct Col {
    std::string name;
    std::vector<double> err;
  };
  std::vector<Col> cols;
  const auto col = [&](const std::string& name) -> Col& {
    for (Col& c : cols)
      if (c.name == name) return c;
    cols.push_back({name, {}});
    return cols.back();
  };

  for (int l = 0; l < levels; ++l) {
    const int n = cfg.nodes << l;
    hk::Fixture fx = hk::make_fixture(cfg.fixture, n);
    for (const auto& [key, fn] : fx.oracle) {
      hk::ScalarField num = hk::evaluate_component(fx, key);
      std::vector<double> diff(num.v.size());
      for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = num.v[i] - fn(num.grid.position(i));
      col(key).err.push_back(hk::max_abs(diff));
    }
    if (fx.hessian && fx.hs) {
      hk::MetricField g0 = hk::fixture_metric(fx);
      hk::KahlerCurvature kc =
          hk::kahler_curvature(hk::lift_metric(g0), *fx.hs);
      col("kahler_defect").err.push_back(kc.defect);
    }
  }

  std::cout << "quantity";
  for (int l = 0; l < levels; ++l) std::cout << ",err_N" << (cfg.nodes << l);
  for (int l = 0; l + 1 < levels; ++l) std::cout << ",order" << l;
  std::cout << "\n";
  const double floor_err = 1e-11;
  for (const Col& c : cols) {
    std::cout << c.name;
    for (double e : c.err) std::cout << "," << hk::io::fmt(e);
    for (int l = 0; l + 1 < levels; ++l) {
      if (c.err[l] < floor_err && c.err[l + 1] < floor_err)
        std::cout << ",exact";
      else
        std::cout << "," << hk::io::fmt(std::log2(c.err[l] / c.err[l + 1]));
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_gate(const Config& cfg) {
  cfg.validate();
  hk::Fixture fx = make_run_fixture(cfg);
  hk::MetricField g0 = hk::fixture_metric(fx);
  hk::GateResult gr =
      hk::sb_estimate(g0, hk::ScalarField(g0.grid()), cfg.theta);
  const std::filesystem::path out(cfg.out);
  std::filesystem::create_directories(out);
  hk::io::write_gate_json(out / "gate.json", gr, "zero");
  hk::io::write_cutoff_csv(out / "cutoff.csv", hk::build_cutoff(cfg.kappa));
  hk::io::write_manifest(out);
  if (gr.unbounded)
    std::cout << "S_max unbounded (cap reached)\n";
  else
    std::cout << "S_max " << hk::io::fmt(gr.s_max) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* tc = std::getenv("HK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(tc, &end, 10);
    if (end == tc || v < 1) {
      std::cerr << "config error: HK_THREADS must be a positive integer\n";
      return 2;
    }
  }

  CLI::App app{"Hesse-Koszul flow laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  Config cfg;
  int levels = 3;
  std::string run_dir, out_csv = "plots.csv";

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--fixture", cfg.fixture, "fixture id (F1..F5)");
    sub->add_option("--nodes", cfg.nodes, "grid nodes per axis");
    sub->add_option("--seed", cfg.seed, "seed for probes/frames");
    sub->add_option("--out", cfg.out, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "integrate a fixture");
  add_common(run);
  run->add_option("--scheme", cfg.scheme, "tensor | scalar | both");
  run->add_option("--dt", cfg.dt, "time step (0 = CFL-derived)");
  run->add_option("--t-end", cfg.t_end, "final time");
  run->add_option("--c-dt", cfg.c_dt, "parabolic bound factor");
  run->add_option("--stride", cfg.stride, "snapshot stride (0 = auto)");
  run->add_flag("--normalized", cfg.normalized, "normalized flow");

  CLI::App* refine = app.add_subcommand("refine-study", "convergence orders");
  add_common(refine);
  refine->add_option("--levels", levels, "refinement levels (>= 2)");

  CLI::App* gate = app.add_subcommand("gate", "barrier threshold estimate");
  add_common(gate);
  gate->add_option("--theta", cfg.theta, "barrier theta in (0,1)");
  gate->add_option("--kappa", cfg.kappa, "cutoff kappa in (0,1/8)");

  CLI::App* plots = app.add_subcommand("export-plots", "tidy CSV series");
  plots->add_option("--run", run_dir, "completed run directory")->required();
  plots->add_option("--out-csv", out_csv, "output CSV path");

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) {
      // flag values already live in cfg; start from the file and re-apply
      // whichever flags were actually passed
      const Config flag_cfg = cfg;
      cfg = Config::load(config_path);
      CLI::App* sub = run->parsed() ? run : refine->parsed() ? refine : gate;
      const auto passed = [&](const std::string& name) {
        const CLI::Option* o = sub->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
      };
      if (passed("--fixture")) cfg.fixture = flag_cfg.fixture;
      if (passed("--nodes")) cfg.nodes = flag_cfg.nodes;
      if (passed("--seed")) cfg.seed = flag_cfg.seed;
      if (passed("--out")) cfg.out = flag_cfg.out;
      if (passed("--scheme")) cfg.scheme = flag_cfg.scheme;
      if (passed("--dt")) cfg.dt = flag_cfg.dt;
      if (passed("--t-end")) cfg.t_end = flag_cfg.t_end;
      if (passed("--c-dt")) cfg.c_dt = flag_cfg.c_dt;
      if (passed("--stride")) cfg.stride = flag_cfg.stride;
      if (passed("--normalized")) cfg.normalized = flag_cfg.normalized;
      if (passed("--theta")) cfg.theta = flag_cfg.theta;
      if (passed("--kappa")) cfg.kappa = flag_cfg.kappa;
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const hk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(cfg);
    if (refine->parsed()) return cmd_refine(cfg, levels);
    if (gate->parsed()) return cmd_gate(cfg);
    if (plots->parsed()) {
      hk::io::export_plots(run_dir, out_csv);
      std::cout << "wrote " << out_csv << "\n";
      return 0;
    }
  } catch (const AssertionFailure& f) {
    std::cerr << "FAILED invariant: " << f.invariant << "\n";
    return 1;
  } catch (const hk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hk::MissingRun& e) {
    std::cerr << "missing run: " << e.what() << "\n";
    return 2;
  } catch (const hk::BadParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hk::HkError& e) {
    std::cerr << "FAILED invariant: " << failure_invariant(e.what()) << " ("
              << e.what() << ")\n";
    return 1;
  }
  return 2;
}
