#include "hk/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace hk::io {

namespace {

using nlohmann::json;

void write_exact(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  return out;
}

json scheme_json(const FlowConfig& cfg) {
  return {{"scheme", cfg.scheme == Scheme::scalar ? "scalar" : "tensor"},
          {"dt", cfg.dt},
          {"t_end", cfg.t_end},
          {"c_dt", cfg.c_dt},
          {"stride", cfg.stride},
          {"normalized", cfg.normalized}};
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for hashing: " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto n = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(const std::filesystem::path& path, const GridSpec& grid,
                 int comps, const std::vector<double>& v) {
  if (v.size() != grid.node_count() * static_cast<std::size_t>(comps))
    throw BadParameter("write_field: size mismatch");
  std::ofstream out = open_out(path, true);
  write_exact(out, "HKF1", 4);
  const std::int32_t dim = grid.dim, nodes = grid.nodes_per_axis,
                     rank = comps;
  write_exact(out, &dim, 4);
  write_exact(out, &nodes, 4);
  write_exact(out, &rank, 4);
  write_exact(out, &grid.length, 8);
  write_exact(out, v.data(), v.size() * 8);
  if (!out) throw ConfigError("write failed: " + path.string());
}

FieldData read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open field file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HKF1", 4) != 0)
    throw ConfigError("bad field file magic: " + path.string());
  std::int32_t dim = 0, nodes = 0, rank = 0;
  double length = 0.0;
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&nodes), 4);
  in.read(reinterpret_cast<char*>(&rank), 4);
  in.read(reinterpret_cast<char*>(&length), 8);
  if (!in) throw ConfigError("truncated field header: " + path.string());
  FieldData fd;
  fd.grid = GridSpec(dim, nodes, length);
  fd.comps = rank;
  fd.v.resize(fd.grid.node_count() * static_cast<std::size_t>(rank));
  in.read(reinterpret_cast<char*>(fd.v.data()),
          static_cast<std::streamsize>(fd.v.size() * 8));
  if (!in) throw ConfigError("truncated field data: " + path.string());
  return fd;
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["config"] = scheme_json(traj.cfg);
  manifest["grid"] = {{"dim", traj.grid.dim},
                      {"nodes_per_axis", traj.grid.nodes_per_axis},
                      {"length", traj.grid.length}};
  json times = json::array();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Snapshot& s = traj.snapshots[k];
    times.push_back(s.t);
    char name[64];
    std::snprintf(name, sizeof name, "snap_%04zu_g.hkf", k);
    write_field(dir / name, traj.grid, s.g.m, s.g.v);
    std::snprintf(name, sizeof name, "snap_%04zu_logdet.hkf", k);
    write_field(dir / name, traj.grid, 1, s.logdet.v);
    if (!s.phi.v.empty()) {
      std::snprintf(name, sizeof name, "snap_%04zu_phi.hkf", k);
      write_field(dir / name, traj.grid, 1, s.phi.v);
      std::snprintf(name, sizeof name, "snap_%04zu_phidot.hkf", k);
      write_field(dir / name, traj.grid, 1, s.phi_dot.v);
    }
  }
  manifest["times"] = times;
  if (traj.failure.failed)
    manifest["failure"] = {{"t", traj.failure.t},
                           {"reason", traj.failure.reason}};
  else
    manifest["failure"] = nullptr;
  std::ofstream out = open_out(dir / "trajectory.json", false);
  out << manifest.dump(2) << "\n";
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const DiagnosticsReport& rep) {
  std::ofstream out = open_out(path, false);
  out << "# S1=" << fmt(rep.S1) << " probes=";
  for (std::size_t i = 0; i < rep.probes.size(); ++i)
    out << (i ? ";" : "") << rep.probes[i];
  out << "\n";
  out << "t,sup_psi,sup_lambda,inf_lambda,r_psi,r_lambda,max_t_dev,"
         "sup_upsilon,sup_theta,min_eig_g,min_gap_beta";
  if (!rep.rows.empty()) {
    const std::size_t per =
        rep.probes.empty() ? 0 : rep.rows.front().probe_eigs.size() / rep.probes.size();
    for (std::size_t p = 0; p < rep.probes.size(); ++p)
      for (std::size_t k = 0; k < per; ++k)
        out << ",probe" << p << "_lam" << k;
  }
  out << "\n";
  for (const DiagnosticsRow& r : rep.rows) {
    out << fmt(r.t) << "," << fmt(r.sup_psi) << "," << fmt(r.sup_lambda) << ","
        << fmt(r.inf_lambda) << "," << fmt(r.r_psi) << "," << fmt(r.r_lambda)
        << "," << fmt(r.max_t_dev) << "," << fmt(r.sup_upsilon) << ","
        << fmt(r.sup_theta) << "," << fmt(r.min_eig_g) << ","
        << fmt(r.min_gap_beta);
    for (double ev : r.probe_eigs) out << "," << fmt(ev);
    out << "\n";
  }
}

namespace {

json row_json(const DiagnosticsRow& r) {
  return {{"t", r.t},
          {"sup_psi", r.sup_psi},
          {"sup_lambda", r.sup_lambda},
          {"inf_lambda", r.inf_lambda},
          {"r_psi", r.r_psi},
          {"r_lambda", r.r_lambda},
          {"max_t_dev", r.max_t_dev},
          {"sup_upsilon", r.sup_upsilon},
          {"sup_theta", r.sup_theta},
          {"min_eig_g", r.min_eig_g},
          {"min_gap_beta", r.min_gap_beta},
          {"probe_eigs", r.probe_eigs}};
}

}  // namespace

void write_diagnostics_json(const std::filesystem::path& path,
                            const DiagnosticsReport& rep) {
  json doc;
  doc["S1"] = rep.S1;
  doc["probes"] = rep.probes;
  doc["rows"] = json::array();
  for (const DiagnosticsRow& r : rep.rows) doc["rows"].push_back(row_json(r));
  doc["tangent_lift"] = {{"ricci_dev", rep.lift_ricci_dev},
                         {"defect", rep.lift_defect},
                         {"scan_min", rep.lift_scan_min}};
  std::ofstream out = open_out(path, false);
  out << doc.dump(2) << "\n";
}

void write_gate_json(const std::filesystem::path& path, const GateResult& res,
                     const std::string& u_descriptor) {
  json doc;
  if (res.unbounded)
    doc["S_max"] = "unbounded";
  else
    doc["S_max"] = res.s_max;
  doc["theta"] = res.theta;
  doc["u"] = u_descriptor;
  if (!res.margin.v.empty())
    doc["margin"] = {{"min", pairwise_min(res.margin.v)},
                     {"max", pairwise_max(res.margin.v)}};
  json trace = json::array();
  for (const auto& [s, ok] : res.trace)
    trace.push_back({{"S", s}, {"feasible", ok}});
  doc["trace"] = trace;
  std::ofstream out = open_out(path, false);
  out << doc.dump(2) << "\n";
}

void write_cutoff_csv(const std::filesystem::path& path,
                      const CutoffProfile& profile) {
  std::ofstream out = open_out(path, false);
  out << "s,f,psi,F\n";
  for (std::size_t i = 0; i < profile.s.size(); ++i)
    out << fmt(profile.s[i]) << "," << fmt(profile.f[i]) << ","
        << fmt(profile.psi[i]) << "," << fmt(profile.F[i]) << "\n";
}

void write_manifest(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json doc;
  doc["files"] = json::array();
  for (const auto& f : files)
    doc["files"].push_back(
        {{"path", std::filesystem::relative(f, dir).generic_string()},
         {"fnv1a", hex64(fnv1a_file(f))}});
  std::ofstream out = open_out(dir / "manifest.json", false);
  out << doc.dump(2) << "\n";
}

void export_plots(const std::filesystem::path& run_dir,
                  const std::filesystem::path& out_csv) {
  const auto src = run_dir / "diagnostics.json";
  if (!std::filesystem::exists(src))
    throw MissingRun("export_plots: no diagnostics.json in " +
                     run_dir.string());
  std::ifstream in(src);
  json doc = json::parse(in);

  std::ofstream out = open_out(out_csv, false);
  out << "t,quantity,value,probe\n";
  const std::vector<std::string> scalars = {
      "sup_psi",  "sup_lambda", "inf_lambda",  "r_psi",     "r_lambda",
      "max_t_dev", "sup_upsilon", "sup_theta", "min_eig_g", "min_gap_beta"};
  const auto probes = doc["probes"].get<std::vector<std::size_t>>();
  for (const auto& row : doc["rows"]) {
    const std::string t = fmt(row["t"].get<double>());
    for (const auto& q : scalars)
      out << t << "," << q << "," << fmt(row[q].get<double>()) << ",\n";
    const auto eigs = row["probe_eigs"].get<std::vector<double>>();
    const std::size_t per = probes.empty() ? 0 : eigs.size() / probes.size();
    for (std::size_t p = 0; p < probes.size(); ++p)
      for (std::size_t k = 0; k < per; ++k)
        out << t << ",lambda" << k << "," << fmt(eigs[p * per + k]) << ","
            << probes[p] << "\n";
  }
}

}  // namespace hk::io
