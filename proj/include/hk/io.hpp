#pragma once

// Artifact serialization.
//
// Binary field format (little-endian):
//   bytes 0-3   magic "HKF1"
//   int32       dim
//   int32       nodes_per_axis
//   int32       components per node
//   double      period length
//   doubles     node-major component data
//
// diagnostics.csv column order:
//   t, sup_psi, sup_lambda, inf_lambda, r_psi, r_lambda, max_t_dev,
//   sup_upsilon, sup_theta, min_eig_g, min_gap_beta,
//   then probe{p}_lam{k} blocks in probe order, eigenvalues descending.
//
// Doubles are printed with %.17g everywhere, so identical runs give
// byte-identical text artifacts.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hk/diagnostics.hpp"
#include "hk/flow.hpp"
#include "hk/gate.hpp"

namespace hk::io {

std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

std::string fmt(double v);  // %.17g

struct FieldData {
  GridSpec grid;
  int comps = 0;
  std::vector<double> v;
};

void write_field(const std::filesystem::path& path, const GridSpec& grid,
                 int comps, const std::vector<double>& v);
FieldData read_field(const std::filesystem::path& path);

// One field file per snapshot per stored tensor plus trajectory.json
// (times, scheme, config echo, failure record).
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj);

void write_diagnostics_csv(const std::filesystem::path& path,
                           const DiagnosticsReport& rep);
void write_diagnostics_json(const std::filesystem::path& path,
                            const DiagnosticsReport& rep);

void write_gate_json(const std::filesystem::path& path, const GateResult& res,
                     const std::string& u_descriptor);
void write_cutoff_csv(const std::filesystem::path& path,
                      const CutoffProfile& profile);

// manifest.json: every regular file in `dir` (recursively, sorted paths)
// with its FNV-1a content hash.
void write_manifest(const std::filesystem::path& dir);

// Long-format (t, quantity, value, probe) CSV from a run directory's
// diagnostics.json; throws MissingRun if absent.
void export_plots(const std::filesystem::path& run_dir,
                  const std::filesystem::path& out_csv);

}  // namespace hk::io
