#pragma once

#include "cavsim/analysis.hpp"
#include "cavsim/fock.hpp"
#include "cavsim/lindblad.hpp"
#include "cavsim/trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cavsim::io {

using nlohmann::json;

json to_json(const FieldState& s);                 // {dim, re[], im[], leak}
FieldState field_state_from_json(const json& j);

json to_json(double t, const DensityMatrix& r);    // {t, dim, re[][], im[][]}
DensityMatrix density_from_json(const json& j);

/// Flat CSV of (t, n_mean, varX1, varX2) from master-equation snapshots.
std::string master_csv(const std::vector<MasterSnapshot>& snaps);

/// CSV of (t, n_mean, Q1, Q2, varX1, varX2).
std::string trajectory_csv(const TrajectoryRecord& rec);

/// Sidecar: engine, seed, jump events, atom events.
json trajectory_sidecar(const TrajectoryRecord& rec);

/// CSV matrix with axis header rows.
std::string qgrid_csv(const QGrid& g);

/// CSV of (n, p_empirical, p_bose_einstein).
std::string pmf_csv(const std::vector<double>& pmf, double nbar);

/// FNV-1a 64-bit content hash, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

void write_file(const std::filesystem::path& path, const std::string& content,
                bool no_clobber = false);

/// Writes manifest.json listing every file with byte count and content hash.
void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::filesystem::path>& files,
                    const std::string& config_hash);

}  // namespace cavsim::io
