#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "rtswe/bench.hpp"
#include "rtswe/deim.hpp"
#include "rtswe/pod.hpp"
#include "rtswe/rom.hpp"

namespace rtswe::io {

namespace fs = std::filesystem;

// All binary files are little-endian: a 4-byte magic, a u32 format version,
// then a fixed header and column-major float64 payloads.

inline constexpr std::uint32_t kFormatVersion = 1;
/// Record layout id of snapshots.bin: one 4N record per step, blocks (h,u,v,s).
inline constexpr std::uint32_t kLayoutBlocked = 1;

struct SnapshotHeader {
  std::uint64_t n = 0;
  std::uint64_t N = 0;
  std::uint64_t K = 0;
  double dt = 0.0;
  std::uint32_t layout = kLayoutBlocked;
};

/// Streams z^0..z^K to disk. finish() fails unless exactly K+1 records
/// were appended.
class SnapshotWriter {
 public:
  SnapshotWriter(const fs::path& path, const SnapshotHeader& header);
  void append(const Vector& z);
  void finish();
  std::uint64_t records() const { return records_; }

 private:
  fs::path path_;
  std::ofstream out_;
  SnapshotHeader header_;
  std::uint64_t records_ = 0;
};

void write_snapshots(const fs::path& path, const Matrix& states, int n, double dt);

struct SnapshotFile {
  SnapshotHeader header;
  Matrix states;  ///< 4N x (K+1)
};

SnapshotFile read_snapshots(const fs::path& path);
SnapshotHeader read_snapshot_header(const fs::path& path);

struct BasisFile {
  std::uint64_t n = 0;
  PodBasis basis;  ///< spectra and criterion ranks are not stored
};

void write_basis(const fs::path& path, const PodBasis& basis, int n);
BasisFile read_basis(const fs::path& path);

void write_deim(const fs::path& path, const DeimSet& deim);
/// Rebuilds the condition numbers from the stored Phi and indices.
DeimSet read_deim(const fs::path& path);

void write_rom_matrices(const fs::path& path, const RomMatrices& m);
RomMatrices read_rom_matrices(const fs::path& path);

// CSV outputs. Numbers use %.17g so values round-trip exactly.

void write_invariants_csv(const fs::path& path, const std::vector<InvariantValues>& series,
                          double dt);

/// index followed by one column per spectrum, each normalized by its first
/// entry; shorter spectra leave empty cells.
void write_spectra_csv(const fs::path& path, const std::vector<std::string>& names,
                       const std::vector<Vector>& spectra);

void write_trajectory_csv(const fs::path& path, const Matrix& coeffs, double dt);
Matrix read_trajectory_csv(const fs::path& path);

/// method,h,u,v,s,H,M,Q,B rows. Missing state errors (FOM row) are written as 0.
struct ErrorRow {
  std::string method;
  std::array<double, 4> state{};
  std::array<double, 4> invariant{};
};
void write_errors_csv(const fs::path& path, const std::vector<ErrorRow>& rows);

/// One n x n field as a CSV grid: row i is x_i, column j is y_j.
void write_field_csv(const fs::path& path, const Eigen::Ref<const Vector>& field, int n);

/// Flat key-value report. Keys are kept sorted for byte-stable output.
using Report = std::map<std::string, double>;
void write_report(const fs::path& path, const Report& report);
Report read_report(const fs::path& path);
/// Read if present, otherwise empty.
Report read_report_or_empty(const fs::path& path);

/// Throws IoError if the directory cannot be created or is not a directory.
void ensure_directory(const fs::path& dir);

}  // namespace rtswe::io
