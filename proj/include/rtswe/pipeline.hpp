#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rtswe/bench.hpp"
#include "rtswe/config.hpp"
#include "rtswe/deim.hpp"
#include "rtswe/io.hpp"
#include "rtswe/pod.hpp"
#include "rtswe/rom.hpp"

namespace rtswe {

struct FomStage {
  Model model;
  State initial;
  FomTrajectory traj;
  double seconds = 0.0;  ///< integration only
};

/// Double-vortex initial condition and full-order integration over K steps.
FomStage run_fom_stage(const RunSettings& settings);

struct ReduceStage {
  PodBasis basis;
  DeimSet deim;
  RomMatrices matrices;
  PrecomputeStats stats;
  double time_pod = 0.0;   ///< snapshots + POD
  double time_deim = 0.0;  ///< POD + nonlinear snapshots + DEIM + tensors
};

/// Offline stage from a trajectory z^0..z^K.
ReduceStage run_reduce_stage(const RunSettings& settings, const Model& model,
                             const Matrix& states);

struct RomStage {
  RomTrajectory traj;  ///< coefficients; invariants of the lifted states
  Matrix lifted;       ///< 4N x (K+1)
  double seconds = 0.0;  ///< reduced integration + lifting
  OnlineCounters counters;
};

/// Online stage. The DEIM operators are required for RomMethod::pod_deim.
RomStage run_rom_stage(RomMethod method, const RunSettings& settings, const Model& model,
                       const PodBasis& basis, const RomOperators* ops, const Vector& z0);

std::string method_label(RomMethod method);

/// Flat report with the keys written to report.json.
io::Report to_report(const RunReport& report);

/// h, u, v, s and q of the given states as CSV grids under dir/fields.
void write_field_dumps(const std::filesystem::path& dir, const std::string& label,
                       const Model& model, const Matrix& states,
                       const std::vector<Index>& steps);

/// FOM, POD, DEIM, both ROMs and all metrics. With an output directory the
/// artifact files are written there as well.
RunReport run_pipeline(const RunSettings& settings,
                       const std::optional<std::filesystem::path>& out = std::nullopt);

}  // namespace rtswe
