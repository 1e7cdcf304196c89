#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <vector>

#include "rtswe/fom.hpp"

namespace rtswe {

/// Double-vortex benchmark parameters. Defaults are the reference setup on
/// [0, L]^2 with 50 km spacing.
struct DoubleVortexConfig {
  double L = 5.0e6;         ///< domain side [m]
  double f = 6.147e-5;      ///< Coriolis parameter [1/s]
  double g = 9.80616;       ///< gravity [m/s^2]
  double H0 = 750.0;        ///< mean depth [m]
  double dh = 75.0;         ///< vortex depth anomaly [m]
  double sigma_x = 3.0 / 40.0 * 5.0e6;
  double sigma_y = 3.0 / 40.0 * 5.0e6;
  double ox = 0.1;
  double oy = 0.1;
  int n = 100;
  int K = 250;
  double dt = 486.0;        ///< [s]
  double kappa_pod = 1e-3;
  double kappa_deim = 1e-5;
  std::optional<int> r_override;
  std::optional<int> p_override;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  Grid grid() const { return build_grid(n, L, L); }
};

/// Sample the double-vortex initial condition on the grid nodes.
State double_vortex_initial(const DoubleVortexConfig& config, const Grid& grid);

/// Grid, operators and physics (b = 0) for the benchmark.
Model benchmark_model(const DoubleVortexConfig& config);

/// ||w||_{L2} with the cell-area weight dx*dy.
double l2_norm(const Eigen::Ref<const Vector>& w, const Grid& grid);

/// Time-averaged relative L2 error per variable (h, u, v, s) over k = 1..K.
/// Both matrices are 4N x (K+1); column 0 is ignored.
std::array<double, 4> relative_L2_error(const Matrix& reference, const Matrix& approx,
                                        const Grid& grid);

/// Index of an invariant inside the (H, M, Q, B) arrays below.
enum class Inv : int { H = 0, M = 1, Q = 2, B = 3 };

inline constexpr std::array<const char*, 4> kInvariantNames{"H", "M", "Q", "B"};

struct InvariantErrors {
  std::array<double, 4> mean{};  ///< (1/K) sum_k |E^k - E^0| / |E^0|
  std::array<double, 4> max{};   ///< max_k |E^k - E^0| / |E^0|
  Matrix series;                 ///< (K+1) x 4 per-step relative errors, row 0 is zero
};

InvariantErrors invariant_error_series(const std::vector<InvariantValues>& series);

inline double get(const InvariantValues& v, Inv which) {
  switch (which) {
    case Inv::H: return v.H;
    case Inv::M: return v.M;
    case Inv::Q: return v.Q;
    case Inv::B: return v.B;
  }
  return 0.0;
}

/// Monotonic wall-clock stopwatch.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Per-method errors, timings and speedups of one benchmark run.
struct RunReport {
  int n = 0;
  Index N = 0;
  int K = 0;
  double dt = 0.0;
  int r = 0;
  int p = 0;
  std::array<int, 4> pod_criterion_rank{};
  std::array<int, 7> deim_criterion_rank{};
  double deim_max_condition = 0.0;

  std::array<double, 4> l2_pod{};   ///< h, u, v, s
  std::array<double, 4> l2_deim{};
  InvariantErrors inv_fom;
  InvariantErrors inv_pod;
  InvariantErrors inv_deim;

  double time_fom = 0.0;
  double time_offline_pod = 0.0;
  double time_offline_deim = 0.0;
  double time_online_pod = 0.0;
  double time_online_deim = 0.0;

  double speedup_pod() const { return time_online_pod > 0 ? time_fom / time_online_pod : 0.0; }
  double speedup_deim() const { return time_online_deim > 0 ? time_fom / time_online_deim : 0.0; }
};

}  // namespace rtswe
