#pragma once

#include <filesystem>
#include <string>

#include "rtswe/bench.hpp"
#include "rtswe/newton.hpp"

namespace rtswe {

/// Benchmark parameters plus solver and worker settings.
struct RunSettings {
  DoubleVortexConfig bench;
  NewtonConfig fom_newton;
  NewtonConfig rom_newton;
  int threads = 1;
  bool sigma_x_explicit = false;  ///< sigma_x given directly, not derived from L
  bool sigma_y_explicit = false;

  RunSettings();
  /// Validates every field; throws ConfigError.
  void validate() const;
};

/// Apply one `key = value` setting. Keys mirror the DoubleVortexConfig field
/// names (L, f, g, H0, dh, sigma_x, sigma_y, ox, oy, n, K, dt, kappa_pod,
/// kappa_deim, r, p) plus newton_tol, newton_max_iter, rom_newton_tol,
/// rom_newton_max_iter and threads. Setting L rescales sigma_x and sigma_y
/// unless those were given explicitly.
void apply_setting(RunSettings& settings, const std::string& key, const std::string& value);

/// Parse a flat key-value text: one `key = value` per line, `#` comments.
RunSettings parse_settings(const std::string& text, RunSettings base = RunSettings());

RunSettings load_settings(const std::filesystem::path& path, RunSettings base = RunSettings());

/// Render the settings in the same format (round-trips through parse_settings).
std::string format_settings(const RunSettings& settings);

}  // namespace rtswe
