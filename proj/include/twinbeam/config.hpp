#pragma once

// Run configuration: a flat JSON object whose keys carry their units.
// Unknown keys are rejected; errors name the offending key.

#include "twinbeam/gain_engine.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace twinbeam {

struct RunConfig {
  // Gain medium.
  double theta0_mrad = 7.0;
  double wavelength_m = 795e-9;
  double cell_length_m = 12e-3;
  double pump_far_width_mrad = 0.5;
  double overlap_width_mrad = 6.0;
  double gain_target = 4.5;
  std::optional<double> s0_1d_per_mrad;
  std::optional<double> s0_2d_per_mrad2;
  std::string calibration_label = "default";

  // Grids.
  double grid1d_half_extent_mrad = 16.0;
  int grid1d_n_side = 256;
  double grid2d_half_extent_mrad = 12.0;
  int grid2d_n_side = 64;

  // Seed and detection.
  double seed_waist_mrad = 1.5;
  double seed_photons = 1e6;
  double detection_efficiency = 0.9;

  // Experiments.
  double sweep_theta_min_mrad = 0.0;
  double sweep_theta_max_mrad = 13.0;
  double sweep_theta_step_mrad = 0.25;
  double slit_width_mrad = 0.4;
  double conj_slit_offset_mrad = 0.0;
  double slit_scan_half_range_mrad = 3.0;
  double spot_waist_mrad = 0.5;
  double two_spot_separation_mrad = 3.0;
  double lg_waist_mrad = 1.5;
  int ell = 1;

  std::string out_dir = "out";
  long long random_seed = 0;  // reserved; the model is deterministic

  /// Throws Error(config) naming the key of the first violated invariant.
  void validate() const;

  /// Gain parameters with s0 left at 1 (calibration happens per grid).
  GainConfig gain() const;
};

/// Parses a JSON document; empty or whitespace-only text gives the defaults.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

nlohmann::json to_json(const RunConfig& c);

/// Sets one key from its textual value (CLI overrides). Dashes in the key are
/// read as underscores.
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);

/// All recognised keys, in declaration order.
std::vector<std::string> config_keys();

}  // namespace twinbeam
