#pragma once

// Scripted reproductions of the twin-beam measurements: angular bandwidth,
// Mandel-Q clipping, slit scans, two-spot and Laguerre-Gauss seeding.

#include "twinbeam/config.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/gaussian_state.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace twinbeam {

struct GaussianFit {
  double center = 0.0;
  double width_e2 = 0.0;   // full width at 1/e^2 of the amplitude term
  double amplitude = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

struct ScanResult {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;  // sorted by x
  std::string aux_label;                          // optional third column
  std::vector<double> aux;                        // aligned with points
  std::optional<GaussianFit> fit;
  std::map<std::string, double> derived;

  void sort_points();
};

nlohmann::json to_json(const GaussianFit& f);
nlohmann::json to_json(const ScanResult& r);

/// offset + amplitude * exp(-8 (x - center)^2 / width_e2^2), least squares.
/// Flat or degenerate data throws a numerical-failure error.
GaussianFit fit_gaussian(const std::vector<std::pair<double, double>>& points);

/// Top-hat to equivalent-Gaussian (1/e^2 full width) factor 2/sqrt(3).
inline constexpr double kSlitEquivalentFactor = 1.1547005383792515;

/// sqrt(W^2 - c w1^2 - c w2^2) with c = kSlitEquivalentFactor^2.
double deconvolve_slit(double width_measured, double slit_w1, double slit_w2);

/// Full width at half depth of the deepest negative dip, by linear
/// interpolation between samples. Throws when the dip is not bracketed.
double dip_full_width(const std::vector<std::pair<double, double>>& points);

enum class Geometry {
  polar_cut,      // 1D cut through the pump axis along x
  azimuthal_cut,  // 1D cut along y through both beam centers
  plane,          // full 2D far field
};

/// Calibrated multimode amplifier with its amplified-vacuum state.
struct Amplifier {
  Geometry geometry = Geometry::polar_cut;
  GainConfig gain;               // s0 holds the calibrated value
  TransverseGrid grid;
  std::shared_ptr<const BogoliubovTransform> transform;
  GaussianState vacuum_out;      // amplifier output for vacuum input
  Point probe_center;            // grid coordinates of the calibration seed
  Point conj_center;
  double calibration_waist = 0.0;

  const SchmidtDecomposition& schmidt() const { return transform->schmidt(); }
  /// Output for a coherent probe seed (mode, total photons).
  GaussianState amplify(const ModeField& seed, double photons) const;
};

Amplifier build_amplifier(const RunConfig& cfg, Geometry geometry);

/// Full-beam intensity-difference noise of a state with detection
/// efficiency eta on both beams.
NoiseResult difference_noise(const GaussianState& s, double eta);

/// Intensity-difference noise with per-beam masks and efficiency eta.
NoiseResult masked_difference_noise(const GaussianState& s, const DetectorMask& probe,
                                    const DetectorMask& conj, double eta);

struct AngleSweep {
  ScanResult gain;
  ScanResult noise;
};
AngleSweep run_angle_sweep(const RunConfig& cfg, const Amplifier& polar);

struct MandelProbe {
  ScanResult attenuation;
  ScanResult clipping;
};
MandelProbe run_mandel_probe(const RunConfig& cfg, const Amplifier& amp);

struct MandelDiff {
  ScanResult attenuation;
  ScanResult symmetric;
  ScanResult antisymmetric;
};
MandelDiff run_mandel_diff(const RunConfig& cfg, const Amplifier& polar);

/// Azimuthal slits resolve along the polar cut, polar slits along the
/// azimuthal cut; pass the matching amplifier.
ScanResult run_slit_scan(const RunConfig& cfg, SlitOrientation orientation,
                         const Amplifier& amp);

struct TwoSpot {
  double joint_db = 0.0;
  double pair_a_db = 0.0;
  double pair_b_db = 0.0;
  double pair_a_alone_db = 0.0;   // pair A with only spot A seeded
  double single_gaussian_db = 0.0;
  double spot_overlap = 0.0;      // |<a, b>|^2
  bool overlap_warning = false;
  ScanResult table;
};
TwoSpot run_two_spot(const RunConfig& cfg, const Amplifier& plane);

struct LgResult {
  int ell = 0;
  int conjugate_ell = 0;
  Interferogram probe_interferogram;
  Interferogram conjugate_interferogram;
  double squeezing_db = 0.0;
  std::vector<double> conjugate_overlaps;  // |<LG(l), conj>|^2 for l = -3..3
  ModeField probe_field;
  ModeField conjugate_field;
};
LgResult run_lg(const RunConfig& cfg, int ell, const Amplifier& plane);

}  // namespace twinbeam
