#pragma once

// Far-field detector masks: irises, slits, straight edges and uniform
// attenuators. A pixel belongs to a binary mask when its center does.

#include "twinbeam/transverse.hpp"

#include <json.hpp>

#include <string>

namespace twinbeam {

enum class SlitOrientation { polar, azimuthal };
enum class Keep { above, below };
/// Coordinate the edge thresholds: `x` clips along x, `y` along y.
enum class EdgeAxis { x, y };

struct MaskDescriptor {
  std::string kind;          // iris | slit | edge | attenuator | composite
  Point center;
  double size = 0.0;         // radius, width, edge position or power
  std::string orientation;   // polar | azimuthal | x | y | ""
  std::string keep;          // above | below | ""
};

struct DetectorMask {
  TransverseGrid grid;
  Eigen::VectorXd t;         // amplitude transmission per pixel, in [0, 1]
  MaskDescriptor descriptor;
};

DetectorMask iris_mask(const TransverseGrid& grid, Point center, double radius);

/// Band of the given width about the line through `center`. A polar slit is
/// long along the radial direction at `center`, an azimuthal slit across it.
/// On 1D cuts only the band across the cut matters: an x cut resolves
/// azimuthal slits, a y cut polar slits; the other orientation passes all.
DetectorMask slit_mask(const TransverseGrid& grid, Point center, double width,
                       SlitOrientation orientation);

DetectorMask edge_mask(const TransverseGrid& grid, double position, Keep keep,
                       EdgeAxis axis);

DetectorMask attenuator_mask(const TransverseGrid& grid, double power_t);

DetectorMask all_pass(const TransverseGrid& grid);

/// Pixel-wise product of the transmissions.
DetectorMask compose(const DetectorMask& a, const DetectorMask& b);

DetectorMask mirror_mask(const DetectorMask& m, MirrorAxis axis);

double power_transmission(const DetectorMask& mask, const ModeField& field);

/// Number of fully transmitting pixels times the pitch (1D) or pitch^2.
double open_measure(const DetectorMask& mask);

nlohmann::json to_json(const MaskDescriptor& d);

}  // namespace twinbeam
