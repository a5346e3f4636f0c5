#include "twinbeam/detection.hpp"

#include "twinbeam/errors.hpp"

#include <cmath>

namespace twinbeam {

namespace {

DetectorMask binary(const TransverseGrid& grid, MaskDescriptor d, auto inside) {
  DetectorMask m{grid, Eigen::VectorXd(grid.size()), std::move(d)};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    m.t[p] = inside(grid.position(p)) ? 1.0 : 0.0;
  }
  return m;
}

}  // namespace

DetectorMask iris_mask(const TransverseGrid& grid, Point center, double radius) {
  require(std::isfinite(radius) && radius > 0.0, "iris radius must be positive");
  MaskDescriptor d{"iris", center, radius, "", ""};
  if (grid.is_2d()) {
    return binary(grid, d, [&](Point q) {
      return std::hypot(q.x - center.x, q.y - center.y) <= radius;
    });
  }
  return binary(grid, d, [&](Point q) {
    return std::abs(grid.along(q) - grid.along(center)) <= radius;
  });
}

DetectorMask slit_mask(const TransverseGrid& grid, Point center, double width,
                       SlitOrientation orientation) {
  require(std::isfinite(width) && width > 0.0, "slit width must be positive");
  MaskDescriptor d{"slit", center, width,
                   orientation == SlitOrientation::polar ? "polar" : "azimuthal",
                   ""};
  const double half = 0.5 * width;
  if (!grid.is_2d()) {
    const bool resolved = (grid.axis() == CutAxis::x) ==
                          (orientation == SlitOrientation::azimuthal);
    if (!resolved) return binary(grid, d, [](Point) { return true; });
    return binary(grid, d, [&](Point q) {
      return std::abs(grid.along(q) - grid.along(center)) <= half;
    });
  }
  // Radial unit vector at the slit center (x axis at the origin).
  const double r = std::hypot(center.x, center.y);
  const double rx = r > 1e-12 ? center.x / r : 1.0;
  const double ry = r > 1e-12 ? center.y / r : 0.0;
  // Band normal: across the long axis.
  const double nx = orientation == SlitOrientation::polar ? -ry : rx;
  const double ny = orientation == SlitOrientation::polar ? rx : ry;
  return binary(grid, d, [&](Point q) {
    return std::abs((q.x - center.x) * nx + (q.y - center.y) * ny) <= half;
  });
}

DetectorMask edge_mask(const TransverseGrid& grid, double position, Keep keep,
                       EdgeAxis axis) {
  require(std::isfinite(position), "edge position must be finite");
  MaskDescriptor d{"edge", {}, position, axis == EdgeAxis::x ? "x" : "y",
                   keep == Keep::above ? "above" : "below"};
  return binary(grid, d, [&](Point q) {
    const double c = axis == EdgeAxis::x ? q.x : q.y;
    return keep == Keep::above ? c > position : c < position;
  });
}

DetectorMask attenuator_mask(const TransverseGrid& grid, double power_t) {
  require(std::isfinite(power_t) && power_t >= 0.0 && power_t <= 1.0,
          "attenuator power transmission must lie in [0, 1]");
  return {grid, Eigen::VectorXd::Constant(grid.size(), std::sqrt(power_t)),
          {"attenuator", {}, power_t, "", ""}};
}

DetectorMask all_pass(const TransverseGrid& grid) {
  return attenuator_mask(grid, 1.0);
}

DetectorMask compose(const DetectorMask& a, const DetectorMask& b) {
  require(a.grid == b.grid, "masks live on different grids");
  return {a.grid, a.t.cwiseProduct(b.t), {"composite", {}, 0.0, "", ""}};
}

DetectorMask mirror_mask(const DetectorMask& m, MirrorAxis axis) {
  DetectorMask out = m;
  for (std::size_t p = 0; p < m.grid.size(); ++p) {
    out.t[m.grid.mirrored(p, axis)] = m.t[p];
  }
  if (axis == MirrorAxis::x) {
    out.descriptor.center.y = -m.descriptor.center.y;
  } else {
    out.descriptor.center.x = -m.descriptor.center.x;
  }
  return out;
}

double power_transmission(const DetectorMask& mask, const ModeField& field) {
  require(mask.grid == field.grid, "mask and field live on different grids");
  const Eigen::VectorXd i = field.amplitude.cwiseAbs2();
  const double total = i.sum();
  require(total > 0.0 && std::isfinite(total), "field has zero norm");
  return mask.t.cwiseAbs2().dot(i) / total;
}

double open_measure(const DetectorMask& mask) {
  return static_cast<double>((mask.t.array() >= 1.0).count()) *
         mask.grid.pixel_area();
}

nlohmann::json to_json(const MaskDescriptor& d) {
  nlohmann::json j;
  j["kind"] = d.kind;
  j["center_mrad"] = {d.center.x, d.center.y};
  j["size"] = d.size;
  j["orientation"] = d.orientation;
  j["keep"] = d.keep;
  return j;
}

}  // namespace twinbeam
