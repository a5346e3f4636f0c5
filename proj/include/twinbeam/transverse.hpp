#pragma once

// Far-field transverse geometry. All angles are divergence angles in mrad,
// measured from the pump axis.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace twinbeam {

using cplx = std::complex<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Dims { one = 1, two = 2 };

// A 1D grid is a cut through the far-field plane. `x` is the polar cut
// through the pump axis (probe at +theta, conjugate at -theta on the same
// line). `y` is an azimuthal cut: the probe lives on the line x = +offset and
// the conjugate on x = -offset, and the grid coordinate runs along y. Pixel
// positions on a `y` cut are reported as (0, y); the offset only enters the
// gain kernel.
enum class CutAxis { x, y };

enum class MirrorAxis { x, y };

class TransverseGrid {
 public:
  TransverseGrid() = default;
  TransverseGrid(double half_extent, int n_side, Dims dims,
                 CutAxis axis = CutAxis::x);

  double half_extent() const { return half_extent_; }
  int n_side() const { return n_side_; }
  Dims dims() const { return dims_; }
  CutAxis axis() const { return axis_; }
  bool is_2d() const { return dims_ == Dims::two; }

  double pitch() const { return 2.0 * half_extent_ / n_side_; }
  /// Pixel area for 2D grids, pixel length for 1D grids.
  double pixel_area() const { return is_2d() ? pitch() * pitch() : pitch(); }
  std::size_t size() const {
    return is_2d() ? static_cast<std::size_t>(n_side_) * n_side_
                   : static_cast<std::size_t>(n_side_);
  }

  /// Pixel-center coordinate along one axis.
  double coord(int i) const { return -half_extent_ + (i + 0.5) * pitch(); }
  Point position(std::size_t pixel) const;

  /// Pixel whose center is at -q (point reflection through the pump axis).
  std::size_t reflected(std::size_t pixel) const;
  /// Pixel reflected about the given axis through the origin.
  std::size_t mirrored(std::size_t pixel, MirrorAxis axis) const;

  /// Along-cut component of a point for 1D grids.
  double along(Point p) const { return axis_ == CutAxis::x ? p.x : p.y; }

  friend bool operator==(const TransverseGrid& a, const TransverseGrid& b) {
    return a.half_extent_ == b.half_extent_ && a.n_side_ == b.n_side_ &&
           a.dims_ == b.dims_ && a.axis_ == b.axis_;
  }

 private:
  double half_extent_ = 1.0;
  int n_side_ = 2;
  Dims dims_ = Dims::one;
  CutAxis axis_ = CutAxis::x;
};

TransverseGrid make_grid(double half_extent, int n_side, int dims,
                         CutAxis axis = CutAxis::x);

/// Complex amplitude per pixel. The norm is sum |f|^2 * pixel_area.
struct ModeField {
  TransverseGrid grid;
  Eigen::VectorXcd amplitude;

  double norm_squared() const;
  bool is_normalized(double tol = 1e-9) const {
    return std::abs(norm_squared() - 1.0) <= tol;
  }
  /// Discrete mode coefficients (amplitude * sqrt(area)); unit l2 norm when
  /// the field is normalized.
  Eigen::VectorXcd coefficients() const;
  static ModeField from_coefficients(const TransverseGrid& grid,
                                     const Eigen::VectorXcd& c);
};

ModeField gaussian_mode(const TransverseGrid& grid, Point center, double waist);

/// p = 0 Laguerre-Gauss mode: r^|ell| exp(-r^2/w^2) exp(i ell phi).
ModeField lg_mode(const TransverseGrid& grid, Point center, double waist,
                  int ell);

ModeField superpose(const std::vector<std::pair<ModeField, cplx>>& fields);

ModeField normalized(ModeField f);

cplx inner_product(const ModeField& f, const ModeField& g);

ModeField mirror_image(const ModeField& f, MirrorAxis axis);

struct Interferogram {
  Eigen::VectorXd intensity;
  int fringe_count = 0;
  Point centroid;
  double ring_radius = 0.0;
};

/// |f+g|^2 and the number of azimuthal maxima on the ring of peak intensity
/// about the joint centroid. Requires a 2D grid.
Interferogram interferogram(const ModeField& f, const ModeField& g);

/// CSV with columns theta_x_mrad, theta_y_mrad, re, im (row-major).
void write_mode_csv(std::ostream& os, const ModeField& f);

/// Intensity-weighted centroid of a field.
Point centroid(const ModeField& f);

}  // namespace twinbeam
