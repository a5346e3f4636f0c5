#include "twinbeam/transverse.hpp"

#include "twinbeam/errors.hpp"
#include "twinbeam/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace twinbeam {

namespace {

constexpr int kRingSamples = 360;

void require_same_grid(const ModeField& f, const ModeField& g) {
  require(f.grid == g.grid, "mode fields live on different grids");
}

double bilinear(const TransverseGrid& grid, const Eigen::VectorXd& img,
                Point p) {
  const int n = grid.n_side();
  const double fx = (p.x + grid.half_extent()) / grid.pitch() - 0.5;
  const double fy = (p.y + grid.half_extent()) / grid.pitch() - 0.5;
  const int ix = static_cast<int>(std::floor(fx));
  const int iy = static_cast<int>(std::floor(fy));
  const double ax = fx - ix;
  const double ay = fy - iy;
  auto at = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
    return img[static_cast<Eigen::Index>(j) * n + i];
  };
  return (1 - ax) * (1 - ay) * at(ix, iy) + ax * (1 - ay) * at(ix + 1, iy) +
         (1 - ax) * ay * at(ix, iy + 1) + ax * ay * at(ix + 1, iy + 1);
}

}  // namespace

TransverseGrid::TransverseGrid(double half_extent, int n_side, Dims dims,
                               CutAxis axis)
    : half_extent_(half_extent), n_side_(n_side), dims_(dims), axis_(axis) {
  require(std::isfinite(half_extent) && half_extent > 0.0,
          "grid half_extent must be positive");
  require(n_side >= 2, "grid n_side must be at least 2");
}

Point TransverseGrid::position(std::size_t pixel) const {
  if (is_2d()) {
    const int ix = static_cast<int>(pixel % n_side_);
    const int iy = static_cast<int>(pixel / n_side_);
    return {coord(ix), coord(iy)};
  }
  const double c = coord(static_cast<int>(pixel));
  return axis_ == CutAxis::x ? Point{c, 0.0} : Point{0.0, c};
}

std::size_t TransverseGrid::reflected(std::size_t pixel) const {
  return size() - 1 - pixel;
}

std::size_t TransverseGrid::mirrored(std::size_t pixel, MirrorAxis ax) const {
  const std::size_t n = n_side_;
  if (is_2d()) {
    const std::size_t ix = pixel % n;
    const std::size_t iy = pixel / n;
    return ax == MirrorAxis::x ? (n - 1 - iy) * n + ix : iy * n + (n - 1 - ix);
  }
  // Reflection about the x axis flips y; about the y axis flips x.
  const bool flips = (ax == MirrorAxis::x) == (axis_ == CutAxis::y);
  return flips ? n - 1 - pixel : pixel;
}

TransverseGrid make_grid(double half_extent, int n_side, int dims,
                         CutAxis axis) {
  require(dims == 1 || dims == 2, "grid dims must be 1 or 2");
  return TransverseGrid(half_extent, n_side, dims == 2 ? Dims::two : Dims::one,
                        axis);
}

double ModeField::norm_squared() const {
  return amplitude.squaredNorm() * grid.pixel_area();
}

Eigen::VectorXcd ModeField::coefficients() const {
  return amplitude * std::sqrt(grid.pixel_area());
}

ModeField ModeField::from_coefficients(const TransverseGrid& grid,
                                       const Eigen::VectorXcd& c) {
  require(static_cast<std::size_t>(c.size()) == grid.size(),
          "coefficient vector does not match grid");
  return {grid, c / std::sqrt(grid.pixel_area())};
}

ModeField normalized(ModeField f) {
  const double n2 = f.norm_squared();
  require(std::isfinite(n2) && n2 > 1e-300,
          "cannot normalize a zero or non-finite field");
  f.amplitude /= std::sqrt(n2);
  return f;
}

ModeField gaussian_mode(const TransverseGrid& grid, Point center,
                        double waist) {
  return lg_mode(grid, center, waist, 0);
}

ModeField lg_mode(const TransverseGrid& grid, Point center, double waist,
                  int ell) {
  require(std::isfinite(waist) && waist > 0.0, "mode waist must be positive");
  ModeField f{grid, Eigen::VectorXcd(grid.size())};
  const int order = std::abs(ell);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Point q = grid.position(p);
    double dx = q.x - center.x;
    double dy = q.y - center.y;
    if (!grid.is_2d()) {
      // Only the along-cut offset matters on a 1D grid.
      const double d = grid.along(q) - grid.along(center);
      dx = d;
      dy = 0.0;
    }
    const double r2 = dx * dx + dy * dy;
    double a = std::exp(-r2 / (waist * waist));
    if (order == 0) {
      f.amplitude[p] = a;
      continue;
    }
    const double r = std::sqrt(r2);
    a *= std::pow(r / waist, order);
    const double phi = std::atan2(dy, dx);
    f.amplitude[p] = std::polar(a, ell * phi);
  }
  return normalized(std::move(f));
}

ModeField superpose(const std::vector<std::pair<ModeField, cplx>>& fields) {
  require(!fields.empty(), "superpose needs at least one field");
  ModeField out{fields.front().first.grid,
                Eigen::VectorXcd::Zero(fields.front().first.amplitude.size())};
  for (const auto& [f, w] : fields) {
    require(f.grid == out.grid, "mode fields live on different grids");
    out.amplitude += w * f.amplitude;
  }
  return normalized(std::move(out));
}

cplx inner_product(const ModeField& f, const ModeField& g) {
  require_same_grid(f, g);
  return f.amplitude.dot(g.amplitude) * f.grid.pixel_area();
}

ModeField mirror_image(const ModeField& f, MirrorAxis axis) {
  ModeField out{f.grid, Eigen::VectorXcd(f.amplitude.size())};
  for (std::size_t p = 0; p < f.grid.size(); ++p) {
    out.amplitude[f.grid.mirrored(p, axis)] = f.amplitude[p];
  }
  return out;
}

Point centroid(const ModeField& f) {
  double total = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t p = 0; p < f.grid.size(); ++p) {
    const double w = std::norm(f.amplitude[p]);
    const Point q = f.grid.position(p);
    total += w;
    sx += w * q.x;
    sy += w * q.y;
  }
  if (total <= 0.0) return {};
  return {sx / total, sy / total};
}

Interferogram interferogram(const ModeField& f, const ModeField& g) {
  require_same_grid(f, g);
  require(f.grid.is_2d(), "interferogram needs a 2D grid");
  const TransverseGrid& grid = f.grid;

  Interferogram out;
  out.intensity = (f.amplitude + g.amplitude).cwiseAbs2();
  const double total = out.intensity.sum();
  if (!(total > 1e-300) || !std::isfinite(total)) {
    fail(ErrorKind::undefined_fringe_count,
         "interferogram has zero total intensity");
  }

  double sx = 0.0, sy = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Point q = grid.position(p);
    sx += out.intensity[p] * q.x;
    sy += out.intensity[p] * q.y;
  }
  out.centroid = {sx / total, sy / total};

  auto ring = [&](double r) {
    std::vector<double> s(kRingSamples);
    for (int k = 0; k < kRingSamples; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / kRingSamples;
      s[k] = bilinear(grid, out.intensity,
                      {out.centroid.x + r * std::cos(phi),
                       out.centroid.y + r * std::sin(phi)});
    }
    return s;
  };

  // Radius of peak azimuthally averaged intensity.
  const double dr = grid.pitch() / 4.0;
  const double r_max = grid.half_extent();
  double best_r = 0.0;
  double best_mean = -1.0;
  for (double r = 0.0; r <= r_max; r += dr) {
    const auto s = ring(r);
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= kRingSamples;
    if (mean > best_mean) {
      best_mean = mean;
      best_r = r;
    }
  }
  out.ring_radius = best_r;
  if (best_r < dr / 2) return out;

  const auto s = ring(best_r);
  const double peak = *std::max_element(s.begin(), s.end());
  const double threshold = 0.5 * peak;
  std::vector<bool> above(kRingSamples);
  int n_above = 0;
  for (int k = 0; k < kRingSamples; ++k) {
    above[k] = s[k] >= threshold;
    n_above += above[k];
  }
  if (n_above == kRingSamples) return out;
  int runs = 0;
  for (int k = 0; k < kRingSamples; ++k) {
    const int prev = (k + kRingSamples - 1) % kRingSamples;
    if (above[k] && !above[prev]) ++runs;
  }
  out.fringe_count = runs;
  return out;
}

void write_mode_csv(std::ostream& os, const ModeField& f) {
  os << "theta_x_mrad,theta_y_mrad,re,im\n";
  for (std::size_t p = 0; p < f.grid.size(); ++p) {
    const Point q = f.grid.position(p);
    os << fmt_double(q.x) << ',' << fmt_double(q.y) << ','
       << fmt_double(f.amplitude[p].real()) << ','
       << fmt_double(f.amplitude[p].imag()) << '\n';
  }
}

}  // namespace twinbeam
