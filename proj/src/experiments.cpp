#include "twinbeam/experiments.hpp"

#include "twinbeam/errors.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace twinbeam {

namespace {

using Points = std::vector<std::pair<double, double>>;

struct GaussResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const Points& pts;

  int inputs() const { return 4; }
  int values() const { return static_cast<int>(pts.size()); }

  // p = (offset, amplitude, center, width)
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = pts[i].first - p[2];
      f[i] = p[0] + p[1] * std::exp(-8.0 * d * d / (p[3] * p[3])) - pts[i].second;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    const double w2 = p[3] * p[3];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = pts[i].first - p[2];
      const double e = std::exp(-8.0 * d * d / w2);
      j(i, 0) = 1.0;
      j(i, 1) = e;
      j(i, 2) = p[1] * e * 16.0 * d / w2;
      j(i, 3) = p[1] * e * 16.0 * d * d / (w2 * p[3]);
    }
    return 0;
  }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> sweep_values(double lo, double hi, double step) {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) v.push_back(lo + static_cast<double>(k) * step);
  return v;
}

void require_inside(const TransverseGrid& g, Point c, double reach, const char* what) {
  const double h = g.half_extent();
  bool ok;
  if (g.is_2d()) {
    ok = std::abs(c.x) + reach <= h && std::abs(c.y) + reach <= h;
  } else {
    ok = std::abs(g.along(c)) + reach <= h;
  }
  require(ok, std::string(what) + " leaves the grid");
}

Eigen::VectorXd stacked(const DetectorMask& probe, const DetectorMask& conj, double eta) {
  return std::sqrt(eta) * stack_transmission(probe, conj);
}

// Detected photons through `tr` relative to the unclipped beams at the same
// detection efficiency.
double fraction_detected(const GaussianState& s, const Eigen::VectorXd& tr,
                         const Eigen::VectorXd& w, double eta) {
  const Eigen::VectorXd full = Eigen::VectorXd::Constant(tr.size(), std::sqrt(eta));
  const Eigen::VectorXd wa = w.cwiseAbs();
  return masked_detector_noise(s, tr, wa).sql / masked_detector_noise(s, full, wa).sql;
}

ModeField field_of(const TransverseGrid& g, const Eigen::VectorXcd& alpha) {
  return normalized(ModeField::from_coefficients(g, alpha));
}

}  // namespace

void ScanResult::sort_points() {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return points[a].first < points[b].first;
  });
  Points p;
  std::vector<double> a;
  for (auto i : order) {
    p.push_back(points[i]);
    if (!aux.empty()) a.push_back(aux[i]);
  }
  points = std::move(p);
  aux = std::move(a);
}

nlohmann::json to_json(const GaussianFit& f) {
  return {{"center", f.center},
          {"width_e2", f.width_e2},
          {"amplitude", f.amplitude},
          {"offset", f.offset},
          {"rms_residual", f.rms_residual}};
}

nlohmann::json to_json(const ScanResult& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["x_label"] = r.x_label;
  j["y_label"] = r.y_label;
  j["n_points"] = r.points.size();
  j["fit"] = r.fit ? to_json(*r.fit) : nlohmann::json(nullptr);
  j["derived"] = r.derived;
  return j;
}

GaussianFit fit_gaussian(const Points& points) {
  require(points.size() >= 5, "Gaussian fit needs at least five points");
  std::vector<double> ys;
  double ymax = 0.0;
  for (const auto& [x, y] : points) {
    require(std::isfinite(x) && std::isfinite(y), "fit data must be finite");
    ys.push_back(y);
    ymax = std::max(ymax, std::abs(y));
  }
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, ymax)) {
    fail(ErrorKind::numerical_failure, "Gaussian fit did not converge: flat data");
  }
  Points pts = points;
  std::stable_sort(pts.begin(), pts.end());

  // Deterministic start: median baseline, extremum, area-based width.
  const double offset = median(ys);
  std::size_t iext = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::abs(pts[i].second - offset) > std::abs(pts[iext].second - offset)) iext = i;
  }
  const double amp = pts[iext].second - offset;
  double area = 0.0, min_dx = 1e300;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dx = pts[i].first - pts[i - 1].first;
    if (dx > 0) min_dx = std::min(min_dx, dx);
    area += 0.5 * dx * (std::abs(pts[i].second - offset) + std::abs(pts[i - 1].second - offset));
  }
  const double span = pts.back().first - pts.front().first;
  double width = area / std::abs(amp) / std::sqrt(std::numbers::pi / 8.0);
  width = std::clamp(width, 2.0 * min_dx, span);

  Eigen::VectorXd p(4);
  p << offset, amp, pts[iext].first, width;
  GaussResidual f{pts};
  Eigen::LevenbergMarquardt<GaussResidual> lm(f);
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(p);
  using namespace Eigen::LevenbergMarquardtSpace;
  const bool converged = status == RelativeReductionTooSmall || status == RelativeErrorTooSmall ||
                         status == RelativeErrorAndReductionTooSmall ||
                         status == CosinusTooSmall || status == FtolTooSmall ||
                         status == XtolTooSmall || status == GtolTooSmall;
  if (!converged || !p.allFinite() || std::abs(p[3]) < 1e-12) {
    fail(ErrorKind::numerical_failure, "Gaussian fit did not converge");
  }
  Eigen::VectorXd r(pts.size());
  f(p, r);
  GaussianFit out;
  out.offset = p[0];
  out.amplitude = p[1];
  out.center = p[2];
  out.width_e2 = std::abs(p[3]);
  out.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(pts.size()));
  return out;
}

double deconvolve_slit(double width_measured, double slit_w1, double slit_w2) {
  require(width_measured >= 0 && slit_w1 >= 0 && slit_w2 >= 0,
          "widths must be non-negative");
  const double c = kSlitEquivalentFactor * kSlitEquivalentFactor;
  const double r = width_measured * width_measured - c * (slit_w1 * slit_w1 + slit_w2 * slit_w2);
  if (r < -1e-12 * width_measured * width_measured) {
    fail(ErrorKind::inconsistent_widths,
         "measured width is narrower than the slits themselves");
  }
  return std::sqrt(std::max(r, 0.0));
}

double dip_full_width(const Points& points) {
  require(points.size() >= 3, "dip width needs at least three points");
  std::size_t imin = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second < points[imin].second) imin = i;
  }
  const double half = 0.5 * points[imin].second;
  require(half < 0.0, "no dip below zero");
  auto cross = [&](std::size_t a, std::size_t b) {
    const auto [xa, ya] = points[a];
    const auto [xb, yb] = points[b];
    return xa + (half - ya) * (xb - xa) / (yb - ya);
  };
  std::optional<double> left, right;
  for (std::size_t i = imin; i-- > 0;) {
    if (points[i].second >= half) {
      left = cross(i, i + 1);
      break;
    }
  }
  for (std::size_t i = imin + 1; i < points.size(); ++i) {
    if (points[i].second >= half) {
      right = cross(i - 1, i);
      break;
    }
  }
  if (!left || !right) {
    fail(ErrorKind::numerical_failure, "dip is not bracketed by the sweep range");
  }
  return *right - *left;
}

GaussianState Amplifier::amplify(const ModeField& seed, double photons) const {
  require(seed.grid == grid, "seed lives on a different grid");
  require(seed.is_normalized(), "seed mode must be normalized");
  require(std::isfinite(photons) && photons >= 0.0, "photon number must be non-negative");
  const Eigen::VectorXcd ap = std::sqrt(photons) * seed.coefficients();
  Eigen::VectorXcd op, oc;
  transform->apply_to_mean(ap, Eigen::VectorXcd::Zero(ap.size()), op, oc);
  Eigen::VectorXcd alpha(2 * ap.size());
  alpha << op, oc;
  return vacuum_out.with_alpha(std::move(alpha));
}

Amplifier build_amplifier(const RunConfig& cfg, Geometry geometry) {
  cfg.validate();
  Amplifier a;
  a.geometry = geometry;
  a.gain = cfg.gain();
  std::optional<double> s0;
  switch (geometry) {
    case Geometry::polar_cut:
      a.grid = make_grid(cfg.grid1d_half_extent_mrad, cfg.grid1d_n_side, 1, CutAxis::x);
      a.probe_center = {cfg.theta0_mrad, 0.0};
      a.conj_center = {-cfg.theta0_mrad, 0.0};
      a.calibration_waist = cfg.seed_waist_mrad;
      s0 = cfg.s0_1d_per_mrad;
      break;
    case Geometry::azimuthal_cut:
      a.grid = make_grid(cfg.grid1d_half_extent_mrad, cfg.grid1d_n_side, 1, CutAxis::y);
      a.probe_center = {0.0, 0.0};
      a.conj_center = {0.0, 0.0};
      a.calibration_waist = cfg.seed_waist_mrad;
      s0 = cfg.s0_1d_per_mrad;
      break;
    case Geometry::plane:
      a.grid = make_grid(cfg.grid2d_half_extent_mrad, cfg.grid2d_n_side, 2);
      a.probe_center = {cfg.theta0_mrad, 0.0};
      a.conj_center = {-cfg.theta0_mrad, 0.0};
      a.calibration_waist = cfg.spot_waist_mrad;
      s0 = cfg.s0_2d_per_mrad2;
      break;
  }
  require_inside(a.grid, a.probe_center, 2.0 * a.calibration_waist, "calibration seed");
  SchmidtDecomposition unit = schmidt_decompose(build_kernel(a.grid, a.gain));
  const ModeField seed = gaussian_mode(a.grid, a.probe_center, a.calibration_waist);
  a.gain.s0 = s0 ? *s0 : calibrate_scale(unit, seed, cfg.gain_target);
  unit.s *= a.gain.s0;
  a.transform = std::make_shared<const BogoliubovTransform>(std::move(unit));
  a.vacuum_out = apply_bogoliubov(vacuum_state(a.grid.size()), *a.transform);
  return a;
}

NoiseResult difference_noise(const GaussianState& s, double eta) {
  const auto m = s.modes_per_beam();
  return masked_detector_noise(
      s, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(2 * m), std::sqrt(eta)),
      beam_weights(m, 1.0, -1.0));
}

NoiseResult masked_difference_noise(const GaussianState& s, const DetectorMask& probe,
                                    const DetectorMask& conj, double eta) {
  return masked_detector_noise(s, stacked(probe, conj, eta),
                               beam_weights(s.modes_per_beam(), 1.0, -1.0));
}

AngleSweep run_angle_sweep(const RunConfig& cfg, const Amplifier& amp) {
  require(amp.geometry == Geometry::polar_cut, "angle sweep needs the polar-cut amplifier");
  AngleSweep r;
  r.gain = {"gain", "theta_mrad", "gain", {}, "", {}, std::nullopt, {}};
  r.noise = {"noise", "theta_mrad", "noise_db", {}, "", {}, std::nullopt, {}};
  for (double th : sweep_values(cfg.sweep_theta_min_mrad, cfg.sweep_theta_max_mrad,
                                cfg.sweep_theta_step_mrad)) {
    require_inside(amp.grid, {th, 0.0}, 2.0 * cfg.seed_waist_mrad, "sweep seed");
    const ModeField seed = gaussian_mode(amp.grid, {th, 0.0}, cfg.seed_waist_mrad);
    r.gain.points.emplace_back(th, effective_gain(amp.schmidt(), seed));
    const auto out = amp.amplify(seed, cfg.seed_photons);
    r.noise.points.emplace_back(th, difference_noise(out, cfg.detection_efficiency).rel_sql_db);
  }
  r.gain.sort_points();
  r.noise.sort_points();
  auto best_gain = std::max_element(r.gain.points.begin(), r.gain.points.end(),
                                    [](auto a, auto b) { return a.second < b.second; });
  auto best_noise = std::min_element(r.noise.points.begin(), r.noise.points.end(),
                                     [](auto a, auto b) { return a.second < b.second; });
  r.gain.derived["peak_gain"] = best_gain->second;
  r.gain.derived["peak_gain_theta_mrad"] = best_gain->first;
  r.noise.derived["dip_min_db"] = best_noise->second;
  r.noise.derived["dip_center_mrad"] = best_noise->first;
  r.noise.derived["theta_m_mrad"] = 1e3 * phase_mismatch_angle(cfg.wavelength_m, cfg.cell_length_m);
  try {
    r.noise.derived["dip_full_width_mrad"] = dip_full_width(r.noise.points);
  } catch (const Error&) {
    // Reported as absent when the sweep does not bracket the dip.
  }
  return r;
}

MandelProbe run_mandel_probe(const RunConfig& cfg, const Amplifier& amp) {
  require(amp.geometry != Geometry::azimuthal_cut, "probe clipping needs a polar cut or plane");
  const double eta = cfg.detection_efficiency;
  const ModeField seed = gaussian_mode(amp.grid, amp.probe_center, cfg.seed_waist_mrad);
  const auto out = amp.amplify(seed, cfg.seed_photons);
  const auto m = amp.grid.size();
  const DetectorMask open = all_pass(amp.grid);
  const Eigen::VectorXd w = beam_weights(m, 1.0, 0.0);
  const double q1 = masked_detector_noise(out, stacked(open, open, eta), w).mandel_Q;

  MandelProbe r;
  r.attenuation = {"attenuation", "transmission", "mandel_q", {}, "", {}, std::nullopt, {}};
  for (int k = 1; k <= 20; ++k) {
    const DetectorMask att = attenuator_mask(amp.grid, k / 20.0);
    const Eigen::VectorXd tr = stacked(att, open, eta);
    r.attenuation.points.emplace_back(fraction_detected(out, tr, w, eta),
                                      masked_detector_noise(out, tr, w).mandel_Q);
  }
  r.attenuation.sort_points();
  r.attenuation.derived["q_full"] = q1;

  r.clipping = {"clipping", "transmission", "mandel_q", {}, "iris_diameter_mrad", {},
                std::nullopt, {}};
  const double pitch = amp.grid.pitch();
  std::vector<double> excess;
  for (int k = 1;; ++k) {
    const double radius = k * pitch;
    const DetectorMask iris = iris_mask(amp.grid, amp.probe_center, radius);
    const Eigen::VectorXd tr = stacked(iris, open, eta);
    const double t = fraction_detected(out, tr, w, eta);
    const double qc = masked_detector_noise(out, tr, w).mandel_Q;
    r.clipping.points.emplace_back(t, qc);
    r.clipping.aux.push_back(2.0 * radius);
    excess.push_back(qc / (t * q1) - 1.0);
    if (t >= 0.999 || radius >= 2.0 * amp.grid.half_extent()) break;
  }
  // Convergence: the relative excess over the attenuation line has decayed to
  // 1/e of its peak (small-iris) value. Interpolated in diameter.
  const auto peak = std::max_element(excess.begin(), excess.end());
  const double level = *peak / std::exp(1.0);
  for (auto i = static_cast<std::size_t>(peak - excess.begin()) + 1; i < excess.size(); ++i) {
    if (*peak > 0.0 && excess[i] <= level) {
      const double f = (excess[i - 1] - level) / (excess[i - 1] - excess[i]);
      r.clipping.derived["convergence_diameter_mrad"] =
          r.clipping.aux[i - 1] + f * (r.clipping.aux[i] - r.clipping.aux[i - 1]);
      break;
    }
  }
  r.clipping.derived["peak_relative_excess"] = *peak;
  r.clipping.sort_points();
  return r;
}

MandelDiff run_mandel_diff(const RunConfig& cfg, const Amplifier& amp) {
  require(amp.geometry == Geometry::polar_cut, "edge clipping needs the polar-cut amplifier");
  const double eta = cfg.detection_efficiency;
  const auto& g = amp.grid;
  const ModeField seed = gaussian_mode(g, amp.probe_center, cfg.seed_waist_mrad);
  const auto out = amp.amplify(seed, cfg.seed_photons);
  const Eigen::VectorXd w = beam_weights(g.size(), 1.0, -1.0);
  const double th0 = amp.probe_center.x;

  MandelDiff r;
  r.attenuation = {"attenuation", "transmission", "mandel_q", {}, "", {}, std::nullopt, {}};
  r.symmetric = {"symmetric", "transmission", "mandel_q", {}, "edge_offset_mrad", {},
                 std::nullopt, {}};
  r.antisymmetric = {"antisymmetric", "transmission", "mandel_q", {}, "edge_offset_mrad", {},
                     std::nullopt, {}};
  for (int k = 1; k <= 20; ++k) {
    const DetectorMask att = attenuator_mask(g, k / 20.0);
    const Eigen::VectorXd tr = stacked(att, att, eta);
    r.attenuation.points.emplace_back(fraction_detected(out, tr, w, eta),
                                      masked_detector_noise(out, tr, w).mandel_Q);
  }
  const double q1 = r.attenuation.points.back().second;
  r.attenuation.sort_points();
  r.attenuation.derived["q_full"] = q1;

  const int kmax = static_cast<int>(std::ceil(3.0 * cfg.seed_waist_mrad / g.pitch()));
  for (int k = -kmax; k <= kmax; ++k) {
    const double d = k * g.pitch();
    const DetectorMask probe = edge_mask(g, th0 + d, Keep::below, EdgeAxis::x);
    const DetectorMask sym = edge_mask(g, -th0 - d, Keep::above, EdgeAxis::x);
    const DetectorMask anti = edge_mask(g, -th0 + d, Keep::below, EdgeAxis::x);
    for (auto [conj, series] : {std::pair{&sym, &r.symmetric}, std::pair{&anti, &r.antisymmetric}}) {
      const Eigen::VectorXd tr = stacked(probe, *conj, eta);
      const double t = fraction_detected(out, tr, w, eta);
      if (t < 0.01) continue;
      series->points.emplace_back(t, masked_detector_noise(out, tr, w).mandel_Q);
      series->aux.push_back(d);
    }
  }
  r.symmetric.sort_points();
  r.antisymmetric.sort_points();
  return r;
}

ScanResult run_slit_scan(const RunConfig& cfg, SlitOrientation orientation,
                         const Amplifier& amp) {
  const bool azimuthal = orientation == SlitOrientation::azimuthal;
  require(amp.geometry == (azimuthal ? Geometry::polar_cut : Geometry::azimuthal_cut),
          "slit orientation does not match the amplifier geometry");
  const auto& g = amp.grid;
  const double eta = cfg.detection_efficiency;
  const ModeField seed = gaussian_mode(g, amp.probe_center, cfg.seed_waist_mrad);
  const auto out = amp.amplify(seed, cfg.seed_photons);

  const double off = cfg.conj_slit_offset_mrad;
  const Point conj_center = azimuthal ? Point{amp.conj_center.x + off, 0.0} : Point{0.0, off};
  const double expected = -g.along(conj_center);
  auto at = [&](double along) { return azimuthal ? Point{along, 0.0} : Point{0.0, along}; };
  require_inside(g, conj_center, cfg.slit_width_mrad, "conjugate slit");
  require_inside(g, at(expected), cfg.slit_scan_half_range_mrad + cfg.slit_width_mrad,
                 "probe slit scan");

  const DetectorMask conj = slit_mask(g, conj_center, cfg.slit_width_mrad, orientation);
  const DetectorMask open = all_pass(g);
  const Eigen::VectorXd wp = beam_weights(g.size(), 1.0, 0.0);
  const double probe_full =
      masked_detector_noise(out, stacked(open, open, eta), wp).mean_N;

  ScanResult r{azimuthal ? "azimuthal" : "polar", "probe_slit_mrad", "noise_db", {},
               "probe_power_fraction", {}, std::nullopt, {}};
  const int kmax = static_cast<int>(std::lround(cfg.slit_scan_half_range_mrad / g.pitch()));
  for (int k = -kmax; k <= kmax; ++k) {
    const double x = expected + k * g.pitch();
    const DetectorMask probe = slit_mask(g, at(x), cfg.slit_width_mrad, orientation);
    r.points.emplace_back(x, masked_difference_noise(out, probe, conj, eta).rel_sql_db);
    r.aux.push_back(masked_detector_noise(out, stacked(probe, open, eta), wp).mean_N /
                    probe_full);
  }
  r.sort_points();

  const double w_conj = open_measure(conj);
  const double w_probe =
      open_measure(slit_mask(g, at(expected), cfg.slit_width_mrad, orientation));
  auto lowest = std::min_element(r.points.begin(), r.points.end(),
                                 [](auto a, auto b) { return a.second < b.second; });
  r.derived["expected_center_mrad"] = expected;
  r.derived["min_sample_mrad"] = lowest->first;
  r.derived["min_sample_db"] = lowest->second;
  r.derived["slit_width_nominal_mrad"] = cfg.slit_width_mrad;
  r.derived["slit_width_probe_effective_mrad"] = w_probe;
  r.derived["slit_width_conj_effective_mrad"] = w_conj;
  r.derived["deconvolution_factor"] = kSlitEquivalentFactor;
  r.derived["pitch_mrad"] = g.pitch();
  try {
    r.fit = fit_gaussian(r.points);
    r.derived["dip_center_mrad"] = r.fit->center;
    r.derived["center_error_pixels"] = std::abs(r.fit->center - expected) / g.pitch();
    r.derived["measured_width_mrad"] = r.fit->width_e2;
    r.derived["theta_c_mrad"] = deconvolve_slit(r.fit->width_e2, w_probe, w_conj);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::numerical_failure &&
        e.kind() != ErrorKind::inconsistent_widths) {
      throw;
    }
    r.derived["fit_failed"] = 1.0;
  }
  return r;
}

TwoSpot run_two_spot(const RunConfig& cfg, const Amplifier& amp) {
  require(amp.geometry == Geometry::plane, "two-spot seeding needs the 2D amplifier");
  const auto& g = amp.grid;
  const double eta = cfg.detection_efficiency;
  const double th0 = cfg.theta0_mrad;
  require(th0 > 0.0, "two-spot seeding needs theta0 > 0");
  const double phi = cfg.two_spot_separation_mrad / (2.0 * th0);
  const Point ca{th0 * std::cos(phi), th0 * std::sin(phi)};
  const Point cb{ca.x, -ca.y};
  require_inside(g, ca, 2.0 * cfg.spot_waist_mrad, "spot");
  const ModeField fa = gaussian_mode(g, ca, cfg.spot_waist_mrad);
  const ModeField fb = gaussian_mode(g, cb, cfg.spot_waist_mrad);

  TwoSpot r;
  r.spot_overlap = std::norm(inner_product(fa, fb));
  r.overlap_warning = r.spot_overlap > 0.5;
  const auto joint = amp.amplify(superpose({{fa, 1.0}, {fb, 1.0}}), cfg.seed_photons);
  const auto alone = amp.amplify(fa, 0.5 * cfg.seed_photons);
  const auto single =
      amp.amplify(gaussian_mode(g, {th0, 0.0}, cfg.spot_waist_mrad), cfg.seed_photons);

  const DetectorMask upper = edge_mask(g, 0.0, Keep::above, EdgeAxis::y);
  const DetectorMask lower = edge_mask(g, 0.0, Keep::below, EdgeAxis::y);
  r.joint_db = difference_noise(joint, eta).rel_sql_db;
  r.pair_a_db = masked_difference_noise(joint, upper, lower, eta).rel_sql_db;
  r.pair_b_db = masked_difference_noise(joint, lower, upper, eta).rel_sql_db;
  r.pair_a_alone_db = masked_difference_noise(alone, upper, lower, eta).rel_sql_db;
  r.single_gaussian_db = difference_noise(single, eta).rel_sql_db;

  r.table = {"two_spot", "case", "noise_db", {}, "", {}, std::nullopt, {}};
  r.table.derived = {{"joint_db", r.joint_db},
                     {"pair_a_db", r.pair_a_db},
                     {"pair_b_db", r.pair_b_db},
                     {"pair_a_alone_db", r.pair_a_alone_db},
                     {"single_gaussian_db", r.single_gaussian_db},
                     {"spot_overlap", r.spot_overlap},
                     {"overlap_warning", r.overlap_warning ? 1.0 : 0.0},
                     {"separation_mrad", cfg.two_spot_separation_mrad},
                     {"spot_waist_mrad", cfg.spot_waist_mrad}};
  return r;
}

LgResult run_lg(const RunConfig& cfg, int ell, const Amplifier& amp) {
  require(amp.geometry == Geometry::plane, "LG seeding needs the 2D amplifier");
  require(ell >= -3 && ell <= 3, "|ell| must not exceed 3");
  const auto& g = amp.grid;
  const Point c{cfg.theta0_mrad, 0.0};
  require_inside(g, c, 2.0 * cfg.lg_waist_mrad, "LG seed");
  const ModeField seed = lg_mode(g, c, cfg.lg_waist_mrad, ell);
  const auto out = amp.amplify(seed, cfg.seed_photons);

  LgResult r;
  r.ell = ell;
  r.squeezing_db = difference_noise(out, cfg.detection_efficiency).rel_sql_db;
  r.probe_field = field_of(g, out.alpha(Beam::probe));
  r.conjugate_field = field_of(g, out.alpha(Beam::conjugate));
  r.probe_interferogram =
      interferogram(r.probe_field, mirror_image(r.probe_field, MirrorAxis::x));
  r.conjugate_interferogram =
      interferogram(r.conjugate_field, mirror_image(r.conjugate_field, MirrorAxis::x));

  // Project onto LG(l) about the conjugate centroid; the waist for each l is
  // matched to the field's second moment, <r^2> = w^2 (|l| + 1) / 2.
  const Point cc = centroid(r.conjugate_field);
  double r2 = 0.0, tot = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Point q = g.position(p);
    const double i = std::norm(r.conjugate_field.amplitude[p]);
    r2 += i * ((q.x - cc.x) * (q.x - cc.x) + (q.y - cc.y) * (q.y - cc.y));
    tot += i;
  }
  r2 /= tot;
  for (int l = -3; l <= 3; ++l) {
    const double w = std::sqrt(2.0 * r2 / (std::abs(l) + 1));
    r.conjugate_overlaps.push_back(
        std::norm(inner_product(lg_mode(g, cc, w, l), r.conjugate_field)));
  }
  std::vector<int> order(7);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return r.conjugate_overlaps[a] > r.conjugate_overlaps[b];
  });
  if (r.conjugate_overlaps[order[1]] >= 0.95 * r.conjugate_overlaps[order[0]]) {
    fail(ErrorKind::ambiguous_projection,
         "conjugate OAM projection is ambiguous: top overlaps within 5%");
  }
  r.conjugate_ell = order[0] - 3;
  return r;
}

}  // namespace twinbeam
