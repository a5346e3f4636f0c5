#include "twinbeam/experiments.hpp"

#include "twinbeam/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace twinbeam;

namespace {

std::vector<std::pair<double, double>> gaussian_samples(double c, double w, double a,
                                                        double off, int n = 41) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < n; ++i) {
    const double x = -4.0 + 8.0 * i / (n - 1);
    pts.emplace_back(x, off + a * std::exp(-8.0 * (x - c) * (x - c) / (w * w)));
  }
  return pts;
}

RunConfig small_1d() {
  RunConfig cfg;
  cfg.grid1d_n_side = 96;
  return cfg;
}

RunConfig small_2d() {
  RunConfig cfg;
  cfg.grid2d_n_side = 24;
  cfg.spot_waist_mrad = 1.5;
  cfg.lg_waist_mrad = 2.0;
  cfg.two_spot_separation_mrad = 5.0;
  return cfg;
}

}  // namespace

TEST_CASE("fit_gaussian recovers exact samples") {
  const auto fit = fit_gaussian(gaussian_samples(0.3, 1.7, -5.0, 4.0));
  CHECK(fit.center == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(fit.width_e2 == doctest::Approx(1.7).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(-5.0).epsilon(1e-6));
  CHECK(fit.offset == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(fit.rms_residual < 1e-6);
}

TEST_CASE("fit_gaussian width is the full 1/e^2 width") {
  const auto fit = fit_gaussian(gaussian_samples(0.0, 2.0, 1.0, 0.0));
  const double at_edge = fit.amplitude * std::exp(-8.0 * 1.0 / (fit.width_e2 * fit.width_e2));
  CHECK(at_edge == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("fit_gaussian rejects flat and short data") {
  std::vector<std::pair<double, double>> flat;
  for (int i = 0; i < 10; ++i) flat.emplace_back(i, 3.0);
  CHECK_THROWS_AS(fit_gaussian(flat), Error);
  CHECK_THROWS_AS(fit_gaussian({{0, 1}, {1, 2}, {2, 1}}), Error);
}

TEST_CASE("fit_gaussian finds a plateaued dip") {
  // dB-like dip sitting on a positive plateau, sampled off-center.
  auto pts = gaussian_samples(0.42, 1.5, -8.0, 4.5, 31);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].second += 0.05 * std::sin(3.0 * i);
  const auto fit = fit_gaussian(pts);
  CHECK(std::abs(fit.center - 0.42) < 0.1);
  CHECK(fit.offset == doctest::Approx(4.5).epsilon(0.05));
}

TEST_CASE("deconvolve_slit boundaries") {
  CHECK(deconvolve_slit(1.3, 0.0, 0.0) == doctest::Approx(1.3));
  const double c = kSlitEquivalentFactor * kSlitEquivalentFactor;
  const double w = std::sqrt(c * (0.4 * 0.4 + 0.3 * 0.3));
  CHECK(deconvolve_slit(w, 0.4, 0.3) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(deconvolve_slit(0.9 * w, 0.4, 0.3), Error);
  try {
    deconvolve_slit(0.1, 0.4, 0.4);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::inconsistent_widths);
  }
  CHECK(kSlitEquivalentFactor == doctest::Approx(2.0 / std::sqrt(3.0)));
}

TEST_CASE("dip_full_width of a sampled parabola and a triangle") {
  std::vector<std::pair<double, double>> tri;
  for (int i = -10; i <= 10; ++i) tri.emplace_back(i, -10.0 + std::abs(i));
  CHECK(dip_full_width(tri) == doctest::Approx(10.0));
  std::vector<std::pair<double, double>> open;
  for (int i = 0; i <= 10; ++i) open.emplace_back(i, -10.0 + i);
  CHECK_THROWS_AS(dip_full_width(open), Error);
}

TEST_CASE("angle sweep: calibrated peak, passthrough far away") {
  const RunConfig cfg = small_1d();
  const Amplifier amp = build_amplifier(cfg, Geometry::polar_cut);
  const AngleSweep s = run_angle_sweep(cfg, amp);
  CHECK(s.gain.derived.at("peak_gain") == doctest::Approx(4.5).epsilon(0.02));
  CHECK(std::abs(s.noise.derived.at("dip_center_mrad") - 7.0) <= 0.5);
  // Noise far outside the bandwidth approaches the shot-noise level.
  CHECK(std::abs(s.noise.points.back().second) < 0.5);
  CHECK(s.noise.points.size() == s.gain.points.size());
  for (std::size_t i = 1; i < s.noise.points.size(); ++i) {
    CHECK(s.noise.points[i].first > s.noise.points[i - 1].first);
  }
}

TEST_CASE("seed leaving the grid is rejected") {
  RunConfig cfg = small_1d();
  cfg.sweep_theta_max_mrad = 15.5;
  const Amplifier amp = build_amplifier(cfg, Geometry::polar_cut);
  CHECK_THROWS_AS(run_angle_sweep(cfg, amp), Error);
}

TEST_CASE("Mandel attenuation branches follow the linear law") {
  const RunConfig cfg = small_1d();
  const Amplifier amp = build_amplifier(cfg, Geometry::polar_cut);
  const MandelProbe p = run_mandel_probe(cfg, amp);
  const double q1 = p.attenuation.derived.at("q_full");
  for (const auto& [t, q] : p.attenuation.points) {
    CHECK(std::abs(q - t * q1) <= 1e-9 * std::abs(q1));
  }
  const MandelDiff d = run_mandel_diff(cfg, amp);
  const double d1 = d.attenuation.derived.at("q_full");
  CHECK(d1 < 0.0);
  for (const auto& [t, q] : d.attenuation.points) {
    CHECK(std::abs(q - t * d1) <= 1e-9 * std::abs(d1));
  }
  // At full transmission all difference series meet.
  CHECK(d.symmetric.points.back().second == doctest::Approx(d1).epsilon(1e-3));
  CHECK(d.antisymmetric.points.back().second == doctest::Approx(d1).epsilon(1e-3));
}

TEST_CASE("slit scan dip sits at the mirrored conjugate slit") {
  RunConfig cfg = small_1d();
  cfg.conj_slit_offset_mrad = 0.5;
  const Amplifier amp = build_amplifier(cfg, Geometry::polar_cut);
  const ScanResult r = run_slit_scan(cfg, SlitOrientation::azimuthal, amp);
  REQUIRE(r.fit.has_value());
  CHECK(r.derived.at("center_error_pixels") <= 1.0);
  CHECK(r.derived.at("theta_c_mrad") > 0.0);
  // Far from the dip the uncorrelated detection shows excess noise.
  CHECK(r.points.front().second > 0.0);
}

TEST_CASE("two-spot and LG on a small plane") {
  const RunConfig cfg = small_2d();
  const Amplifier amp = build_amplifier(cfg, Geometry::plane);
  const TwoSpot t = run_two_spot(cfg, amp);
  CHECK(t.joint_db < 0.0);
  CHECK(t.pair_a_db == doctest::Approx(t.pair_b_db).epsilon(1e-9));
  CHECK_FALSE(t.overlap_warning);

  const LgResult lg = run_lg(cfg, 1, amp);
  CHECK(lg.conjugate_ell == -1);
  CHECK(lg.probe_interferogram.fringe_count == 2);
  CHECK(lg.conjugate_interferogram.fringe_count == 2);
  const LgResult g0 = run_lg(cfg, 0, amp);
  CHECK(g0.conjugate_ell == 0);
  CHECK(g0.probe_interferogram.fringe_count == 0);
  CHECK_THROWS_AS(run_lg(cfg, 4, amp), Error);
}

TEST_CASE("two-spot overlap warning") {
  RunConfig cfg = small_2d();
  cfg.two_spot_separation_mrad = 0.5;
  const Amplifier amp = build_amplifier(cfg, Geometry::plane);
  CHECK(run_two_spot(cfg, amp).overlap_warning);
}

TEST_CASE("experiments reject the wrong amplifier") {
  const RunConfig cfg = small_1d();
  const Amplifier amp = build_amplifier(cfg, Geometry::azimuthal_cut);
  CHECK_THROWS_AS(run_mandel_diff(cfg, amp), Error);
  CHECK_THROWS_AS(run_two_spot(cfg, amp), Error);
}
