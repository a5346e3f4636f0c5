#include "twinbeam/errors.hpp"
#include "twinbeam/gaussian_state.hpp"

#include <doctest.h>

#include <cmath>

using namespace twinbeam;

namespace {

struct Pair {
  TransverseGrid grid;
  ModeField u, v;
  BogoliubovTransform t;
};

Pair single_pair(double s) {
  const auto g = make_grid(8.0, 16, 1);
  auto u = gaussian_mode(g, {3, 0}, 1.5);
  auto v = gaussian_mode(g, {-3, 0}, 1.5);
  auto sd = schmidt_decompose(rank_one_kernel(s, u, v));
  return {g, u, v, bogoliubov_from_schmidt(sd)};
}

Eigen::VectorXd eta_t(std::size_t m, double eta) {
  return Eigen::VectorXd::Constant(2 * static_cast<Eigen::Index>(m), std::sqrt(eta));
}

}  // namespace

TEST_CASE("vacuum") {
  const auto v = vacuum_state(1);
  CHECK(photon_mean(v, Eigen::VectorXd::Ones(2)) == 0.0);
  CHECK(v.physicality_margin() >= 0.0);
  CHECK(vacuum_state(4096).total_modes() == 8192);
  CHECK_THROWS_AS(vacuum_state(0), Error);
  CHECK_THROWS_AS(detector_noise(v, Eigen::VectorXd::Ones(2)), Error);
}

TEST_CASE("coherent seeding") {
  const auto g = make_grid(8.0, 16, 1);
  const auto f = gaussian_mode(g, {3, 0}, 1.5);
  const auto v = vacuum_state(16);
  const auto s0 = seed_coherent(v, Beam::probe, f, 0.0);
  CHECK(s0.alpha().isZero());
  const auto s = seed_coherent(v, Beam::probe, f, 1000.0);
  CHECK(photon_mean(s, beam_weights(16, 1, 1)) == doctest::Approx(1e6));
  // Detector covering pixels where the mode vanishes (conjugate side).
  CHECK(photon_mean(s, beam_weights(16, 0, 1)) == 0.0);
  const auto r = detector_noise(s, beam_weights(16, 1, -1));
  CHECK(r.mandel_Q == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.rel_sql_db == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(seed_coherent(v, Beam::probe, ModeField{g, 2.0 * f.amplitude}, 1.0),
                  Error);
  for (std::size_t j = 0; j < 32; ++j) {
    REQUIRE(photon_cov(s, j, j) == doctest::Approx(std::norm(s.alpha()[j])));
  }
}

TEST_CASE("twin beams from one pair") {
  const double s = std::acosh(std::sqrt(4.5));
  auto p = single_pair(s);
  const auto out_vac = apply_bogoliubov(vacuum_state(16), p.t);
  const double sh2 = std::pow(std::sinh(s), 2);
  CHECK(photon_mean(out_vac, beam_weights(16, 1, 0)) == doctest::Approx(sh2));
  CHECK(photon_mean(out_vac, beam_weights(16, 1, 0)) ==
        doctest::Approx(photon_mean(out_vac, beam_weights(16, 0, 1))).epsilon(1e-14));
  CHECK(detector_noise(out_vac, beam_weights(16, 1, -1)).var_N ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(out_vac.physicality_margin() > -1e-8);

  const auto in = seed_coherent(vacuum_state(16), Beam::probe, p.u, 1000.0);
  const auto out = apply_bogoliubov(in, p.t);
  CHECK(photon_mean(out, beam_weights(16, 1, 0)) ==
        doctest::Approx(4.5e6 + sh2).epsilon(1e-12));
  CHECK(photon_mean(out, beam_weights(16, 0, 1)) ==
        doctest::Approx(3.5e6 + sh2).epsilon(1e-12));

  const auto ideal = detector_noise(out, beam_weights(16, 1, -1));
  CHECK(ideal.var_N / ideal.sql == doctest::Approx(1.0 / 8.0).epsilon(1e-6));
  CHECK(ideal.rel_sql_db == doctest::Approx(-9.03).epsilon(1e-3));
  const auto lossy = masked_detector_noise(out, eta_t(16, 0.9), beam_weights(16, 1, -1));
  CHECK(lossy.var_N / lossy.sql == doctest::Approx(0.2125).epsilon(1e-6));
  CHECK(lossy.rel_sql_db == doctest::Approx(-6.73).epsilon(1e-3));
  // Same through explicit masks.
  auto lossy_state = apply_transmission(out, Beam::probe, Eigen::VectorXd::Constant(16, std::sqrt(0.9)));
  lossy_state = apply_transmission(lossy_state, Beam::conjugate,
                                   Eigen::VectorXd::Constant(16, std::sqrt(0.9)));
  const auto lossy2 = detector_noise(lossy_state, beam_weights(16, 1, -1));
  CHECK(lossy2.var_N == doctest::Approx(lossy.var_N).epsilon(1e-12));

  // Single amplified probe: var/SQL = 2G - 1 for a bright seed.
  const auto probe = detector_noise(out, beam_weights(16, 1, 0));
  CHECK(probe.var_N / probe.sql == doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("dense path matches the coherent fast path") {
  const double s = 0.8;
  auto p = single_pair(s);
  const auto in = seed_coherent(vacuum_state(16), Beam::probe, p.u, cplx(2.0, 1.0));
  const auto fast = apply_bogoliubov(in, p.t);
  // Force the dense path with a tiny thermal admixture, then compare a second pass.
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(32, 32);
  a(0, 0) = 1e-30;
  const auto forced = state_from_moments(in.alpha(), a, Eigen::MatrixXcd::Zero(32, 32));
  const auto dense = apply_bogoliubov(forced, p.t);
  CHECK((fast.dense_A() - dense.dense_A()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fast.dense_B() - dense.dense_B()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fast.alpha() - dense.alpha()).cwiseAbs().maxCoeff() < 1e-12);
  const auto twice = apply_bogoliubov(dense, p.t);
  CHECK(twice.physicality_margin() > -1e-8);
  // Two passes of s equal one pass of 2s.
  auto p2 = single_pair(2 * s);
  const auto once = apply_bogoliubov(in, p2.t);
  CHECK((twice.dense_A() - once.dense_A()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((twice.dense_B() - once.dense_B()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("thermal marginal and covariance") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 1.0;
  const auto th = state_from_moments(Eigen::VectorXcd::Zero(2), a, Eigen::MatrixXcd::Zero(2, 2));
  CHECK(photon_cov(th, 0, 0) == doctest::Approx(2.0));
  CHECK(th.physicality_margin() >= 0.0);
  Eigen::MatrixXcd bad = a;
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(state_from_moments(Eigen::VectorXcd::Zero(2), bad, Eigen::MatrixXcd::Zero(2, 2)),
                  Error);
}

TEST_CASE("detector noise equals the pairwise covariance sum") {
  auto p = single_pair(0.6);
  const auto in = seed_coherent(vacuum_state(16), Beam::probe, p.u, cplx(1.5, -0.5));
  const auto out = apply_bogoliubov(in, p.t);
  Eigen::VectorXd w(32);
  for (int j = 0; j < 32; ++j) w[j] = std::sin(0.7 * j) + (j % 3 == 0 ? -0.4 : 0.2);
  double var = 0.0;
  for (std::size_t j = 0; j < 32; ++j) {
    for (std::size_t k = 0; k < 32; ++k) var += w[j] * w[k] * photon_cov(out, j, k);
  }
  const auto r = detector_noise(out, w);
  CHECK(r.var_N == doctest::Approx(var).epsilon(1e-12));
  CHECK(r.mean_N == doctest::Approx(photon_mean(out, w)).epsilon(1e-12));
}

TEST_CASE("attenuation law and single-mode clipping") {
  auto p = single_pair(std::acosh(std::sqrt(4.5)));
  const auto in = seed_coherent(vacuum_state(16), Beam::probe, p.u, 300.0);
  const auto out = apply_bogoliubov(in, p.t);
  const auto g = p.grid;
  const double q1 = mandel_q_single_beam(out, Beam::probe, all_pass(g));
  for (double t : {0.2, 0.5, 0.9}) {
    const double qa = mandel_q_single_beam(out, Beam::probe, attenuator_mask(g, t));
    CHECK(qa == doctest::Approx(t * q1).epsilon(1e-9));
  }
  // Single bright mode: clipping acts as attenuation at equal detected fraction.
  const auto clip = edge_mask(g, 3.5, Keep::below, EdgeAxis::x);
  const double frac = photon_mean(apply_mask(out, Beam::probe, clip), beam_weights(16, 1, 0)) /
                      photon_mean(out, beam_weights(16, 1, 0));
  const double qc = mandel_q_single_beam(out, Beam::probe, clip);
  const double qa = mandel_q_single_beam(out, Beam::probe, attenuator_mask(g, frac));
  CHECK(qc == doctest::Approx(qa).epsilon(1e-9));
  CHECK_THROWS_AS(apply_transmission(out, Beam::probe, Eigen::VectorXd::Constant(16, 1.1)),
                  Error);
  CHECK(to_json(detector_noise(out, beam_weights(16, 1, 0))).contains("rel_sql_db"));
}
