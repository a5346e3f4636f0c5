#include "twinbeam/detection.hpp"
#include "twinbeam/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace twinbeam;

TEST_CASE("iris") {
  const auto g = make_grid(12.0, 128, 2);
  CHECK(iris_mask(g, {0, 0}, 20.0).t.minCoeff() == 1.0);
  const auto f = gaussian_mode(g, {0.0, 0.0}, 2.0);
  const double pt = power_transmission(iris_mask(g, {0, 0}, 2.0), f);
  CHECK(pt == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(0.02));
  const auto m = iris_mask(g, {7, 0}, 0.7);
  CHECK(m.t.sum() > 0);
  CHECK(m.t.maxCoeff() == 1.0);
  CHECK_THROWS_AS(iris_mask(g, {0, 0}, 0.0), Error);
}

TEST_CASE("slits") {
  const auto g = make_grid(12.0, 64, 2);
  CHECK(slit_mask(g, {7, 0}, 100.0, SlitOrientation::polar).t.minCoeff() == 1.0);
  const auto f = gaussian_mode(g, {7, 0}, 0.5);
  const auto az = slit_mask(g, {7, 0}, 0.4, SlitOrientation::azimuthal);
  const double pt = power_transmission(az, f);
  CHECK(pt < 1.0);
  CHECK(pt > 0.0);
  // Azimuthal slit at (7, 0) is a band in x, polar slit a band in y.
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Point q = g.position(p);
    REQUIRE((az.t[p] == 1.0) == (std::abs(q.x - 7.0) <= 0.2));
  }
  const auto x1 = make_grid(16.0, 256, 1, CutAxis::x);
  const auto y1 = make_grid(16.0, 256, 1, CutAxis::y);
  CHECK(slit_mask(x1, {7, 0}, 0.4, SlitOrientation::polar).t.minCoeff() == 1.0);
  CHECK(slit_mask(y1, {0, 0}, 0.4, SlitOrientation::azimuthal).t.minCoeff() == 1.0);
  CHECK(slit_mask(y1, {0, 0}, 0.4, SlitOrientation::polar).t.sum() == 4.0);
  CHECK_THROWS_AS(slit_mask(g, {7, 0}, -1.0, SlitOrientation::polar), Error);
}

TEST_CASE("edges and symmetry") {
  const auto g = make_grid(16.0, 256, 1);
  CHECK(edge_mask(g, 100.0, Keep::below, EdgeAxis::x).t.minCoeff() == 1.0);
  CHECK(edge_mask(g, 100.0, Keep::above, EdgeAxis::x).t.maxCoeff() == 0.0);
  const auto fp = gaussian_mode(g, {7, 0}, 1.0);
  const auto fc = mirror_image(fp, MirrorAxis::y);
  const auto ep = edge_mask(g, 7.3, Keep::below, EdgeAxis::x);
  const auto ec = edge_mask(g, -7.3, Keep::above, EdgeAxis::x);
  CHECK(power_transmission(ep, fp) == power_transmission(ec, fc));
  CHECK(power_transmission(mirror_mask(ep, MirrorAxis::y), fc) ==
        power_transmission(ep, fp));
}

TEST_CASE("attenuator and composition") {
  const auto g = make_grid(12.0, 32, 2);
  const auto f = lg_mode(g, {3, 1}, 2.0, 1);
  CHECK(power_transmission(all_pass(g), f) == doctest::Approx(1.0));
  CHECK(power_transmission(attenuator_mask(g, 0.37), f) == doctest::Approx(0.37));
  CHECK(attenuator_mask(g, 0.0).t.maxCoeff() == 0.0);
  CHECK_THROWS_AS(attenuator_mask(g, 1.5), Error);
  const auto a = iris_mask(g, {3, 1}, 2.0);
  const auto b = edge_mask(g, 3.0, Keep::below, EdgeAxis::x);
  const auto c = compose(a, b);
  CHECK(power_transmission(c, f) <=
        std::min(power_transmission(a, f), power_transmission(b, f)));
  CHECK(compose(a, a).t == a.t);
  CHECK_THROWS_AS(power_transmission(a, ModeField{g, Eigen::VectorXcd::Zero(g.size())}),
                  Error);
  const auto js = to_json(a.descriptor);
  CHECK(js["kind"] == "iris");
  CHECK(js["size"] == 2.0);
}
