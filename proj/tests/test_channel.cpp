#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "wallsense/channel.hpp"
#include "wallsense/error.hpp"
#include "wallsense/geometry.hpp"

using namespace wallsense;

namespace {

constexpr double kPiRef = 3.141592653589793;

RoomLayout canonical_room() {
  return RoomLayout::from_vertices({{0, 0}, {8, 0}, {8, 6}, {0, 6}}, {3});
}

PathSet no_wall_paths(double r_d, double r_t, double r_r) {
  PathSet ps;
  ps.r_d = r_d;
  ps.r_t = r_t;
  ps.r_r = r_r;
  return ps;
}

}  // namespace

TEST_CASE("derived parameters") {
  const RfParameters rf;
  CHECK(rf.aperture_m2() == doctest::Approx(0.06 * 0.06 / (4 * kPiRef)));
  CHECK(rf.aperture_m2() == doctest::Approx(2.86479e-4).epsilon(1e-5));
  CHECK(rf.alpha1() == doctest::Approx(0.09 / (4 * kPiRef)));
  CHECK(rf.alpha2() == doctest::Approx(0.3 / std::sqrt(kPiRef)));
  CHECK(rf.alpha2() == doctest::Approx(2.0 * std::sqrt(rf.alpha1())));
  CHECK_NOTHROW(rf.validate());

  RfParameters bad = rf;
  bad.wall_reflection = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = rf;
  bad.wavelength_m = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = rf;
  bad.floor_w = 0.0;
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("line-of-sight power") {
  const RfParameters rf;
  const double expected = 1.0 * 1.0 * (0.0036 / (4 * kPiRef)) / (4 * kPiRef * 9.0);
  CHECK(p_los(rf, 3.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(p_los(rf, 3.0) == doctest::Approx(2.53303e-6).epsilon(1e-5));
  CHECK(p_los(rf, 6.0) == doctest::Approx(p_los(rf, 3.0) / 4.0).epsilon(1e-14));
  RfParameters g2 = rf;
  g2.gain_tx = 2.0;
  CHECK(p_los(g2, 3.0) == doctest::Approx(2.0 * p_los(rf, 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(p_los(rf, 0.0), DomainError);
}

TEST_CASE("target-reflected power") {
  const RfParameters rf;
  const double a_r = 0.0036 / (4 * kPiRef);
  CHECK(p_dyn_los(rf, 1.0, 1.0) == doctest::Approx(a_r / (16 * kPiRef * kPiRef)).epsilon(1e-14));
  CHECK(p_dyn_los(rf, 2.0, 0.7) == p_dyn_los(rf, 0.7, 2.0));
  CHECK(p_dyn_los(rf, 2.5, 2.5) == doctest::Approx(4.6411e-8).epsilon(1e-4));
  CHECK_THROWS_AS(p_dyn_los(rf, -1.0, 1.0), DomainError);
}

TEST_CASE("wall-relayed power") {
  RfParameters rf;
  const double a_r = rf.aperture_m2();
  const double d1 = std::hypot(0.5, 0.4), d2 = std::hypot(2.0, 1.6), r = 2.5;
  const double expected = 0.09 * a_r / std::pow(4 * kPiRef, 3) / std::pow(d1 * d2 * r, 2);
  CHECK(p_dyn_wall(rf, d1, d2, r) == doctest::Approx(expected).epsilon(1e-13));

  RfParameters no_wall = rf;
  no_wall.wall_reflection = 0.0;
  CHECK(p_dyn_wall(no_wall, d1, d2, r) == 0.0);

  RfParameters mirror = rf;
  mirror.wall_reflection = 1.0;
  // d1·d2 = r_T: the three-hop cascade is the two-hop one divided by 4π.
  CHECK(p_dyn_wall(mirror, 1.5, 2.0, 2.5) ==
        doctest::Approx(p_dyn_los(mirror, 3.0, 2.5) / (4 * kPiRef)).epsilon(1e-13));
}

TEST_CASE("phase difference") {
  CHECK(phase_difference(1.0, 2.0, 3.0, 0.06) == 0.0);
  CHECK(phase_difference(1.0, 2.03, 3.0, 0.06) == doctest::Approx(kPiRef).epsilon(1e-12));
  CHECK(phase_difference(0.6403, 2.5612, 2.4999, 0.06) == doctest::Approx(73.47).epsilon(1e-3));
}

TEST_CASE("coherent sum") {
  CHECK(p_dyn_combined({}, 0.06) == 0.0);
  const std::vector<PathPower> one{{3.0, 2.0}};
  CHECK(p_dyn_combined(one, 0.06) == doctest::Approx(3.0));
  const std::vector<PathPower> cancel{{1.0, 2.0}, {1.0, 2.03}};
  CHECK(p_dyn_combined(cancel, 0.06) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  const std::vector<PathPower> add{{4.0, 2.0}, {1.0, 2.06}};
  CHECK(p_dyn_combined(add, 0.06) == doctest::Approx(9.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> p(0.0, 10.0), l(0.5, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<PathPower> two{{p(rng), l(rng)}, {p(rng), l(rng)}};
    const double v = p_dyn_combined(two, 0.06);
    const double lo = std::pow(std::sqrt(two[0].power_w) - std::sqrt(two[1].power_w), 2);
    const double hi = std::pow(std::sqrt(two[0].power_w) + std::sqrt(two[1].power_w), 2);
    CHECK(v >= lo - 1e-12 * hi);
    CHECK(v <= hi * (1 + 1e-12));
  }
}

TEST_CASE("simplified SSNR without a wall path") {
  CHECK(ssnr_simplified(no_wall_paths(3.0, 1.5, 1.5), 0.1, 0.2, 0.06) ==
        doctest::Approx(9.0 / 5.0625));
  CHECK(ssnr_simplified(no_wall_paths(3.0, 1.5, 1.5), 0.0, 0.0, 0.06) ==
        doctest::Approx(1.7778).epsilon(1e-4));
  PathSet singular = no_wall_paths(3.0, 0.0, 3.0);
  singular.singular = true;
  CHECK_THROWS_AS(ssnr_simplified(singular, 0.1, 0.2, 0.06), DomainError);
}

TEST_CASE("simplified SSNR matches a term-by-term evaluation") {
  const RfParameters rf;
  const DevicePlacement dp{{0.5, 1}, {3.5, 1}};
  const Point2D target{2, 2};
  // Independent geometry: images of each device across x = 0.
  const double r_d = 3.0;
  const double r_t = std::hypot(1.5, 1.0);
  const double r_r = std::hypot(1.5, 1.0);
  const double tx_img = std::hypot(2.5, 1.0);   // (-0.5,1) to (2,2)
  const double t_tx = 0.5 / 2.5;
  const double d1_tx = t_tx * tx_img, d2_tx = tx_img - d1_tx;
  const double rx_img = std::hypot(5.5, 1.0);   // (-3.5,1) to (2,2)
  const double t_rx = 3.5 / 5.5;
  const double d1_rx = t_rx * rx_img, d2_rx = rx_img - d1_rx;

  const double a1 = rf.alpha1(), a2 = rf.alpha2(), lam = rf.wavelength_m;
  const double phi_tx = 2 * kPiRef * (d1_tx + d2_tx - r_t) / lam;
  const double phi_rx = 2 * kPiRef * (d1_rx + d2_rx - r_r) / lam;
  const double w_tx = r_d / (d1_tx * d2_tx * r_r);
  const double w_rx = r_d / (d1_rx * d2_rx * r_t);
  double expected = r_d * r_d / std::pow(r_t * r_r, 2);
  expected += a1 * w_tx * w_tx + a2 * std::cos(phi_tx) * r_d * r_d / (d1_tx * d2_tx * r_t * r_r * r_r);
  expected += a1 * w_rx * w_rx + a2 * std::cos(phi_rx) * r_d * r_d / (d1_rx * d2_rx * r_r * r_t * r_t);
  expected += 2 * a1 * w_tx * w_rx * std::cos(phi_tx - phi_rx);

  const PathSet ps = path_set(dp, target, canonical_room());
  CHECK(ssnr_simplified(ps, a1, a2, lam) == doctest::Approx(expected).epsilon(1e-9));

  // Same value from the normalised complex amplitudes.
  const std::complex<double> sum = std::complex<double>(r_d / (r_t * r_r), 0.0) +
                                   std::sqrt(a1) * std::polar(w_tx, -phi_tx) +
                                   std::sqrt(a1) * std::polar(w_rx, -phi_rx);
  CHECK(ssnr_simplified(ps, a1, a2, lam) == doctest::Approx(std::norm(sum)).epsilon(1e-9));
}

TEST_CASE("full SSNR matches a step-by-step cascade") {
  const RfParameters rf;
  const DevicePlacement dp{{0.5, 1}, {3.5, 1}};
  const Point2D target{2, 2};
  const PathSet ps = path_set(dp, target, canonical_room());

  const double four_pi = 4 * kPiRef;
  const double a_r = rf.gain_rx * rf.wavelength_m * rf.wavelength_m / four_pi;
  const double r_t = std::hypot(1.5, 1.0), r_r = r_t;
  // Power at the target, then scattered to the receiver.
  const double at_target = rf.ptx_w * rf.gain_tx / (four_pi * r_t * r_t);
  const double los = at_target * rf.rcs_m2 / (four_pi * r_r * r_r) * a_r;

  const double tx_img = std::hypot(2.5, 1.0), d1 = 0.2 * tx_img, d2 = tx_img - d1;
  const double at_wall = rf.ptx_w * rf.gain_tx / (four_pi * d1 * d1);
  const double wall_to_target = at_wall * rf.wall_reflection * rf.wall_reflection / (four_pi * d2 * d2);
  const double wall = wall_to_target * rf.rcs_m2 / (four_pi * r_r * r_r) * a_r;

  const double rx_img = std::hypot(5.5, 1.0), e1 = 3.5 / 5.5 * rx_img, e2 = rx_img - e1;
  const double at_target_rx = rf.ptx_w * rf.gain_tx / (four_pi * r_t * r_t);
  const double rx_wall = at_target_rx * rf.rcs_m2 * rf.wall_reflection * rf.wall_reflection /
                         (four_pi * e2 * e2 * four_pi * e1 * e1) * a_r;

  const double k = 2 * kPiRef / rf.wavelength_m;
  const std::complex<double> field = std::polar(std::sqrt(los), -k * (r_t + r_r)) +
                                     std::polar(std::sqrt(wall), -k * (d1 + d2 + r_r)) +
                                     std::polar(std::sqrt(rx_wall), -k * (r_t + e2 + e1));
  const double p_los_w = rf.ptx_w * rf.gain_tx * a_r / (four_pi * 9.0);
  const double expected = std::norm(field) / (rf.gamma * p_los_w + rf.floor_w);
  CHECK(ssnr_full(rf, ps).linear == doctest::Approx(expected).epsilon(1e-9));
  CHECK(ssnr_full(rf, ps).db == doctest::Approx(10 * std::log10(expected)).epsilon(1e-9));
}

TEST_CASE("full SSNR limits") {
  const RfParameters rf;
  const PathSet ps = no_wall_paths(3.0, 2.0, 1.5);
  CHECK(ssnr_full(rf, ps).linear ==
        doctest::Approx(p_dyn_los(rf, 2.0, 1.5) / (rf.gamma * p_los(rf, 3.0) + rf.floor_w)));
  RfParameters floor_only = rf;
  floor_only.gamma = 1e-300;
  floor_only.floor_w = 1e-9;
  CHECK(ssnr_full(floor_only, ps).linear == doctest::Approx(p_dyn_los(rf, 2.0, 1.5) / 1e-9));

  // With b = 0 the full form is the simplified one times σ/(4πγ).
  RfParameters no_floor = rf;
  no_floor.floor_w = 0.0;
  const PathSet wall = path_set({{0.5, 1}, {3.5, 1}}, {2, 2}, canonical_room());
  CHECK(ssnr_full(no_floor, wall).linear ==
        doctest::Approx(rf.rcs_m2 / (4 * kPiRef * rf.gamma) *
                        ssnr_simplified(wall, rf.alpha1(), rf.alpha2(), rf.wavelength_m))
            .epsilon(1e-10));
}

TEST_CASE("wall-only simplified term") {
  PathSet ps = no_wall_paths(2.0, 3.0, 1.0);
  ps.reflected.push_back({PathSide::Tx, 0, {1.0, 1.0, {}, true}});
  CHECK(ssnr_wall_simplified(ps) == doctest::Approx(4.0));
  ps.reflected[0].path.d1 = 2.0;
  CHECK(ssnr_wall_simplified(ps) == doctest::Approx(1.0));
  ps.r_d = 4.0;
  CHECK(ssnr_wall_simplified(ps) == doctest::Approx(4.0));
}

TEST_CASE("Cassini constant") {
  CHECK(cassini_constant(3.0, 1.0) == doctest::Approx(3.0));
  CHECK(cassini_constant(3.0, 4.0) == doctest::Approx(1.5));
  CHECK(cassini_constant(3.0, db_to_linear(2.0)) == doctest::Approx(2.3829).epsilon(1e-4));
  CHECK_THROWS_AS(cassini_constant(0.0, 1.0), DomainError);
}

TEST_CASE("model dispatch and calibration") {
  ModelConfig model;
  const PathSet ps = path_set({{0.5, 3}, {3.5, 3}}, {2, 4}, canonical_room());
  const double s = ssnr_simplified(ps, model.rf.alpha1(), model.rf.alpha2(), model.rf.wavelength_m);
  CHECK(ssnr_db(model, ps) == doctest::Approx(10 * std::log10(s)));
  model.scale = 10.0;
  CHECK(ssnr_db(model, ps) == doctest::Approx(10 * std::log10(s) + 10.0));
  model.mode = ModelMode::Full;
  CHECK(ssnr_db(model, ps) == ssnr_full(model.rf, ps).db);

  ModelConfig simple;
  simple.scale = calibrate_scale(simple, ps, 2.0);
  CHECK(ssnr_db(simple, ps) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("SsnrValue") {
  CHECK(SsnrValue::from_linear(100.0).db == doctest::Approx(20.0));
  CHECK(std::isinf(SsnrValue::from_linear(0.0).db));
  CHECK(SsnrValue::from_linear(-1.0).db < 0);
}
