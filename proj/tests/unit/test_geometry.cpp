#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fedpg/geometry.hpp"
#include "fedpg/random.hpp"

namespace fedpg {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance({0, 0, 0}, {3, 4, 0}), 5.0);
  EXPECT_DOUBLE_EQ(distance({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(distance({0, 0, 100}, {0, 0, 0}), 100.0);
}

TEST(Distance, SymmetricAndTriangleInequality) {
  Rng rng = derive_stream(3, StreamRole::kScenario);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a{uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3)};
    const Vec3 b{uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3)};
    const Vec3 c{uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3)};
    EXPECT_EQ(distance(a, b), distance(b, a));
    EXPECT_GE(distance(a, b), 0.0);
    EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-9);
  }
}

TEST(UavStep, Examples) {
  const HotspotRegion region{500, 500};
  const UavState s{{0, 0, 100}, 12};
  const UavState moved = uav_step(s, 0.0, 5.0, region);
  EXPECT_DOUBLE_EQ(moved.position.x, 5.0);
  EXPECT_DOUBLE_EQ(moved.position.y, 0.0);
  EXPECT_DOUBLE_EQ(moved.position.z, 100.0);

  const UavState edge = uav_step({{0, 495, 100}, 12}, kPi / 2, 12.0, region);
  EXPECT_NEAR(edge.position.x, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(edge.position.y, 500.0);
  EXPECT_DOUBLE_EQ(edge.position.z, 100.0);

  const UavState still = uav_step({{17, -3, 100}, 12}, 1.3, 0.0, region);
  EXPECT_EQ(still.position, (Vec3{17, -3, 100}));
}

TEST(UavStep, RejectsInadmissibleActions) {
  const HotspotRegion region{500, 500};
  const UavState s{{0, 0, 100}, 12};
  EXPECT_THROW(uav_step(s, -0.1, 1.0, region), std::invalid_argument);
  EXPECT_THROW(uav_step(s, 2 * kPi, 1.0, region), std::invalid_argument);
  EXPECT_THROW(uav_step(s, 0.0, 12.5, region), std::invalid_argument);
  EXPECT_THROW(uav_step(s, 0.0, -1.0, region), std::invalid_argument);
  EXPECT_THROW(uav_step(s, std::nan(""), 1.0, region), std::invalid_argument);
}

TEST(UavStep, AlwaysInsideTheBox) {
  const HotspotRegion region{40, 25};
  Rng rng = derive_stream(4, StreamRole::kScenario);
  UavState s{{0, 0, 100}, 12};
  for (int i = 0; i < 5000; ++i) {
    s = uav_step(s, uniform(rng, 0, 2 * kPi), uniform(rng, 0, 12), region);
    ASSERT_LE(std::abs(s.position.x), 40.0);
    ASSERT_LE(std::abs(s.position.y), 25.0);
    ASSERT_EQ(s.position.z, 100.0);
  }
}

TEST(ServiceWindow, TableValues) {
  const double rl = 6'378'137.0 + 550'000.0;
  const ServiceWindow w = service_window({500, 500}, rl, 0.001076);
  // Independent evaluation: 2 asin(X / R^L).
  const double dphi = 2.0 * std::asin(500.0 / 6'928'137.0);
  EXPECT_NEAR(w.delta_phase, dphi, 1e-18);
  EXPECT_NEAR(w.delta_phase, 1.4434e-4, 5e-9);
  EXPECT_NEAR(w.delta_t, dphi / 0.001076, 1e-15);
  EXPECT_NEAR(w.delta_t, 0.1342, 1e-4);  // quoted value is rounded
  EXPECT_DOUBLE_EQ(w.phase_enter, -w.phase_leave);
  EXPECT_NEAR(std::sin(w.phase_leave) * rl, 500.0, 1e-9);
}

TEST(ServiceWindow, DegenerateAndScaling) {
  const double rl = 6'928'137.0;
  const ServiceWindow zero = service_window({0.0, 1.0}, rl, 0.001);
  EXPECT_EQ(zero.delta_phase, 0.0);
  EXPECT_EQ(zero.delta_t, 0.0);
  for (double x : {10.0, 500.0, 3000.0}) {
    const double a = service_window({x, 1}, rl, 0.001).delta_phase;
    const double b = service_window({2 * x, 1}, rl, 0.001).delta_phase;
    EXPECT_NEAR(b / a, 2.0, 2e-6);
  }
}

TEST(ServiceWindow, Errors) {
  EXPECT_THROW(service_window({10, 10}, 10, 1), std::invalid_argument);
  EXPECT_THROW(service_window({10, 10}, 100, 0), std::invalid_argument);
}

TEST(SatellitePosition, Examples) {
  const OrbitModel orbit = make_orbit({}, {500, 500});
  const Vec3 p0 = satellite_position(orbit, 0.0);
  EXPECT_NEAR(p0.x, -500.0, 1e-9);
  EXPECT_NEAR(p0.z, 550'000.0, 0.05);
  EXPECT_EQ(p0.y, 0.0);
  const Vec3 p1 = satellite_position(orbit, orbit.service_duration);
  EXPECT_NEAR(p1.x, p0.x, 1e-6);
  EXPECT_NEAR(p1.z, p0.z, 1e-6);
}

TEST(SatellitePosition, BoundedAndNondecreasingWithinWindow) {
  const OrbitModel orbit = make_orbit({}, {500, 500});
  const double bound =
      orbit.orbit_radius * std::sin(orbit.phase_leave) + orbit.orbit_radius * orbit.angular_velocity;
  double prev = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const double t = orbit.service_duration * i / 1000.0;
    const Vec3 p = satellite_position(orbit, t);
    EXPECT_GE(p.x, prev);
    prev = p.x;
  }
  for (int t = 0; t < 200; ++t) {
    const Vec3 p = satellite_position(orbit, t * 0.37);
    EXPECT_LE(std::abs(p.x), bound);
    EXPECT_GE(p.x, -500.0 - 1e-9);
  }
}

}  // namespace
}  // namespace fedpg
