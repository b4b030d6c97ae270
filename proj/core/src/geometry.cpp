#include "fedpg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fedpg {

double distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

UavState uav_step(const UavState& state, double yaw, double speed,
                  const HotspotRegion& region) {
  if (!(yaw >= 0.0 && yaw < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("uav_step: yaw outside [0, 2pi)");
  }
  if (!(speed >= 0.0 && speed <= state.max_step)) {
    throw std::invalid_argument("uav_step: speed outside [0, max_step]");
  }
  UavState next = state;
  const double x = state.position.x + speed * std::cos(yaw);
  const double y = state.position.y + speed * std::sin(yaw);
  next.position.x = std::clamp(x, -region.half_width_x, region.half_width_x);
  next.position.y = std::clamp(y, -region.half_width_y, region.half_width_y);
  return next;
}

ServiceWindow service_window(const HotspotRegion& region, double orbit_radius,
                             double angular_velocity) {
  if (!(region.half_width_x < orbit_radius)) {
    throw std::invalid_argument("service_window: hotspot wider than orbit radius");
  }
  if (!(angular_velocity > 0.0)) {
    throw std::invalid_argument("service_window: angular velocity must be positive");
  }
  ServiceWindow w;
  w.phase_enter = std::asin(-region.half_width_x / orbit_radius);
  w.phase_leave = std::asin(region.half_width_x / orbit_radius);
  w.delta_phase = w.phase_leave - w.phase_enter;
  w.delta_t = w.delta_phase / angular_velocity;
  return w;
}

OrbitModel make_orbit(const OrbitConstants& constants,
                      const HotspotRegion& region) {
  OrbitModel orbit;
  orbit.earth_radius = constants.earth_radius;
  orbit.orbit_radius = constants.earth_radius + constants.altitude;
  orbit.angular_velocity = constants.angular_velocity;
  orbit.y_offset = constants.y_offset;
  if (!(orbit.orbit_radius > orbit.earth_radius)) {
    throw std::invalid_argument("make_orbit: altitude must be positive");
  }
  const ServiceWindow w =
      service_window(region, orbit.orbit_radius, orbit.angular_velocity);
  orbit.phase_enter = w.phase_enter;
  orbit.phase_leave = w.phase_leave;
  orbit.service_duration = w.delta_t;
  return orbit;
}

Vec3 satellite_position(const OrbitModel& orbit, double t) {
  // A zero-width window degenerates to a satellite parked at phase_enter.
  const double elapsed =
      orbit.service_duration > 0.0 ? std::fmod(t, orbit.service_duration) : 0.0;
  const double phase = orbit.phase_enter + orbit.angular_velocity * elapsed;
  return {orbit.orbit_radius * std::sin(phase), orbit.y_offset,
          -orbit.earth_radius + orbit.orbit_radius * std::cos(phase)};
}

}  // namespace fedpg
