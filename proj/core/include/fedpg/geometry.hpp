#pragma once

// Spatial model: ground users, the UAV-RIS relay flying at a fixed cruise
// altitude, and the serving LEO satellite sweeping a circular arc over the
// hotspot. Ground plane is z = 0; all lengths in meters, time in seconds.

namespace fedpg {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(const Vec3& a, const Vec3& b);

struct HotspotRegion {
  double half_width_x = 500.0;
  double half_width_y = 500.0;
};

struct UavState {
  Vec3 position;
  double max_step = 12.0;
};

/// Moves the UAV `speed` meters along heading `yaw`, then clamps the
/// horizontal position into the hotspot box. Throws std::invalid_argument if
/// yaw is outside [0, 2pi) or speed outside [0, max_step].
UavState uav_step(const UavState& state, double yaw, double speed,
                  const HotspotRegion& region);

struct ServiceWindow {
  double phase_enter = 0.0;
  double phase_leave = 0.0;
  double delta_phase = 0.0;
  double delta_t = 0.0;
};

/// Orbit angles at which the serving satellite enters and leaves the
/// hotspot, and the resulting per-satellite service time.
ServiceWindow service_window(const HotspotRegion& region, double orbit_radius,
                             double angular_velocity);

/// Constellation constants shared by every hotspot.
struct OrbitConstants {
  double earth_radius = 6'378'137.0;
  double altitude = 550'000.0;
  double angular_velocity = 0.001076;
  double y_offset = 0.0;
};

struct OrbitModel {
  double earth_radius = 0.0;
  double orbit_radius = 0.0;
  double angular_velocity = 0.0;
  double y_offset = 0.0;
  double phase_enter = 0.0;
  double phase_leave = 0.0;
  double service_duration = 0.0;
};

OrbitModel make_orbit(const OrbitConstants& constants,
                      const HotspotRegion& region);

/// Position of the currently serving satellite. Handover to the next
/// satellite happens every `service_duration`, which restarts the arc at
/// phase_enter.
Vec3 satellite_position(const OrbitModel& orbit, double t);

}  // namespace fedpg
