#pragma once

#include <Eigen/Core>

namespace sspiv {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// A point on the unit sphere in array coordinates.
///
/// Azimuth is measured from +x towards +y and stored wrapped to [0, 360).
/// Inclination is the polar angle from +z in [0, 180]; an out-of-range
/// inclination is rejected, never clamped.
struct Direction {
  double az_deg = 0.0;
  double incl_deg = 0.0;

  Direction() = default;
  Direction(double azimuth_deg, double inclination_deg);

  /// Elevation (90 - inclination), used only at reporting boundaries.
  double el_deg() const { return 90.0 - incl_deg; }

  static Direction from_azimuth_elevation(double az_deg, double el_deg) {
    return Direction(az_deg, 90.0 - el_deg);
  }
};

/// Wraps an azimuth into [0, 360).
double wrap_azimuth_deg(double az_deg);

/// (sin th cos ph, sin th sin ph, cos th), unit norm to 1e-12.
Eigen::Vector3d unit_vector(const Direction& d);

/// Inverse of unit_vector. Azimuth of a pole-aligned vector is 0.
Direction direction_from_unit(const Eigen::Vector3d& v);

/// Great-circle angle between two directions, degrees in [0, 180].
double great_circle_deg(const Direction& a, const Direction& b);

}  // namespace sspiv
