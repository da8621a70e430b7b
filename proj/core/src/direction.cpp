#include "sspiv/direction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sspiv {

double wrap_azimuth_deg(double az_deg) {
  double a = std::fmod(az_deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a = 0.0;  // fmod can round back up to 360
  return a;
}

Direction::Direction(double azimuth_deg, double inclination_deg) {
  if (!(inclination_deg >= 0.0 && inclination_deg <= 180.0)) {
    throw std::invalid_argument("inclination out of range [0, 180]: " +
                                std::to_string(inclination_deg));
  }
  az_deg = wrap_azimuth_deg(azimuth_deg);
  incl_deg = inclination_deg;
}

Eigen::Vector3d unit_vector(const Direction& d) {
  const double th = deg2rad(d.incl_deg);
  const double ph = deg2rad(d.az_deg);
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

Direction direction_from_unit(const Eigen::Vector3d& v) {
  const double z = std::clamp(v.z() / v.norm(), -1.0, 1.0);
  const double incl = rad2deg(std::acos(z));
  double az = rad2deg(std::atan2(v.y(), v.x()));
  return Direction(wrap_azimuth_deg(az), incl);
}

double great_circle_deg(const Direction& a, const Direction& b) {
  const double c = std::clamp(unit_vector(a).dot(unit_vector(b)), -1.0, 1.0);
  return rad2deg(std::acos(c));
}

}  // namespace sspiv
