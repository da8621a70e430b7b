#pragma once

#include <string>
#include <vector>

#include "sspiv/direction.hpp"
#include "sspiv/special.hpp"

namespace sspiv {

/// Sensor layout of a spherical microphone array. Immutable after load.
struct ArrayGeometry {
  std::string label;
  double radius_m = 0.0;
  Baffle baffle = Baffle::RigidSphere;
  std::vector<Direction> sensors;

  int num_sensors() const { return static_cast<int>(sensors.size()); }
};

/// Validates the invariants that depend on the analysis order:
/// at least (order+1)^2 sensors, all sensor directions distinct, radius > 0.
void validate_geometry(const ArrayGeometry& g, int sh_order);

/// Loads a geometry JSON file:
///   {"label": ..., "radius_m": ..., "baffle": "rigid"|"open",
///    "sensors": [{"az_deg": ..., "incl_deg": ...}, ...]}
ArrayGeometry load_geometry(const std::string& path, int sh_order);

/// Parses geometry JSON from a string (same schema as load_geometry).
ArrayGeometry parse_geometry(const std::string& json_text, int sh_order);

}  // namespace sspiv
