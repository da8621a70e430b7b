#include "sspiv/geometry.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sspiv {

void validate_geometry(const ArrayGeometry& g, int sh_order) {
  if (sh_order < 0) throw std::invalid_argument("negative SH order");
  if (g.radius_m <= 0.0) throw std::invalid_argument("geometry radius must be > 0");
  const int needed = (sh_order + 1) * (sh_order + 1);
  if (g.num_sensors() < needed) {
    throw std::invalid_argument("insufficient sensors: " + std::to_string(g.num_sensors()) +
                                " < (N+1)^2 = " + std::to_string(needed) + " for order " +
                                std::to_string(sh_order));
  }
  for (std::size_t i = 0; i < g.sensors.size(); ++i) {
    for (std::size_t j = i + 1; j < g.sensors.size(); ++j) {
      if (great_circle_deg(g.sensors[i], g.sensors[j]) < 1e-9) {
        throw std::invalid_argument("duplicate sensor directions at indices " +
                                    std::to_string(i) + ", " + std::to_string(j));
      }
    }
  }
}

ArrayGeometry parse_geometry(const std::string& json_text, int sh_order) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("geometry parse error: ") + e.what());
  }

  ArrayGeometry g;
  try {
    g.label = j.value("label", std::string("unnamed"));
    g.radius_m = j.at("radius_m").get<double>();
    const std::string baffle = j.at("baffle").get<std::string>();
    if (baffle == "rigid") {
      g.baffle = Baffle::RigidSphere;
    } else if (baffle == "open") {
      g.baffle = Baffle::OpenSphere;
    } else {
      throw std::runtime_error("baffle must be \"rigid\" or \"open\"");
    }
    for (const auto& s : j.at("sensors")) {
      g.sensors.emplace_back(s.at("az_deg").get<double>(), s.at("incl_deg").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("geometry schema error: ") + e.what());
  }

  validate_geometry(g, sh_order);
  return g;
}

ArrayGeometry load_geometry(const std::string& path, int sh_order) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open geometry file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_geometry(buf.str(), sh_order);
}

}  // namespace sspiv
