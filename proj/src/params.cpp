#include "cavroute/params.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "cavroute/types.hpp"

namespace cavroute {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("config key '" + key + "': not a number: '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("config key '" + key + "': not an integer: '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw InputError("config key '" + key + "': not a boolean: '" + value + "'");
}

int parse_positive_int(const std::string& key, const std::string& value) {
  long long v = parse_int(key, value);
  if (v < 1) throw InputError("config key '" + key + "' must be >= 1");
  return int(v);
}

double parse_positive(const std::string& key, const std::string& value) {
  double v = parse_double(key, value);
  if (!(v > 0.0)) throw InputError("config key '" + key + "' must be > 0");
  return v;
}

}  // namespace

Objective objective_from_string(const std::string& s) {
  if (s == "time") return Objective::Time;
  if (s == "energy-cv" || s == "energy_cv") return Objective::EnergyCv;
  if (s == "energy-phev" || s == "energy_phev") return Objective::EnergyPhev;
  throw InputError("unknown objective '" + s +
                   "' (expected time, energy-cv or energy-phev)");
}

std::string to_string(Objective o) {
  switch (o) {
    case Objective::Time: return "time";
    case Objective::EnergyCv: return "energy-cv";
    default: return "energy-phev";
  }
}

void Parameters::apply_key_value(const std::string& key, const std::string& value) {
  if (key == "routes_per_od") {
    routes_per_od = parse_positive_int(key, value);
  } else if (key == "seed") {
    seed = std::uint64_t(parse_int(key, value));
  } else if (key == "ue.max_iterations") {
    ue.max_iterations = parse_positive_int(key, value);
  } else if (key == "ue.rel_gap_tol") {
    ue.rel_gap_tol = parse_positive(key, value);
  } else if (key == "ue.line_search") {
    ue.line_search = parse_bool(key, value);
  } else if (key == "ue.restrict_to_route_set") {
    ue.restrict_to_route_set = parse_bool(key, value);
  } else if (key == "so.max_iterations") {
    so.max_iterations = parse_positive_int(key, value);
  } else if (key == "so.grad_tol") {
    so.grad_tol = parse_positive(key, value);
  } else if (key == "so.multistarts_energy_phev") {
    so.multistarts_energy_phev = parse_positive_int(key, value);
  } else if (key == "so.smoothing_mph") {
    so.smoothing_mph = parse_positive(key, value);
  } else if (key == "stackelberg.max_outer") {
    stackelberg.max_outer = parse_positive_int(key, value);
  } else if (key == "stackelberg.flow_tol") {
    stackelberg.flow_tol = parse_positive(key, value);
  } else if (key == "stackelberg.damping") {
    stackelberg.damping = parse_double(key, value);
    if (!(stackelberg.damping > 0.0 && stackelberg.damping <= 1.0))
      throw InputError("config key 'stackelberg.damping' must be in (0,1]");
  } else if (key == "cv.gas_price_per_gal") {
    cv.gas_price_per_gal = parse_positive(key, value);
  } else if (key == "cv.max_speed_mph") {
    cv.max_speed_mph = parse_positive(key, value);
  } else if (key == "cdcs.electricity_price_per_kwh") {
    cdcs.electricity_price_per_kwh = parse_positive(key, value);
  } else if (key == "cdcs.battery_kwh") {
    cdcs.battery_kwh = parse_double(key, value);
    if (cdcs.battery_kwh < 0.0)
      throw InputError("config key 'cdcs.battery_kwh' must be >= 0");
  } else if (key == "bands.udds_lo") {
    bands.udds_lo = parse_positive(key, value);
  } else if (key == "bands.hwfet_lo") {
    bands.hwfet_lo = parse_positive(key, value);
  } else {
    throw InputError("unknown config key '" + key + "'");
  }
  if (bands.udds_lo >= bands.hwfet_lo)
    throw InputError("drive cycle bands must satisfy udds_lo < hwfet_lo");
}

void Parameters::apply_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) +
                       ": expected 'key = value'");
    apply_key_value(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace cavroute
