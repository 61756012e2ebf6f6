#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace cavroute {

/// BPR polynomial t(x) = t0 * sum_i beta_i (x/m)^(i-1).
struct BprParams {
  std::array<double, 5> beta{1.0, 0.0, 0.0, 0.0, 0.15};
};

/// Fuel-rate regression ln(e) = sum_{i=0..4} theta_i v^i + theta_R R with e
/// in grams of gasoline per mile, v in mph, R the grade in percent.
struct CvEnergyParams {
  std::array<double, 5> theta{6.80, -1.4e-1, 3.92e-3, -5.20e-5, 2.57e-7};
  double theta_grade = 1.37e-1;
  double gas_price_per_gal = 2.75;   // $/gal
  double grams_per_gallon = 2835.0;  // gasoline density proxy
  double max_speed_mph = 120.0;      // evaluation cap; keeps exp() bounded

  double dollars_per_gram() const { return gas_price_per_gal / grams_per_gallon; }
};

/// Certification efficiencies by drive cycle. CD columns are mi/kWh, CS
/// columns mpg. A non-positive entry means the vehicle has no such mode.
struct CdCsRow {
  double hwfet = 0.0;
  double udds = 0.0;
  double nyc = 0.0;

  double by_cycle(int cycle) const;  // 0=NYC, 1=UDDS, 2=HWFET
};

struct CdCsTable {
  CdCsRow phev_cd{5.7, 6.2, 4.2};
  CdCsRow phev_cs{58.6, 69.4, 45.7};
  CdCsRow hev_cs{59.7, 69.5, 48.0};
  CdCsRow ev_cd{5.2, 4.8, 3.1};
  CdCsRow cv_cs{52.8, 32.1, 16.4};

  double electricity_price_per_kwh = 0.13;  // $/kWh
  double battery_kwh = 8.0;                 // usable CD budget E0
};

/// Speed bands (mph) mapping a link's average speed to a drive cycle:
/// [0, udds_lo) -> NYC, [udds_lo, hwfet_lo) -> UDDS, >= hwfet_lo -> HWFET.
struct DriveCycleBands {
  double udds_lo = 20.0;
  double hwfet_lo = 40.0;

  int cycle_for_speed(double mph) const {
    if (mph >= hwfet_lo) return 2;
    if (mph >= udds_lo) return 1;
    return 0;
  }
};

struct UeConfig {
  int max_iterations = 2000;
  double rel_gap_tol = 1e-4;
  bool line_search = false;         // true: Frank-Wolfe step instead of 1/k
  bool track_paths = true;          // keep per-O-D path flows for diagnostics
  bool restrict_to_route_set = false;
};

struct SoConfig {
  int max_iterations = 500;
  double grad_tol = 1e-7;           // KKT residual on the simplex
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  int max_backtracks = 60;
  int multistarts_energy_phev = 5;  // extra random starts for the CD/CS case
  double smoothing_mph = 2.0;       // logistic band-blend width in gradients
};

struct StackelbergConfig {
  int max_outer = 50;
  double flow_tol = 1e-4;           // relative L1 change across both classes
  double damping = 1.0;             // applied automatically on oscillation
};

enum class Objective { Time, EnergyCv, EnergyPhev };

Objective objective_from_string(const std::string& s);  // throws InputError
std::string to_string(Objective o);

/// Everything the solvers read. Config files are plain `key = value` lines
/// with `#` comments; unknown keys throw InputError.
struct Parameters {
  BprParams bpr;
  CvEnergyParams cv;
  CdCsTable cdcs;
  DriveCycleBands bands;
  UeConfig ue;
  SoConfig so;
  StackelbergConfig stackelberg;
  int routes_per_od = 3;
  std::uint64_t seed = 0;

  void apply_config_file(const std::string& path);
  void apply_key_value(const std::string& key, const std::string& value);
};

}  // namespace cavroute
