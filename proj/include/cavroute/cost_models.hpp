#pragma once

#include <vector>

#include "cavroute/params.hpp"
#include "cavroute/types.hpp"

namespace cavroute {

/// Dense polynomial in flow, coefficients for x^0, x^1, ...
struct Poly {
  std::vector<double> c;

  double value(double x) const;
  double derivative(double x) const;
  /// Definite integral from 0 to x.
  double antiderivative(double x) const;
  /// Coefficients of d/dx [x * p(x)] = p(x) + x p'(x).
  Poly marginal() const;
};

/// Per-link travel-time polynomials (minutes as a function of veh/hr).
/// BPR links expand to t0*(beta1 + 0.15 (x/m)^4); custom links use their
/// own coefficients verbatim.
class LinkCostModel {
 public:
  LinkCostModel(const Network& net, const BprParams& bpr);

  const Poly& time_poly(int link) const { return time_[link]; }
  const Poly& marginal_poly(int link) const { return marginal_[link]; }

  double time(int link, double flow) const { return time_[link].value(flow); }
  double marginal_time(int link, double flow) const {
    return marginal_[link].value(flow);
  }

  std::vector<double> times(const FlowVector& flow) const;
  std::vector<double> marginal_times(const FlowVector& flow) const;

  /// Model whose travel times are this model's marginal times t + x t'.
  /// A user equilibrium under it is the system optimum of the original.
  LinkCostModel with_marginal_costs() const;

  /// Beckmann potential sum_a integral_0^{x_a} t_a(s) ds (veh-min/hr).
  double beckmann(const FlowVector& flow) const;
  /// Total travel time sum_a t_a(x_a) x_a (veh-min/hr).
  double total_time(const FlowVector& flow) const;

 private:
  std::vector<Poly> time_;
  std::vector<Poly> marginal_;
};

/// Gasoline consumption rate e(v) in g/mi at speed v mph, grade R percent.
double cv_fuel_rate(const CvEnergyParams& p, double speed_mph, double grade_pct);
/// d e / d v at fixed grade.
double cv_fuel_rate_dv(const CvEnergyParams& p, double speed_mph, double grade_pct);

/// Average speed on a link, mph; capped at p.max_speed_mph and floored just
/// above zero so the regression never sees a degenerate argument.
double link_speed_mph(const CvEnergyParams& p, double length_mi, double time_min);

/// CV fleet fuel burn in g/hr: sum over links of e(v_a(x)) * l_a * xc_a.
/// Total flow x determines speeds; xc is the subset being charged.
double cv_energy_total(const CvEnergyParams& p, const Network& net,
                       const LinkCostModel& cost, const FlowVector& total_flow,
                       const FlowVector& charged_flow);

/// One link's CD/CS operating-cost menu at a given drive cycle.
struct LinkEnergyOption {
  double cd_kwh = 0.0;      // battery draw if driven in CD mode
  double cd_cost = 0.0;     // $ at electricity price
  double cs_cost = 0.0;     // $ of gasoline in CS mode
};

LinkEnergyOption phev_link_option(const CdCsTable& t, const DriveCycleBands& bands,
                                  double gas_price_per_gal, double length_mi,
                                  double speed_mph);

/// CD/CS assignment for one vehicle's route: which links run on battery.
struct CdCsSplit {
  std::vector<double> cd_fraction;  // per input link, in [0,1]
  double kwh_used = 0.0;
  double cost = 0.0;                // $ total (electricity + gasoline)
};

/// Cheapest feasible split of a link sequence between CD and CS given the
/// battery budget. Greedy on dollars saved per kWh; the relaxation admits a
/// fractional link so the greedy order is exact.
CdCsSplit solve_cd_cs_split(const CdCsTable& t, const DriveCycleBands& bands,
                            double gas_price_per_gal,
                            const std::vector<double>& lengths_mi,
                            const std::vector<double>& speeds_mph);

}  // namespace cavroute
