#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cavroute/so_solver.hpp"
#include "cavroute/ue_solver.hpp"

namespace cavroute {

/// γ·g to the CAV class, (1−γ)·g to the rest; γ=0 or 1 leaves one side empty.
std::pair<std::vector<ODPair>, std::vector<ODPair>> split_demand(
    const std::vector<ODPair>& ods, double gamma);

struct ClassMetrics {
  std::optional<double> cav_avg_time_min;
  std::optional<double> noncav_avg_time_min;
  std::optional<double> cav_energy_usd;     // $/vehicle via the CV rate model
  std::optional<double> noncav_energy_usd;
};

struct EquilibriumResult {
  FlowVector x_c;
  FlowVector x_nc;
  RouteProbabilityMatrix P_c;
  bool converged = false;
  int outer_iterations = 0;
  std::vector<double> outer_trace;  // relative L1 flow change per iteration
  ClassMetrics metrics;
};

/// Average per-vehicle travel time and energy cost by class at the result's
/// flows. A class with zero demand reports absent metrics.
ClassMetrics per_class_metrics(const Network& net, const LinkCostModel& cost,
                               const Parameters& params, const FlowVector& x_c,
                               const FlowVector& x_nc, double demand_c,
                               double demand_nc);

/// Alternates solve_ue_msa (non-CAVs, CAV flow frozen) and solve_so (CAVs,
/// non-CAV flow frozen) from x_c = 0 until the relative L1 change of the
/// concatenated flows drops below cfg.stackelberg.flow_tol. If the change
/// metric oscillates (two sign changes of its differences within six outer
/// iterations) the flow update is damped by 0.5 from then on.
EquilibriumResult solve_mixed(const Network& net, const RouteSet& rs,
                              const std::vector<ODPair>& ods, double gamma,
                              Objective objective, const Parameters& params);

}  // namespace cavroute
