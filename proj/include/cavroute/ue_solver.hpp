#pragma once

#include <map>
#include <vector>

#include "cavroute/cost_models.hpp"
#include "cavroute/params.hpp"
#include "cavroute/types.hpp"

namespace cavroute {

struct UeTracePoint {
  int iteration = 0;
  double rel_gap = 0.0;
  double beckmann = 0.0;
};

/// Per-O-D equilibrium path flows, kept when UeConfig::track_paths is on.
/// Keys are link-index sequences; values are veh/hr.
using PathFlows = std::vector<std::map<std::vector<int>, double>>;

struct UeResult {
  FlowVector x_nc;
  int iterations = 0;
  double final_gap = 0.0;
  double beckmann_value = 0.0;
  bool converged = false;
  std::vector<UeTracePoint> trace;
  PathFlows path_flows;
};

/// Assigns each O-D's full demand to its shortest path under the given
/// per-link times. Deterministic: fixed O-D order, lexicographic tie-breaks.
FlowVector all_or_nothing(const Network& net, const std::vector<ODPair>& ods,
                          const std::vector<double>& times);

/// Σ_a ∫_{x^c_a}^{x^c_a+x^nc_a} t_a(s) ds: the potential whose minimizer
/// over feasible x_nc is the user equilibrium with background flow x_c.
double beckmann_objective(const FlowVector& x_nc, const FlowVector& x_c,
                          const LinkCostModel& cost);

/// Relative gap (Σ t_a x^nc_a − Σ g_i d_i) / Σ g_i d_i with d_i the current
/// shortest-path times; zero demand gives gap 0.
double wardrop_gap(const Network& net, const std::vector<ODPair>& ods,
                   const LinkCostModel& cost, const FlowVector& x_nc,
                   const FlowVector& x_c);

/// MSA (or Frank-Wolfe when cfg.line_search) user equilibrium for the
/// non-CAV demand with fixed CAV background flow x_c.
/// cfg.restrict_to_route_set limits shortest-path search to `restrict`
/// (must be nonnull then).
UeResult solve_ue_msa(const Network& net, const std::vector<ODPair>& ods_nc,
                      const FlowVector& x_c, const LinkCostModel& cost,
                      const UeConfig& cfg, const RouteSet* restrict = nullptr);

}  // namespace cavroute
