#pragma once

#include <cstdint>
#include <vector>

#include "cavroute/cost_models.hpp"
#include "cavroute/network.hpp"
#include "cavroute/params.hpp"
#include "cavroute/types.hpp"

namespace cavroute {

struct SoResult {
  RouteProbabilityMatrix P_c;
  FlowVector x_c;
  std::vector<std::vector<double>> Y;  // CD fractions per route link, energy_phev only
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
  bool local_optimum = false;  // always set for energy_phev (non-convex)
  int iterations = 0;
  std::vector<double> trace;  // objective per iteration
};

/// Shared inputs of one system-centric solve: the CAV demand g_c routes over
/// rs with the non-CAV flows x_nc frozen.
struct SoProblem {
  const Network* net = nullptr;
  const RouteSet* rs = nullptr;
  const std::vector<ODPair>* g_c = nullptr;
  FlowVector x_nc;
  Objective objective = Objective::Time;
  const Parameters* params = nullptr;
};

/// Objective value at P_c:
///   time:        Σ_a t_a(x_a) x^c_a               (veh·min/hr)
///   energy_cv:   Σ_a c_gas e(v_a) l_a x^c_a       ($/hr)
///   energy_phev: Σ_i,r g p_ir · cd_cs_cost(route) ($/hr)
/// with x = x_nc + x_c and v_a from the total flow.
double so_objective(const RouteProbabilityMatrix& P_c, const SoProblem& prob,
                    const LinkCostModel& cost);

/// Analytic partials ∂J/∂p_ir (same layout as P_c rows). For the energy
/// objectives, drive-cycle band switches are blended over a logistic window
/// of SoConfig::smoothing_mph so the gradient stays continuous.
std::vector<std::vector<double>> so_gradient(const RouteProbabilityMatrix& P_c,
                                             const SoProblem& prob,
                                             const LinkCostModel& cost);

/// Euclidean projection onto the probability simplex (sorting algorithm).
std::vector<double> project_simplex(const std::vector<double>& v);

/// Projected gradient descent with Armijo backtracking over the per-O-D
/// simplexes. energy_phev runs cfg.multistarts_energy_phev seeded random
/// restarts and keeps the best. Converged when the KKT residual (max gap
/// between route partials on the support, and positive-part violation off
/// it) drops below cfg.grad_tol scaled by the gradient magnitude.
SoResult solve_so(const SoProblem& prob, const LinkCostModel& cost,
                  const SoConfig& cfg, std::uint64_t seed);

/// Time-objective system optimum via the marginal-cost trick: a user
/// equilibrium under t̃ = t + x t′ over the full graph. Returns link flows.
FlowVector system_optimum_oracle(const Network& net,
                                 const std::vector<ODPair>& ods,
                                 const Parameters& params);

}  // namespace cavroute
