#include "cavroute/stackelberg.hpp"

#include <cmath>
#include <string>

namespace cavroute {

std::pair<std::vector<ODPair>, std::vector<ODPair>> split_demand(
    const std::vector<ODPair>& ods, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw InputError("penetration rate must be in [0,1], got " +
                     std::to_string(gamma));
  std::vector<ODPair> cav, noncav;
  for (const ODPair& od : ods) {
    if (gamma > 0.0) cav.push_back({od.origin, od.destination, gamma * od.demand});
    if (gamma < 1.0)
      noncav.push_back({od.origin, od.destination, (1.0 - gamma) * od.demand});
  }
  return {cav, noncav};
}

ClassMetrics per_class_metrics(const Network& net, const LinkCostModel& cost,
                               const Parameters& params, const FlowVector& x_c,
                               const FlowVector& x_nc, double demand_c,
                               double demand_nc) {
  ClassMetrics m;
  FlowVector x = x_c + x_nc;
  auto times = cost.times(x);
  double kappa = params.cv.dollars_per_gram();

  auto fill = [&](const FlowVector& xk, double demand,
                  std::optional<double>& time_out,
                  std::optional<double>& energy_out) {
    if (demand <= 0.0) return;
    double tt = 0.0;
    for (std::size_t a = 0; a < xk.size(); ++a) tt += times[a] * xk[a];
    time_out = tt / demand;
    energy_out =
        kappa * cv_energy_total(params.cv, net, cost, x, xk) / demand;
  };
  fill(x_c, demand_c, m.cav_avg_time_min, m.cav_energy_usd);
  fill(x_nc, demand_nc, m.noncav_avg_time_min, m.noncav_energy_usd);
  return m;
}

EquilibriumResult solve_mixed(const Network& net, const RouteSet& rs,
                              const std::vector<ODPair>& ods, double gamma,
                              Objective objective, const Parameters& params) {
  auto [g_c, g_nc] = split_demand(ods, gamma);
  LinkCostModel cost(net, params.bpr);

  EquilibriumResult res;
  res.x_c.assign(net.num_links(), 0.0);
  res.x_nc.assign(net.num_links(), 0.0);
  res.P_c = RouteProbabilityMatrix::uniform(rs);

  SoProblem prob;
  prob.net = &net;
  prob.rs = &rs;
  prob.objective = objective;
  prob.params = &params;

  double damping = params.stackelberg.damping;
  std::vector<double> diffs;
  const FlowVector zero(net.num_links(), 0.0);

  for (int outer = 1; outer <= params.stackelberg.max_outer; ++outer) {
    res.outer_iterations = outer;

    FlowVector x_nc_new = zero;
    if (!g_nc.empty()) {
      UeResult ue = solve_ue_msa(net, g_nc, res.x_c, cost, params.ue, &rs);
      x_nc_new = std::move(ue.x_nc);
    }

    FlowVector x_c_new = zero;
    RouteProbabilityMatrix P_new = res.P_c;
    if (!g_c.empty()) {
      prob.g_c = &g_c;
      prob.x_nc = x_nc_new;
      SoResult so = solve_so(prob, cost, params.so, params.seed);
      x_c_new = std::move(so.x_c);
      P_new = std::move(so.P_c);
    }

    if (damping < 1.0 && outer > 1) {
      for (std::size_t a = 0; a < x_nc_new.size(); ++a)
        x_nc_new[a] = res.x_nc[a] + damping * (x_nc_new[a] - res.x_nc[a]);
      for (std::size_t i = 0; i < P_new.rows.size(); ++i)
        for (std::size_t r = 0; r < P_new.rows[i].size(); ++r)
          P_new.rows[i][r] = res.P_c.rows[i][r] +
                             damping * (P_new.rows[i][r] - res.P_c.rows[i][r]);
      if (!g_c.empty())
        x_c_new = route_flows_to_link_flows(P_new, g_c, rs, net);
    }

    double change = relative_l1_change(x_c_new, res.x_c, x_nc_new, res.x_nc);
    res.x_c = std::move(x_c_new);
    res.x_nc = std::move(x_nc_new);
    res.P_c = std::move(P_new);

    if (!res.outer_trace.empty())
      diffs.push_back(change - res.outer_trace.back());
    res.outer_trace.push_back(change);

    if (change <= params.stackelberg.flow_tol) {
      res.converged = true;
      break;
    }

    // Oscillation guard: two sign changes of the change-metric differences
    // within the last six outer iterations switch damping on.
    if (damping >= 1.0 && diffs.size() >= 3) {
      int flips = 0;
      std::size_t lo = diffs.size() > 6 ? diffs.size() - 6 : 0;
      for (std::size_t k = lo + 1; k < diffs.size(); ++k)
        if (diffs[k - 1] * diffs[k] < 0.0) ++flips;
      if (flips >= 2) damping = 0.5;
    }
  }

  double demand_c = 0.0, demand_nc = 0.0;
  for (const ODPair& od : g_c) demand_c += od.demand;
  for (const ODPair& od : g_nc) demand_nc += od.demand;
  res.metrics = per_class_metrics(net, cost, params, res.x_c, res.x_nc,
                                  demand_c, demand_nc);
  return res;
}

}  // namespace cavroute
