#include "cavroute/ue_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cavroute/network.hpp"

namespace cavroute {
namespace {

double total_demand(const std::vector<ODPair>& ods) {
  double g = 0.0;
  for (const ODPair& od : ods) g += od.demand;
  return g;
}

/// Cheapest route of one O-D within the restricted set under `times`;
/// ties go to the earlier route in canonical order.
std::size_t best_route(const RouteSet& rs, std::size_t od,
                       const std::vector<double>& times, double* best_time) {
  std::size_t best = 0;
  double bt = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rs.per_od[od].size(); ++r) {
    double t = 0.0;
    for (int a : rs.per_od[od][r].links) t += times[a];
    if (t < bt) {
      bt = t;
      best = r;
    }
  }
  *best_time = bt;
  return best;
}

struct Direction {
  FlowVector flow;
  std::vector<std::vector<int>> paths;  // per O-D, chosen path (link indices)
  double shortest_cost_sum = 0.0;       // Σ g_i · sp_i
};

Direction find_direction(const Network& net, const std::vector<ODPair>& ods,
                         const std::vector<double>& times,
                         const RouteSet* restrict_set) {
  Direction dir;
  dir.flow.assign(net.num_links(), 0.0);
  dir.paths.resize(ods.size());
  int last_origin = std::numeric_limits<int>::min();
  ShortestPathResult sp;
  for (std::size_t i = 0; i < ods.size(); ++i) {
    std::vector<int> path;
    double sp_time = 0.0;
    if (restrict_set) {
      std::size_t r = best_route(*restrict_set, i, times, &sp_time);
      path = restrict_set->per_od[i][r].links;
    } else {
      if (ods[i].origin != last_origin) {
        sp = shortest_paths(net, net.node_index(ods[i].origin), times);
        last_origin = ods[i].origin;
      }
      int t = net.node_index(ods[i].destination);
      path = extract_path(sp, net, net.node_index(ods[i].origin), t);
      if (path.empty())
        throw InputError("destination " + std::to_string(ods[i].destination) +
                         " unreachable from " + std::to_string(ods[i].origin));
      sp_time = sp.dist[t];
    }
    for (int a : path) dir.flow[a] += ods[i].demand;
    dir.shortest_cost_sum += ods[i].demand * sp_time;
    dir.paths[i] = std::move(path);
  }
  return dir;
}

/// Frank-Wolfe step: minimize Beckmann along x + alpha (y - x) on [0,1].
/// The directional derivative is nondecreasing in alpha, so bisect its root.
double line_search_step(const LinkCostModel& cost, const FlowVector& x_c,
                        const FlowVector& x, const FlowVector& y) {
  auto slope = [&](double alpha) {
    double s = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      double d = y[a] - x[a];
      if (d == 0.0) continue;
      s += cost.time(int(a), x_c[a] + x[a] + alpha * d) * d;
    }
    return s;
  };
  if (slope(0.0) >= 0.0) return 0.0;
  if (slope(1.0) <= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (slope(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FlowVector all_or_nothing(const Network& net, const std::vector<ODPair>& ods,
                          const std::vector<double>& times) {
  return find_direction(net, ods, times, nullptr).flow;
}

double beckmann_objective(const FlowVector& x_nc, const FlowVector& x_c,
                          const LinkCostModel& cost) {
  double phi = 0.0;
  for (std::size_t a = 0; a < x_nc.size(); ++a) {
    const Poly& p = cost.time_poly(int(a));
    phi += p.antiderivative(x_c[a] + x_nc[a]) - p.antiderivative(x_c[a]);
  }
  return phi;
}

double wardrop_gap(const Network& net, const std::vector<ODPair>& ods,
                   const LinkCostModel& cost, const FlowVector& x_nc,
                   const FlowVector& x_c) {
  if (total_demand(ods) <= 0.0) return 0.0;
  auto times = cost.times(x_c + x_nc);
  double current = 0.0;
  for (std::size_t a = 0; a < x_nc.size(); ++a) current += times[a] * x_nc[a];
  Direction dir = find_direction(net, ods, times, nullptr);
  if (dir.shortest_cost_sum <= 0.0) return 0.0;
  return (current - dir.shortest_cost_sum) / dir.shortest_cost_sum;
}

UeResult solve_ue_msa(const Network& net, const std::vector<ODPair>& ods_nc,
                      const FlowVector& x_c, const LinkCostModel& cost,
                      const UeConfig& cfg, const RouteSet* restrict) {
  if (cfg.restrict_to_route_set && restrict == nullptr)
    throw InputError("restricted UE requested without a route set");
  const RouteSet* rset = cfg.restrict_to_route_set ? restrict : nullptr;

  UeResult res;
  res.x_nc.assign(net.num_links(), 0.0);
  if (cfg.track_paths) res.path_flows.resize(ods_nc.size());
  if (total_demand(ods_nc) <= 0.0) {
    res.iterations = 1;
    res.converged = true;
    res.beckmann_value = 0.0;
    return res;
  }

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    auto times = cost.times(x_c + res.x_nc);
    Direction dir = find_direction(net, ods_nc, times, rset);

    if (k > 1) {
      double current = 0.0;
      for (std::size_t a = 0; a < res.x_nc.size(); ++a)
        current += times[a] * res.x_nc[a];
      res.final_gap = dir.shortest_cost_sum > 0.0
                          ? (current - dir.shortest_cost_sum) / dir.shortest_cost_sum
                          : 0.0;
      res.trace.push_back(
          {k - 1, res.final_gap, beckmann_objective(res.x_nc, x_c, cost)});
      if (res.final_gap <= cfg.rel_gap_tol) {
        res.converged = true;
        break;
      }
    }

    double alpha = k == 1 ? 1.0
                 : cfg.line_search
                       ? line_search_step(cost, x_c, res.x_nc, dir.flow)
                       : 1.0 / double(k);
    for (std::size_t a = 0; a < res.x_nc.size(); ++a)
      res.x_nc[a] += alpha * (dir.flow[a] - res.x_nc[a]);
    res.iterations = k;

    if (cfg.track_paths) {
      for (std::size_t i = 0; i < ods_nc.size(); ++i) {
        auto& pf = res.path_flows[i];
        for (auto it = pf.begin(); it != pf.end();) {
          it->second *= (1.0 - alpha);
          it = it->second < 1e-9 * ods_nc[i].demand ? pf.erase(it) : std::next(it);
        }
        pf[dir.paths[i]] += alpha * ods_nc[i].demand;
      }
    }
  }

  if (!res.converged) {
    auto times = cost.times(x_c + res.x_nc);
    Direction dir = find_direction(net, ods_nc, times, rset);
    double current = 0.0;
    for (std::size_t a = 0; a < res.x_nc.size(); ++a)
      current += times[a] * res.x_nc[a];
    res.final_gap = dir.shortest_cost_sum > 0.0
                        ? (current - dir.shortest_cost_sum) / dir.shortest_cost_sum
                        : 0.0;
    res.converged = res.final_gap <= cfg.rel_gap_tol;
  }
  res.beckmann_value = beckmann_objective(res.x_nc, x_c, cost);
  return res;
}

}  // namespace cavroute
