#pragma once

// Independent reference implementations the tests check the solvers against.
// Everything here is deliberately naive: exhaustive search, bisection, and
// closed-form constants, sharing no logic with the production code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "cavroute/cost_models.hpp"
#include "cavroute/network.hpp"
#include "cavroute/types.hpp"

namespace oracles {

// Braess fixture closed forms. Routes in canonical order: {1-4-5}, {1-3},
// {2-5}. UE puts 4000/3 on each route; SO puts 500 on the zigzag and 1750 on
// each outer route.
inline constexpr double kBraessUeTimeMin = 80.0;
inline constexpr double kBraessSoTimeMin = 64.6875;
inline constexpr double kBraessUeRouteFlow = 4000.0 / 3.0;
inline const std::vector<double> kBraessSoRouteFlows{500.0, 1750.0, 1750.0};
inline const std::vector<double> kBraessSoLinkFlows{2250.0, 1750.0, 1750.0,
                                                    500.0, 2250.0};

struct ScoredPath {
  double cost = 0.0;
  std::vector<int> links;  // link indices
};

// All simple paths origin->dest by depth-first search, sorted by cost and
// then by the external link-id sequence. Exponential, fine on tiny graphs.
inline std::vector<ScoredPath> exhaustive_simple_paths(
    const cavroute::Network& net, int origin_index, int dest_index,
    const std::vector<double>& link_cost) {
  std::vector<ScoredPath> found;
  std::vector<char> visited(net.num_nodes(), 0);
  std::vector<int> stack;
  std::function<void(int, double)> dfs = [&](int node, double cost) {
    if (node == dest_index) {
      found.push_back({cost, stack});
      return;
    }
    visited[node] = 1;
    for (int a : net.out_links[node]) {
      int next = net.head_index[a];
      if (visited[next]) continue;
      stack.push_back(a);
      dfs(next, cost + link_cost[a]);
      stack.pop_back();
    }
    visited[node] = 0;
  };
  dfs(origin_index, 0.0);
  auto id_seq = [&](const std::vector<int>& links) {
    std::vector<int> ids;
    for (int a : links) ids.push_back(net.links[a].id);
    return ids;
  };
  std::sort(found.begin(), found.end(),
            [&](const ScoredPath& x, const ScoredPath& y) {
              if (x.cost != y.cost) return x.cost < y.cost;
              return id_seq(x.links) < id_seq(y.links);
            });
  return found;
}

// Wardrop equilibrium for demand split across two parallel "links" with
// nondecreasing time polynomials: bisection on t1(x) - t2(D - x).
inline double two_link_ue_flow_on_first(const cavroute::Poly& t1,
                                        const cavroute::Poly& t2, double demand) {
  if (t1.value(demand) <= t2.value(0.0)) return demand;
  if (t2.value(demand) <= t1.value(0.0)) return 0.0;
  double lo = 0.0, hi = demand;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (t1.value(mid) - t2.value(demand - mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Minimum of sum_a [cd_cost_a y_a + cs_cost_a (1 - y_a)] over the per-link
// grid y_a in {0, step, ..., 1} subject to sum_a cd_kwh_a y_a <= budget.
// Depth-first over the grid; subtrees are cut only when a lower bound on any
// completion (the LP relaxation of the remainder) already meets the
// incumbent, so the result equals the full grid enumeration.
inline double grid_cd_cs_cost(const std::vector<cavroute::LinkEnergyOption>& opts,
                              double budget, double step = 0.01) {
  const std::size_t n = opts.size();
  // Remaining links in descending dollars-saved-per-kWh makes the LP bound
  // of a suffix computable by one forward scan.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto rate = [&](std::size_t i) {
      double save = opts[i].cs_cost - opts[i].cd_cost;
      return opts[i].cd_kwh > 0.0 ? save / opts[i].cd_kwh
                                  : (save > 0.0 ? std::numeric_limits<double>::infinity()
                                                : 0.0);
    };
    return rate(a) > rate(b);
  });

  auto suffix_lp_bound = [&](std::size_t depth, double remaining) {
    double cost = 0.0;
    for (std::size_t k = depth; k < n; ++k) {
      const auto& o = opts[order[k]];
      cost += o.cs_cost;
      double save = o.cs_cost - o.cd_cost;
      if (save <= 0.0) continue;
      if (o.cd_kwh <= 0.0 || o.cd_kwh <= remaining) {
        cost -= save;
        remaining -= o.cd_kwh;
      } else if (remaining > 0.0) {
        cost -= save * (remaining / o.cd_kwh);
        remaining = 0.0;
      }
    }
    return cost;
  };

  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double, double)> dfs =
      [&](std::size_t depth, double cost, double remaining) {
        if (cost + suffix_lp_bound(depth, remaining) >= best - 1e-15) return;
        if (depth == n) {
          best = std::min(best, cost);
          return;
        }
        const auto& o = opts[order[depth]];
        int max_ticks = int(std::round(1.0 / step));
        for (int tick = max_ticks; tick >= 0; --tick) {
          double y = tick * step;
          double kwh = o.cd_kwh * y;
          if (kwh > remaining + 1e-12) continue;
          dfs(depth + 1, cost + o.cd_cost * y + o.cs_cost * (1.0 - y),
              remaining - kwh);
        }
      };
  dfs(0, 0.0, budget);
  return best;
}

// Central finite difference of f along the simplex-preserving direction
// e_r - e_s applied to row i of P.
inline double fd_directional(
    const std::function<double(const cavroute::RouteProbabilityMatrix&)>& f,
    cavroute::RouteProbabilityMatrix P, std::size_t i, std::size_t r,
    std::size_t s, double h) {
  auto shifted = [&](double d) {
    cavroute::RouteProbabilityMatrix Q = P;
    Q.rows[i][r] += d;
    Q.rows[i][s] -= d;
    return f(Q);
  };
  return (shifted(h) - shifted(-h)) / (2.0 * h);
}

struct SmallProblem {
  cavroute::Network net;
  std::vector<cavroute::ODPair> trips;
};

// Random strongly connected network with <=10 nodes, <=20 links, <=5 O-D
// pairs: a directed ring guarantees reachability, extra chords add route
// diversity.
inline SmallProblem random_small_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> node_count(4, 10);
  int n = node_count(rng);

  std::vector<cavroute::Link> links;
  std::uniform_real_distribution<double> t0(2.0, 15.0);
  std::uniform_real_distribution<double> cap(800.0, 4000.0);
  std::uniform_real_distribution<double> len(1.0, 10.0);
  auto add = [&](int u, int v) {
    cavroute::Link l;
    l.id = int(links.size()) + 1;
    l.tail = u;
    l.head = v;
    l.free_flow_min = t0(rng);
    l.capacity = cap(rng);
    l.length_mi = len(rng);
    links.push_back(l);
  };
  for (int u = 1; u <= n; ++u) add(u, u % n + 1);

  std::uniform_int_distribution<int> node(1, n);
  int extra = std::min(20 - n, n);
  for (int e = 0; e < extra; ++e) {
    int u = node(rng), v = node(rng);
    if (u == v) continue;
    bool dup = false;
    for (const auto& l : links) dup = dup || (l.tail == u && l.head == v);
    if (!dup) add(u, v);
  }

  SmallProblem p;
  p.net = cavroute::build_network(std::move(links));

  std::uniform_int_distribution<int> od_count(1, 5);
  std::uniform_real_distribution<double> demand(500.0, 3000.0);
  int want = od_count(rng);
  while (int(p.trips.size()) < want) {
    int o = node(rng), d = node(rng);
    if (o == d) continue;
    bool dup = false;
    for (const auto& od : p.trips)
      dup = dup || (od.origin == o && od.destination == d);
    if (!dup) p.trips.push_back({o, d, demand(rng)});
  }
  return p;
}

}  // namespace oracles
