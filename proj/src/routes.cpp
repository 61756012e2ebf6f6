#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "cavroute/network.hpp"

namespace cavroute {
namespace {

struct Candidate {
  double cost = 0.0;
  std::vector<int> links;  // link indices
};

std::vector<int> id_sequence(const Network& net, const std::vector<int>& links) {
  std::vector<int> ids;
  ids.reserve(links.size());
  for (int a : links) ids.push_back(net.links[a].id);
  return ids;
}

bool candidate_less(const Network& net, const Candidate& x, const Candidate& y) {
  if (x.cost != y.cost) return x.cost < y.cost;
  return id_sequence(net, x.links) < id_sequence(net, y.links);
}

double path_cost(const std::vector<double>& cost, const std::vector<int>& links) {
  double c = 0.0;
  for (int a : links) c += cost[a];
  return c;
}

std::vector<Candidate> yen_paths(const Network& net,
                                 const std::vector<double>& base_cost,
                                 int source, int target, int k) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Candidate> accepted;
  std::vector<Candidate> pool;
  std::set<std::vector<int>> known;

  auto sp0 = shortest_paths(net, source, base_cost);
  auto first = extract_path(sp0, net, source, target);
  if (first.empty()) return {};
  accepted.push_back({path_cost(base_cost, first), first});
  known.insert(first);

  while (int(accepted.size()) < k) {
    const std::vector<int>& prev = accepted.back().links;
    int spur_node = source;
    std::vector<int> root;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      std::vector<double> cost = base_cost;
      for (const Candidate& acc : accepted)
        if (acc.links.size() > i &&
            std::equal(root.begin(), root.end(), acc.links.begin()))
          cost[acc.links[i]] = inf;
      // Nodes on the root path (except the spur node) are off limits.
      int u = source;
      for (std::size_t j = 0; j < i; ++j) {
        for (int a : net.out_links[u]) cost[a] = inf;
        u = net.head_index[prev[j]];
      }
      (void)u;

      auto sp = shortest_paths(net, spur_node, cost);
      auto spur = extract_path(sp, net, spur_node, target);
      if (!spur.empty() || spur_node == target) {
        Candidate cand;
        cand.links = root;
        cand.links.insert(cand.links.end(), spur.begin(), spur.end());
        if (!cand.links.empty() && known.insert(cand.links).second) {
          cand.cost = path_cost(base_cost, cand.links);
          pool.push_back(std::move(cand));
        }
      }

      root.push_back(prev[i]);
      spur_node = net.head_index[prev[i]];
    }
    if (pool.empty()) break;
    auto best = std::min_element(pool.begin(), pool.end(),
                                 [&](const Candidate& x, const Candidate& y) {
                                   return candidate_less(net, x, y);
                                 });
    accepted.push_back(*best);
    pool.erase(best);
  }

  std::sort(accepted.begin(), accepted.end(),
            [&](const Candidate& x, const Candidate& y) {
              return candidate_less(net, x, y);
            });
  return accepted;
}

}  // namespace

RouteSet enumerate_routes(const Network& net, const std::vector<ODPair>& trips,
                          int k) {
  if (k < 1) throw InputError("routes per O-D must be >= 1");
  validate_trips(net, trips);

  std::vector<double> fft(net.num_links());
  for (std::size_t a = 0; a < net.num_links(); ++a)
    fft[a] = net.links[a].free_flow_time();

  RouteSet rs;
  rs.per_od.resize(trips.size());
  for (std::size_t i = 0; i < trips.size(); ++i) {
    int s = net.node_index(trips[i].origin);
    int t = net.node_index(trips[i].destination);
    auto paths = yen_paths(net, fft, s, t, k);
    if (paths.empty())
      throw InputError("no route from " + std::to_string(trips[i].origin) +
                       " to " + std::to_string(trips[i].destination));
    for (auto& p : paths) {
      Route r;
      r.od_index = int(i);
      r.links = std::move(p.links);
      rs.per_od[i].push_back(std::move(r));
    }
  }
  return rs;
}

FlowVector route_flows_to_link_flows(const RouteProbabilityMatrix& P,
                                     const std::vector<ODPair>& ods,
                                     const RouteSet& rs,
                                     const Network& net) {
  if (P.rows.size() != ods.size() || rs.per_od.size() != ods.size())
    throw InputError("route probability matrix does not match the O-D list");
  FlowVector x(net.num_links(), 0.0);
  for (std::size_t i = 0; i < ods.size(); ++i) {
    if (P.rows[i].size() != rs.per_od[i].size())
      throw InputError("route probability row " + std::to_string(i) +
                       " does not match its route count");
    for (std::size_t r = 0; r < rs.per_od[i].size(); ++r) {
      double f = P.rows[i][r] * ods[i].demand;
      if (f == 0.0) continue;
      for (int a : rs.per_od[i][r].links) x[a] += f;
    }
  }
  return x;
}

}  // namespace cavroute
