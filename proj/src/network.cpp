#include "cavroute/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>

namespace cavroute {

int Network::node_index(int node_id) const {
  auto it = std::lower_bound(node_ids.begin(), node_ids.end(), node_id);
  if (it == node_ids.end() || *it != node_id) return -1;
  return int(it - node_ids.begin());
}

int Network::link_index(int link_id) const {
  for (std::size_t a = 0; a < links.size(); ++a)
    if (links[a].id == link_id) return int(a);
  return -1;
}

std::vector<std::vector<int>> Network::incidence_matrix() const {
  std::vector<std::vector<int>> N(num_nodes(), std::vector<int>(num_links(), 0));
  for (std::size_t a = 0; a < num_links(); ++a) {
    N[tail_index[a]][a] = +1;
    N[head_index[a]][a] = -1;
  }
  return N;
}

Network build_network(std::vector<Link> links) {
  if (links.empty()) throw InputError("network has no links");
  std::set<int> ids;
  std::set<int> nodes;
  for (const Link& link : links) {
    if (!ids.insert(link.id).second)
      throw InputError("duplicate link id " + std::to_string(link.id));
    if (link.tail == link.head)
      throw InputError("link " + std::to_string(link.id) + " is a self loop");
    if (!link.has_custom_cost()) {
      if (!(link.free_flow_min > 0.0))
        throw InputError("link " + std::to_string(link.id) +
                         ": free-flow time must be > 0");
      if (!(link.capacity > 0.0))
        throw InputError("link " + std::to_string(link.id) +
                         ": capacity must be > 0");
    }
    if (link.length_mi < 0.0)
      throw InputError("link " + std::to_string(link.id) +
                       ": length must be >= 0");
    nodes.insert(link.tail);
    nodes.insert(link.head);
  }

  Network net;
  net.node_ids.assign(nodes.begin(), nodes.end());
  net.links = std::move(links);
  net.tail_index.resize(net.links.size());
  net.head_index.resize(net.links.size());
  net.out_links.assign(net.node_ids.size(), {});
  for (std::size_t a = 0; a < net.links.size(); ++a) {
    net.tail_index[a] = net.node_index(net.links[a].tail);
    net.head_index[a] = net.node_index(net.links[a].head);
    net.out_links[net.tail_index[a]].push_back(int(a));
  }
  for (auto& out : net.out_links)
    std::sort(out.begin(), out.end(), [&](int a, int b) {
      return net.links[a].id < net.links[b].id;
    });
  return net;
}

void validate_trips(const Network& net, const std::vector<ODPair>& trips) {
  std::set<std::pair<int, int>> seen;
  for (const ODPair& od : trips) {
    if (net.node_index(od.origin) < 0)
      throw InputError("trip origin node " + std::to_string(od.origin) +
                       " not in network");
    if (net.node_index(od.destination) < 0)
      throw InputError("trip destination node " + std::to_string(od.destination) +
                       " not in network");
    if (od.origin == od.destination)
      throw InputError("trip with identical origin and destination " +
                       std::to_string(od.origin));
    if (!(od.demand > 0.0))
      throw InputError("trip " + std::to_string(od.origin) + "->" +
                       std::to_string(od.destination) + ": demand must be > 0");
    if (!seen.insert({od.origin, od.destination}).second)
      throw InputError("duplicate trip " + std::to_string(od.origin) + "->" +
                       std::to_string(od.destination));
  }
}

ShortestPathResult shortest_paths(const Network& net, int source_index,
                                  const std::vector<double>& link_cost) {
  const double inf = std::numeric_limits<double>::infinity();
  ShortestPathResult sp;
  sp.dist.assign(net.num_nodes(), inf);
  sp.pred_link.assign(net.num_nodes(), -1);
  sp.cost = link_cost;
  for (double c : link_cost)
    if (!(c >= 0.0)) throw InputError("negative link cost in shortest path");

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  sp.dist[source_index] = 0.0;
  pq.push({0.0, source_index});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > sp.dist[u]) continue;
    for (int a : net.out_links[u]) {
      int w = net.head_index[a];
      double nd = d + link_cost[a];
      if (nd < sp.dist[w]) {
        sp.dist[w] = nd;
        sp.pred_link[w] = a;
        pq.push({nd, w});
      }
    }
  }
  return sp;
}

namespace {

std::vector<int> path_from_pred(const ShortestPathResult& sp, const Network& net,
                                int source_index, int target_index) {
  std::vector<int> path;
  int u = target_index;
  while (u != source_index) {
    int a = sp.pred_link[u];
    if (a < 0) return {};
    path.push_back(a);
    u = net.tail_index[a];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<int> extract_path(const ShortestPathResult& sp, const Network& net,
                              int source_index, int target_index) {
  if (target_index == source_index) return {};
  if (!std::isfinite(sp.dist[target_index])) return {};

  // Shortest-path DAG membership: exact tightness of the triangle equality.
  auto tight = [&](int a) {
    return std::isfinite(sp.cost[a]) &&
           sp.dist[net.tail_index[a]] + sp.cost[a] == sp.dist[net.head_index[a]];
  };

  // Nodes that can still reach the target inside the DAG.
  std::vector<char> reach(net.num_nodes(), 0);
  reach[target_index] = 1;
  std::vector<int> stack{target_index};
  std::vector<std::vector<int>> in_links(net.num_nodes());
  for (std::size_t a = 0; a < net.num_links(); ++a)
    if (tight(int(a))) in_links[net.head_index[a]].push_back(int(a));
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int a : in_links[u]) {
      int t = net.tail_index[a];
      if (!reach[t]) {
        reach[t] = 1;
        stack.push_back(t);
      }
    }
  }
  if (!reach[source_index])
    return path_from_pred(sp, net, source_index, target_index);

  // Greedy walk: smallest usable link id first gives the lexicographically
  // smallest link-id sequence among tied shortest paths.
  std::vector<char> visited(net.num_nodes(), 0);
  std::vector<int> path;
  int u = source_index;
  visited[u] = 1;
  while (u != target_index) {
    int chosen = -1;
    for (int a : net.out_links[u]) {
      int w = net.head_index[a];
      if (tight(a) && reach[w] && !visited[w]) {
        chosen = a;
        break;
      }
    }
    if (chosen < 0) return path_from_pred(sp, net, source_index, target_index);
    path.push_back(chosen);
    u = net.head_index[chosen];
    visited[u] = 1;
  }
  return path;
}

void RouteProbabilityMatrix::validate(double tol) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = 0.0;
    for (double p : rows[i]) {
      if (p < -tol || p > 1.0 + tol)
        throw InputError("route probability out of [0,1] for O-D " +
                         std::to_string(i));
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
      throw InputError("route probabilities of O-D " + std::to_string(i) +
                       " sum to " + std::to_string(sum));
  }
}

RouteProbabilityMatrix RouteProbabilityMatrix::uniform(const RouteSet& rs) {
  RouteProbabilityMatrix P;
  P.rows.reserve(rs.per_od.size());
  for (const auto& routes : rs.per_od)
    P.rows.emplace_back(routes.size(), routes.empty() ? 0.0 : 1.0 / double(routes.size()));
  return P;
}

std::vector<std::vector<int>> RouteSet::incidence_matrix(std::size_t num_links) const {
  std::vector<std::vector<int>> A(num_links);
  std::size_t total = total_routes();
  for (auto& row : A) row.assign(total, 0);
  std::size_t col = 0;
  for (const auto& routes : per_od)
    for (const Route& r : routes) {
      for (int a : r.links) A[a][col] = 1;
      ++col;
    }
  return A;
}

FlowVector operator+(const FlowVector& a, const FlowVector& b) {
  if (a.size() != b.size()) throw InputError("flow vector size mismatch");
  FlowVector s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
  return s;
}

double relative_l1_change(const FlowVector& a_new, const FlowVector& a_old,
                          const FlowVector& b_new, const FlowVector& b_old) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a_new.size(); ++i) {
    num += std::abs(a_new[i] - a_old[i]);
    den += std::abs(a_old[i]);
  }
  for (std::size_t i = 0; i < b_new.size(); ++i) {
    num += std::abs(b_new[i] - b_old[i]);
    den += std::abs(b_old[i]);
  }
  if (den <= 0.0)
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return num / den;
}

}  // namespace cavroute
