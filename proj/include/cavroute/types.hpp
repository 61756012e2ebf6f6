#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavroute {

/// Bad user input: malformed files, invalid parameters, infeasible requests.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failures while reading or writing artifacts.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One directed road link.
///
/// Units: free_flow_min in minutes, capacity in veh/hr, length_mi in miles,
/// grade_pct in percent. When custom_time_poly is nonempty the link's travel
/// time is that polynomial of flow (minutes, coefficients for x^0, x^1, ...)
/// and the BPR fields t0/capacity are ignored by the cost model.
struct Link {
  int id = -1;
  int tail = -1;
  int head = -1;
  double free_flow_min = 0.0;
  double capacity = 0.0;
  double length_mi = 0.0;
  double grade_pct = 0.0;
  std::vector<double> custom_time_poly;

  bool has_custom_cost() const { return !custom_time_poly.empty(); }
  double free_flow_time() const {
    return has_custom_cost() ? custom_time_poly.front() : free_flow_min;
  }
};

/// Directed graph over external node ids. Links keep their construction
/// order; all flow vectors are indexed by that order. The node-link
/// incidence convention is +1 at the tail row and -1 at the head row.
struct Network {
  std::vector<int> node_ids;                // sorted external ids
  std::vector<Link> links;                  // in construction order
  std::vector<int> tail_index;              // per link, index into node_ids
  std::vector<int> head_index;
  std::vector<std::vector<int>> out_links;  // per node index, sorted by link id

  std::size_t num_nodes() const { return node_ids.size(); }
  std::size_t num_links() const { return links.size(); }

  /// Index of an external node id, or -1.
  int node_index(int node_id) const;
  /// Index of an external link id, or -1.
  int link_index(int link_id) const;

  /// Dense node-link incidence matrix N (|V| x |A|, entries -1/0/+1).
  std::vector<std::vector<int>> incidence_matrix() const;
};

/// Travel demand between two external node ids, veh/hr.
struct ODPair {
  int origin = -1;
  int destination = -1;
  double demand = 0.0;
};

/// A simple path for one O-D pair, as link indices into Network::links.
struct Route {
  int od_index = -1;
  std::vector<int> links;
};

/// Enumerated routes per O-D pair, each list sorted by free-flow time with
/// ties broken by the lexicographic link-id sequence.
struct RouteSet {
  std::vector<std::vector<Route>> per_od;

  std::size_t total_routes() const {
    std::size_t n = 0;
    for (const auto& r : per_od) n += r.size();
    return n;
  }

  /// Dense link-route incidence A (|A| x total_routes, entries 0/1); route
  /// columns are ordered O-D by O-D.
  std::vector<std::vector<int>> incidence_matrix(std::size_t num_links) const;
};

/// Per-O-D simplex rows assigning demand fractions to that O-D's routes.
struct RouteProbabilityMatrix {
  std::vector<std::vector<double>> rows;

  /// Throws InputError unless every row sums to 1 within tol with entries
  /// in [0,1].
  void validate(double tol = 1e-9) const;

  static RouteProbabilityMatrix uniform(const RouteSet& rs);
};

/// Per-link flow in veh/hr, aligned with Network::links.
using FlowVector = std::vector<double>;

FlowVector operator+(const FlowVector& a, const FlowVector& b);

/// Relative L1 distance between two concatenated flow profiles;
/// 0 when both are empty or identical.
double relative_l1_change(const FlowVector& a_new, const FlowVector& a_old,
                          const FlowVector& b_new, const FlowVector& b_old);

}  // namespace cavroute
