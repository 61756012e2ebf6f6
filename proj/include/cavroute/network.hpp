#pragma once

#include <string>
#include <vector>

#include "cavroute/types.hpp"

namespace cavroute {

/// Builds the graph from raw links, validating ids and BPR fields.
/// Throws InputError on duplicate link ids, unknown endpoints, self loops,
/// or non-positive t0/capacity on non-custom links.
Network build_network(std::vector<Link> links);

/// Validates demands against the network (endpoints exist, are distinct,
/// demand > 0, no duplicate O-D pair).
void validate_trips(const Network& net, const std::vector<ODPair>& trips);

struct ShortestPathResult {
  std::vector<double> dist;              // per node index; +inf unreachable
  std::vector<int> pred_link;            // link index into node, -1 at source
  std::vector<double> cost;              // the costs the tree was built with
};

/// Dijkstra over nonnegative link costs (per link index). Among equal-cost
/// shortest paths the predecessor choice yields the lexicographically
/// smallest link-id sequence from the source.
ShortestPathResult shortest_paths(const Network& net, int source_index,
                                  const std::vector<double>& link_cost);

/// Path link indices from source to target per pred_link, or empty when
/// unreachable.
std::vector<int> extract_path(const ShortestPathResult& sp, const Network& net,
                              int source_index, int target_index);

/// Up to k loopless shortest paths per O-D by free-flow time (Yen), each
/// O-D's list sorted by cost then lexicographic link-id sequence. Throws
/// InputError when an O-D pair is disconnected.
RouteSet enumerate_routes(const Network& net, const std::vector<ODPair>& trips,
                          int k);

/// x = A · P^T · g: expands per-route probabilities into link flows.
/// Throws InputError when P's shape disagrees with rs/ods.
FlowVector route_flows_to_link_flows(const RouteProbabilityMatrix& P,
                                     const std::vector<ODPair>& ods,
                                     const RouteSet& rs,
                                     const Network& net);

struct TntpProblem {
  std::vector<Link> links;
  std::vector<ODPair> trips;
};

/// TNTP-style network file: metadata header, then one row per link
/// (tail head capacity length fft alpha beta speed toll type;). Length is
/// taken as miles and free-flow time as minutes. The alpha/beta columns are
/// parsed and ignored; the model's BPR shape comes from Parameters.
std::vector<Link> load_tntp_network(const std::string& path);

/// TNTP trips file: `Origin o` blocks of `dest : flow;` entries. Zero-flow
/// entries are dropped.
std::vector<ODPair> load_tntp_trips(const std::string& path);

void save_tntp_network(const std::string& path, const Network& net);
void save_tntp_trips(const std::string& path, const std::vector<ODPair>& trips);

}  // namespace cavroute
