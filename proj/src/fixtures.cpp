#include "cavroute/fixtures.hpp"

#include <random>

#include "cavroute/network.hpp"

namespace cavroute {

Fixture braess_fixture() {
  // Fig.-5 style diamond: 1->2->4 and 1->3->4 with the 2->3 shortcut.
  // Times in minutes at flow x veh/hr: t1 = t5 = x/100, t2 = t3 = 45, t4 = 0.
  auto custom = [](int id, int tail, int head, std::vector<double> poly,
                   double length) {
    Link link;
    link.id = id;
    link.tail = tail;
    link.head = head;
    link.length_mi = length;
    link.custom_time_poly = std::move(poly);
    return link;
  };
  std::vector<Link> links;
  links.push_back(custom(1, 1, 2, {0.0, 0.01}, 30.5));
  links.push_back(custom(2, 1, 3, {45.0}, 30.5));
  links.push_back(custom(3, 2, 4, {45.0}, 30.5));
  links.push_back(custom(4, 2, 3, {0.0}, 0.0));
  links.push_back(custom(5, 3, 4, {0.0, 0.01}, 30.5));

  Fixture f;
  f.net = build_network(std::move(links));
  f.trips = {{1, 4, 4000.0}};
  return f;
}

Fixture grid_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> length_mi(2.0, 8.0);
  std::uniform_real_distribution<double> capacity(1200.0, 3600.0);

  const int side = 4;
  auto node_id = [&](int r, int c) { return r * side + c + 1; };

  std::vector<Link> links;
  auto add_pair = [&](int u, int v) {
    double l = length_mi(rng);
    double m = capacity(rng);
    // 60 mph free flow, so t0 in minutes equals the length in miles.
    Link fwd;
    fwd.id = int(links.size()) + 1;
    fwd.tail = u;
    fwd.head = v;
    fwd.free_flow_min = l;
    fwd.capacity = m;
    fwd.length_mi = l;
    links.push_back(fwd);
    Link bwd = fwd;
    bwd.id = int(links.size()) + 1;
    bwd.tail = v;
    bwd.head = u;
    links.push_back(bwd);
  };
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) add_pair(node_id(r, c), node_id(r, c + 1));
      if (r + 1 < side) add_pair(node_id(r, c), node_id(r + 1, c));
    }

  Fixture f;
  f.net = build_network(std::move(links));

  std::uniform_int_distribution<int> node(1, side * side);
  std::uniform_real_distribution<double> demand(2500.0, 5500.0);
  while (f.trips.size() < 8) {
    int o = node(rng);
    int d = node(rng);
    if (o == d) continue;
    bool dup = false;
    for (const ODPair& od : f.trips)
      dup = dup || (od.origin == o && od.destination == d);
    if (dup) continue;
    f.trips.push_back({o, d, demand(rng)});
  }
  return f;
}

}  // namespace cavroute
