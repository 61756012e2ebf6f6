#include <doctest.h>

#include <cmath>
#include <random>

#include "cavroute/fixtures.hpp"
#include "cavroute/so_solver.hpp"
#include "oracles.hpp"

using namespace cavroute;

namespace {

std::vector<int> id_sequence(const Network& net, const std::vector<int>& links) {
  std::vector<int> ids;
  for (int a : links) ids.push_back(net.links[a].id);
  return ids;
}

int route_index_by_ids(const Network& net, const std::vector<Route>& routes,
                       const std::vector<int>& ids) {
  for (std::size_t r = 0; r < routes.size(); ++r)
    if (id_sequence(net, routes[r].links) == ids) return int(r);
  return -1;
}

struct BraessSo {
  Fixture f;
  RouteSet rs;
  Parameters params;
  int zigzag = -1, left = -1, right = -1;

  SoProblem problem(Objective obj) {
    SoProblem prob;
    prob.net = &f.net;
    prob.rs = &rs;
    prob.g_c = &f.trips;
    prob.x_nc.assign(f.net.num_links(), 0.0);
    prob.objective = obj;
    prob.params = &params;
    return prob;
  }
};

BraessSo braess_so() {
  BraessSo b;
  b.f = braess_fixture();
  b.rs = enumerate_routes(b.f.net, b.f.trips, 3);
  b.zigzag = route_index_by_ids(b.f.net, b.rs.per_od[0], {1, 4, 5});
  b.left = route_index_by_ids(b.f.net, b.rs.per_od[0], {1, 3});
  b.right = route_index_by_ids(b.f.net, b.rs.per_od[0], {2, 5});
  return b;
}

RouteProbabilityMatrix interior_point(const RouteSet& rs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uf(0.2, 1.0);
  RouteProbabilityMatrix P;
  for (const auto& routes : rs.per_od) {
    std::vector<double> row(routes.size());
    double sum = 0.0;
    for (double& p : row) {
      p = uf(rng);
      sum += p;
    }
    for (double& p : row) p /= sum;
    P.rows.push_back(std::move(row));
  }
  return P;
}

}  // namespace

TEST_CASE("system objective closed forms on Braess") {
  BraessSo b = braess_so();
  LinkCostModel cost(b.f.net, b.params.bpr);
  SoProblem prob = b.problem(Objective::Time);

  SUBCASE("all mass on the zigzag route") {
    RouteProbabilityMatrix P;
    P.rows = {{0.0, 0.0, 0.0}};
    P.rows[0][b.zigzag] = 1.0;
    CHECK(so_objective(P, prob, cost) == doctest::Approx(320000.0));
  }
  SUBCASE("the analytic system optimum") {
    RouteProbabilityMatrix P;
    P.rows = {{0.0, 0.0, 0.0}};
    P.rows[0][b.zigzag] = 500.0 / 4000.0;
    P.rows[0][b.left] = 1750.0 / 4000.0;
    P.rows[0][b.right] = 1750.0 / 4000.0;
    CHECK(so_objective(P, prob, cost) == doctest::Approx(258750.0));
  }
  SUBCASE("zero demand zeroes the objective and gradient") {
    std::vector<ODPair> none = b.f.trips;
    none[0].demand = 0.0;
    SoProblem p0 = prob;
    p0.g_c = &none;
    RouteProbabilityMatrix P = RouteProbabilityMatrix::uniform(b.rs);
    CHECK(so_objective(P, p0, cost) == doctest::Approx(0.0));
    for (const auto& row : so_gradient(P, p0, cost))
      for (double g : row) CHECK(g == doctest::Approx(0.0));
  }
  SUBCASE("shape mismatch is rejected") {
    RouteProbabilityMatrix P;
    P.rows = {{1.0, 0.0}};
    CHECK_THROWS_AS(so_objective(P, prob, cost), InputError);
  }
}

TEST_CASE("gradient symmetry and KKT equalization on Braess") {
  BraessSo b = braess_so();
  LinkCostModel cost(b.f.net, b.params.bpr);
  SoProblem prob = b.problem(Objective::Time);

  SUBCASE("symmetric split gives equal outer-route partials") {
    RouteProbabilityMatrix P;
    P.rows = {{0.0, 0.0, 0.0}};
    P.rows[0][b.left] = 0.5;
    P.rows[0][b.right] = 0.5;
    auto grad = so_gradient(P, prob, cost);
    CHECK(grad[0][b.left] == doctest::Approx(grad[0][b.right]));
  }
  SUBCASE("partials equalize at the analytic optimum") {
    RouteProbabilityMatrix P;
    P.rows = {{0.0, 0.0, 0.0}};
    P.rows[0][b.zigzag] = 500.0 / 4000.0;
    P.rows[0][b.left] = 1750.0 / 4000.0;
    P.rows[0][b.right] = 1750.0 / 4000.0;
    auto grad = so_gradient(P, prob, cost);
    CHECK(grad[0][b.zigzag] == doctest::Approx(grad[0][b.left]).epsilon(1e-9));
    CHECK(grad[0][b.left] == doctest::Approx(grad[0][b.right]).epsilon(1e-9));
  }
}

TEST_CASE("simplex projection") {
  using V = std::vector<double>;
  CHECK(project_simplex({0.2, 0.3, 0.5}) == V{0.2, 0.3, 0.5});

  V p = project_simplex({2.0, 0.0, 0.0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));

  p = project_simplex({0.5, 0.5, 0.5});
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(project_simplex({}), InputError);

  SUBCASE("projection is idempotent and feasible") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uf(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
      V v(4);
      for (double& x : v) x = uf(rng);
      V w = project_simplex(v);
      double sum = 0.0;
      for (double x : w) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1.0));
      V w2 = project_simplex(w);
      for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(w2[i] == doctest::Approx(w[i]).epsilon(1e-12));
    }
  }
  SUBCASE("projection is the nearest feasible point") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uf(-2.0, 2.0);
    std::uniform_real_distribution<double> us(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      V v(3);
      for (double& x : v) x = uf(rng);
      V w = project_simplex(v);
      auto dist2 = [&](const V& q) {
        double d = 0.0;
        for (std::size_t i = 0; i < 3; ++i) d += (v[i] - q[i]) * (v[i] - q[i]);
        return d;
      };
      for (int s = 0; s < 40; ++s) {
        V q{us(rng), us(rng), us(rng)};
        double sum = q[0] + q[1] + q[2];
        for (double& x : q) x /= sum;
        CHECK(dist2(w) <= dist2(q) + 1e-12);
      }
    }
  }
}

TEST_CASE("analytic gradients match finite differences") {
  Fixture grid = grid_fixture(12);
  RouteSet rs = enumerate_routes(grid.net, grid.trips, 3);
  Parameters params;
  LinkCostModel cost(grid.net, params.bpr);
  std::mt19937_64 rng(99);

  for (Objective obj : {Objective::Time, Objective::EnergyCv}) {
    SoProblem prob;
    prob.net = &grid.net;
    prob.rs = &rs;
    prob.g_c = &grid.trips;
    prob.x_nc.assign(grid.net.num_links(), 0.0);
    prob.objective = obj;
    prob.params = &params;

    auto J = [&](const RouteProbabilityMatrix& Q) {
      return so_objective(Q, prob, cost);
    };
    for (int trial = 0; trial < 10; ++trial) {
      RouteProbabilityMatrix P = interior_point(rs, rng);
      auto grad = so_gradient(P, prob, cost);
      for (std::size_t i = 0; i < P.rows.size(); ++i) {
        for (std::size_t r = 1; r < P.rows[i].size(); ++r) {
          double fd = oracles::fd_directional(J, P, i, r, 0, 1e-6);
          double an = grad[i][r] - grad[i][0];
          CHECK(an == doctest::Approx(fd).epsilon(1e-5).scale(std::abs(fd) + 1.0));
        }
      }
    }
  }
}

TEST_CASE("Braess system optimum by projected gradient") {
  BraessSo b = braess_so();
  LinkCostModel cost(b.f.net, b.params.bpr);
  SoProblem prob = b.problem(Objective::Time);

  SoResult so = solve_so(prob, cost, b.params.so, 0);
  REQUIRE(so.converged);
  CHECK(so.objective_value / 4000.0 ==
        doctest::Approx(oracles::kBraessSoTimeMin).epsilon(2e-3));

  double zig = so.P_c.rows[0][b.zigzag] * 4000.0;
  double left = so.P_c.rows[0][b.left] * 4000.0;
  double right = so.P_c.rows[0][b.right] * 4000.0;
  CHECK(zig == doctest::Approx(500.0).epsilon(0.01));
  CHECK(left == doctest::Approx(1750.0).epsilon(0.01));
  CHECK(right == doctest::Approx(1750.0).epsilon(0.01));

  for (std::size_t a = 0; a < 5; ++a)
    CHECK(so.x_c[a] ==
          doctest::Approx(oracles::kBraessSoLinkFlows[a]).scale(4000.0).epsilon(2e-3));

  SUBCASE("the trace never increases across accepted steps") {
    for (std::size_t k = 1; k < so.trace.size(); ++k)
      CHECK(so.trace[k] <= so.trace[k - 1] * (1.0 + 1e-12));
  }
  SUBCASE("KKT residual is small at the solution") {
    CHECK(so.kkt_residual <= 1e-5);
  }
  SUBCASE("agreement with the marginal-cost oracle") {
    Parameters tight = b.params;
    tight.ue.rel_gap_tol = 1e-7;
    tight.ue.max_iterations = 200000;
    FlowVector oracle_flows =
        system_optimum_oracle(b.f.net, b.f.trips, tight);
    double oracle_total = cost.total_time(oracle_flows);
    CHECK(so.objective_value ==
          doctest::Approx(oracle_total).epsilon(1e-3));
  }
}

TEST_CASE("system optimum oracle closed forms") {
  Parameters params;
  params.ue.rel_gap_tol = 1e-7;
  params.ue.max_iterations = 200000;

  SUBCASE("Braess link flows") {
    Fixture f = braess_fixture();
    FlowVector x = system_optimum_oracle(f.net, f.trips, params);
    for (std::size_t a = 0; a < 5; ++a)
      CHECK(x[a] == doctest::Approx(oracles::kBraessSoLinkFlows[a])
                        .scale(4000.0)
                        .epsilon(1e-3));
  }
  SUBCASE("single link carries everything") {
    Link l;
    l.id = 1;
    l.tail = 1;
    l.head = 2;
    l.free_flow_min = 5.0;
    l.capacity = 1000.0;
    Network net = build_network({l});
    FlowVector x = system_optimum_oracle(net, {{1, 2, 800.0}}, params);
    CHECK(x[0] == doctest::Approx(800.0));
  }
  SUBCASE("identical parallel links split evenly") {
    auto mk = [](int id) {
      Link l;
      l.id = id;
      l.tail = 1;
      l.head = 2;
      l.free_flow_min = 5.0;
      l.capacity = 1000.0;
      return l;
    };
    Network net = build_network({mk(1), mk(2)});
    FlowVector x = system_optimum_oracle(net, {{1, 2, 1600.0}}, params);
    CHECK(x[0] == doctest::Approx(800.0).epsilon(1e-3));
    CHECK(x[1] == doctest::Approx(800.0).epsilon(1e-3));
  }
}

TEST_CASE("solve_so matches the oracle on random networks at full penetration") {
  Parameters params;
  params.ue.rel_gap_tol = 1e-7;
  params.ue.max_iterations = 200000;
  for (std::uint64_t seed : {3ull, 8ull}) {
    oracles::SmallProblem p = oracles::random_small_problem(seed);
    RouteSet rs = enumerate_routes(p.net, p.trips, 8);
    LinkCostModel cost(p.net, params.bpr);

    SoProblem prob;
    prob.net = &p.net;
    prob.rs = &rs;
    prob.g_c = &p.trips;
    prob.x_nc.assign(p.net.num_links(), 0.0);
    prob.objective = Objective::Time;
    prob.params = &params;

    SoResult so = solve_so(prob, cost, params.so, 0);
    FlowVector oracle_flows = system_optimum_oracle(p.net, p.trips, params);
    CHECK(so.objective_value ==
          doctest::Approx(cost.total_time(oracle_flows)).epsilon(1e-3));
  }
}

TEST_CASE("single-route O-D is assigned trivially") {
  Link l;
  l.id = 1;
  l.tail = 1;
  l.head = 2;
  l.free_flow_min = 5.0;
  l.capacity = 1000.0;
  l.length_mi = 4.0;
  Network net = build_network({l});
  std::vector<ODPair> trips{{1, 2, 700.0}};
  RouteSet rs = enumerate_routes(net, trips, 3);
  Parameters params;
  LinkCostModel cost(net, params.bpr);

  SoProblem prob;
  prob.net = &net;
  prob.rs = &rs;
  prob.g_c = &trips;
  prob.x_nc.assign(1, 0.0);
  prob.objective = Objective::Time;
  prob.params = &params;

  SoResult so = solve_so(prob, cost, params.so, 0);
  REQUIRE(so.converged);
  CHECK(so.P_c.rows[0] == std::vector<double>{1.0});
  CHECK(so.objective_value ==
        doctest::Approx(cost.time(0, 700.0) * 700.0));
}

TEST_CASE("energy objective argmin is invariant to price rescaling") {
  BraessSo b = braess_so();

  std::vector<std::vector<double>> splits;
  for (double scale : {0.1, 1.0, 10.0}) {
    Parameters params = b.params;
    params.cv.gas_price_per_gal = 2.75 * scale;
    LinkCostModel cost(b.f.net, params.bpr);
    SoProblem prob = b.problem(Objective::EnergyCv);
    prob.params = &params;
    SoResult so = solve_so(prob, cost, params.so, 0);
    REQUIRE(so.converged);
    splits.push_back(so.P_c.rows[0]);
  }
  for (std::size_t s = 1; s < splits.size(); ++s)
    for (std::size_t r = 0; r < splits[0].size(); ++r)
      CHECK(splits[s][r] == doctest::Approx(splits[0][r]).scale(1.0).epsilon(1e-4));
}

TEST_CASE("PHEV solve respects the battery constraint") {
  BraessSo b = braess_so();
  LinkCostModel cost(b.f.net, b.params.bpr);

  SUBCASE("default battery") {
    SoProblem prob = b.problem(Objective::EnergyPhev);
    SoResult so = solve_so(prob, cost, b.params.so, 0);
    CHECK(so.local_optimum);
    REQUIRE(so.Y.size() == b.rs.total_routes());

    std::size_t q = 0;
    for (std::size_t i = 0; i < b.rs.per_od.size(); ++i)
      for (std::size_t r = 0; r < b.rs.per_od[i].size(); ++r, ++q) {
        const Route& route = b.rs.per_od[i][r];
        REQUIRE(so.Y[q].size() == route.links.size());
        auto times = cost.times(prob.x_nc + so.x_c);
        double kwh = 0.0;
        for (std::size_t j = 0; j < route.links.size(); ++j) {
          double y = so.Y[q][j];
          CHECK(y >= 0.0);
          CHECK(y <= 1.0);
          int a = route.links[j];
          double speed = link_speed_mph(b.params.cv,
                                        b.f.net.links[a].length_mi, times[a]);
          auto opt = phev_link_option(b.params.cdcs, b.params.bands,
                                      b.params.cv.gas_price_per_gal,
                                      b.f.net.links[a].length_mi, speed);
          kwh += opt.cd_kwh * y;
        }
        CHECK(kwh <= b.params.cdcs.battery_kwh + 1e-6);
      }
  }
  SUBCASE("zero battery forces all-gas routing costs") {
    Parameters params = b.params;
    params.cdcs.battery_kwh = 0.0;
    SoProblem prob = b.problem(Objective::EnergyPhev);
    prob.params = &params;
    SoResult so = solve_so(prob, cost, params.so, 0);
    for (const auto& y_route : so.Y)
      for (double y : y_route) CHECK(y == doctest::Approx(0.0));
  }
  SUBCASE("huge battery drives every route fully electric") {
    Parameters params = b.params;
    params.cdcs.battery_kwh = 1e6;
    SoProblem prob = b.problem(Objective::EnergyPhev);
    prob.params = &params;
    SoResult so = solve_so(prob, cost, params.so, 0);
    std::size_t q = 0;
    for (std::size_t i = 0; i < b.rs.per_od.size(); ++i)
      for (std::size_t r = 0; r < b.rs.per_od[i].size(); ++r, ++q)
        for (std::size_t j = 0; j < so.Y[q].size(); ++j)
          if (b.f.net.links[b.rs.per_od[i][r].links[j]].length_mi > 0.0)
            CHECK(so.Y[q][j] == doctest::Approx(1.0));
  }
}

TEST_CASE("solver runs are deterministic for a fixed seed") {
  BraessSo b = braess_so();
  LinkCostModel cost(b.f.net, b.params.bpr);
  SoProblem prob = b.problem(Objective::EnergyPhev);

  SoResult a = solve_so(prob, cost, b.params.so, 42);
  SoResult c = solve_so(prob, cost, b.params.so, 42);
  CHECK(a.objective_value == c.objective_value);
  CHECK(a.P_c.rows == c.P_c.rows);
  CHECK(a.x_c == c.x_c);
}
