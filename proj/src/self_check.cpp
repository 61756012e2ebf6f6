#include "cavroute/self_check.hpp"

#include <cmath>
#include <random>

#include "cavroute/fixtures.hpp"
#include "cavroute/so_solver.hpp"
#include "cavroute/stackelberg.hpp"
#include "format.hpp"

namespace cavroute {
namespace {

bool close(const std::vector<double>& a, const std::vector<double>& b,
           double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

CheckResult check_projection() {
  CheckResult c{"project_simplex", false, ""};
  bool ok = close(project_simplex({0.2, 0.3, 0.5}), {0.2, 0.3, 0.5}, 1e-12) &&
            close(project_simplex({2.0, 0.0, 0.0}), {1.0, 0.0, 0.0}, 1e-12) &&
            close(project_simplex({0.5, 0.5, 0.5}),
                  {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-12);
  c.passed = ok;
  c.detail = ok ? "three closed-form projections match" : "projection mismatch";
  return c;
}

RouteProbabilityMatrix interior_point(const RouteSet& rs, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  RouteProbabilityMatrix P = RouteProbabilityMatrix::uniform(rs);
  for (auto& row : P.rows) {
    double sum = 0.0;
    std::vector<double> d(row.size());
    for (double& v : d) {
      v = exp1(rng);
      sum += v;
    }
    for (std::size_t r = 0; r < row.size(); ++r)
      row[r] = 0.5 * row[r] + 0.5 * d[r] / sum;
  }
  return P;
}

/// Largest relative error between analytic and central-difference
/// directional derivatives over simplex-tangent directions.
double max_fd_error(const SoProblem& prob, const LinkCostModel& cost,
                    std::uint64_t seed, int points) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  const double h = 1e-6;
  for (int p = 0; p < points; ++p) {
    RouteProbabilityMatrix P = interior_point(*prob.rs, rng);
    auto grad = so_gradient(P, prob, cost);
    for (std::size_t i = 0; i < P.rows.size(); ++i) {
      if (P.rows[i].size() < 2) continue;
      for (std::size_t r = 1; r < P.rows[i].size(); ++r) {
        RouteProbabilityMatrix hi = P, lo = P;
        hi.rows[i][0] += h;
        hi.rows[i][r] -= h;
        lo.rows[i][0] -= h;
        lo.rows[i][r] += h;
        double fd = (so_objective(hi, prob, cost) - so_objective(lo, prob, cost)) /
                    (2.0 * h);
        double an = grad[i][0] - grad[i][r];
        double err = std::abs(an - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, err);
      }
    }
  }
  return worst;
}

CheckResult check_gradient(Objective obj, const Parameters& params,
                           std::uint64_t seed) {
  CheckResult c{obj == Objective::Time ? "gradient_time_fd"
                                       : "gradient_energy_cv_fd",
                false, ""};
  Fixture fx = grid_fixture(seed);
  RouteSet rs = enumerate_routes(fx.net, fx.trips, 3);
  LinkCostModel cost(fx.net, params.bpr);
  SoProblem prob;
  prob.net = &fx.net;
  prob.rs = &rs;
  prob.g_c = &fx.trips;
  prob.x_nc.assign(fx.net.num_links(), 0.0);
  prob.objective = obj;
  prob.params = &params;
  double err = max_fd_error(prob, cost, seed + 17, 10);
  c.passed = err <= 1e-5;
  c.detail = "max relative error " + fmt_double(err);
  return c;
}

CheckResult check_oracle(const Parameters& params) {
  CheckResult c{"marginal_cost_oracle", false, ""};
  Fixture fx = braess_fixture();
  RouteSet rs = enumerate_routes(fx.net, fx.trips, 3);
  LinkCostModel cost(fx.net, params.bpr);

  SoProblem prob;
  prob.net = &fx.net;
  prob.rs = &rs;
  prob.g_c = &fx.trips;
  prob.x_nc.assign(fx.net.num_links(), 0.0);
  prob.objective = Objective::Time;
  prob.params = &params;
  SoResult so = solve_so(prob, cost, params.so, params.seed);

  FlowVector oracle = system_optimum_oracle(fx.net, fx.trips, params);
  double so_time = cost.total_time(so.x_c);
  double oracle_time = cost.total_time(oracle);
  double rel = std::abs(so_time - oracle_time) / oracle_time;
  c.passed = rel <= 1e-3;
  c.detail = "total time " + fmt_double(so_time) + " vs oracle " +
             fmt_double(oracle_time) + " (rel diff " + fmt_double(rel) + ")";
  return c;
}

CheckResult check_knapsack(const Parameters& params) {
  CheckResult c{"cd_cs_knapsack", false, ""};
  std::vector<double> lengths{5.0, 10.0, 3.0, 8.0};
  std::vector<double> speeds{55.0, 30.0, 15.0, 45.0};

  CdCsTable zero = params.cdcs;
  zero.battery_kwh = 0.0;
  CdCsSplit none = solve_cd_cs_split(zero, params.bands,
                                     params.cv.gas_price_per_gal, lengths,
                                     speeds);
  bool ok = none.kwh_used == 0.0;
  for (double y : none.cd_fraction) ok = ok && y == 0.0;

  CdCsTable big = params.cdcs;
  big.battery_kwh = 1e6;
  CdCsSplit all = solve_cd_cs_split(big, params.bands,
                                    params.cv.gas_price_per_gal, lengths,
                                    speeds);
  for (double y : all.cd_fraction) ok = ok && y == 1.0;

  CdCsSplit tight = solve_cd_cs_split(params.cdcs, params.bands,
                                      params.cv.gas_price_per_gal, lengths,
                                      speeds);
  ok = ok && tight.kwh_used <= params.cdcs.battery_kwh + 1e-6;

  c.passed = ok;
  c.detail = ok ? "zero/full/budgeted splits behave" : "split violates bounds";
  return c;
}

CheckResult check_braess_ue(const Parameters& params) {
  CheckResult c{"braess_ue", false, ""};
  Fixture fx = braess_fixture();
  RouteSet rs = enumerate_routes(fx.net, fx.trips, 3);
  EquilibriumResult eq =
      solve_mixed(fx.net, rs, fx.trips, 0.0, Objective::Time, params);
  double t = eq.metrics.noncav_avg_time_min.value_or(0.0);
  c.passed = std::abs(t - 80.0) <= 0.1;
  c.detail = "per-vehicle time " + fmt_double(t) + " min";
  return c;
}

}  // namespace

std::vector<CheckResult> run_self_checks(const Parameters& params,
                                         std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(check_projection());
  out.push_back(check_gradient(Objective::Time, params, seed));
  out.push_back(check_gradient(Objective::EnergyCv, params, seed));
  out.push_back(check_oracle(params));
  out.push_back(check_knapsack(params));
  out.push_back(check_braess_ue(params));
  return out;
}

}  // namespace cavroute
