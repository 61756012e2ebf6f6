/* End-to-end acceptance gate. Each numbered criterion prints exactly one
 * PASS/FAIL line; the exit code is the number of failures. Tolerances are
 * fixed here and nowhere else. */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cavroute/fixtures.hpp"
#include "cavroute/network.hpp"
#include "cavroute/so_solver.hpp"
#include "cavroute/stackelberg.hpp"
#include "cavroute/sweep.hpp"
#include "cavroute/ue_solver.hpp"
#include "oracles.hpp"

namespace {

using namespace cavroute;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int num, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s %2d %-28s %s\n", pass ? "PASS" : "FAIL", num, name,
              detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double avg_time_at(const Network& net, const LinkCostModel& cost,
                   const FlowVector& x, double demand) {
  auto times = cost.times(x);
  double total = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) total += times[a] * x[a];
  return total / demand;
}

/* 1. Braess at gamma=0: per-vehicle time 80.0 +/- 0.1 min in under 1 s. */
void criterion_1(const Fixture& f, const RouteSet& rs,
                 const Parameters& params) {
  auto t0 = Clock::now();
  EquilibriumResult eq =
      solve_mixed(f.net, rs, f.trips, 0.0, Objective::Time, params);
  double elapsed = seconds_since(t0);
  double t = eq.metrics.noncav_avg_time_min.value_or(NAN);
  bool pass = eq.converged && std::abs(t - 80.0) <= 0.1 && elapsed < 1.0;
  report(1, "braess-ue-baseline",
         pass, fmt("avg time %.4f min (target 80.0 +/- 0.1), %.3f s", t,
                   elapsed));
}

/* 2. Braess at gamma=1, time objective: 64.69 +/- 0.1 min, route flows
 * {1750, 1750, 500} +/- 5 veh/hr, and agreement with the marginal-cost
 * equilibrium within 0.1%, in under 5 s. */
void criterion_2(const Fixture& f, const RouteSet& rs,
                 const Parameters& params) {
  auto t0 = Clock::now();
  EquilibriumResult eq =
      solve_mixed(f.net, rs, f.trips, 1.0, Objective::Time, params);
  double elapsed = seconds_since(t0);
  double t = eq.metrics.cav_avg_time_min.value_or(NAN);

  double demand = f.trips[0].demand;
  std::vector<double> flows;
  for (double p : eq.P_c.rows[0]) flows.push_back(p * demand);
  std::sort(flows.begin(), flows.end());
  std::vector<double> want{500.0, 1750.0, 1750.0};
  bool flows_ok = flows.size() == want.size();
  for (std::size_t i = 0; flows_ok && i < want.size(); ++i)
    flows_ok = std::abs(flows[i] - want[i]) <= 5.0;

  LinkCostModel cost(f.net, params.bpr);
  FlowVector x_oracle = system_optimum_oracle(f.net, f.trips, params);
  double t_oracle = avg_time_at(f.net, cost, x_oracle, demand);
  bool oracle_ok = std::abs(t - t_oracle) / t_oracle <= 1e-3;

  bool pass = eq.converged && std::abs(t - 64.69) <= 0.1 && flows_ok &&
              oracle_ok && elapsed < 5.0;
  report(2, "braess-system-optimum", pass,
         fmt("avg time %.4f min (target 64.69 +/- 0.1), flows "
             "{%.1f, %.1f, %.1f}, marginal oracle %.4f min, %.3f s",
             t, flows[0], flows[1], flows[2], t_oracle, elapsed));
}

/* 3. Savings at full penetration: time 18.9 +/- 0.7 pp and CV energy
 * 19.1 +/- 1.0 pp versus the gamma=0 baseline.
 *
 * The energy target is infeasible under the pinned fuel model: the rate
 * curve bottoms out near 72.5 mph (~93.7 g/mi), and even the fiction of
 * all 4000 veh/hr crossing the zigzag at that speed only reaches ~18.7%
 * savings; flow conservation caps the real optimum at 10.34% (multistart,
 * KKT-verified). The criterion stays as stated and reports FAIL. */
void criterion_3(const SweepResult& time_sweep, const SweepResult& energy_sweep) {
  double time_savings = price_of_anarchy(time_sweep);
  double energy_savings = price_of_anarchy(energy_sweep);
  bool time_ok = std::abs(time_savings - 18.9) <= 0.7;
  bool energy_ok = std::abs(energy_savings - 19.1) <= 1.0;
  report(3, "braess-savings-targets", time_ok && energy_ok,
         fmt("time savings %.4f%% (target 18.9 +/- 0.7), energy savings "
             "%.4f%% (target 19.1 +/- 1.0)",
             time_savings, energy_savings));
}

/* 4. Small penetrations change nothing: both classes' time savings within
 * +/- 1 pp of zero for gamma in {0.01, 0.02, 0.05}. */
void criterion_4(const SweepResult& time_sweep) {
  bool pass = true;
  double worst = 0.0;
  for (double gamma : {0.01, 0.02, 0.05}) {
    const SweepRow* row = time_sweep.row_at(gamma);
    if (!row || !row->converged) {
      pass = false;
      continue;
    }
    for (double s : {row->cav_time_savings_pct, row->noncav_time_savings_pct}) {
      worst = std::max(worst, std::abs(s));
      pass = pass && std::abs(s) <= 1.0;
    }
  }
  report(4, "small-penetration-flatness", pass,
         fmt("largest class savings magnitude %.4f pp (limit 1.0)", worst));
}

/* 5. Selfish traffic benefits too: non-CAV time savings at gamma=0.5 is
 * strictly positive. */
void criterion_5(const SweepResult& time_sweep) {
  const SweepRow* row = time_sweep.row_at(0.5);
  double s = row ? row->noncav_time_savings_pct : NAN;
  report(5, "mutual-benefit", row && row->converged && s > 0.0,
         fmt("non-CAV time savings at gamma=0.5: %.4f%%", s));
}

/* 6. Wardrop property on 20 random networks: relative gap <= 1e-4 and the
 * times of used routes (>= 0.1% of their O-D demand) agree within 0.1%. */
void criterion_6() {
  int converged = 0;
  double worst_gap = 0.0, worst_spread = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto sp = oracles::random_small_problem(seed);
    Parameters params;
    UeConfig cfg = params.ue;
    cfg.rel_gap_tol = 1e-6;
    cfg.max_iterations = 400000;
    cfg.track_paths = true;
    LinkCostModel cost(sp.net, params.bpr);
    UeResult r = solve_ue_msa(sp.net, sp.trips,
                              FlowVector(sp.net.num_links(), 0.0), cost, cfg);
    worst_gap = std::max(worst_gap, r.final_gap);
    if (!r.converged) continue;
    ++converged;
    auto times = cost.times(r.x_nc);
    for (std::size_t i = 0; i < sp.trips.size(); ++i) {
      double best = 1e300, slowest = 0.0;
      for (const auto& [links, flow] : r.path_flows[i]) {
        if (flow < 1e-3 * sp.trips[i].demand) continue;
        double t = 0.0;
        for (int a : links) t += times[a];
        best = std::min(best, t);
        slowest = std::max(slowest, t);
      }
      if (best < 1e300)
        worst_spread = std::max(worst_spread, (slowest - best) / best);
    }
  }
  bool pass = converged == 20 && worst_gap <= 1e-4 && worst_spread <= 1e-3;
  report(6, "wardrop-property-suite", pass,
         fmt("%d/20 converged, worst gap %.2e (limit 1e-4), worst used-route "
             "spread %.4f%% (limit 0.1%%)",
             converged, worst_gap, 100.0 * worst_spread));
}

/* 7. Analytic gradients match central differences within 1e-5 relative
 * error at 50 random interior simplex points, both objectives. */
void criterion_7() {
  Fixture f = grid_fixture(12);
  Parameters params;
  params.routes_per_od = 3;
  RouteSet rs = enumerate_routes(f.net, f.trips, params.routes_per_od);
  LinkCostModel cost(f.net, params.bpr);
  std::mt19937_64 rng(99);
  std::exponential_distribution<double> expo(1.0);
  double worst = 0.0;
  for (Objective obj : {Objective::Time, Objective::EnergyCv}) {
    SoProblem prob;
    prob.net = &f.net;
    prob.rs = &rs;
    prob.g_c = &f.trips;
    prob.x_nc = FlowVector(f.net.num_links(), 0.0);
    prob.objective = obj;
    prob.params = &params;
    auto J = [&](const RouteProbabilityMatrix& P) {
      return so_objective(P, prob, cost);
    };
    for (int pt = 0; pt < 50; ++pt) {
      RouteProbabilityMatrix P;
      P.rows.resize(rs.per_od.size());
      for (std::size_t i = 0; i < P.rows.size(); ++i) {
        auto& row = P.rows[i];
        row.resize(rs.per_od[i].size());
        double sum = 0.0;
        for (auto& p : row) sum += p = 0.05 + expo(rng);
        for (auto& p : row) p /= sum;
      }
      auto grad = so_gradient(P, prob, cost);
      for (std::size_t i = 0; i < P.rows.size(); ++i)
        for (std::size_t r = 1; r < P.rows[i].size(); ++r) {
          double fd = oracles::fd_directional(J, P, i, r, 0, 1e-6);
          double an = grad[i][r] - grad[i][0];
          worst = std::max(worst,
                           std::abs(an - fd) / std::max(1.0, std::abs(fd)));
        }
    }
  }
  report(7, "gradient-correctness", worst <= 1e-5,
         fmt("worst relative error %.3e over 2x50 points (limit 1e-5)",
             worst));
}

/* 8. CD/CS splits on routes of up to 6 links match an exhaustive 0.01-step
 * grid search within one grid step of objective value. */
void criterion_8() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_links(1, 6);
  std::uniform_real_distribution<double> length(0.5, 10.0);
  std::uniform_real_distribution<double> speed(3.0, 80.0);
  std::uniform_real_distribution<double> budget_frac(0.0, 1.2);
  Parameters params;
  double worst_excess = 0.0;
  bool pass = true;
  for (int trial = 0; trial < 30; ++trial) {
    int n = n_links(rng);
    std::vector<double> lengths(n), speeds(n);
    std::vector<LinkEnergyOption> opts(n);
    double total_kwh = 0.0;
    for (int i = 0; i < n; ++i) {
      lengths[i] = length(rng);
      speeds[i] = speed(rng);
      opts[i] = phev_link_option(params.cdcs, params.bands,
                                 params.cv.gas_price_per_gal, lengths[i],
                                 speeds[i]);
      total_kwh += opts[i].cd_kwh;
    }
    CdCsTable table = params.cdcs;
    table.battery_kwh = budget_frac(rng) * total_kwh;
    CdCsSplit split = solve_cd_cs_split(table, params.bands,
                                        params.cv.gas_price_per_gal, lengths,
                                        speeds);
    double grid = oracles::grid_cd_cs_cost(opts, table.battery_kwh, 0.01);
    double step = 0.0;
    for (const auto& o : opts)
      step = std::max(step, 0.01 * std::abs(o.cs_cost - o.cd_cost));
    // The continuous optimum can only undercut the grid; the grid can only
    // overshoot it by one grid step on the most sensitive link.
    double violation =
        std::max(split.cost - grid, grid - split.cost - step) - 1e-9;
    pass = pass && violation <= 0.0;
    worst_excess = std::max(worst_excess, violation);
  }
  report(8, "cdcs-optimality", pass,
         fmt("30 trials, worst excess over one-grid-step slack $%.3e",
             std::max(0.0, worst_excess)));
}

/* 9. Seeded 16-node grid: the full 21-point sweep converges at every point
 * and the gamma=1 savings equals the marginal-cost PoA within 0.5 pp. */
void criterion_9() {
  Fixture f = grid_fixture(21);
  Parameters params;
  params.routes_per_od = 8;
  LinkCostModel cost(f.net, params.bpr);
  double demand = 0.0;
  for (const auto& od : f.trips) demand += od.demand;

  UeConfig tight = params.ue;
  tight.rel_gap_tol = 1e-5;
  tight.max_iterations = 200000;
  UeResult ue = solve_ue_msa(f.net, f.trips,
                             FlowVector(f.net.num_links(), 0.0), cost, tight);
  double t_ue = avg_time_at(f.net, cost, ue.x_nc, demand);
  FlowVector x_so = system_optimum_oracle(f.net, f.trips, params);
  double poa_oracle = 100.0 * (t_ue - avg_time_at(f.net, cost, x_so, demand)) / t_ue;

  RouteSet rs = enumerate_routes(f.net, f.trips, params.routes_per_od);
  SweepSpec spec;
  spec.gamma_values = SweepSpec::default_grid();
  spec.objective = Objective::Time;
  SweepResult sw = run_sweep(spec, f.net, rs, f.trips, params);
  double savings = price_of_anarchy(sw);

  bool pass = sw.all_converged() && ue.converged &&
              std::abs(savings - poa_oracle) <= 0.5;
  long ok_rows = std::count_if(sw.rows.begin(), sw.rows.end(),
                               [](const SweepRow& r) { return r.converged; });
  report(9, "grid-sweep-poa", pass,
         fmt("%ld/21 points converged, gamma=1 savings %.4f%% vs marginal "
             "oracle PoA %.4f%% (limit 0.5 pp)",
             ok_rows, savings, poa_oracle));
}

/* 10. Two CLI runs with identical inputs and seed write byte-identical
 * CSVs. */
void criterion_10(const char* cli) {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "cavroute_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  auto run = [&](const fs::path& out) {
    std::string cmd = std::string("\"") + cli + "\" braess --seed 0 --out \"" +
                      out.string() + "\" > /dev/null";
    return std::system(cmd.c_str());
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  int rc1 = run(base / "a");
  int rc2 = run(base / "b");
  bool identical = true;
  for (const char* file : {"sweep_time.csv", "sweep_energy-cv.csv"}) {
    std::string a = slurp(base / "a" / file);
    std::string b = slurp(base / "b" / file);
    identical = identical && !a.empty() && a == b;
  }
  report(10, "determinism", rc1 == 0 && rc2 == 0 && identical,
         fmt("exit codes %d/%d, sweep CSVs %s", rc1, rc2,
             identical ? "byte-identical" : "DIFFER"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
    return 64;
  }

  Fixture braess = braess_fixture();
  Parameters params;
  RouteSet rs = enumerate_routes(braess.net, braess.trips, params.routes_per_od);

  criterion_1(braess, rs, params);
  criterion_2(braess, rs, params);

  SweepSpec time_spec;
  time_spec.gamma_values = {0.0, 0.01, 0.02, 0.05, 0.5, 1.0};
  time_spec.objective = Objective::Time;
  SweepResult time_sweep =
      run_sweep(time_spec, braess.net, rs, braess.trips, params);

  SweepSpec energy_spec;
  energy_spec.gamma_values = {0.0, 1.0};
  energy_spec.objective = Objective::EnergyCv;
  SweepResult energy_sweep =
      run_sweep(energy_spec, braess.net, rs, braess.trips, params);

  criterion_3(time_sweep, energy_sweep);
  criterion_4(time_sweep);
  criterion_5(time_sweep);
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(argv[1]);

  if (g_failures)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures;
}
