#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavroute.h"

namespace {

int exit_code(cr_status s) {
  switch (s) {
    case CR_OK: return 0;
    case CR_ERR_NOT_CONVERGED: return 2;
    default: return 1;
  }
}

void report_failure(const char* what, cr_status s) {
  std::fprintf(stderr, "%s: %s\n", what, cr_last_error());
  (void)s;
}

struct ParamsHandle {
  cr_params* p = nullptr;
  ~ParamsHandle() { cr_params_free(p); }
};

struct ProblemHandle {
  cr_problem* p = nullptr;
  ~ProblemHandle() { cr_problem_free(p); }
};

struct Options {
  std::string net, trips, config;
  std::string out = "out";
  std::string objective = "time";
  std::uint64_t seed = 0;
  int routes_per_od = 3;
  bool seed_set = false;
  bool routes_set = false;
};

void add_common(CLI::App* cmd, Options& o, bool with_files) {
  if (with_files) {
    cmd->add_option("--net", o.net, "TNTP-style network file")->required();
    cmd->add_option("--trips", o.trips, "TNTP-style trips file")->required();
  }
  cmd->add_option("--out", o.out, "output directory (default: out)");
  cmd->add_option("--seed", o.seed, "random seed (default: 0)")
      ->each([&](const std::string&) { o.seed_set = true; });
  cmd->add_option("--routes-per-od", o.routes_per_od,
                  "routes enumerated per O-D pair (default: 3)")
      ->each([&](const std::string&) { o.routes_set = true; });
  cmd->add_option("--config", o.config, "key = value parameter file");
}

/// Config file first, then explicit flags on top.
cr_status build_params(const Options& o, ParamsHandle& h) {
  cr_status s = cr_params_create(&h.p);
  if (s != CR_OK) return s;
  if (!o.config.empty()) {
    s = cr_params_load_config(h.p, o.config.c_str());
    if (s != CR_OK) return s;
  }
  if (o.seed_set) {
    s = cr_params_set(h.p, "seed", std::to_string(o.seed).c_str());
    if (s != CR_OK) return s;
  }
  if (o.routes_set) {
    s = cr_params_set(h.p, "routes_per_od",
                      std::to_string(o.routes_per_od).c_str());
    if (s != CR_OK) return s;
  }
  return CR_OK;
}

cr_status load_problem(const Options& o, ProblemHandle& h) {
  return cr_problem_load(o.net.c_str(), o.trips.c_str(), &h.p);
}

cr_objective parse_objective(const std::string& s) {
  if (s == "energy-cv") return CR_OBJECTIVE_ENERGY_CV;
  if (s == "energy-phev") return CR_OBJECTIVE_ENERGY_PHEV;
  return CR_OBJECTIVE_TIME;
}

int run_ue(const Options& o) {
  ParamsHandle params;
  ProblemHandle problem;
  cr_status s = build_params(o, params);
  if (s == CR_OK) s = load_problem(o, problem);
  if (s != CR_OK) {
    report_failure("ue", s);
    return exit_code(s);
  }
  cr_ue_summary sum{};
  s = cr_solve_ue(problem.p, params.p, o.out.c_str(), &sum);
  if (s != CR_OK && s != CR_ERR_NOT_CONVERGED) {
    report_failure("ue", s);
    return exit_code(s);
  }
  std::printf("user equilibrium: %s after %d iterations\n",
              sum.converged ? "converged" : "NOT converged", sum.iterations);
  std::printf("  relative gap     %.6g\n", sum.rel_gap);
  std::printf("  Beckmann value   %.6g\n", sum.beckmann);
  std::printf("  avg travel time  %.4f min/vehicle\n", sum.avg_time_min);
  std::printf("  wrote %s/ue_flows.csv, %s/ue_trace.csv\n", o.out.c_str(),
              o.out.c_str());
  return exit_code(s);
}

void print_mixed(const cr_mixed_summary& sum) {
  std::printf("mixed equilibrium: %s after %d outer iterations\n",
              sum.converged ? "converged" : "NOT converged",
              sum.outer_iterations);
  if (!std::isnan(sum.cav_avg_time_min))
    std::printf("  CAV     %.4f min/vehicle, $%.4f/vehicle\n",
                sum.cav_avg_time_min, sum.cav_energy_usd);
  if (!std::isnan(sum.noncav_avg_time_min))
    std::printf("  non-CAV %.4f min/vehicle, $%.4f/vehicle\n",
                sum.noncav_avg_time_min, sum.noncav_energy_usd);
}

int run_so(const Options& o, double gamma) {
  ParamsHandle params;
  ProblemHandle problem;
  cr_status s = build_params(o, params);
  if (s == CR_OK) s = load_problem(o, problem);
  if (s != CR_OK) {
    report_failure("so", s);
    return exit_code(s);
  }
  cr_mixed_summary sum{};
  s = cr_solve_mixed(problem.p, params.p, gamma, parse_objective(o.objective),
                     o.out.c_str(), &sum);
  if (s != CR_OK && s != CR_ERR_NOT_CONVERGED) {
    report_failure("so", s);
    return exit_code(s);
  }
  print_mixed(sum);
  std::printf("  wrote %s/mixed_flows.csv, mixed_routes.csv, mixed_trace.csv\n",
              o.out.c_str());
  return exit_code(s);
}

int run_one_sweep(cr_problem* problem, cr_params* params, const Options& o,
                  const std::string& objective,
                  const std::vector<double>& gammas, cr_status* worst) {
  cr_sweep_summary sum{};
  cr_status s = cr_run_sweep(problem, params, parse_objective(objective),
                             gammas.empty() ? nullptr : gammas.data(),
                             gammas.size(), o.out.c_str(), &sum);
  if (s != CR_OK && s != CR_ERR_NOT_CONVERGED) {
    report_failure("sweep", s);
    *worst = s;
    return exit_code(s);
  }
  if (s != CR_OK) *worst = s;
  std::printf("%s sweep: %d points, %s\n", objective.c_str(), sum.points,
              sum.all_converged ? "all converged" : "NOT all converged");
  if (!std::isnan(sum.poa_pct))
    std::printf("  price of anarchy %.4f%%\n", sum.poa_pct);
  std::printf("  wrote %s/sweep_%s.csv and SVG plots\n", o.out.c_str(),
              objective.c_str());
  return -1;
}

int run_sweep_cmd(const Options& o, const std::vector<double>& gammas) {
  ParamsHandle params;
  ProblemHandle problem;
  cr_status s = build_params(o, params);
  if (s == CR_OK) s = load_problem(o, problem);
  if (s != CR_OK) {
    report_failure("sweep", s);
    return exit_code(s);
  }
  cr_status worst = CR_OK;
  int rc = run_one_sweep(problem.p, params.p, o, o.objective, gammas, &worst);
  if (rc >= 0) return rc;
  return exit_code(worst);
}

int run_braess(const Options& o, const std::vector<double>& gammas) {
  ParamsHandle params;
  ProblemHandle problem;
  cr_status s = build_params(o, params);
  if (s == CR_OK) s = cr_problem_braess(&problem.p);
  if (s != CR_OK) {
    report_failure("braess", s);
    return exit_code(s);
  }
  std::printf("Braess fixture: %zu nodes, %zu links, %zu O-D pair(s)\n",
              cr_problem_num_nodes(problem.p), cr_problem_num_links(problem.p),
              cr_problem_num_ods(problem.p));
  cr_status worst = CR_OK;
  for (const char* objective : {"time", "energy-cv"}) {
    int rc = run_one_sweep(problem.p, params.p, o, objective, gammas, &worst);
    if (rc >= 0) return rc;
  }
  return exit_code(worst);
}

int run_check(const Options& o) {
  ParamsHandle params;
  cr_status s = build_params(o, params);
  if (s != CR_OK) {
    report_failure("check", s);
    return exit_code(s);
  }
  cr_check* checks = nullptr;
  s = cr_check_run(params.p, o.seed, &checks);
  if (s != CR_OK) {
    report_failure("check", s);
    return exit_code(s);
  }
  bool all = true;
  for (size_t i = 0; i < cr_check_count(checks); ++i) {
    bool ok = cr_check_passed(checks, i) != 0;
    all = all && ok;
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", cr_check_name(checks, i),
                cr_check_detail(checks, i));
  }
  cr_check_free(checks);
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CAV fleet routing over congested road networks"};
  app.require_subcommand(1);

  Options o;
  double gamma = 0.0;
  std::vector<double> gammas;
  auto objective_check = CLI::IsMember({"time", "energy-cv", "energy-phev"});

  CLI::App* ue = app.add_subcommand("ue", "solve the user equilibrium (TAP)");
  add_common(ue, o, true);

  CLI::App* so =
      app.add_subcommand("so", "solve the mixed equilibrium at one gamma");
  add_common(so, o, true);
  so->add_option("--gamma", gamma, "CAV penetration rate in [0,1]")->required();
  so->add_option("--objective", o.objective, "time|energy-cv|energy-phev")
      ->check(objective_check);

  CLI::App* sweep =
      app.add_subcommand("sweep", "run a penetration-rate sweep");
  add_common(sweep, o, true);
  sweep->add_option("--objective", o.objective, "time|energy-cv|energy-phev")
      ->check(objective_check);
  sweep->add_option("--gamma", gammas,
                    "sweep points (repeatable; default 0,0.05,...,1)");

  CLI::App* braess = app.add_subcommand(
      "braess", "run the built-in Braess demo (time and energy sweeps)");
  add_common(braess, o, false);

  CLI::App* check =
      app.add_subcommand("check", "run gradient and oracle self-tests");
  check->add_option("--seed", o.seed, "random seed (default: 0)");
  check->add_option("--config", o.config, "key = value parameter file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (ue->parsed()) return run_ue(o);
  if (so->parsed()) return run_so(o, gamma);
  if (sweep->parsed()) return run_sweep_cmd(o, gammas);
  if (braess->parsed()) return run_braess(o, gammas);
  if (check->parsed()) return run_check(o);
  return 1;
}
