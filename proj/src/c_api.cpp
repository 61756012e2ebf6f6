#include "cavroute.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "cavroute/fixtures.hpp"
#include "cavroute/network.hpp"
#include "cavroute/self_check.hpp"
#include "cavroute/stackelberg.hpp"
#include "cavroute/sweep.hpp"
#include "format.hpp"

struct cr_problem {
  cavroute::Network net;
  std::vector<cavroute::ODPair> trips;
};

struct cr_params {
  cavroute::Parameters p;
};

struct cr_check {
  std::vector<cavroute::CheckResult> results;
};

namespace {

thread_local std::string g_last_error = "no error";

template <typename F>
cr_status guarded(F&& body) {
  try {
    return body();
  } catch (const cavroute::InputError& e) {
    g_last_error = e.what();
    return CR_ERR_INPUT;
  } catch (const cavroute::IoError& e) {
    g_last_error = e.what();
    return CR_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CR_ERR_INTERNAL;
  }
}

cr_status bad_argument(const std::string& what) {
  g_last_error = what;
  return CR_ERR_ARGUMENT;
}

std::filesystem::path prepare_out_dir(const char* out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw cavroute::IoError("cannot create output directory " + dir.string() +
                            ": " + ec.message());
  return dir;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cavroute::IoError("cannot write " + path.string());
  return out;
}

cavroute::Objective to_objective(cr_objective o) {
  switch (o) {
    case CR_OBJECTIVE_TIME: return cavroute::Objective::Time;
    case CR_OBJECTIVE_ENERGY_CV: return cavroute::Objective::EnergyCv;
    case CR_OBJECTIVE_ENERGY_PHEV: return cavroute::Objective::EnergyPhev;
  }
  throw cavroute::InputError("unknown objective code " +
                             std::to_string(int(o)));
}

double opt_or_nan(const std::optional<double>& v) {
  return v.value_or(std::nan(""));
}

}  // namespace

extern "C" {

const char* cr_last_error(void) { return g_last_error.c_str(); }

cr_status cr_problem_load(const char* net_path, const char* trips_path,
                          cr_problem** out) {
  if (!net_path || !trips_path || !out)
    return bad_argument("cr_problem_load: null argument");
  return guarded([&] {
    auto p = std::make_unique<cr_problem>();
    p->net = cavroute::build_network(cavroute::load_tntp_network(net_path));
    p->trips = cavroute::load_tntp_trips(trips_path);
    cavroute::validate_trips(p->net, p->trips);
    *out = p.release();
    return CR_OK;
  });
}

cr_status cr_problem_braess(cr_problem** out) {
  if (!out) return bad_argument("cr_problem_braess: null argument");
  return guarded([&] {
    auto fx = cavroute::braess_fixture();
    *out = new cr_problem{std::move(fx.net), std::move(fx.trips)};
    return CR_OK;
  });
}

cr_status cr_problem_grid(uint64_t seed, cr_problem** out) {
  if (!out) return bad_argument("cr_problem_grid: null argument");
  return guarded([&] {
    auto fx = cavroute::grid_fixture(seed);
    *out = new cr_problem{std::move(fx.net), std::move(fx.trips)};
    return CR_OK;
  });
}

void cr_problem_free(cr_problem* p) { delete p; }

size_t cr_problem_num_nodes(const cr_problem* p) {
  return p ? p->net.num_nodes() : 0;
}
size_t cr_problem_num_links(const cr_problem* p) {
  return p ? p->net.num_links() : 0;
}
size_t cr_problem_num_ods(const cr_problem* p) {
  return p ? p->trips.size() : 0;
}

cr_status cr_params_create(cr_params** out) {
  if (!out) return bad_argument("cr_params_create: null argument");
  *out = new cr_params();
  return CR_OK;
}

void cr_params_free(cr_params* p) { delete p; }

cr_status cr_params_load_config(cr_params* p, const char* path) {
  if (!p || !path) return bad_argument("cr_params_load_config: null argument");
  return guarded([&] {
    p->p.apply_config_file(path);
    return CR_OK;
  });
}

cr_status cr_params_set(cr_params* p, const char* key, const char* value) {
  if (!p || !key || !value) return bad_argument("cr_params_set: null argument");
  return guarded([&] {
    p->p.apply_key_value(key, value);
    return CR_OK;
  });
}

cr_status cr_solve_ue(const cr_problem* p, const cr_params* params,
                      const char* out_dir, cr_ue_summary* out) {
  if (!p || !params || !out_dir || !out)
    return bad_argument("cr_solve_ue: null argument");
  return guarded([&] {
    const cavroute::Parameters& pr = params->p;
    auto dir = prepare_out_dir(out_dir);
    cavroute::LinkCostModel cost(p->net, pr.bpr);
    cavroute::FlowVector zero(p->net.num_links(), 0.0);

    cavroute::RouteSet rs;
    const cavroute::RouteSet* rsp = nullptr;
    if (pr.ue.restrict_to_route_set) {
      rs = cavroute::enumerate_routes(p->net, p->trips, pr.routes_per_od);
      rsp = &rs;
    }
    cavroute::UeResult ue =
        cavroute::solve_ue_msa(p->net, p->trips, zero, cost, pr.ue, rsp);

    auto times = cost.times(ue.x_nc);
    {
      auto f = open_out(dir / "ue_flows.csv");
      f << "link_id,tail,head,flow_veh_hr,time_min\n";
      for (std::size_t a = 0; a < p->net.num_links(); ++a) {
        const cavroute::Link& link = p->net.links[a];
        f << link.id << ',' << link.tail << ',' << link.head << ','
          << cavroute::fmt_double(ue.x_nc[a]) << ','
          << cavroute::fmt_double(times[a]) << "\n";
      }
    }
    {
      auto f = open_out(dir / "ue_trace.csv");
      f << "iteration,rel_gap,beckmann\n";
      for (const auto& t : ue.trace)
        f << t.iteration << ',' << cavroute::fmt_double(t.rel_gap) << ','
          << cavroute::fmt_double(t.beckmann) << "\n";
    }

    double demand = 0.0, veh_time = 0.0;
    for (const auto& od : p->trips) demand += od.demand;
    for (std::size_t a = 0; a < ue.x_nc.size(); ++a)
      veh_time += times[a] * ue.x_nc[a];
    out->iterations = ue.iterations;
    out->converged = ue.converged ? 1 : 0;
    out->rel_gap = ue.final_gap;
    out->beckmann = ue.beckmann_value;
    out->avg_time_min = demand > 0.0 ? veh_time / demand : 0.0;
    return ue.converged ? CR_OK : CR_ERR_NOT_CONVERGED;
  });
}

cr_status cr_solve_mixed(const cr_problem* p, const cr_params* params,
                         double gamma, cr_objective objective,
                         const char* out_dir, cr_mixed_summary* out) {
  if (!p || !params || !out_dir || !out)
    return bad_argument("cr_solve_mixed: null argument");
  return guarded([&] {
    const cavroute::Parameters& pr = params->p;
    auto dir = prepare_out_dir(out_dir);
    auto obj = to_objective(objective);
    cavroute::RouteSet rs =
        cavroute::enumerate_routes(p->net, p->trips, pr.routes_per_od);
    cavroute::EquilibriumResult eq =
        cavroute::solve_mixed(p->net, rs, p->trips, gamma, obj, pr);

    cavroute::LinkCostModel cost(p->net, pr.bpr);
    auto times = cost.times(cavroute::operator+(eq.x_c, eq.x_nc));
    {
      auto f = open_out(dir / "mixed_flows.csv");
      f << "link_id,tail,head,x_cav,x_noncav,x_total,time_min\n";
      for (std::size_t a = 0; a < p->net.num_links(); ++a) {
        const cavroute::Link& link = p->net.links[a];
        f << link.id << ',' << link.tail << ',' << link.head << ','
          << cavroute::fmt_double(eq.x_c[a]) << ','
          << cavroute::fmt_double(eq.x_nc[a]) << ','
          << cavroute::fmt_double(eq.x_c[a] + eq.x_nc[a]) << ','
          << cavroute::fmt_double(times[a]) << "\n";
      }
    }
    {
      auto f = open_out(dir / "mixed_routes.csv");
      f << "origin,destination,route,links,probability,flow_veh_hr\n";
      for (std::size_t i = 0; i < rs.per_od.size(); ++i)
        for (std::size_t r = 0; r < rs.per_od[i].size(); ++r) {
          std::string ids;
          for (int a : rs.per_od[i][r].links) {
            if (!ids.empty()) ids += '-';
            ids += std::to_string(p->net.links[a].id);
          }
          double prob = eq.P_c.rows[i][r];
          f << p->trips[i].origin << ',' << p->trips[i].destination << ','
            << r << ',' << ids << ',' << cavroute::fmt_double(prob) << ','
            << cavroute::fmt_double(prob * gamma * p->trips[i].demand) << "\n";
        }
    }
    {
      auto f = open_out(dir / "mixed_trace.csv");
      f << "outer_iteration,rel_flow_change\n";
      for (std::size_t k = 0; k < eq.outer_trace.size(); ++k)
        f << (k + 1) << ',' << cavroute::fmt_double(eq.outer_trace[k]) << "\n";
    }

    out->outer_iterations = eq.outer_iterations;
    out->converged = eq.converged ? 1 : 0;
    out->cav_avg_time_min = opt_or_nan(eq.metrics.cav_avg_time_min);
    out->noncav_avg_time_min = opt_or_nan(eq.metrics.noncav_avg_time_min);
    out->cav_energy_usd = opt_or_nan(eq.metrics.cav_energy_usd);
    out->noncav_energy_usd = opt_or_nan(eq.metrics.noncav_energy_usd);
    return eq.converged ? CR_OK : CR_ERR_NOT_CONVERGED;
  });
}

cr_status cr_run_sweep(const cr_problem* p, const cr_params* params,
                       cr_objective objective, const double* gammas,
                       size_t n_gammas, const char* out_dir,
                       cr_sweep_summary* out) {
  if (!p || !params || !out_dir || !out)
    return bad_argument("cr_run_sweep: null argument");
  if (!gammas && n_gammas > 0)
    return bad_argument("cr_run_sweep: null gamma array with nonzero count");
  return guarded([&] {
    const cavroute::Parameters& pr = params->p;
    auto dir = prepare_out_dir(out_dir);

    cavroute::SweepSpec spec;
    spec.objective = to_objective(objective);
    spec.gamma_values = n_gammas > 0
                            ? std::vector<double>(gammas, gammas + n_gammas)
                            : cavroute::SweepSpec::default_grid();

    cavroute::RouteSet rs =
        cavroute::enumerate_routes(p->net, p->trips, pr.routes_per_od);
    cavroute::SweepResult result =
        cavroute::run_sweep(spec, p->net, rs, p->trips, pr);

    std::string tag = cavroute::to_string(spec.objective);
    cavroute::emit_csv(result, (dir / ("sweep_" + tag + ".csv")).string());
    cavroute::emit_plot(result, cavroute::PlotKind::SavingsVsGamma,
                        (dir / ("savings_" + tag + ".svg")).string());
    cavroute::emit_plot(result, cavroute::PlotKind::PerClassTimeVsGamma,
                        (dir / ("times_" + tag + ".svg")).string());
    cavroute::emit_plot(result, cavroute::PlotKind::PerClassEnergyVsGamma,
                        (dir / ("energy_" + tag + ".svg")).string());
    cavroute::emit_plot(result, cavroute::PlotKind::ConvergenceTrace,
                        (dir / ("trace_" + tag + ".svg")).string());

    out->points = int(result.rows.size());
    out->all_converged = result.all_converged() ? 1 : 0;
    out->poa_pct = std::nan("");
    if (result.row_at(0.0) && result.row_at(1.0))
      out->poa_pct = cavroute::price_of_anarchy(result);
    return result.all_converged() ? CR_OK : CR_ERR_NOT_CONVERGED;
  });
}

cr_status cr_check_run(const cr_params* params, uint64_t seed, cr_check** out) {
  if (!params || !out) return bad_argument("cr_check_run: null argument");
  return guarded([&] {
    auto c = std::make_unique<cr_check>();
    c->results = cavroute::run_self_checks(params->p, seed);
    *out = c.release();
    return CR_OK;
  });
}

void cr_check_free(cr_check* c) { delete c; }

size_t cr_check_count(const cr_check* c) { return c ? c->results.size() : 0; }

const char* cr_check_name(const cr_check* c, size_t i) {
  if (!c || i >= c->results.size()) return "";
  return c->results[i].name.c_str();
}

int cr_check_passed(const cr_check* c, size_t i) {
  if (!c || i >= c->results.size()) return 0;
  return c->results[i].passed ? 1 : 0;
}

const char* cr_check_detail(const cr_check* c, size_t i) {
  if (!c || i >= c->results.size()) return "";
  return c->results[i].detail.c_str();
}

}  // extern "C"
