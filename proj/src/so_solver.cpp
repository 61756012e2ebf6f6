#include "cavroute/so_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cavroute/ue_solver.hpp"

namespace cavroute {
namespace {

struct BandBlend {
  double w[3];   // NYC, UDDS, HWFET weights, summing to 1
  double dw[3];  // d/dv of each weight
};

BandBlend blend_bands(const DriveCycleBands& bands, double width, double v) {
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  double s1 = sig((v - bands.udds_lo) / width);
  double s2 = sig((v - bands.hwfet_lo) / width);
  double d1 = s1 * (1.0 - s1) / width;
  double d2 = s2 * (1.0 - s2) / width;
  return {{1.0 - s1, s1 - s2, s2}, {-d1, d1 - d2, d2}};
}

double blended_inv_mu(const CdCsRow& row, const double w[3]) {
  return w[0] / row.nyc + w[1] / row.udds + w[2] / row.hwfet;
}

/// Per-link quantities shared by every objective and gradient evaluation.
struct LinkState {
  FlowVector x_c;
  FlowVector x;
  std::vector<double> time;
  std::vector<double> speed;
  std::vector<double> dspeed_dx;  // 0 where the speed cap binds or l = 0
};

LinkState link_state(const RouteProbabilityMatrix& P, const SoProblem& prob,
                     const LinkCostModel& cost) {
  const Network& net = *prob.net;
  const CvEnergyParams& cv = prob.params->cv;
  LinkState st;
  st.x_c = route_flows_to_link_flows(P, *prob.g_c, *prob.rs, net);
  st.x = prob.x_nc + st.x_c;
  st.time = cost.times(st.x);
  st.speed.resize(net.num_links());
  st.dspeed_dx.assign(net.num_links(), 0.0);
  for (std::size_t a = 0; a < net.num_links(); ++a) {
    double l = net.links[a].length_mi;
    st.speed[a] = link_speed_mph(cv, l, st.time[a]);
    if (l > 0.0 && st.time[a] > 0.0 && st.speed[a] < cv.max_speed_mph) {
      double tp = cost.time_poly(int(a)).derivative(st.x[a]);
      st.dspeed_dx[a] = -60.0 * l * tp / (st.time[a] * st.time[a]);
    }
  }
  return st;
}

/// Exact PHEV evaluation: one CD/CS knapsack per route at current speeds.
struct PhevEval {
  double J = 0.0;
  std::vector<std::vector<double>> Y;  // per global route, CD fraction per link
  std::vector<double> route_cost;      // $ per vehicle, exact piecewise table
};

PhevEval phev_eval(const RouteProbabilityMatrix& P, const SoProblem& prob,
                   const LinkState& st) {
  const Network& net = *prob.net;
  const Parameters& pr = *prob.params;
  PhevEval ev;
  ev.Y.reserve(prob.rs->total_routes());
  ev.route_cost.reserve(prob.rs->total_routes());
  for (std::size_t i = 0; i < prob.rs->per_od.size(); ++i)
    for (std::size_t r = 0; r < prob.rs->per_od[i].size(); ++r) {
      const Route& route = prob.rs->per_od[i][r];
      std::vector<double> lengths, speeds;
      lengths.reserve(route.links.size());
      speeds.reserve(route.links.size());
      for (int a : route.links) {
        lengths.push_back(net.links[a].length_mi);
        speeds.push_back(st.speed[a]);
      }
      CdCsSplit split = solve_cd_cs_split(
          pr.cdcs, pr.bands, pr.cv.gas_price_per_gal, lengths, speeds);
      ev.J += (*prob.g_c)[i].demand * P.rows[i][r] * split.cost;
      ev.route_cost.push_back(split.cost);
      ev.Y.push_back(std::move(split.cd_fraction));
    }
  return ev;
}

/// Per-link marginals m_a for the separable objectives, so that
/// ∂J/∂p_ir = g_i Σ_{a∈r} m_a.
std::vector<double> link_marginals(const SoProblem& prob,
                                   const LinkCostModel& cost,
                                   const LinkState& st) {
  const Network& net = *prob.net;
  std::vector<double> m(net.num_links(), 0.0);
  if (prob.objective == Objective::Time) {
    for (std::size_t a = 0; a < net.num_links(); ++a)
      m[a] = st.time[a] + st.x_c[a] * cost.time_poly(int(a)).derivative(st.x[a]);
    return m;
  }
  const CvEnergyParams& cv = prob.params->cv;
  double kappa = cv.dollars_per_gram();
  for (std::size_t a = 0; a < net.num_links(); ++a) {
    const Link& link = net.links[a];
    if (link.length_mi <= 0.0) continue;
    double e = cv_fuel_rate(cv, st.speed[a], link.grade_pct);
    double de = cv_fuel_rate_dv(cv, st.speed[a], link.grade_pct);
    m[a] = kappa * link.length_mi *
           (e + st.x_c[a] * de * st.dspeed_dx[a]);
  }
  return m;
}

/// Smoothed per-link terms of the PHEV gradient at fixed CD fractions Y:
/// blended unit costs and the speed-coupling drift shared by all routes.
struct PhevTerms {
  std::vector<double> c_cd;   // $/vehicle on the link when driven CD
  std::vector<double> c_cs;   // $/vehicle on the link when driven CS
  std::vector<double> drift;  // Σ over traffic of d(cost)/dx on the link
};

PhevTerms phev_terms(const RouteProbabilityMatrix& P, const SoProblem& prob,
                     const LinkState& st,
                     const std::vector<std::vector<double>>& Y) {
  const Network& net = *prob.net;
  const Parameters& pr = *prob.params;

  // Electric (CD) share of the CAV flow on each link.
  std::vector<double> elec(net.num_links(), 0.0);
  std::size_t q = 0;
  for (std::size_t i = 0; i < prob.rs->per_od.size(); ++i)
    for (std::size_t r = 0; r < prob.rs->per_od[i].size(); ++r, ++q) {
      double f = (*prob.g_c)[i].demand * P.rows[i][r];
      const Route& route = prob.rs->per_od[i][r];
      for (std::size_t j = 0; j < route.links.size(); ++j)
        elec[route.links[j]] += f * Y[q][j];
    }

  PhevTerms terms;
  terms.c_cd.assign(net.num_links(), 0.0);
  terms.c_cs.assign(net.num_links(), 0.0);
  terms.drift.assign(net.num_links(), 0.0);
  for (std::size_t a = 0; a < net.num_links(); ++a) {
    double l = net.links[a].length_mi;
    if (l <= 0.0) continue;
    BandBlend b = blend_bands(pr.bands, prob.params->so.smoothing_mph,
                              st.speed[a]);
    double rho_cd = blended_inv_mu(pr.cdcs.phev_cd, b.w);
    double rho_cs = blended_inv_mu(pr.cdcs.phev_cs, b.w);
    double drho_cd = blended_inv_mu(pr.cdcs.phev_cd, b.dw);
    double drho_cs = blended_inv_mu(pr.cdcs.phev_cs, b.dw);
    terms.c_cd[a] = pr.cdcs.electricity_price_per_kwh * l * rho_cd;
    terms.c_cs[a] = pr.cv.gas_price_per_gal * l * rho_cs;
    double dc_cd = pr.cdcs.electricity_price_per_kwh * l * drho_cd;
    double dc_cs = pr.cv.gas_price_per_gal * l * drho_cs;
    terms.drift[a] = (dc_cd * elec[a] + dc_cs * (st.x_c[a] - elec[a])) *
                     st.dspeed_dx[a];
  }
  return terms;
}

std::vector<std::vector<double>> gradient_at(const RouteProbabilityMatrix& P,
                                             const SoProblem& prob,
                                             const LinkCostModel& cost,
                                             const LinkState& st) {
  std::vector<std::vector<double>> grad(P.rows.size());
  for (std::size_t i = 0; i < P.rows.size(); ++i)
    grad[i].assign(P.rows[i].size(), 0.0);

  if (prob.objective == Objective::EnergyPhev) {
    PhevEval ev = phev_eval(P, prob, st);
    PhevTerms terms = phev_terms(P, prob, st, ev.Y);
    std::size_t q = 0;
    for (std::size_t i = 0; i < P.rows.size(); ++i)
      for (std::size_t r = 0; r < P.rows[i].size(); ++r, ++q) {
        const Route& route = prob.rs->per_od[i][r];
        double s = 0.0;
        for (std::size_t j = 0; j < route.links.size(); ++j) {
          int a = route.links[j];
          double y = ev.Y[q][j];
          s += y * terms.c_cd[a] + (1.0 - y) * terms.c_cs[a] + terms.drift[a];
        }
        grad[i][r] = (*prob.g_c)[i].demand * s;
      }
    return grad;
  }

  std::vector<double> m = link_marginals(prob, cost, st);
  for (std::size_t i = 0; i < P.rows.size(); ++i)
    for (std::size_t r = 0; r < P.rows[i].size(); ++r) {
      double s = 0.0;
      for (int a : prob.rs->per_od[i][r].links) s += m[a];
      grad[i][r] = (*prob.g_c)[i].demand * s;
    }
  return grad;
}

void check_shapes(const RouteProbabilityMatrix& P, const SoProblem& prob) {
  if (!prob.net || !prob.rs || !prob.g_c || !prob.params)
    throw InputError("system-optimum problem is missing inputs");
  if (P.rows.size() != prob.rs->per_od.size() ||
      prob.g_c->size() != prob.rs->per_od.size())
    throw InputError("probability matrix, route set and demand disagree");
  if (prob.x_nc.size() != prob.net->num_links())
    throw InputError("background flow length does not match the network");
  for (std::size_t i = 0; i < P.rows.size(); ++i)
    if (P.rows[i].size() != prob.rs->per_od[i].size())
      throw InputError("probability row does not match its route count");
}

}  // namespace

double so_objective(const RouteProbabilityMatrix& P, const SoProblem& prob,
                    const LinkCostModel& cost) {
  check_shapes(P, prob);
  LinkState st = link_state(P, prob, cost);
  switch (prob.objective) {
    case Objective::Time: {
      double J = 0.0;
      for (std::size_t a = 0; a < st.x.size(); ++a) J += st.time[a] * st.x_c[a];
      return J;
    }
    case Objective::EnergyCv: {
      const CvEnergyParams& cv = prob.params->cv;
      return cv.dollars_per_gram() *
             cv_energy_total(cv, *prob.net, cost, st.x, st.x_c);
    }
    default:
      return phev_eval(P, prob, st).J;
  }
}

std::vector<std::vector<double>> so_gradient(const RouteProbabilityMatrix& P,
                                             const SoProblem& prob,
                                             const LinkCostModel& cost) {
  check_shapes(P, prob);
  LinkState st = link_state(P, prob, cost);
  return gradient_at(P, prob, cost, st);
}

std::vector<double> project_simplex(const std::vector<double>& v) {
  if (v.empty()) throw InputError("cannot project an empty vector");
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    css += u[j];
    double t = (css - 1.0) / double(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i] - tau, 0.0);
  return w;
}

namespace {

RouteProbabilityMatrix project_rows(std::vector<std::vector<double>> rows) {
  RouteProbabilityMatrix P;
  P.rows.reserve(rows.size());
  for (auto& row : rows) P.rows.push_back(project_simplex(row));
  return P;
}

double max_abs(const std::vector<std::vector<double>>& m) {
  double v = 0.0;
  for (const auto& row : m)
    for (double x : row) v = std::max(v, std::abs(x));
  return v;
}

double max_abs_diff(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      v = std::max(v, std::abs(a[i][j] - b[i][j]));
  return v;
}

/// Support-based residual: spread of partials over used routes plus any
/// unused route undercutting them, relative to the gradient scale.
double kkt_residual(const RouteProbabilityMatrix& P,
                    const std::vector<std::vector<double>>& grad) {
  double worst = 0.0;
  double scale = std::max(1.0, max_abs(grad));
  for (std::size_t i = 0; i < P.rows.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = 0; r < P.rows[i].size(); ++r)
      if (P.rows[i][r] > 1e-6) {
        lo = std::min(lo, grad[i][r]);
        hi = std::max(hi, grad[i][r]);
      }
    if (!(hi >= lo)) continue;
    worst = std::max(worst, hi - lo);
    for (std::size_t r = 0; r < P.rows[i].size(); ++r)
      if (P.rows[i][r] <= 1e-6)
        worst = std::max(worst, 0.5 * (lo + hi) - grad[i][r]);
  }
  return worst / scale;
}

struct PgdRun {
  RouteProbabilityMatrix P;
  double J = 0.0;
  double kkt = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;
};

PgdRun run_pgd(const SoProblem& prob, const LinkCostModel& cost,
               const SoConfig& cfg, RouteProbabilityMatrix P) {
  bool phev = prob.objective == Objective::EnergyPhev;

  auto evaluate = [&](const RouteProbabilityMatrix& Q) {
    LinkState st = link_state(Q, prob, cost);
    if (!phev) {
      if (prob.objective == Objective::Time) {
        double J = 0.0;
        for (std::size_t a = 0; a < st.x.size(); ++a)
          J += st.time[a] * st.x_c[a];
        return std::make_pair(J, std::move(st));
      }
      const CvEnergyParams& cv = prob.params->cv;
      double J = cv.dollars_per_gram() *
                 cv_energy_total(cv, *prob.net, cost, st.x, st.x_c);
      return std::make_pair(J, std::move(st));
    }
    return std::make_pair(phev_eval(Q, prob, st).J, std::move(st));
  };

  PgdRun run;
  run.P = std::move(P);
  auto [J0, st] = evaluate(run.P);
  run.J = J0;
  run.trace.push_back(run.J);

  std::vector<std::vector<double>> prev_Y;
  if (phev) prev_Y = phev_eval(run.P, prob, st).Y;
  double prev_dP = std::numeric_limits<double>::infinity();
  int stable = 0;
  double step = 0.0;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    run.iterations = it;
    auto grad = gradient_at(run.P, prob, cost, st);
    run.kkt = kkt_residual(run.P, grad);

    double scale = std::max(1.0, max_abs(grad));
    std::vector<std::vector<double>> shifted = run.P.rows;
    for (std::size_t i = 0; i < shifted.size(); ++i)
      for (std::size_t r = 0; r < shifted[i].size(); ++r)
        shifted[i][r] -= grad[i][r] / scale;
    double pg = max_abs_diff(project_rows(shifted).rows, run.P.rows);
    if (pg <= cfg.grad_tol) {
      run.converged = true;
      break;
    }

    if (step <= 0.0) step = cfg.step_init / scale;
    double alpha = step * 2.0;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      std::vector<std::vector<double>> cand = run.P.rows;
      for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t r = 0; r < cand[i].size(); ++r)
          cand[i][r] -= alpha * grad[i][r];
      RouteProbabilityMatrix Pn = project_rows(std::move(cand));
      double expected = 0.0;
      for (std::size_t i = 0; i < Pn.rows.size(); ++i)
        for (std::size_t r = 0; r < Pn.rows[i].size(); ++r)
          expected += grad[i][r] * (run.P.rows[i][r] - Pn.rows[i][r]);
      auto [Jn, stn] = evaluate(Pn);
      if (Jn <= run.J - cfg.armijo_c * expected && Jn < run.J) {
        prev_dP = max_abs_diff(Pn.rows, run.P.rows);
        run.P = std::move(Pn);
        run.J = Jn;
        st = std::move(stn);
        step = alpha;
        accepted = true;
        break;
      }
      alpha *= cfg.armijo_shrink;
    }
    run.trace.push_back(run.J);

    if (phev) {
      auto Y = phev_eval(run.P, prob, st).Y;
      double dY = 0.0;
      for (std::size_t q = 0; q < Y.size(); ++q)
        for (std::size_t j = 0; j < Y[q].size(); ++j)
          dY = std::max(dY, std::abs(Y[q][j] - prev_Y[q][j]));
      prev_Y = std::move(Y);
      stable = (prev_dP < 1e-7 && dY < 1e-6) ? stable + 1 : 0;
      if (stable >= 5) {
        run.converged = true;
        break;
      }
    }

    if (!accepted) {
      // No descent step exists at the backtracking floor: accept the point
      // as stationary only if the first-order residual is already small.
      run.converged = run.kkt <= 1e-5;
      break;
    }
  }

  auto grad = gradient_at(run.P, prob, cost, st);
  run.kkt = kkt_residual(run.P, grad);
  return run;
}

RouteProbabilityMatrix random_start(const RouteSet& rs, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  RouteProbabilityMatrix P;
  P.rows.reserve(rs.per_od.size());
  for (const auto& routes : rs.per_od) {
    std::vector<double> row(routes.size());
    double sum = 0.0;
    for (double& p : row) {
      p = exp1(rng);
      sum += p;
    }
    for (double& p : row) p /= sum;
    P.rows.push_back(std::move(row));
  }
  return P;
}

}  // namespace

SoResult solve_so(const SoProblem& prob, const LinkCostModel& cost,
                  const SoConfig& cfg, std::uint64_t seed) {
  RouteProbabilityMatrix uniform = RouteProbabilityMatrix::uniform(*prob.rs);
  check_shapes(uniform, prob);

  int starts = prob.objective == Objective::EnergyPhev
                   ? cfg.multistarts_energy_phev
                   : 1;
  std::mt19937_64 rng(seed);
  PgdRun best;
  bool have = false;
  for (int s = 0; s < starts; ++s) {
    RouteProbabilityMatrix P0 = s == 0 ? uniform : random_start(*prob.rs, rng);
    PgdRun run = run_pgd(prob, cost, cfg, std::move(P0));
    if (!have || run.J < best.J) {
      best = std::move(run);
      have = true;
    }
  }

  SoResult res;
  res.P_c = best.P;
  res.x_c = route_flows_to_link_flows(best.P, *prob.g_c, *prob.rs, *prob.net);
  res.objective_value = best.J;
  res.kkt_residual = best.kkt;
  res.converged = best.converged;
  res.iterations = best.iterations;
  res.trace = std::move(best.trace);
  if (prob.objective == Objective::EnergyPhev) {
    res.local_optimum = true;
    LinkState st = link_state(best.P, prob, cost);
    res.Y = phev_eval(best.P, prob, st).Y;
  }
  return res;
}

FlowVector system_optimum_oracle(const Network& net,
                                 const std::vector<ODPair>& ods,
                                 const Parameters& params) {
  LinkCostModel cost(net, params.bpr);
  LinkCostModel marginal = cost.with_marginal_costs();
  FlowVector zero(net.num_links(), 0.0);
  UeResult ue = solve_ue_msa(net, ods, zero, marginal, params.ue);
  return ue.x_nc;
}

}  // namespace cavroute
