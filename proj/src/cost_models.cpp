#include "cavroute/cost_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavroute {

double Poly::value(double x) const {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double Poly::derivative(double x) const {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * x + double(k) * c[k];
  return v;
}

double Poly::antiderivative(double x) const {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k] / double(k + 1);
  return v * x;
}

Poly Poly::marginal() const {
  Poly m;
  m.c.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) m.c[k] = double(k + 1) * c[k];
  return m;
}

LinkCostModel::LinkCostModel(const Network& net, const BprParams& bpr) {
  time_.reserve(net.num_links());
  marginal_.reserve(net.num_links());
  for (const Link& link : net.links) {
    Poly p;
    if (link.has_custom_cost()) {
      p.c = link.custom_time_poly;
    } else {
      p.c.resize(bpr.beta.size());
      double scale = link.free_flow_min;
      for (std::size_t i = 0; i < bpr.beta.size(); ++i) {
        p.c[i] = scale * bpr.beta[i];
        scale /= link.capacity;
      }
    }
    while (p.c.size() > 1 && p.c.back() == 0.0) p.c.pop_back();
    marginal_.push_back(p.marginal());
    time_.push_back(std::move(p));
  }
}

LinkCostModel LinkCostModel::with_marginal_costs() const {
  LinkCostModel m(*this);
  m.time_ = marginal_;
  for (std::size_t a = 0; a < m.time_.size(); ++a)
    m.marginal_[a] = m.time_[a].marginal();
  return m;
}

std::vector<double> LinkCostModel::times(const FlowVector& flow) const {
  std::vector<double> t(time_.size());
  for (std::size_t a = 0; a < time_.size(); ++a) t[a] = time_[a].value(flow[a]);
  return t;
}

std::vector<double> LinkCostModel::marginal_times(const FlowVector& flow) const {
  std::vector<double> t(marginal_.size());
  for (std::size_t a = 0; a < marginal_.size(); ++a)
    t[a] = marginal_[a].value(flow[a]);
  return t;
}

double LinkCostModel::beckmann(const FlowVector& flow) const {
  double phi = 0.0;
  for (std::size_t a = 0; a < time_.size(); ++a)
    phi += time_[a].antiderivative(flow[a]);
  return phi;
}

double LinkCostModel::total_time(const FlowVector& flow) const {
  double tt = 0.0;
  for (std::size_t a = 0; a < time_.size(); ++a)
    tt += time_[a].value(flow[a]) * flow[a];
  return tt;
}

double cv_fuel_rate(const CvEnergyParams& p, double speed_mph, double grade_pct) {
  double ln_e = p.theta_grade * grade_pct;
  double vk = 1.0;
  for (double th : p.theta) {
    ln_e += th * vk;
    vk *= speed_mph;
  }
  return std::exp(ln_e);
}

double cv_fuel_rate_dv(const CvEnergyParams& p, double speed_mph, double grade_pct) {
  double dln = 0.0;
  double vk = 1.0;
  for (std::size_t i = 1; i < p.theta.size(); ++i) {
    dln += double(i) * p.theta[i] * vk;
    vk *= speed_mph;
  }
  return cv_fuel_rate(p, speed_mph, grade_pct) * dln;
}

double link_speed_mph(const CvEnergyParams& p, double length_mi, double time_min) {
  if (length_mi <= 0.0) return 0.0;
  if (time_min <= 0.0) return p.max_speed_mph;
  return std::min(length_mi / (time_min / 60.0), p.max_speed_mph);
}

double cv_energy_total(const CvEnergyParams& p, const Network& net,
                       const LinkCostModel& cost, const FlowVector& total_flow,
                       const FlowVector& charged_flow) {
  double grams = 0.0;
  for (std::size_t a = 0; a < net.num_links(); ++a) {
    const Link& link = net.links[a];
    if (link.length_mi <= 0.0) continue;
    double t = cost.time(int(a), total_flow[a]);
    double v = link_speed_mph(p, link.length_mi, t);
    grams += cv_fuel_rate(p, v, link.grade_pct) * link.length_mi * charged_flow[a];
  }
  return grams;
}

double CdCsRow::by_cycle(int cycle) const {
  switch (cycle) {
    case 0: return nyc;
    case 1: return udds;
    default: return hwfet;
  }
}

LinkEnergyOption phev_link_option(const CdCsTable& t, const DriveCycleBands& bands,
                                  double gas_price_per_gal, double length_mi,
                                  double speed_mph) {
  LinkEnergyOption opt;
  if (length_mi <= 0.0) return opt;
  int cycle = bands.cycle_for_speed(speed_mph);
  opt.cd_kwh = length_mi / t.phev_cd.by_cycle(cycle);
  opt.cd_cost = opt.cd_kwh * t.electricity_price_per_kwh;
  opt.cs_cost = length_mi / t.phev_cs.by_cycle(cycle) * gas_price_per_gal;
  return opt;
}

CdCsSplit solve_cd_cs_split(const CdCsTable& t, const DriveCycleBands& bands,
                            double gas_price_per_gal,
                            const std::vector<double>& lengths_mi,
                            const std::vector<double>& speeds_mph) {
  std::size_t n = lengths_mi.size();
  std::vector<LinkEnergyOption> opts(n);
  CdCsSplit split;
  split.cd_fraction.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    opts[a] = phev_link_option(t, bands, gas_price_per_gal, lengths_mi[a],
                               speeds_mph[a]);
    split.cost += opts[a].cs_cost;
  }

  std::vector<std::size_t> order;
  for (std::size_t a = 0; a < n; ++a)
    if (opts[a].cs_cost > opts[a].cd_cost) order.push_back(a);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    double si = opts[i].cs_cost - opts[i].cd_cost;
    double sj = opts[j].cs_cost - opts[j].cd_cost;
    double ri = opts[i].cd_kwh > 0.0 ? si / opts[i].cd_kwh
                                     : std::numeric_limits<double>::infinity();
    double rj = opts[j].cd_kwh > 0.0 ? sj / opts[j].cd_kwh
                                     : std::numeric_limits<double>::infinity();
    if (ri != rj) return ri > rj;
    return i < j;
  });

  double budget = std::max(t.battery_kwh, 0.0);
  for (std::size_t a : order) {
    double saving = opts[a].cs_cost - opts[a].cd_cost;
    double y;
    if (opts[a].cd_kwh <= 0.0) {
      y = 1.0;
    } else if (opts[a].cd_kwh <= budget) {
      y = 1.0;
      budget -= opts[a].cd_kwh;
    } else {
      y = budget / opts[a].cd_kwh;
      budget = 0.0;
    }
    if (y <= 0.0) break;
    split.cd_fraction[a] = y;
    split.kwh_used += y * opts[a].cd_kwh;
    split.cost -= y * saving;
  }
  return split;
}

}  // namespace cavroute
