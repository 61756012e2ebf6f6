#include "cavroute/sweep.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "format.hpp"

namespace cavroute {

std::vector<double> SweepSpec::default_grid() {
  std::vector<double> g;
  g.reserve(21);
  for (int i = 0; i <= 20; ++i) g.push_back(double(i) / 20.0);
  return g;
}

void SweepSpec::validate() const {
  if (gamma_values.empty()) throw InputError("sweep has no penetration rates");
  for (std::size_t i = 0; i < gamma_values.size(); ++i) {
    double g = gamma_values[i];
    if (!(g >= 0.0 && g <= 1.0))
      throw InputError("penetration rate out of [0,1]: " + fmt_double(g));
    if (i > 0 && !(g > gamma_values[i - 1]))
      throw InputError("penetration rates must be strictly increasing");
  }
}

const SweepRow* SweepResult::row_at(double gamma) const {
  for (const SweepRow& row : rows)
    if (std::abs(row.gamma - gamma) <= 1e-9) return &row;
  return nullptr;
}

bool SweepResult::all_converged() const {
  for (const SweepRow& row : rows)
    if (!row.converged) return false;
  return !rows.empty();
}

namespace {

double savings_pct(double baseline, const std::optional<double>& metric) {
  if (!metric.has_value()) return std::nan("");
  return (baseline - *metric) / baseline * 100.0;
}

SweepRow solve_point(double gamma, Objective objective, const Network& net,
                     const RouteSet& rs, const std::vector<ODPair>& ods,
                     const Parameters& params) {
  EquilibriumResult eq = solve_mixed(net, rs, ods, gamma, objective, params);
  SweepRow row;
  row.gamma = gamma;
  row.metrics = eq.metrics;
  row.converged = eq.converged;
  row.outer_iterations = eq.outer_iterations;
  row.outer_trace = std::move(eq.outer_trace);
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const Network& net,
                      const RouteSet& rs, const std::vector<ODPair>& ods,
                      const Parameters& params) {
  spec.validate();

  SweepResult result;
  result.objective = spec.objective;
  result.rows.resize(spec.gamma_values.size());

  std::vector<std::future<SweepRow>> jobs;
  jobs.reserve(spec.gamma_values.size());
  for (double gamma : spec.gamma_values)
    jobs.push_back(std::async(std::launch::async, solve_point, gamma,
                              spec.objective, std::cref(net), std::cref(rs),
                              std::cref(ods), std::cref(params)));
  bool need_baseline = spec.gamma_values.front() != 0.0;
  std::future<SweepRow> baseline_job;
  if (need_baseline)
    baseline_job = std::async(std::launch::async, solve_point, 0.0,
                              spec.objective, std::cref(net), std::cref(rs),
                              std::cref(ods), std::cref(params));
  for (std::size_t i = 0; i < jobs.size(); ++i) result.rows[i] = jobs[i].get();

  SweepRow baseline =
      need_baseline ? baseline_job.get() : result.rows.front();
  result.baseline_time_min = baseline.metrics.noncav_avg_time_min.value_or(0.0);
  result.baseline_energy_usd = baseline.metrics.noncav_energy_usd.value_or(0.0);

  for (SweepRow& row : result.rows) {
    if (row.gamma == 0.0) continue;  // savings stay 0 by definition
    row.cav_time_savings_pct =
        savings_pct(result.baseline_time_min, row.metrics.cav_avg_time_min);
    row.noncav_time_savings_pct =
        savings_pct(result.baseline_time_min, row.metrics.noncav_avg_time_min);
    row.cav_energy_savings_pct =
        savings_pct(result.baseline_energy_usd, row.metrics.cav_energy_usd);
    row.noncav_energy_savings_pct =
        savings_pct(result.baseline_energy_usd, row.metrics.noncav_energy_usd);
  }
  return result;
}

double price_of_anarchy(const SweepResult& sweep) {
  const SweepRow* lo = sweep.row_at(0.0);
  const SweepRow* hi = sweep.row_at(1.0);
  if (!lo || !hi)
    throw InputError("price of anarchy needs both gamma=0 and gamma=1 rows");
  return sweep.objective == Objective::Time ? hi->cav_time_savings_pct
                                            : hi->cav_energy_savings_pct;
}

static const char kCsvHeader[] =
    "gamma,cav_avg_time_min,noncav_avg_time_min,cav_energy_usd,"
    "noncav_energy_usd,cav_time_savings_pct,noncav_time_savings_pct,"
    "cav_energy_savings_pct,noncav_energy_savings_pct,converged,"
    "outer_iterations";

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  auto opt = [](const std::optional<double>& v) {
    return fmt_double(v.value_or(std::nan("")));
  };
  out << kCsvHeader << "\n";
  for (const SweepRow& row : result.rows) {
    out << fmt_double(row.gamma) << ',' << opt(row.metrics.cav_avg_time_min)
        << ',' << opt(row.metrics.noncav_avg_time_min) << ','
        << opt(row.metrics.cav_energy_usd) << ','
        << opt(row.metrics.noncav_energy_usd) << ','
        << fmt_double(row.cav_time_savings_pct) << ','
        << fmt_double(row.noncav_time_savings_pct) << ','
        << fmt_double(row.cav_energy_savings_pct) << ','
        << fmt_double(row.noncav_energy_savings_pct) << ','
        << (row.converged ? 1 : 0) << ',' << row.outer_iterations << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<SweepRow> parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw InputError(path + ": unexpected CSV header");

  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 11)
      throw InputError(path + " line " + std::to_string(lineno) +
                       ": expected 11 fields");
    auto num = [&](const std::string& s) { return std::stod(s); };
    auto opt = [&](const std::string& s) -> std::optional<double> {
      double v = std::stod(s);
      if (std::isnan(v)) return std::nullopt;
      return v;
    };
    SweepRow row;
    row.gamma = num(f[0]);
    row.metrics.cav_avg_time_min = opt(f[1]);
    row.metrics.noncav_avg_time_min = opt(f[2]);
    row.metrics.cav_energy_usd = opt(f[3]);
    row.metrics.noncav_energy_usd = opt(f[4]);
    row.cav_time_savings_pct = num(f[5]);
    row.noncav_time_savings_pct = num(f[6]);
    row.cav_energy_savings_pct = num(f[7]);
    row.noncav_energy_savings_pct = num(f[8]);
    row.converged = num(f[9]) != 0.0;
    row.outer_iterations = int(num(f[10]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cavroute
