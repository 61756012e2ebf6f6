#pragma once

#include <string>
#include <vector>

#include "cavroute/stackelberg.hpp"

namespace cavroute {

struct SweepSpec {
  std::vector<double> gamma_values;  // sorted, unique, within [0,1]
  Objective objective = Objective::Time;

  /// 0.0 to 1.0 in steps of 0.05 (21 points).
  static std::vector<double> default_grid();
  void validate() const;  // throws InputError
};

struct SweepRow {
  double gamma = 0.0;
  ClassMetrics metrics;
  double cav_time_savings_pct = 0.0;
  double noncav_time_savings_pct = 0.0;
  double cav_energy_savings_pct = 0.0;
  double noncav_energy_savings_pct = 0.0;
  bool converged = false;
  int outer_iterations = 0;
  std::vector<double> outer_trace;
};

struct SweepResult {
  Objective objective = Objective::Time;
  std::vector<SweepRow> rows;  // ordered by gamma
  double baseline_time_min = 0.0;   // γ=0 per-vehicle time
  double baseline_energy_usd = 0.0; // γ=0 per-vehicle energy cost

  const SweepRow* row_at(double gamma) const;  // nullptr when absent
  bool all_converged() const;
};

/// One solve_mixed per γ, dispatched across hardware threads; rows land in
/// γ order regardless of completion order. Savings are relative to the γ=0
/// baseline metric; a missing metric leaves the savings at NaN except at
/// γ=0 where both classes' savings are 0 by definition. Non-convergence is
/// recorded per row and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, const Network& net,
                      const RouteSet& rs, const std::vector<ODPair>& ods,
                      const Parameters& params);

/// Savings at γ=1 for the sweep's objective metric (time → time savings).
/// Throws InputError unless the sweep contains γ=0 and γ=1.
double price_of_anarchy(const SweepResult& sweep);

/// Fixed header:
/// gamma,cav_avg_time_min,noncav_avg_time_min,cav_energy_usd,noncav_energy_usd,
/// cav_time_savings_pct,noncav_time_savings_pct,cav_energy_savings_pct,
/// noncav_energy_savings_pct,converged,outer_iterations
/// Numbers are shortest-round-trip decimal; absent metrics print as nan.
void emit_csv(const SweepResult& result, const std::string& path);

/// Parses a file written by emit_csv back into rows (for round-trip checks).
std::vector<SweepRow> parse_csv(const std::string& path);

enum class PlotKind {
  PerClassTimeVsGamma,
  PerClassEnergyVsGamma,
  SavingsVsGamma,
  ConvergenceTrace,
};

PlotKind plot_kind_from_string(const std::string& s);  // throws InputError

/// Self-contained SVG with labeled axes. Throws InputError on an empty sweep.
void emit_plot(const SweepResult& result, PlotKind kind, const std::string& path);

}  // namespace cavroute
