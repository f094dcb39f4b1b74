#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dvpp/lti/time_series.hpp"
#include "dvpp/scenario/scenario.hpp"

namespace dvpp::scenario {

/// One verification line; `enforced` checks decide pass/fail, the others are reported only.
struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool enforced = true;
  bool pass = true;
  std::string note;
};

struct DeviceLimit {
  std::string device;
  double p_capacity = 0.0;
  double peak_p = 0.0;
  /// samples with |Δp| above p_capacity
  std::size_t violations = 0;
};

struct MetricsReport {
  double nadir = 0.0;
  double rocof = 0.0;
  double steady_state = 0.0;
  double dp_load = 0.0;
  /// divided by |dp_load|; 0 when dp_load is 0
  double nadir_normalized = 0.0;
  double rocof_normalized = 0.0;
  /// peak |value| of every p./q. channel
  std::vector<std::pair<std::string, double>> peaks;
  std::vector<DeviceLimit> limits;
  /// relative L∞ gap to the coherent reference, outside the sync windows
  std::optional<double> trace_error;
  std::vector<Check> checks;

  bool pass() const;
  /// `name,value` rows
  void write(std::ostream& os) const;
  /// `check,value,tol,status,note` rows
  void write_checks(std::ostream& os) const;
};

/// nadir = max |Δf_coi|; RoCoF = max |f[k] - f[k-w]| / (w dt) with w = round(window/dt)
/// (w = 1 when window <= dt). Throws MissingChannel without `f_coi`.
MetricsReport compute_metrics(const lti::TimeSeries& series, double dp_load, double window = 0.1);

struct RunOptions {
  std::optional<double> dt;
  std::optional<double> t_end;
};

struct RunResult {
  /// selected output channels
  lti::TimeSeries series;
  /// total injected disturbance (rotational for area models)
  std::vector<double> disturbance;
  /// coherent reference driven by `disturbance`
  std::vector<double> reference;
  MetricsReport metrics;
};

/// Piecewise simulation: inputs are constant between events and switch at the
/// event sample; capacity events and outages rebuild the model and carry the
/// state over by label.
RunResult run(const Scenario& sc, const RunOptions& opt = {});

/// Same as run() on an area scenario with the plant's line ratios replaced.
RunResult run_plant(const Scenario& sc, const std::vector<double>& line_ratios, const RunOptions& opt = {});

/// Condition residuals on a log grid.
MetricsReport verify(const Scenario& sc, int points = 200, double wmin = 1e-2, double wmax = 1e3);

struct BodeTable {
  std::vector<double> w;
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  void write_csv(std::ostream& os) const;
};

/// Columns: |T_des|, ∠T_des (deg), |T_agg|, ∠T_agg for the frequency channel,
/// then |m| of every device factor.
BodeTable bode(const Scenario& sc, double wmin, double wmax, int points);

struct MonteCarloSample {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<double> ratios;
  bool stable = false;
  /// max over POCs and time of |Δf_poc - baseline|
  double max_deviation = 0.0;
  /// max over POCs and time of |Δf_poc - T_des Σ dp′|
  double spec_residual = 0.0;
  std::vector<std::pair<std::string, double>> peak_p, peak_q;
};

struct MonteCarloResult {
  RunResult baseline;
  std::vector<MonteCarloSample> samples;
  std::vector<std::string> lines;
  double max_deviation = 0.0;
  bool all_stable = true;

  void write_samples_csv(std::ostream& os) const;
  void write_summary_csv(std::ostream& os) const;
};

/// Lines with an explicit R/X are resampled; sample i uses seed + i. Runs in parallel.
MonteCarloResult montecarlo(const Scenario& sc, std::optional<std::size_t> samples = {},
                            std::optional<std::uint64_t> seed = {}, unsigned threads = 0,
                            const RunOptions& opt = {});

}  // namespace dvpp::scenario
