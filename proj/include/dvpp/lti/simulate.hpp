#pragma once

#include <span>
#include <vector>

#include "dvpp/lti/state_space.hpp"
#include "dvpp/lti/time_series.hpp"

namespace dvpp::lti {

inline constexpr double kDefaultDt = 1e-3;

/// Trapezoidal (Tustin) discretization of a continuous model:
///   x[k+1] = Ad x[k] + Bd (u[k] + u[k+1]),   y[k] = C x[k] + D u[k]
/// with Ad = (I - hA/2)^-1 (I + hA/2) and Bd = (I - hA/2)^-1 B h/2.
class TustinStepper {
 public:
  TustinStepper(StateSpaceModel model, double dt);

  const StateSpaceModel& model() const { return model_; }
  double dt() const { return dt_; }

  std::span<const double> state() const { return x_; }
  void set_state(std::span<const double> x);
  /// Copies states whose labels also exist in `other`; the rest start at zero.
  void import_state(const TustinStepper& other);

  void advance(std::span<const double> u_now, std::span<const double> u_next);
  void output(std::span<const double> u, std::span<double> y) const;

 private:
  StateSpaceModel model_;
  double dt_;
  std::size_t n_, m_, p_;
  std::vector<double> ad_, bd_, c_, d_;
  std::vector<double> x_, xn_, usum_;
};

/// Zero-initial-state response. Inputs are taken from channels named after the
/// model inputs (absent channels read as zero); when no name matches and the
/// channel count equals the input count, channels are used positionally.
TimeSeries simulate(const StateSpaceModel& model, const TimeSeries& input, double dt);

/// Piecewise-constant scalar schedule: value(t) = values[i] for the last
/// breakpoint times[i] <= t, and values[0] before the first breakpoint.
struct Schedule {
  std::vector<double> times;
  std::vector<double> values;

  static Schedule constant(double v) { return {{0.0}, {v}}; }
  double operator()(double t) const;
  void validate() const;
};

/// Parameter-varying gain applied after fixed LTI dynamics: y = mu(t) * (base u).
struct LpvGain {
  Schedule schedule;
  RationalTF base;
};

TimeSeries lpv_track(const LpvGain& g, const TimeSeries& input, double dt);

}  // namespace dvpp::lti
