#include "dvpp/lti/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "dvpp/errors.hpp"
#include "dvpp/kernels/kernels.hpp"

namespace dvpp::lti {

namespace {

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
  return out;
}

}  // namespace

TustinStepper::TustinStepper(StateSpaceModel model, double dt)
    : model_(std::move(model)), dt_(dt) {
  model_.validate();
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  n_ = static_cast<std::size_t>(model_.states());
  m_ = static_cast<std::size_t>(model_.inputs());
  p_ = static_cast<std::size_t>(model_.outputs());
  Eigen::MatrixXd ad, bd;
  if (n_ > 0) {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n_, n_);
    const Eigen::MatrixXd half = 0.5 * dt * model_.A;
    const auto lu = (eye - half).partialPivLu();
    ad = lu.solve(eye + half);
    bd = lu.solve(model_.B * (0.5 * dt));
    if (!ad.allFinite() || !bd.allFinite())
      throw Error(ErrorKind::UnstableDiscretization, "singular Tustin map");
    if (model_.is_stable()) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(ad, false);
      const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
      if (rho >= 1.0 + 1e-9)
        throw Error(ErrorKind::UnstableDiscretization,
                    "discrete spectral radius " + std::to_string(rho) + " for a stable model");
    }
  } else {
    ad.resize(0, 0);
    bd.resize(0, static_cast<Eigen::Index>(m_));
  }
  ad_ = row_major(ad);
  bd_ = row_major(bd);
  c_ = row_major(model_.C);
  d_ = row_major(model_.D);
  x_.assign(n_, 0.0);
  xn_.assign(n_, 0.0);
  usum_.assign(m_, 0.0);
}

void TustinStepper::set_state(std::span<const double> x) {
  if (x.size() != n_) throw Error(ErrorKind::DimensionMismatch, "state size");
  x_.assign(x.begin(), x.end());
}

void TustinStepper::import_state(const TustinStepper& other) {
  const auto& mine = model_.state_labels;
  const auto& theirs = other.model_.state_labels;
  for (std::size_t i = 0; i < mine.size(); ++i) {
    x_[i] = 0.0;
    for (std::size_t j = 0; j < theirs.size(); ++j)
      if (theirs[j] == mine[i]) {
        x_[i] = other.x_[j];
        break;
      }
  }
}

void TustinStepper::advance(std::span<const double> u_now, std::span<const double> u_next) {
  if (n_ == 0) return;
  for (std::size_t i = 0; i < m_; ++i) usum_[i] = u_now[i] + u_next[i];
  kernels::gemv(ad_, n_, n_, x_, xn_, false);
  kernels::gemv(bd_, n_, m_, usum_, xn_, true);
  x_.swap(xn_);
}

void TustinStepper::output(std::span<const double> u, std::span<double> y) const {
  if (n_ > 0) {
    kernels::gemv(c_, p_, n_, x_, y, false);
  } else {
    for (std::size_t i = 0; i < p_; ++i) y[i] = 0.0;
  }
  kernels::gemv(d_, p_, m_, u, y, true);
}

TimeSeries simulate(const StateSpaceModel& model, const TimeSeries& input, double dt) {
  input.validate();
  if (input.size() > 1 && std::abs(input.dt() - dt) > 1e-9 * dt)
    throw Error(ErrorKind::InvalidArgument, "dt does not match input spacing");
  TustinStepper stepper(model, dt);
  const std::size_t m = static_cast<std::size_t>(model.inputs());
  const std::size_t p = static_cast<std::size_t>(model.outputs());
  std::vector<const std::vector<double>*> src(m, nullptr);
  bool any = false;
  for (std::size_t i = 0; i < m; ++i)
    if (input.has(model.input_labels[i])) {
      src[i] = &input.channel(model.input_labels[i]);
      any = true;
    }
  if (!any && input.channels.size() == m)
    for (std::size_t i = 0; i < m; ++i) src[i] = &input.channels[i].second;

  TimeSeries out;
  out.t = input.t;
  const std::size_t len = input.size();
  std::vector<std::vector<double>> ys(p, std::vector<double>(len, 0.0));
  std::vector<double> u0(m, 0.0), u1(m, 0.0), y(p, 0.0);
  auto load = [&](std::size_t k, std::vector<double>& u) {
    for (std::size_t i = 0; i < m; ++i) u[i] = src[i] ? (*src[i])[k] : 0.0;
  };
  if (len > 0) load(0, u0);
  for (std::size_t k = 0; k < len; ++k) {
    stepper.output(u0, y);
    for (std::size_t i = 0; i < p; ++i) ys[i][k] = y[i];
    if (k + 1 < len) {
      load(k + 1, u1);
      stepper.advance(u0, u1);
      u0.swap(u1);
    }
  }
  for (std::size_t i = 0; i < p; ++i) out.add(model.output_labels[i], std::move(ys[i]));
  return out;
}

double Schedule::operator()(double t) const {
  double v = values.empty() ? 0.0 : values.front();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= t + 1e-12) v = values[i];
    else break;
  }
  return v;
}

void Schedule::validate() const {
  if (times.size() != values.size() || times.empty())
    throw Error(ErrorKind::InvalidArgument, "schedule needs matching, nonempty breakpoints");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "schedule breakpoints must increase strictly");
}

TimeSeries lpv_track(const LpvGain& g, const TimeSeries& input, double dt) {
  g.schedule.validate();
  if (!g.base.is_proper() || !g.base.is_stable())
    throw Error(ErrorKind::ImproperTransferFunction, "LPV base must be proper and stable");
  TimeSeries y = simulate(to_state_space(g.base), input, dt);
  auto& ch = y.channels.front().second;
  for (std::size_t k = 0; k < ch.size(); ++k) ch[k] *= g.schedule(y.t[k]);
  return y;
}

}  // namespace dvpp::lti
