#pragma once

#include <Eigen/Dense>

#include "dvpp/lti/state_space.hpp"

namespace dvpp::lti {

/// Solves A X + X Aᵀ + Q = 0 (dense Kronecker solve; meant for small models).
Eigen::MatrixXd lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// H2 norm of a stable, strictly proper model.
double h2_norm(const StateSpaceModel& m);

/// L2 norm of y(t) - y(∞) for a unit step on input `in`, output `out`.
/// Requires a stable model; the feedthrough jump is included.
double step_transient_l2(const StateSpaceModel& m, Eigen::Index out, Eigen::Index in);

}  // namespace dvpp::lti
