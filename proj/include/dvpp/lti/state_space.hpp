#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

#include "dvpp/lti/rational_tf.hpp"
#include "dvpp/lti/time_series.hpp"

namespace dvpp::lti {

/// Continuous-time realization x' = A x + B u, y = C x + D u.
struct StateSpaceModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  std::vector<std::string> state_labels;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }

  /// Throws DimensionMismatch when the blocks or label lists disagree.
  void validate() const;

  /// C (sI - A)^-1 B + D at one complex frequency.
  Eigen::MatrixXcd response(std::complex<double> s) const;

  /// Every eigenvalue of A strictly in the open left half plane.
  bool is_stable() const;
  double spectral_abscissa() const;

  Eigen::Index output_index(const std::string& label) const;
  Eigen::Index input_index(const std::string& label) const;
};

/// Controllable canonical realization of a proper SISO transfer function.
/// States are labelled `<prefix>x0`, `<prefix>x1`, ...
StateSpaceModel to_state_space(const RationalTF& tf, const std::string& prefix = "",
                               const std::string& input = "u", const std::string& output = "y");

/// Block-diagonal stacking of SISO/MIMO models (inputs and outputs concatenated).
StateSpaceModel append(const std::vector<StateSpaceModel>& parts);

}  // namespace dvpp::lti
