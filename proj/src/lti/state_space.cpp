#include "dvpp/lti/state_space.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <limits>

#include "dvpp/errors.hpp"

namespace dvpp::lti {

void StateSpaceModel::validate() const {
  const auto n = A.rows();
  const bool ok = A.cols() == n && B.rows() == n && C.cols() == n && D.rows() == C.rows() &&
                  D.cols() == B.cols() && static_cast<Eigen::Index>(state_labels.size()) == n &&
                  static_cast<Eigen::Index>(input_labels.size()) == B.cols() &&
                  static_cast<Eigen::Index>(output_labels.size()) == C.rows();
  if (!ok) throw Error(ErrorKind::DimensionMismatch, "inconsistent state-space blocks");
}

Eigen::MatrixXcd StateSpaceModel::response(std::complex<double> s) const {
  const auto n = A.rows();
  Eigen::MatrixXcd out = D.cast<std::complex<double>>();
  if (n == 0) return out;
  Eigen::MatrixXcd m = -A.cast<std::complex<double>>();
  m.diagonal().array() += s;
  out += C.cast<std::complex<double>>() * m.partialPivLu().solve(B.cast<std::complex<double>>());
  return out;
}

double StateSpaceModel::spectral_abscissa() const {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

bool StateSpaceModel::is_stable() const { return spectral_abscissa() < 0.0; }

Eigen::Index StateSpaceModel::output_index(const std::string& label) const {
  for (std::size_t i = 0; i < output_labels.size(); ++i)
    if (output_labels[i] == label) return static_cast<Eigen::Index>(i);
  throw Error(ErrorKind::MissingChannel, "no output '" + label + "'");
}

Eigen::Index StateSpaceModel::input_index(const std::string& label) const {
  for (std::size_t i = 0; i < input_labels.size(); ++i)
    if (input_labels[i] == label) return static_cast<Eigen::Index>(i);
  throw Error(ErrorKind::MissingChannel, "no input '" + label + "'");
}

StateSpaceModel to_state_space(const RationalTF& tf, const std::string& prefix,
                               const std::string& input, const std::string& output) {
  if (!tf.is_proper())
    throw Error(ErrorKind::ImproperTransferFunction, "realization needs deg(num) <= deg(den)");
  const int n = tf.den().degree();
  StateSpaceModel m;
  m.A = Eigen::MatrixXd::Zero(n, n);
  m.B = Eigen::MatrixXd::Zero(n, 1);
  m.C = Eigen::MatrixXd::Zero(1, n);
  m.D = Eigen::MatrixXd::Zero(1, 1);
  // den is monic: s^n + a_{n-1} s^{n-1} + ... + a_0
  const double d = tf.num().degree() == n ? tf.num().at(n) : 0.0;
  m.D(0, 0) = d;
  for (int i = 0; i + 1 < n; ++i) m.A(i, i + 1) = 1.0;
  for (int i = 0; i < n; ++i) {
    if (n > 0) m.A(n - 1, i) = -tf.den().at(i);
    m.C(0, i) = tf.num().at(i) - d * tf.den().at(i);
  }
  if (n > 0) m.B(n - 1, 0) = 1.0;
  for (int i = 0; i < n; ++i) m.state_labels.push_back(prefix + "x" + std::to_string(i));
  m.input_labels = {input};
  m.output_labels = {output};
  return m;
}

StateSpaceModel append(const std::vector<StateSpaceModel>& parts) {
  Eigen::Index n = 0, mi = 0, p = 0;
  for (const auto& s : parts) {
    n += s.states();
    mi += s.inputs();
    p += s.outputs();
  }
  StateSpaceModel out;
  out.A = Eigen::MatrixXd::Zero(n, n);
  out.B = Eigen::MatrixXd::Zero(n, mi);
  out.C = Eigen::MatrixXd::Zero(p, n);
  out.D = Eigen::MatrixXd::Zero(p, mi);
  Eigen::Index xo = 0, uo = 0, yo = 0;
  for (const auto& s : parts) {
    out.A.block(xo, xo, s.states(), s.states()) = s.A;
    out.B.block(xo, uo, s.states(), s.inputs()) = s.B;
    out.C.block(yo, xo, s.outputs(), s.states()) = s.C;
    out.D.block(yo, uo, s.outputs(), s.inputs()) = s.D;
    out.state_labels.insert(out.state_labels.end(), s.state_labels.begin(), s.state_labels.end());
    out.input_labels.insert(out.input_labels.end(), s.input_labels.begin(), s.input_labels.end());
    out.output_labels.insert(out.output_labels.end(), s.output_labels.begin(),
                             s.output_labels.end());
    xo += s.states();
    uo += s.inputs();
    yo += s.outputs();
  }
  return out;
}

}  // namespace dvpp::lti
