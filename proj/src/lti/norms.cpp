#include "dvpp/lti/norms.hpp"

#include <Eigen/LU>
#include <cmath>

#include "dvpp/errors.hpp"

namespace dvpp::lti {

using Eigen::MatrixXd;

MatrixXd lyapunov(const MatrixXd& A, const MatrixXd& Q) {
  const auto n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "lyapunov: A and Q must be square and equal size");
  if (n == 0) return MatrixXd(0, 0);
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd K = MatrixXd::Zero(n * n, n * n);
  // vec(AX + XAᵀ) = (I ⊗ A + A ⊗ I) vec(X)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += I(i, j) * A;
      K.block(i * n, j * n, n, n) += A(i, j) * I;
    }
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::PartialPivLU<MatrixXd> lu(K);
  const Eigen::VectorXd x = lu.solve(-q);
  MatrixXd X = Eigen::Map<const MatrixXd>(x.data(), n, n);
  return 0.5 * (X + X.transpose());
}

double h2_norm(const StateSpaceModel& m) {
  if (!m.is_stable()) throw Error(ErrorKind::InvalidArgument, "h2_norm needs a stable model");
  if (m.D.cwiseAbs().maxCoeff() > 0.0) throw Error(ErrorKind::InvalidArgument, "h2_norm needs a strictly proper model");
  const MatrixXd P = lyapunov(m.A, m.B * m.B.transpose());
  return std::sqrt(std::max(0.0, (m.C * P * m.C.transpose()).trace()));
}

double step_transient_l2(const StateSpaceModel& m, Eigen::Index out, Eigen::Index in) {
  if (!m.is_stable()) throw Error(ErrorKind::InvalidArgument, "step_transient_l2 needs a stable model");
  // y(t) - y(∞) = C e^{At} A⁻¹ B, the impulse response of (A, A⁻¹B, C).
  StateSpaceModel e;
  e.A = m.A;
  e.B = m.A.partialPivLu().solve(m.B.col(in));
  e.C = m.C.row(out);
  e.D = MatrixXd::Zero(1, 1);
  return h2_norm(e);
}

}  // namespace dvpp::lti
