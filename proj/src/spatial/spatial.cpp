#include "dvpp/spatial/spatial.hpp"

#include <Eigen/LU>
#include <cmath>
#include <random>

#include "dvpp/errors.hpp"

namespace dvpp::spatial {

using Eigen::MatrixXd;

RotationParams RotationParams::from_rx(double r, double x) {
  RotationParams p{r, x, std::hypot(r, x)};
  p.validate();
  return p;
}

RotationParams RotationParams::from_ratio(double rx) {
  if (!std::isfinite(rx) || rx < 0.0) throw Error(ErrorKind::InvalidArgument, "R/X must be finite and non-negative");
  const double z = std::hypot(rx, 1.0);
  return {rx / z, 1.0 / z, 1.0};
}

void RotationParams::validate() const {
  if (!(Z > 0.0) || !std::isfinite(Z)) throw Error(ErrorKind::ZeroImpedance, "line impedance must be positive");
  if (std::abs(std::hypot(R, X) - Z) > 1e-9 * Z)
    throw Error(ErrorKind::InvalidArgument, "Z must equal sqrt(R^2 + X^2)");
}

Eigen::Matrix2d RotationParams::matrix() const {
  validate();
  Eigen::Matrix2d m;
  m << X / Z, -R / Z, R / Z, X / Z;
  return m;
}

std::pair<double, double> rotate_power(double p, double q, const RotationParams& params) {
  const Eigen::Vector2d v = params.matrix() * Eigen::Vector2d(p, q);
  return {v(0), v(1)};
}

std::pair<double, double> unrotate_power(double p_rot, double q_rot, const RotationParams& params) {
  const Eigen::Vector2d v = params.matrix().transpose() * Eigen::Vector2d(p_rot, q_rot);
  return {v(0), v(1)};
}

std::pair<double, double> lossless_flow_residual(double delta, double v_l, double v_m, double z, double p_rot,
                                                 double q_rot) {
  if (!(v_l > 0.0) || !(v_m > 0.0)) throw Error(ErrorKind::InvalidArgument, "bus voltages must be positive");
  return {std::sin(delta) - z * p_rot / (v_l * v_m), (v_l - v_m * std::cos(delta)) - z * q_rot / v_l};
}

std::array<lti::RationalTF, 2> poc_coupled_spec(const lti::RationalTF& tdes_pf, const RotationParams& params) {
  params.validate();
  return {(params.X / params.Z) * tdes_pf, (-params.R / params.Z) * tdes_pf};
}

void AreaModel::validate() const {
  graph.validate();
  if (pocs.empty()) throw Error(ErrorKind::InvalidArgument, "area needs at least one POC");
  for (const auto& p : pocs) graph.index(p);
  if (!(vq_droop_factor >= 0.0)) throw Error(ErrorKind::InvalidArgument, "q' droop factor must be non-negative");
  if (homogeneous_ratio && (!std::isfinite(*homogeneous_ratio) || *homogeneous_ratio < 0.0))
    throw Error(ErrorKind::InvalidArgument, "homogeneous R/X must be finite and non-negative");
  for (const auto& e : graph.edges)
    if (!std::isnan(e.rx) && (!std::isfinite(e.rx) || e.rx < 0.0))
      throw Error(ErrorKind::InvalidArgument, "line R/X must be finite and non-negative");
}

namespace {

bool same_ratio(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

double design_ratio(const AreaModel& area) {
  if (area.homogeneous_ratio) return *area.homogeneous_ratio;
  std::optional<double> common;
  for (const auto& e : area.graph.edges) {
    if (std::isnan(e.rx)) continue;
    if (!common) common = e.rx;
    else if (!same_ratio(*common, e.rx))
      throw Error(ErrorKind::HeterogeneousRatioWithStrictMode, "lines disagree on R/X and no design ratio is set");
  }
  return common.value_or(0.0);
}

net::ClosedLoopModel build_area_model(const AreaModel& area, AreaMode mode, double omega_base) {
  area.validate();
  const double rx_d = design_ratio(area);
  const double gamma_d = std::atan(rx_d);
  const auto& g = area.graph;
  const auto nb = static_cast<Eigen::Index>(g.nodes.size());

  // Line flows in the design frame: p′ = (cos α Δθ − sin α Δv)/Z, q′ = (sin α Δθ + cos α Δv)/Z.
  MatrixXd Lc = MatrixXd::Zero(nb, nb), Ls = MatrixXd::Zero(nb, nb);
  for (const auto& e : g.edges) {
    const double rx = std::isnan(e.rx) ? rx_d : e.rx;
    if (mode == AreaMode::Strict && !same_ratio(rx, rx_d))
      throw Error(ErrorKind::HeterogeneousRatioWithStrictMode,
                  "line " + g.nodes[e.from] + "-" + g.nodes[e.to] + " has R/X different from the design ratio");
    const double alpha = gamma_d - std::atan(rx);
    const auto i = static_cast<Eigen::Index>(e.from), j = static_cast<Eigen::Index>(e.to);
    for (auto [M, w] : {std::pair<MatrixXd*, double>{&Lc, e.b * std::cos(alpha)}, {&Ls, e.b * std::sin(alpha)}}) {
      (*M)(i, i) += w;
      (*M)(j, j) += w;
      (*M)(i, j) -= w;
      (*M)(j, i) -= w;
    }
  }

  auto units = net::units_from_fleet(area.devices);
  std::vector<bool> is_poc(nb, false);
  for (const auto& p : area.pocs) is_poc[g.index(p)] = true;
  std::vector<Eigen::Index> nidx;
  std::vector<Eigen::Index> slot(nb, -1);
  for (Eigen::Index b = 0; b < nb; ++b)
    if (!is_poc[b]) {
      slot[b] = static_cast<Eigen::Index>(nidx.size());
      nidx.push_back(b);
    }
  const auto nn = static_cast<Eigen::Index>(nidx.size());

  const double droop = area.vq_droop_factor / area.devices.desired.dq;
  std::vector<double> unit_droop(units.size(), 0.0);
  MatrixXd Gi = MatrixXd::Zero(nn, nn);
  for (Eigen::Index a = 0; a < nn; ++a)
    for (Eigen::Index c = 0; c < nn; ++c) Gi(a, c) = Lc(nidx[a], nidx[c]);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto b = static_cast<Eigen::Index>(g.index(units[u].bus));
    if (is_poc[b]) continue;
    unit_droop[u] = droop;
    Gi(slot[b], slot[b]) += droop;
  }
  MatrixXd G = MatrixXd::Zero(nn, nn);
  if (nn > 0) {
    Eigen::FullPivLU<MatrixXd> lu(Gi);
    if (!lu.isInvertible()) throw Error(ErrorKind::SingularInteriorBlock, "area voltage block is singular");
    G = lu.inverse();
  }
  MatrixXd LsN(nn, nb), EN = MatrixXd::Zero(nn, nb);
  for (Eigen::Index a = 0; a < nn; ++a) {
    LsN.row(a) = Ls.row(nidx[a]);
    EN(a, nidx[a]) = 1.0;
  }

  net::LaplacianMatrix Leff;
  Leff.labels = g.nodes;
  Leff.L = Lc + LsN.transpose() * G * LsN;
  Leff.L = 0.5 * (Leff.L + Leff.L.transpose()).eval();
  // Effective injection d = dp′ + H dq′.
  const MatrixXd H = LsN.transpose() * G * EN;

  auto out = net::build_frequency_loop(units, Leff, omega_base);
  auto& ss = out.ss;
  const MatrixXd B0 = ss.B, D0 = ss.D;
  ss.B.resize(B0.rows(), 2 * nb);
  ss.B << B0, B0 * H;
  ss.D.resize(D0.rows(), 2 * nb);
  ss.D << D0, D0 * H;
  ss.input_labels.clear();
  for (const auto& b : g.nodes) ss.input_labels.push_back("dp'." + b);
  for (const auto& b : g.nodes) ss.input_labels.push_back("dq'." + b);

  const auto n = ss.states();
  MatrixXd Cth(nb, n), Dth(nb, 2 * nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const auto r = ss.output_index("theta." + g.nodes[b]);
    Cth.row(b) = ss.C.row(r);
    Dth.row(b) = ss.D.row(r);
  }
  MatrixXd Dq = MatrixXd::Zero(nb, 2 * nb);
  Dq.rightCols(nb) = MatrixXd::Identity(nb, nb);
  const MatrixXd Cv = -G * LsN * Cth;
  const MatrixXd Dv = G * (EN * Dq - LsN * Dth);

  std::vector<Eigen::VectorXd> crow;
  std::vector<Eigen::VectorXd> drow;
  std::vector<std::string> labels;
  auto push = [&](std::string label, Eigen::VectorXd c, Eigen::VectorXd d) {
    labels.push_back(std::move(label));
    crow.push_back(std::move(c));
    drow.push_back(std::move(d));
  };
  for (const auto& p : area.pocs) {
    const auto r = ss.output_index("f." + p);
    push("f_poc." + p, ss.C.row(r).transpose(), ss.D.row(r).transpose());
  }
  Eigen::VectorXd sum_d = Eigen::VectorXd::Zero(2 * nb);
  sum_d.head(nb).setOnes();
  push("dp'_poc", Eigen::VectorXd::Zero(n), sum_d);
  for (Eigen::Index a = 0; a < nn; ++a) push("v." + g.nodes[nidx[a]], Cv.row(a).transpose(), Dv.row(a).transpose());

  const double cd = std::cos(gamma_d), sd = std::sin(gamma_d);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto pr = ss.output_index("p." + units[u].name);
    ss.output_labels[pr] = "p'." + units[u].name;
    Eigen::VectorXd qc = Eigen::VectorXd::Zero(n), qd = Eigen::VectorXd::Zero(2 * nb);
    const auto b = static_cast<Eigen::Index>(g.index(units[u].bus));
    if (unit_droop[u] > 0.0) {
      qc = -unit_droop[u] * Cv.row(slot[b]).transpose();
      qd = -unit_droop[u] * Dv.row(slot[b]).transpose();
    }
    const Eigen::VectorXd pc = ss.C.row(pr).transpose(), pd = ss.D.row(pr).transpose();
    push("q'." + units[u].name, qc, qd);
    push("p." + units[u].name, cd * pc + sd * qc, cd * pd + sd * qd);
    push("q." + units[u].name, -sd * pc + cd * qc, -sd * pd + cd * qd);
  }

  const auto p0 = ss.outputs();
  const auto extra = static_cast<Eigen::Index>(labels.size());
  ss.C.conservativeResize(p0 + extra, Eigen::NoChange);
  ss.D.conservativeResize(p0 + extra, Eigen::NoChange);
  for (Eigen::Index k = 0; k < extra; ++k) {
    ss.C.row(p0 + k) = crow[k].transpose();
    ss.D.row(p0 + k) = drow[k].transpose();
  }
  ss.output_labels.insert(ss.output_labels.end(), labels.begin(), labels.end());
  ss.validate();
  return out;
}

net::NetworkGraph with_line_ratios(const net::NetworkGraph& graph, const std::vector<double>& ratios) {
  if (ratios.size() != graph.edges.size())
    throw Error(ErrorKind::DimensionMismatch, "one R/X per line expected");
  auto g = graph;
  for (std::size_t e = 0; e < ratios.size(); ++e) g.edges[e].rx = ratios[e];
  return g;
}

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<std::vector<double>> sample_rx(double min_ratio, double max_ratio, std::size_t n_lines,
                                           std::size_t n_samples, std::uint64_t seed) {
  if (!(min_ratio > 0.0) || !(max_ratio >= min_ratio) || !std::isfinite(max_ratio))
    throw Error(ErrorKind::InvalidArgument, "R/X range must satisfy 0 < min <= max");
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "at least one sample required");
  std::vector<std::vector<double>> out(n_samples, std::vector<double>(n_lines));
  for (std::size_t i = 0; i < n_samples; ++i) {
    std::mt19937_64 gen(seed + i);
    for (auto& r : out[i]) r = min_ratio + (max_ratio - min_ratio) * uniform01(gen());
  }
  return out;
}

}  // namespace dvpp::spatial
