#include "dvpp/network/network.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <map>
#include <numeric>

#include "dvpp/errors.hpp"
#include "dvpp/lti/norms.hpp"
#include "dvpp/lti/simulate.hpp"

namespace dvpp::net {

using design::Role;
using Eigen::MatrixXd;
using lti::Polynomial;

std::size_t NetworkGraph::add_node(const std::string& name) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return i;
  nodes.push_back(name);
  return nodes.size() - 1;
}

std::size_t NetworkGraph::index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return i;
  throw Error(ErrorKind::SemanticError, "unknown bus '" + name + "'");
}

bool NetworkGraph::has(const std::string& name) const {
  for (const auto& n : nodes)
    if (n == name) return true;
  return false;
}

void NetworkGraph::add_edge(const std::string& from, const std::string& to, double b, double rx) {
  const std::size_t i = add_node(from), j = add_node(to);
  edges.push_back({i, j, b, rx});
}

bool NetworkGraph::connected() const {
  if (nodes.empty()) return false;
  std::vector<std::size_t> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t groups = nodes.size();
  for (const auto& e : edges) {
    const auto a = find(e.from), b = find(e.to);
    if (a != b) {
      parent[a] = b;
      --groups;
    }
  }
  return groups == 1;
}

void NetworkGraph::validate() const {
  for (const auto& e : edges) {
    if (e.from == e.to) throw Error(ErrorKind::SemanticError, "self-loop at '" + nodes[e.from] + "'");
    if (!(e.b > 0.0)) throw Error(ErrorKind::SemanticError, "non-positive susceptance");
  }
  if (!connected()) throw Error(ErrorKind::DisconnectedGraph, "network is not connected");
}

std::size_t LaplacianMatrix::index(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw Error(ErrorKind::SemanticError, "unknown node '" + label + "'");
}

bool LaplacianMatrix::satisfies_invariants(double tol) const {
  const auto n = L.rows();
  if (L.cols() != n || static_cast<std::size_t>(n) != labels.size()) return false;
  if (n == 0) return true;
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(L.row(i).sum()) > tol * scale) return false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && L(i, j) > tol * scale) return false;
      if (std::abs(L(i, j) - L(j, i)) > tol * scale) return false;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(L);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() < -tol * scale) return false;
  int zeros = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(ev(i)) <= tol * scale) ++zeros;
  return zeros == 1;
}

LaplacianMatrix build_laplacian(const NetworkGraph& graph) {
  graph.validate();
  const auto n = static_cast<Eigen::Index>(graph.nodes.size());
  LaplacianMatrix out;
  out.labels = graph.nodes;
  out.L = MatrixXd::Zero(n, n);
  for (const auto& e : graph.edges) {
    out.L(e.from, e.to) -= e.b;
    out.L(e.to, e.from) -= e.b;
    out.L(e.from, e.from) += e.b;
    out.L(e.to, e.to) += e.b;
  }
  return out;
}

namespace {

struct Partition {
  std::vector<std::size_t> keep, elim;
};

Partition partition(const LaplacianMatrix& L, std::span<const std::string> keep) {
  Partition p;
  std::vector<bool> kept(L.size(), false);
  for (const auto& k : keep) {
    const auto i = L.index(k);
    if (kept[i]) throw Error(ErrorKind::InvalidArgument, "node '" + k + "' listed twice");
    kept[i] = true;
    p.keep.push_back(i);
  }
  for (std::size_t i = 0; i < L.size(); ++i)
    if (!kept[i]) p.elim.push_back(i);
  return p;
}

MatrixXd block(const MatrixXd& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

Eigen::FullPivLU<MatrixXd> interior_lu(const MatrixXd& lee) {
  Eigen::FullPivLU<MatrixXd> lu(lee);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularInteriorBlock, "eliminated block is singular");
  return lu;
}

}  // namespace

LaplacianMatrix kron_reduce(const LaplacianMatrix& L, std::span<const std::string> keep) {
  const auto p = partition(L, keep);
  LaplacianMatrix out;
  for (auto i : p.keep) out.labels.push_back(L.labels[i]);
  const MatrixXd lkk = block(L.L, p.keep, p.keep);
  if (p.elim.empty()) {
    out.L = lkk;
    return out;
  }
  const MatrixXd lke = block(L.L, p.keep, p.elim);
  const MatrixXd lek = block(L.L, p.elim, p.keep);
  const auto lu = interior_lu(block(L.L, p.elim, p.elim));
  out.L = lkk - lke * lu.solve(lek);
  out.L = 0.5 * (out.L + out.L.transpose());
  return out;
}

Unit make_sg_unit(const std::string& name, const std::string& bus, double rating_mva, double h, double droop,
                  double base_mva) {
  if (!(droop > 0.0)) throw Error(ErrorKind::NonPositiveDroop, "generator droop must be positive");
  if (!(h >= 0.0) || !(rating_mva > 0.0) || !(base_mva > 0.0))
    throw Error(ErrorKind::InvalidArgument, "generator needs H >= 0 and positive ratings");
  const double s = rating_mva / base_mva;
  Unit u;
  u.name = name;
  u.bus = bus;
  u.role = Role::Forming;
  u.tf = RationalTF({1.0}, {s / droop, 2.0 * h * s});
  u.weight = rating_mva;
  return u;
}

std::vector<Unit> units_from_fleet(const design::Fleet& fleet) {
  std::vector<Unit> out;
  for (const auto& d : fleet.devices) {
    if (!d.realized) throw Error(ErrorKind::UnrealizedDevice, d.name + " has no reference models");
    if (!d.active() || d.ref_pf.is_zero()) continue;
    out.push_back({d.name, d.bus, d.role, d.ref_pf, d.rating});
  }
  return out;
}

namespace {

void check_weights(const std::vector<double>& w) {
  double sum = 0.0;
  for (double x : w) {
    if (x < 0.0) throw Error(ErrorKind::ZeroWeightSum, "negative COI weight");
    sum += x;
  }
  if (!(sum > 0.0)) throw Error(ErrorKind::ZeroWeightSum, "COI weights sum to zero");
}

struct Blocks {
  MatrixXd A, B, C, D;
  std::vector<std::string> labels;
};

Blocks stack(const std::vector<lti::StateSpaceModel>& parts) {
  const auto m = lti::append(parts);
  return {m.A, m.B, m.C, m.D, m.state_labels};
}

}  // namespace

ClosedLoopModel build_frequency_loop(std::span<const Unit> units, const LaplacianMatrix& L, double omega_base) {
  if (!(omega_base > 0.0)) throw Error(ErrorKind::InvalidArgument, "omega_base must be positive");
  const std::size_t nb = L.size();
  std::vector<std::size_t> form, foll;
  std::vector<std::string> f_buses;
  std::vector<int> bus_slot(nb, -1);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& unit = units[u];
    if (unit.tf.is_zero()) throw Error(ErrorKind::ImproperDevice, unit.name + " has an empty model");
    if (!unit.tf.is_proper()) throw Error(ErrorKind::ImproperDevice, unit.name + " has an improper model");
    const auto b = L.index(unit.bus);
    if (unit.role == Role::Forming) {
      if (bus_slot[b] >= 0)
        throw Error(ErrorKind::DimensionMismatch, "two forming units share bus '" + unit.bus + "'");
      bus_slot[b] = static_cast<int>(form.size());
      form.push_back(u);
      f_buses.push_back(unit.bus);
    } else {
      foll.push_back(u);
    }
  }
  if (form.empty()) throw Error(ErrorKind::NoFormingDevice, "no forming device present");

  const auto part = partition(L, f_buses);
  const auto nf = static_cast<Eigen::Index>(part.keep.size());
  const auto ne = part.elim.size();
  const auto nbi = static_cast<Eigen::Index>(nb);

  // P maps bus injections onto forming nodes; Kb maps forming frequencies to every bus.
  MatrixXd P = MatrixXd::Zero(nf, nbi);
  MatrixXd Kb = MatrixXd::Zero(nbi, nf);
  for (Eigen::Index k = 0; k < nf; ++k) {
    P(k, part.keep[k]) = 1.0;
    Kb(part.keep[k], k) = 1.0;
  }
  MatrixXd Lred = block(L.L, part.keep, part.keep);
  MatrixXd LeeInv(ne, ne);
  if (ne > 0) {
    const MatrixXd lfe = block(L.L, part.keep, part.elim);
    const MatrixXd lef = block(L.L, part.elim, part.keep);
    const auto lu = interior_lu(block(L.L, part.elim, part.elim));
    LeeInv = lu.inverse();
    const MatrixXd X = lu.solve(lef);
    Lred -= lfe * X;
    const MatrixXd dist = -lu.solve(lfe.transpose()).transpose();
    for (std::size_t j = 0; j < ne; ++j) {
      P.col(part.elim[j]) = dist.col(j);
      Kb.row(part.elim[j]) = -X.row(j);
    }
  }
  Lred = 0.5 * (Lred + Lred.transpose());

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Lred);
  const double lmax = nf > 0 ? std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()) : 1.0;
  std::vector<Eigen::Index> modes;
  for (Eigen::Index i = 0; i < nf; ++i)
    if (es.eigenvalues()(i) > 1e-10 * lmax) modes.push_back(i);
  const auto nz = static_cast<Eigen::Index>(modes.size());
  MatrixXd V(nf, nz), VL(nf, nz);
  for (Eigen::Index i = 0; i < nz; ++i) {
    V.col(i) = es.eigenvectors().col(modes[i]);
    VL.col(i) = V.col(i) * es.eigenvalues()(modes[i]);
  }

  std::vector<lti::StateSpaceModel> fparts, gparts;
  for (auto u : form) fparts.push_back(lti::to_state_space(units[u].tf, units[u].name + ".", "u", "f"));
  for (auto u : foll) gparts.push_back(lti::to_state_space(units[u].tf, units[u].name + ".", "f", "p"));
  const Blocks F = stack(fparts);
  const Blocks G = gparts.empty() ? Blocks{MatrixXd(0, 0), MatrixXd(0, 0), MatrixXd(0, 0), MatrixXd(0, 0), {}}
                                  : stack(gparts);
  const auto nxf = F.A.rows(), nxg = G.A.rows();
  const auto ng = static_cast<Eigen::Index>(foll.size());
  const Eigen::Index n = nxf + nxg + nz;

  MatrixXd Kg(ng, nf), S = MatrixXd::Zero(nbi, ng);
  for (Eigen::Index j = 0; j < ng; ++j) {
    const auto b = L.index(units[foll[j]].bus);
    Kg.row(j) = Kb.row(b);
    S(b, j) = 1.0;
  }
  const MatrixXd W = P * S;

  MatrixXd M = MatrixXd::Identity(nf, nf);
  if (ng > 0) M += F.D * W * G.D * Kg;
  Eigen::FullPivLU<MatrixXd> mlu(M);
  if (!mlu.isInvertible()) throw Error(ErrorKind::AlgebraicLoopUnstable, "singular device feedthrough loop");

  MatrixXd Cf = MatrixXd::Zero(nf, n), Cg = MatrixXd::Zero(ng, n), Cz = MatrixXd::Zero(nf, n);
  Cf.leftCols(nxf) = F.C;
  if (ng > 0) Cg.middleCols(nxf, nxg) = G.C;
  Cz.rightCols(nz) = VL;

  const MatrixXd Fx = mlu.solve(Cf - F.D * Cz - F.D * W * Cg);
  const MatrixXd Fd = mlu.solve(F.D * P);
  MatrixXd Ux = -Cz - W * Cg, Ud = P;
  MatrixXd Pgx(ng, n), Pgd(ng, nbi);
  if (ng > 0) {
    Ux -= W * G.D * Kg * Fx;
    Ud -= W * G.D * Kg * Fd;
    Pgx = -(Cg + G.D * Kg * Fx);
    Pgd = -(G.D * Kg * Fd);
  }

  lti::StateSpaceModel ss;
  ss.A = MatrixXd::Zero(n, n);
  ss.B = MatrixXd::Zero(n, nbi);
  ss.A.topRows(nxf) = F.B * Ux;
  ss.A.block(0, 0, nxf, nxf) += F.A;
  ss.B.topRows(nxf) = F.B * Ud;
  if (ng > 0) {
    ss.A.middleRows(nxf, nxg) = G.B * Kg * Fx;
    ss.A.block(nxf, nxf, nxg, nxg) += G.A;
    ss.B.middleRows(nxf, nxg) = G.B * Kg * Fd;
  }
  if (nz > 0) {
    ss.A.bottomRows(nz) = omega_base * V.transpose() * Fx;
    ss.B.bottomRows(nz) = omega_base * V.transpose() * Fd;
  }
  ss.state_labels = F.labels;
  ss.state_labels.insert(ss.state_labels.end(), G.labels.begin(), G.labels.end());
  for (Eigen::Index i = 0; i < nz; ++i) ss.state_labels.push_back("net.z" + std::to_string(i));
  for (const auto& b : L.labels) ss.input_labels.push_back("dp." + b);

  // Output rows.
  const auto nu = static_cast<Eigen::Index>(units.size());
  const Eigen::Index p = 2 * nu + nbi + 1 + nbi;
  ss.C = MatrixXd::Zero(p, n);
  ss.D = MatrixXd::Zero(p, nbi);
  ClosedLoopModel out;
  std::vector<Eigen::Index> f_row(units.size());
  for (std::size_t k = 0; k < form.size(); ++k) {
    const auto u = form[k];
    const auto r = static_cast<Eigen::Index>(u);
    ss.C.row(r) = Fx.row(k);
    ss.D.row(r) = Fd.row(k);
    ss.C.row(nu + r) = -Ux.row(k);
    ss.D.row(nu + r) = -Ud.row(k);
  }
  for (Eigen::Index j = 0; j < ng; ++j) {
    const auto r = static_cast<Eigen::Index>(foll[j]);
    ss.C.row(r) = Kg.row(j) * Fx;
    ss.D.row(r) = Kg.row(j) * Fd;
    ss.C.row(nu + r) = Pgx.row(j);
    ss.D.row(nu + r) = Pgd.row(j);
  }
  for (const auto& u : units) ss.output_labels.push_back("f." + u.name);
  for (const auto& u : units) ss.output_labels.push_back("p." + u.name);
  ss.C.middleRows(2 * nu, nbi) = Kb * Fx;
  ss.D.middleRows(2 * nu, nbi) = Kb * Fd;
  for (const auto& b : L.labels) ss.output_labels.push_back("f." + b);

  for (const auto& u : units) {
    out.units.push_back(u.name);
    out.coi_weights.push_back(u.weight);
  }
  check_weights(out.coi_weights);
  const double wsum = std::accumulate(out.coi_weights.begin(), out.coi_weights.end(), 0.0);
  const Eigen::Index coi = 2 * nu + nbi;
  for (Eigen::Index r = 0; r < nu; ++r) {
    ss.C.row(coi) += out.coi_weights[r] / wsum * ss.C.row(r);
    ss.D.row(coi) += out.coi_weights[r] / wsum * ss.D.row(r);
  }
  ss.output_labels.push_back("f_coi");

  // Bus angles relative to their mean over forming nodes (differences are what matter).
  const Eigen::Index th = coi + 1;
  for (Eigen::Index k = 0; k < nf; ++k) ss.C.row(th + part.keep[k]).rightCols(nz) = V.row(k);
  if (ne > 0) {
    MatrixXd injx = MatrixXd::Zero(ne, n), injd = MatrixXd::Zero(ne, nbi);
    for (std::size_t j = 0; j < ne; ++j) {
      injd(j, part.elim[j]) = 1.0;
      if (ng > 0) {
        injx.row(j) = S.row(part.elim[j]) * Pgx;
        injd.row(j) += S.row(part.elim[j]) * Pgd;
      }
    }
    MatrixXd thf = MatrixXd::Zero(nf, n);
    thf.rightCols(nz) = V;
    const MatrixXd cx = LeeInv * injx;
    const MatrixXd cd = LeeInv * injd;
    for (std::size_t j = 0; j < ne; ++j) {
      ss.C.row(th + part.elim[j]) = Kb.row(part.elim[j]) * thf + cx.row(j);
      ss.D.row(th + part.elim[j]) = cd.row(j);
    }
  }
  for (const auto& b : L.labels) ss.output_labels.push_back("theta." + b);
  ss.validate();
  out.ss = std::move(ss);
  out.buses = L.labels;
  return out;
}

ClosedLoopModel build_frequency_loop(const design::Fleet& fleet, const LaplacianMatrix& L, double omega_base) {
  std::vector<Unit> units;
  std::size_t k = 0;
  for (const auto& d : fleet.devices) {
    if (!d.realized) throw Error(ErrorKind::UnrealizedDevice, d.name + " has no reference models");
    if (k >= L.size()) throw Error(ErrorKind::DimensionMismatch, "more devices than network nodes");
    std::string bus = L.labels[k++];
    if (d.role == Role::Following && !d.bus.empty()) {
      for (const auto& l : L.labels)
        if (l == d.bus) bus = d.bus;
    }
    if (!d.active() || d.ref_pf.is_zero()) continue;
    units.push_back({d.name, bus, d.role, d.ref_pf, d.rating});
  }
  if (k != L.size()) throw Error(ErrorKind::DimensionMismatch, "node count differs from device count");
  return build_frequency_loop(units, L, omega_base);
}

namespace {

RationalTF admittance(std::span<const Unit> units) {
  RationalTF adm;
  for (const auto& u : units) {
    if (u.tf.is_zero()) continue;
    adm = adm + (u.role == Role::Forming ? u.tf.inverse() : u.tf);
  }
  return adm;
}

}  // namespace

RationalTF coherent_response(std::span<const Unit> units) {
  const RationalTF adm = admittance(units);
  if (adm.is_zero()) throw Error(ErrorKind::DegenerateSum, "aggregate admittance is zero");
  return adm.inverse();
}

RationalTF coherent_response(const design::Fleet& fleet) {
  const auto units = units_from_fleet(fleet);
  return coherent_response(units);
}

Polynomial poly_lcm(const Polynomial& a, const Polynomial& b) {
  if (a.degree() < 1) return b.is_zero() ? a : (1.0 / b.leading()) * b;
  if (b.degree() < 1) return (1.0 / a.leading()) * a;
  const Polynomial g = lti::common_factor(a, b);
  const Polynomial out = a * b.divide(g);
  return (1.0 / out.leading()) * out;
}

namespace {

std::vector<std::pair<std::string, RationalTF>> aggregate_outputs(std::span<const Unit> units,
                                                                  std::span<const std::string> buses,
                                                                  std::vector<double>& weights) {
  const RationalTF coh = coherent_response(units);
  std::vector<std::pair<std::string, RationalTF>> out;
  for (const auto& b : buses) out.emplace_back("f." + b, coh);
  for (const auto& u : units) out.emplace_back("f." + u.name, coh);
  for (const auto& u : units) {
    const RationalTF y = u.role == Role::Forming ? u.tf.inverse() * coh : u.tf * coh;
    out.emplace_back("p." + u.name, -1.0 * y);
    weights.push_back(u.weight);
  }
  out.emplace_back("f_coi", coh);
  return out;
}

}  // namespace

Polynomial aggregate_denominator(std::span<const Unit> units) {
  std::vector<double> w;
  Polynomial den({1.0});
  for (const auto& [name, tf] : aggregate_outputs(units, {}, w)) den = poly_lcm(den, tf.den());
  return den;
}

ClosedLoopModel build_aggregate_model(std::span<const Unit> units, std::span<const std::string> buses,
                                      const Polynomial& common_den) {
  if (units.empty()) throw Error(ErrorKind::DegenerateSum, "no units");
  ClosedLoopModel out;
  const auto outs = aggregate_outputs(units, buses, out.coi_weights);
  check_weights(out.coi_weights);
  Polynomial den({1.0});
  for (const auto& [name, tf] : outs) den = poly_lcm(den, tf.den());
  if (!common_den.is_zero()) {
    Polynomial rem;
    const Polynomial cd = (1.0 / common_den.leading()) * common_den;
    (void)cd.divide(den, &rem);
    double worst = 0.0;
    for (double c : rem.coeffs()) worst = std::max(worst, std::abs(c));
    double scale = 0.0;
    for (double c : cd.coeffs()) scale = std::max(scale, std::abs(c));
    if (worst > 1e-7 * std::max(1.0, scale))
      throw Error(ErrorKind::InvalidArgument, "common denominator is not a multiple of the model's");
    den = cd;
  }
  const int n = den.degree();
  const auto p = static_cast<Eigen::Index>(outs.size());
  lti::StateSpaceModel ss;
  ss.A = MatrixXd::Zero(n, n);
  ss.B = MatrixXd::Zero(n, 1);
  ss.C = MatrixXd::Zero(p, n);
  ss.D = MatrixXd::Zero(p, 1);
  for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (int i = 0; i < n; ++i) ss.A(n - 1, i) = -den.at(i);
  if (n > 0) ss.B(n - 1, 0) = 1.0;
  for (Eigen::Index r = 0; r < p; ++r) {
    const auto& tf = outs[r].second;
    if (tf.is_zero()) {
      ss.output_labels.push_back(outs[r].first);
      continue;
    }
    Polynomial rem;
    const Polynomial q = den.divide(tf.den(), &rem);
    const Polynomial num = tf.num() * q;
    if (num.degree() > n) throw Error(ErrorKind::ImproperDevice, outs[r].first + " is improper");
    const double d = num.degree() == n ? num.at(n) : 0.0;
    ss.D(r, 0) = d;
    for (int i = 0; i < n; ++i) ss.C(r, i) = num.at(i) - d * den.at(i);
    ss.output_labels.push_back(outs[r].first);
  }
  for (int i = 0; i < n; ++i) ss.state_labels.push_back("agg.x" + std::to_string(i));
  ss.input_labels = {"dp"};
  ss.validate();
  out.ss = std::move(ss);
  for (const auto& u : units) out.units.push_back(u.name);
  out.buses.assign(buses.begin(), buses.end());
  return out;
}

lti::TimeSeries voltage_loop(const design::Fleet& fleet, double k_g, const lti::TimeSeries& v_disturbance,
                             double dt) {
  if (!(k_g >= 0.0)) throw Error(ErrorKind::InvalidArgument, "K_g must be non-negative");
  std::vector<lti::StateSpaceModel> parts;
  std::vector<std::string> names;
  bool all_static = true;
  for (const auto& d : fleet.devices) {
    if (!d.realized) throw Error(ErrorKind::UnrealizedDevice, d.name + " has no reference models");
    parts.push_back(lti::to_state_space(d.ref_vq, d.name + ".", "v", "q"));
    names.push_back(d.name);
    if (!d.ref_vq.is_static()) all_static = false;
  }
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "fleet has no devices");
  const auto blk = lti::append(parts);
  const auto nd = static_cast<Eigen::Index>(parts.size());
  const auto n = blk.A.rows();
  const double dsum = blk.D.sum();
  const double loop = 1.0 + k_g * dsum;
  if ((all_static && std::abs(k_g * dsum) >= 1.0) || std::abs(loop) < 1e-12)
    throw Error(ErrorKind::AlgebraicLoopUnstable, "static voltage loop gain K_g*ΣT(∞) >= 1");
  // v = (v_ext - K_g Σ C_i x) / loop
  const MatrixXd csum = blk.C.colwise().sum();
  const MatrixXd vx = -k_g * csum / loop;
  const double vu = 1.0 / loop;
  lti::StateSpaceModel ss;
  ss.A = blk.A + blk.B.rowwise().sum() * vx;
  ss.B = blk.B.rowwise().sum() * vu;
  ss.C = MatrixXd::Zero(nd + 2, n);
  ss.D = MatrixXd::Zero(nd + 2, 1);
  ss.C.row(0) = vx;
  ss.D(0, 0) = vu;
  for (Eigen::Index i = 0; i < nd; ++i) {
    ss.C.row(2 + i) = blk.C.row(i) + blk.D(i, i) * vx;
    ss.D(2 + i, 0) = blk.D(i, i) * vu;
  }
  ss.C.row(1) = -ss.C.bottomRows(nd).colwise().sum();
  ss.D(1, 0) = -ss.D.bottomRows(nd).sum();
  ss.state_labels = blk.state_labels;
  ss.input_labels = {"v_ext"};
  ss.output_labels = {"v_pcc", "q_agg"};
  for (const auto& nm : names) ss.output_labels.push_back("q." + nm);
  return lti::simulate(ss, v_disturbance, dt);
}

std::vector<double> coi_frequency(const lti::TimeSeries& outputs,
                                  std::span<const std::pair<std::string, double>> weights) {
  double sum = 0.0;
  for (const auto& [name, w] : weights) {
    if (w < 0.0) throw Error(ErrorKind::ZeroWeightSum, "negative COI weight");
    sum += w;
  }
  if (!(sum > 0.0)) throw Error(ErrorKind::ZeroWeightSum, "COI weights sum to zero");
  std::vector<double> out(outputs.size(), 0.0);
  for (const auto& [name, w] : weights) {
    const auto& ch = outputs.channel(name);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w / sum * ch[k];
  }
  return out;
}

CoherencyGap coherency_gap(std::span<const Unit> units, const LaplacianMatrix& L, const std::string& bus,
                           double horizon, double omega_base) {
  if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  const auto loop = build_frequency_loop(units, L, omega_base);
  const auto coh = lti::to_state_space(coherent_response(units), "coh.");
  if (!loop.ss.is_stable() || !coh.is_stable())
    throw Error(ErrorKind::InvalidArgument, "coherency gap needs stable loop and coherent models");
  const auto in = loop.ss.input_index("dp." + bus);
  const auto n1 = loop.ss.states(), n2 = coh.states();

  // ‖y‖² on [0, T] for y = y∞ + C e^{At} A⁻¹ B, tail integrals taken to infinity.
  auto energy = [&](const lti::StateSpaceModel& m, double yinf) {
    if (m.states() == 0) return yinf * yinf * horizon;
    const Eigen::VectorXd a1b = m.A.partialPivLu().solve(m.B.col(0));
    const double area = -(m.C.row(0) * m.A.partialPivLu().solve(a1b))(0);
    const double tr = lti::step_transient_l2(m, 0, 0);
    return yinf * yinf * horizon + 2.0 * yinf * area + tr * tr;
  };
  const double coh_dc = coherent_response(units).dc_gain();
  const double denom = std::sqrt(std::max(energy(coh, coh_dc), 0.0));

  CoherencyGap out;
  for (const auto& name : loop.units) {
    lti::StateSpaceModel e;
    e.A = MatrixXd::Zero(n1 + n2, n1 + n2);
    e.A.topLeftCorner(n1, n1) = loop.ss.A;
    e.A.bottomRightCorner(n2, n2) = coh.A;
    e.B = MatrixXd::Zero(n1 + n2, 1);
    e.B.topRows(n1) = loop.ss.B.col(in);
    e.B.bottomRows(n2) = coh.B;
    const auto r = loop.ss.output_index("f." + name);
    e.C = MatrixXd::Zero(1, n1 + n2);
    e.C.leftCols(n1) = loop.ss.C.row(r);
    e.C.rightCols(n2) = -coh.C;
    e.D = MatrixXd::Constant(1, 1, loop.ss.D(r, in) - coh.D(0, 0));
    const double tr = lti::step_transient_l2(e, 0, 0);
    const double dc = (e.D - e.C * e.A.partialPivLu().solve(e.B))(0, 0);
    const double gap = std::sqrt(tr * tr + dc * dc * horizon);
    out.units.push_back(name);
    out.relative.push_back(gap / denom);
    out.max_relative = std::max(out.max_relative, gap / denom);
  }
  return out;
}

}  // namespace dvpp::net
