#include "dvpp/design/design.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "dvpp/errors.hpp"

namespace dvpp::design {

using lti::Polynomial;
using cd = std::complex<double>;

const char* to_string(Channel c) {
  switch (c) {
    case Channel::Fp: return "fp";
    case Channel::Vq: return "vq";
    case Channel::FpPrime: return "fp'";
  }
  return "?";
}

const char* to_string(FactorKind k) {
  switch (k) {
    case FactorKind::Lpf: return "lpf";
    case FactorKind::Hpf: return "hpf";
    case FactorKind::Bpf: return "bpf";
    case FactorKind::Complement: return "complement";
  }
  return "?";
}

const char* to_string(Role r) { return r == Role::Forming ? "forming" : "following"; }

RationalTF DesiredBehavior::vq_target() const {
  if (direction_vq) return tf_qv;
  RationalTF inv = tf_qv.inverse();
  if (vq_filter_tau > 0.0) inv = inv * RationalTF::first_order(1.0, vq_filter_tau);
  if (!inv.is_proper())
    throw Error(ErrorKind::ImproperAfterAugmentation, "inverse of the q-v specification stays improper");
  return inv;
}

DesiredBehavior make_tdes(double hp, double dp, double dq) {
  if (!(dp > 0.0) || !(dq > 0.0)) throw Error(ErrorKind::NonPositiveDroop, "D_p and D_q must be positive");
  if (!(hp >= 0.0)) throw Error(ErrorKind::InvalidArgument, "H_p must be non-negative");
  DesiredBehavior d;
  d.hp = hp;
  d.dp = dp;
  d.dq = dq;
  d.tf_pf = RationalTF({1.0}, {dp, hp});
  d.tf_qv = RationalTF::constant(dq);
  return d;
}

namespace {

RationalTF shape(FactorKind kind, double tau, double tau_high, double mu, double share) {
  switch (kind) {
    case FactorKind::Lpf: return RationalTF::first_order(mu, tau);
    case FactorKind::Hpf: return share * RationalTF({0.0, tau}, {1.0, tau});
    case FactorKind::Bpf:
      return share * RationalTF(Polynomial({0.0, tau}), Polynomial({1.0, tau}) * Polynomial({1.0, tau_high}));
    case FactorKind::Complement: break;
  }
  return {};
}

const std::optional<ParticipationFactor>& factor_of(const DeviceSpec& d, Channel c) {
  return c == Channel::Vq ? d.factor_vq : d.factor_fp;
}

std::optional<ParticipationFactor>& factor_of(DeviceSpec& d, Channel c) {
  return c == Channel::Vq ? d.factor_vq : d.factor_fp;
}

RationalTF pll_filter(double tau_pll, int order) {
  return RationalTF(Polynomial({1.0}), Polynomial({1.0, tau_pll}).pow(order));
}

}  // namespace

double ParticipationFactor::dc_gain() const { return tf.is_zero() ? 0.0 : tf.dc_gain(); }

ParticipationFactor make_adpf(FactorKind kind, double tau, double mu, Channel channel, double tau_high) {
  if (kind == FactorKind::Complement)
    throw Error(ErrorKind::InvalidArgument, "complement factors come from complete_fleet");
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "filter time constant must be positive");
  ParticipationFactor f;
  f.kind = kind;
  f.tau = tau;
  f.channel = channel;
  if (kind == FactorKind::Lpf) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw Error(ErrorKind::InvalidGain, "LPF gain must lie in [0, 1]");
    f.mu = mu;
  } else {
    f.mu = 0.0;
  }
  if (kind == FactorKind::Bpf) {
    if (!(tau_high > 0.0) || !(tau > tau_high))
      throw Error(ErrorKind::InvalidBandSplit, "band-pass needs tau_low > tau_high > 0");
    f.tau_high = tau_high;
  }
  f.tf = shape(kind, f.tau, f.tau_high, f.mu, 1.0);
  return f;
}

ParticipationFactor scaled(const ParticipationFactor& f, double k) {
  ParticipationFactor out = f;
  out.mu *= k;
  out.share *= k;
  out.tf = k * f.tf;
  return out;
}

ParticipationFactor complete_fleet(std::span<const ParticipationFactor> factors, Channel channel) {
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to complete");
  RationalTF sum;
  double mu_sum = 0.0;
  for (const auto& f : factors) {
    sum = sum + f.tf;
    mu_sum += f.dc_gain();
  }
  if (mu_sum > 1.0 + 1e-12)
    throw Error(ErrorKind::OverSubscribed, "DC gains sum to " + std::to_string(mu_sum));
  RationalTF c = RationalTF::constant(1.0) - sum;
  if (std::abs(1.0 - mu_sum) <= 1e-12 && !c.is_zero() && c.num().at(0) != 0.0) {
    auto coeffs = c.num().coeffs();
    coeffs[0] = 0.0;
    c = lti::canonicalize(Polynomial(coeffs), c.den());
  }
  ParticipationFactor out;
  out.kind = FactorKind::Complement;
  out.channel = channel;
  out.mu = std::abs(1.0 - mu_sum) <= 1e-12 ? 0.0 : 1.0 - mu_sum;
  out.tf = c;
  out.completes.assign(factors.begin(), factors.end());
  return out;
}

void Fleet::validate() const {
  if (devices.empty()) throw Error(ErrorKind::InvalidArgument, "fleet has no devices");
  std::set<std::string> names;
  for (const auto& d : devices)
    if (!names.insert(d.name).second) throw Error(ErrorKind::InvalidArgument, "duplicate device '" + d.name + "'");
}

const DeviceSpec& Fleet::device(const std::string& name) const {
  for (const auto& d : devices)
    if (d.name == name) return d;
  throw Error(ErrorKind::UnknownDevice, "no device '" + name + "'");
}

DeviceSpec& Fleet::device(const std::string& name) {
  for (auto& d : devices)
    if (d.name == name) return d;
  throw Error(ErrorKind::UnknownDevice, "no device '" + name + "'");
}

bool Fleet::has_following() const {
  for (const auto& d : devices)
    if (d.role == Role::Following && d.active()) return true;
  return false;
}

bool Fleet::has_forming() const {
  for (const auto& d : devices)
    if (d.role == Role::Forming && d.active()) return true;
  return false;
}

ParticipationReport check_participation(const Fleet& fleet, Channel channel, std::span<const double> freq_grid) {
  ParticipationReport r;
  std::vector<cd> sum(freq_grid.size(), 0.0);
  double dc = 0.0;
  for (const auto& d : fleet.devices) {
    const auto& f = factor_of(d, channel);
    if (!f) throw Error(ErrorKind::MissingFactor, d.name + " has no " + to_string(channel) + " factor");
    if (f->is_zero()) continue;
    const auto resp = f->tf.response(freq_grid);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += resp[k];
    dc += f->dc_gain();
  }
  for (const auto& v : sum) r.max_deviation = std::max(r.max_deviation, std::abs(v - 1.0));
  r.dc_residual = std::abs(dc - 1.0);
  return r;
}

std::pair<RationalTF, RationalTF> disaggregate_forming(const DesiredBehavior& desired,
                                                       const ParticipationFactor& factor_fp,
                                                       const ParticipationFactor& factor_vq) {
  RationalTF pf = factor_fp.tf.inverse() * desired.tf_pf;
  const RationalTF fix = RationalTF::first_order(1.0, 1.0 / kProperFixRate);
  while (!pf.is_proper()) pf = pf * fix;
  RationalTF vq = factor_vq.tf * desired.vq_target();
  if (!vq.is_proper()) throw Error(ErrorKind::ImproperAfterAugmentation, "v-q reference model is improper");
  return {pf, vq};
}

std::pair<RationalTF, RationalTF> disaggregate_following(const DesiredBehavior& desired,
                                                         const ParticipationFactor& factor_fp,
                                                         const ParticipationFactor& factor_vq,
                                                         double tau_pll, int order) {
  if (!(tau_pll > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau_pll must be positive");
  const RationalTF base = factor_fp.tf * desired.tf_pf.inverse();
  const int d = order > 0 ? order : std::max(1, -base.relative_degree());
  const RationalTF filt = pll_filter(tau_pll, d);
  RationalTF fp = base * filt;
  RationalTF vq = factor_vq.tf * desired.vq_target() * filt;
  if (!fp.is_proper() || !vq.is_proper())
    throw Error(ErrorKind::ImproperAfterAugmentation, "PLL filter order too low for a proper model");
  return {fp, vq};
}

void close_participation(Fleet& fleet, Channel channel) {
  std::vector<ParticipationFactor> others;
  double shares = 0.0;
  for (const auto& d : fleet.devices) {
    const auto& f = factor_of(d, channel);
    if (!f) continue;
    if (f->kind == FactorKind::Complement) {
      shares += f->share;
    } else {
      others.push_back(*f);
    }
  }
  if (shares <= 0.0) return;
  if (others.empty()) {
    for (auto& d : fleet.devices) {
      auto& f = factor_of(d, channel);
      if (f && f->kind == FactorKind::Complement) {
        const double share = f->share;
        f->tf = RationalTF::constant(share / shares);
        f->mu = share / shares;
      }
    }
    return;
  }
  const ParticipationFactor base = complete_fleet(others, channel);
  for (auto& d : fleet.devices) {
    auto& f = factor_of(d, channel);
    if (!f || f->kind != FactorKind::Complement) continue;
    const double share = f->share;
    auto next = scaled(base, share / shares);
    next.share = share;
    f = next;
  }
}

void realize(Fleet& fleet) {
  for (auto& d : fleet.devices) {
    if (!d.factor_fp || !d.factor_vq)
      throw Error(ErrorKind::MissingFactor, d.name + " lacks a participation factor");
    if (d.role == Role::Forming) {
      if (d.factor_fp->is_zero()) {
        d.ref_pf = RationalTF();
        d.ref_vq = d.factor_vq->tf * fleet.desired.vq_target();
      } else {
        std::tie(d.ref_pf, d.ref_vq) = disaggregate_forming(fleet.desired, *d.factor_fp, *d.factor_vq);
      }
    } else {
      std::tie(d.ref_pf, d.ref_vq) =
          disaggregate_following(fleet.desired, *d.factor_fp, *d.factor_vq, fleet.tau_pll, fleet.pll_order);
    }
    d.realized = true;
  }
}

AggregationReport verify_aggregation(const Fleet& fleet, std::span<const double> freq_grid) {
  AggregationReport r;
  r.band_edge = fleet.has_following() ? 0.1 / fleet.tau_pll : std::numeric_limits<double>::infinity();
  const double inf = std::numeric_limits<double>::infinity();
  if (fleet.devices.empty()) {
    r.empty = true;
    r.freq_low = r.freq_high = r.volt_low = r.volt_high = inf;
    return r;
  }
  for (const auto& d : fleet.devices)
    if (!d.realized) throw Error(ErrorKind::UnrealizedDevice, d.name + " has no reference models");
  const RationalTF target_q = fleet.desired.vq_target();
  bool any_p = false;
  for (const double w : freq_grid) {
    const cd s(0.0, w);
    cd adm = 0.0, vq = 0.0;
    for (const auto& d : fleet.devices) {
      if (!d.ref_pf.is_zero()) {
        any_p = true;
        adm += d.role == Role::Forming ? 1.0 / d.ref_pf(s) : d.ref_pf(s);
      }
      vq += d.ref_vq(s);
    }
    const cd tp = fleet.desired.tf_pf(s);
    const double ef = std::abs(adm) > 0.0 ? std::abs(1.0 / adm - tp) / std::abs(tp) : inf;
    const cd tq = target_q(s);
    const double ev = std::abs(vq - tq) / std::max(std::abs(tq), 1e-300);
    if (w <= r.band_edge) {
      r.freq_low = std::max(r.freq_low, ef);
      r.volt_low = std::max(r.volt_low, ev);
    } else {
      r.freq_high = std::max(r.freq_high, ef);
      r.volt_high = std::max(r.volt_high, ev);
    }
  }
  if (!any_p) {
    r.empty = true;
    r.freq_low = r.freq_high = inf;
  }
  return r;
}

Fleet hybrid_split(const Fleet& fleet, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in [0, 1]");
  Fleet out;
  out.desired = fleet.desired;
  out.tau_pll = fleet.tau_pll;
  out.pll_order = fleet.pll_order;
  for (const auto& d : fleet.devices) {
    if (d.role != Role::Forming) throw Error(ErrorKind::InvalidArgument, "hybrid_split expects an all-forming fleet");
    auto copy = [&](double k, Role role, std::string name) {
      DeviceSpec c = d;
      c.name = std::move(name);
      c.role = role;
      c.rating = k * d.rating;
      c.p_capacity = k * d.p_capacity;
      if (d.factor_fp) c.factor_fp = scaled(*d.factor_fp, k);
      if (d.factor_vq) c.factor_vq = scaled(*d.factor_vq, k);
      c.realized = false;
      return c;
    };
    if (epsilon > 0.0) out.devices.push_back(copy(epsilon, Role::Forming, d.name));
    if (epsilon < 1.0) out.devices.push_back(copy(1.0 - epsilon, Role::Following, d.name + "_foll"));
  }
  realize(out);
  return out;
}

std::vector<double> log_grid(double wmin, double wmax, int points) {
  if (!(wmin > 0.0) || !(wmax > wmin) || points < 2)
    throw Error(ErrorKind::InvalidArgument, "log grid needs 0 < wmin < wmax and >= 2 points");
  std::vector<double> w(static_cast<std::size_t>(points));
  const double a = std::log10(wmin), b = std::log10(wmax);
  for (int i = 0; i < points; ++i) w[i] = std::pow(10.0, a + (b - a) * i / (points - 1));
  return w;
}

}  // namespace dvpp::design
