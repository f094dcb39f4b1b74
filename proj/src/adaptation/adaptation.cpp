#include "dvpp/adaptation/adaptation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dvpp/errors.hpp"

namespace dvpp::adapt {

using design::Channel;
using design::FactorKind;
using design::Fleet;

CapacityState CapacityState::from_fleet(const Fleet& fleet, double base_mva) {
  if (!(base_mva > 0.0)) throw Error(ErrorKind::InvalidArgument, "base power must be positive");
  CapacityState caps;
  for (const auto& d : fleet.devices) {
    Capacity c;
    c.s_rating = d.rating / base_mva;
    c.p_capacity = d.p_capacity;
    c.q_capacity = q_capability(c.s_rating, c.p_capacity);
    caps.devices[d.name] = c;
  }
  return caps;
}

const Capacity& CapacityState::at(const std::string& name) const {
  const auto it = devices.find(name);
  if (it == devices.end()) throw Error(ErrorKind::UnknownDevice, "no capacity entry for '" + name + "'");
  return it->second;
}

double q_capability(double s_rating, double p_capacity) {
  if (p_capacity < 0.0) throw Error(ErrorKind::InvalidArgument, "negative active capacity");
  if (p_capacity > s_rating * (1.0 + 1e-12))
    throw Error(ErrorKind::CapacityExceedsRating, "active capacity above apparent rating");
  return std::sqrt(std::max(0.0, s_rating * s_rating - p_capacity * p_capacity));
}

Fleet update_dc_gains(const Fleet& fleet, const CapacityState& caps, Channel channel) {
  Fleet out = fleet;
  const bool vq = channel == Channel::Vq;
  auto weight = [&](const design::DeviceSpec& d) {
    const auto& c = caps.at(d.name);
    return vq ? c.q_capacity : c.p_capacity;
  };
  auto lpf = [&](const design::DeviceSpec& d) {
    const auto& f = vq ? d.factor_vq : d.factor_fp;
    return f && f->kind == FactorKind::Lpf;
  };
  double total = 0.0;
  for (const auto& d : out.devices)
    if (lpf(d)) total += weight(d);
  if (!(total > 0.0)) throw Error(ErrorKind::AllCapacitiesZero, "no LPF device has capacity on this channel");
  for (auto& d : out.devices) {
    if (!lpf(d)) continue;
    auto& f = vq ? d.factor_vq : d.factor_fp;
    f->mu = weight(d) / total;
    f->tf = lti::RationalTF::first_order(f->mu, f->tau);
  }
  design::close_participation(out, channel);
  design::realize(out);
  return out;
}

std::pair<Fleet, CapacityState> apply_capacity_event(const Fleet& fleet, const CapacityState& caps,
                                                     const CapacityEvent& event) {
  (void)fleet.device(event.device);
  CapacityState next = caps;
  const auto it = next.devices.find(event.device);
  if (it == next.devices.end()) throw Error(ErrorKind::UnknownDevice, "no capacity entry for '" + event.device + "'");
  Capacity& c = it->second;
  if (event.p_capacity == c.p_capacity) return {fleet, caps};
  c.q_capacity = q_capability(c.s_rating, event.p_capacity);
  c.p_capacity = event.p_capacity;
  Fleet out = update_dc_gains(fleet, next, Channel::Fp);
  double q_total = 0.0;
  for (const auto& d : out.devices)
    if (d.factor_vq && d.factor_vq->kind == FactorKind::Lpf) q_total += next.at(d.name).q_capacity;
  if (q_total > 0.0) out = update_dc_gains(out, next, Channel::Vq);
  out.device(event.device).p_capacity = event.p_capacity;
  return {out, next};
}

AdpfSnapshot adpf_snapshot(const Fleet& fleet, std::span<const double> freq_grid) {
  AdpfSnapshot s;
  s.w.assign(freq_grid.begin(), freq_grid.end());
  std::vector<std::vector<std::complex<double>>> resp;
  std::vector<bool> is_vq;
  for (const auto& d : fleet.devices) {
    if (d.factor_fp) {
      s.columns.push_back(d.name + "." + design::to_string(d.factor_fp->channel));
      resp.push_back(d.factor_fp->tf.response(freq_grid));
      is_vq.push_back(false);
    }
    if (d.factor_vq) {
      s.columns.push_back(d.name + ".vq");
      resp.push_back(d.factor_vq->tf.response(freq_grid));
      is_vq.push_back(true);
    }
  }
  for (std::size_t k = 0; k < s.w.size(); ++k) {
    std::vector<double> row;
    std::complex<double> sp = 0.0, sq = 0.0;
    for (std::size_t c = 0; c < resp.size(); ++c) {
      row.push_back(std::abs(resp[c][k]));
      (is_vq[c] ? sq : sp) += resp[c][k];
    }
    s.magnitude.push_back(std::move(row));
    s.sum_residual.emplace_back(std::abs(sp - 1.0), std::abs(sq - 1.0));
  }
  return s;
}

void AdpfSnapshot::write_csv(std::ostream& os) const {
  os << "w";
  for (const auto& c : columns) os << ',' << c;
  os << ",sum_fp_residual,sum_vq_residual\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9e", v);
    os << buf;
  };
  for (std::size_t k = 0; k < w.size(); ++k) {
    put(w[k]);
    for (double v : magnitude[k]) {
      os << ',';
      put(v);
    }
    os << ',';
    put(sum_residual[k].first);
    os << ',';
    put(sum_residual[k].second);
    os << '\n';
  }
}

}  // namespace dvpp::adapt
