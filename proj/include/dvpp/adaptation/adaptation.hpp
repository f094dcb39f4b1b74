#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dvpp/design/design.hpp"

namespace dvpp::adapt {

struct Capacity {
  double p_capacity = 0.0;
  double s_rating = 0.0;
  double q_capacity = 0.0;
};

/// Per-device capability, all in pu on the system base.
struct CapacityState {
  std::map<std::string, Capacity> devices;

  static CapacityState from_fleet(const design::Fleet& fleet, double base_mva);
  const Capacity& at(const std::string& name) const;
};

struct CapacityEvent {
  double time = 0.0;
  std::string device;
  double p_capacity = 0.0;
};

double q_capability(double s_rating, double p_capacity);

/// Renormalizes LPF DC gains on the channel in proportion to p (fp) or q (vq)
/// capacity, then rebuilds complements and reference models.
design::Fleet update_dc_gains(const design::Fleet& fleet, const CapacityState& caps, design::Channel channel);

std::pair<design::Fleet, CapacityState> apply_capacity_event(const design::Fleet& fleet, const CapacityState& caps,
                                                             const CapacityEvent& event);

struct AdpfSnapshot {
  std::vector<double> w;
  std::vector<std::string> columns;
  /// magnitude[k][c] = |m_c(j w_k)|
  std::vector<std::vector<double>> magnitude;
  /// |Σ m(j w_k) - 1| per channel, fp then vq
  std::vector<std::pair<double, double>> sum_residual;

  void write_csv(std::ostream& os) const;
};

AdpfSnapshot adpf_snapshot(const design::Fleet& fleet, std::span<const double> freq_grid);

}  // namespace dvpp::adapt
