#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dvpp/lti/rational_tf.hpp"

namespace dvpp::design {

using lti::RationalTF;

enum class Channel { Fp, Vq, FpPrime };
enum class FactorKind { Lpf, Hpf, Bpf, Complement };
enum class Role { Forming, Following };

const char* to_string(Channel c);
const char* to_string(FactorKind k);
const char* to_string(Role r);

/// Aggregate specification diag(T_pf, T_qv).
struct DesiredBehavior {
  double hp = 0.0;
  double dp = 1.0;
  double dq = 1.0;
  RationalTF tf_pf;
  /// Δq -> Δv map, or the Δv -> Δq map itself when direction_vq is set.
  RationalTF tf_qv;
  bool direction_vq = false;
  /// Low-pass time constant used when inverting tf_qv; 0 disables augmentation.
  double vq_filter_tau = 0.01;

  /// Target for the summed Δv -> Δq reference models.
  RationalTF vq_target() const;
};

DesiredBehavior make_tdes(double hp, double dp, double dq);

struct ParticipationFactor {
  FactorKind kind = FactorKind::Lpf;
  double tau = 0.0;
  /// Second (faster) time constant of a band-pass factor.
  double tau_high = 0.0;
  /// DC gain; zero for HPF/BPF by definition.
  double mu = 0.0;
  /// Multiplier on HPF/BPF/complement shapes (splitting one factor across copies).
  double share = 1.0;
  Channel channel = Channel::Fp;
  RationalTF tf;
  /// For complement factors: the factors it completes.
  std::vector<ParticipationFactor> completes;

  std::complex<double> operator()(std::complex<double> s) const { return tf(s); }
  double dc_gain() const;
  bool is_zero() const { return tf.is_zero(); }
};

ParticipationFactor make_adpf(FactorKind kind, double tau, double mu, Channel channel,
                              double tau_high = 0.0);

/// Scales gain and shape by k (k * m(s)).
ParticipationFactor scaled(const ParticipationFactor& f, double k);

/// 1 - Σ m_i(s), canonicalized, with an exactly zero DC term when Σ μ = 1.
ParticipationFactor complete_fleet(std::span<const ParticipationFactor> factors, Channel channel);

struct DeviceSpec {
  std::string name;
  Role role = Role::Forming;
  std::string bus;
  /// MVA
  double rating = 0.0;
  double tau_dc = 0.0;
  /// pu on the system base
  double p_capacity = 0.0;
  std::optional<ParticipationFactor> factor_fp;
  std::optional<ParticipationFactor> factor_vq;
  /// T^pf for forming devices, T^fp for following devices.
  RationalTF ref_pf;
  RationalTF ref_vq;
  bool realized = false;

  /// Devices whose frequency factor is identically zero take no part in the dynamics.
  bool active() const { return factor_fp && !factor_fp->is_zero(); }
};

struct Fleet {
  std::vector<DeviceSpec> devices;
  DesiredBehavior desired;
  double tau_pll = 0.01;
  /// PLL filter order; 0 picks the smallest order making each model proper.
  int pll_order = 0;

  void validate() const;
  const DeviceSpec& device(const std::string& name) const;
  DeviceSpec& device(const std::string& name);
  bool has_following() const;
  bool has_forming() const;
};

struct ParticipationReport {
  /// max over the grid of |Σ m_i(jω) - 1|
  double max_deviation = 0.0;
  /// |Σ m_i(0) - 1|
  double dc_residual = 0.0;
};

ParticipationReport check_participation(const Fleet& fleet, Channel channel,
                                        std::span<const double> freq_grid);

/// Poles appended at this rate to repair improper reference models.
inline constexpr double kProperFixRate = 1000.0;

std::pair<RationalTF, RationalTF> disaggregate_forming(const DesiredBehavior& desired,
                                                       const ParticipationFactor& factor_fp,
                                                       const ParticipationFactor& factor_vq);

/// order 0 selects the smallest PLL filter order >= 1 making the model proper.
std::pair<RationalTF, RationalTF> disaggregate_following(const DesiredBehavior& desired,
                                                         const ParticipationFactor& factor_fp,
                                                         const ParticipationFactor& factor_vq,
                                                         double tau_pll, int order = 0);

/// Rebuilds every complement-kind factor on the channel from the other
/// factors, splitting the complement among complement devices by share.
void close_participation(Fleet& fleet, Channel channel);

/// (Re)derives the reference models of every device.
void realize(Fleet& fleet);

struct AggregationReport {
  /// Relative errors; "low" covers ω at or below band_edge, "high" the rest.
  double freq_low = 0.0;
  double freq_high = 0.0;
  double volt_low = 0.0;
  double volt_high = 0.0;
  /// 0.1/τ_pll for fleets with following devices, +inf otherwise.
  double band_edge = 0.0;
  bool empty = false;
};

AggregationReport verify_aggregation(const Fleet& fleet, std::span<const double> freq_grid);

Fleet hybrid_split(const Fleet& fleet, double epsilon);

std::vector<double> log_grid(double wmin, double wmax, int points);

}  // namespace dvpp::design
