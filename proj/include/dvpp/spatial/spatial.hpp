#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dvpp/design/design.hpp"
#include "dvpp/lti/rational_tf.hpp"
#include "dvpp/network/network.hpp"

namespace dvpp::spatial {

/// Line impedance in pu. `matrix()` is the rotation taking (p, q) to (p′, q′).
struct RotationParams {
  double R = 0.0;
  double X = 1.0;
  double Z = 1.0;

  static RotationParams from_rx(double r, double x);
  /// Unit impedance with the given R/X.
  static RotationParams from_ratio(double rx);
  void validate() const;
  Eigen::Matrix2d matrix() const;
};

std::pair<double, double> rotate_power(double p, double q, const RotationParams& params);
std::pair<double, double> unrotate_power(double p_rot, double q_rot, const RotationParams& params);

/// Residuals of the lossless two-bus flow equations in rotational powers.
std::pair<double, double> lossless_flow_residual(double delta, double v_l, double v_m, double z, double p_rot,
                                                 double q_rot);

/// Row [X/Z·T, −R/Z·T] mapping summed (Δp, Δq) at the POCs to Δf_poc.
std::array<lti::RationalTF, 2> poc_coupled_spec(const lti::RationalTF& tdes_pf, const RotationParams& params);

/// Edge `b` is 1/Z; edge `rx` is the line R/X (NaN means the homogeneous ratio).
struct AreaModel {
  net::NetworkGraph graph;
  design::Fleet devices;
  std::vector<std::string> pocs;
  std::optional<double> homogeneous_ratio;
  /// static q′ droop per device, as a multiple of 1/D_q
  double vq_droop_factor = 0.5;

  void validate() const;
};

enum class AreaMode { Strict, PerturbedPlant };

/// Frequency loop in rotational coordinates. Inputs `dp'.<bus>`, `dq'.<bus>`.
/// Outputs: the loop channels with `p'.<unit>` for the rotational device
/// power, `f_poc.<poc>`, `dp'_poc` (summed rotational disturbance),
/// `v.<bus>`, `q'.<unit>`, and the physical `p.<unit>`, `q.<unit>`.
net::ClosedLoopModel build_area_model(const AreaModel& area, AreaMode mode = AreaMode::Strict,
                                      double omega_base = net::kOmegaBase);

/// The area's design ratio: the homogeneous ratio if set, else the common edge ratio.
double design_ratio(const AreaModel& area);

/// Copy of `graph` with per-edge ratios replaced, in edge order.
net::NetworkGraph with_line_ratios(const net::NetworkGraph& graph, const std::vector<double>& ratios);

/// Sample i draws from its own stream seeded with seed + i.
std::vector<std::vector<double>> sample_rx(double min_ratio, double max_ratio, std::size_t n_lines,
                                           std::size_t n_samples, std::uint64_t seed);

/// Uniform [0, 1) from the top 53 bits.
double uniform01(std::uint64_t bits);

}  // namespace dvpp::spatial
