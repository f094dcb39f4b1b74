#pragma once

#include <Eigen/Core>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dvpp/design/design.hpp"
#include "dvpp/lti/state_space.hpp"
#include "dvpp/lti/time_series.hpp"

namespace dvpp::net {

using lti::RationalTF;

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  /// susceptance, pu
  double b = 0.0;
  /// R/X of the line; NaN when unspecified
  double rx = std::numeric_limits<double>::quiet_NaN();
};

struct NetworkGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<std::string> boundary;

  std::size_t add_node(const std::string& name);
  /// Index of a node; throws SemanticError for unknown names.
  std::size_t index(const std::string& name) const;
  bool has(const std::string& name) const;
  void add_edge(const std::string& from, const std::string& to, double b,
                double rx = std::numeric_limits<double>::quiet_NaN());
  bool connected() const;
  /// Positive susceptances, no self-loops, connected.
  void validate() const;
};

struct LaplacianMatrix {
  Eigen::MatrixXd L;
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t index(const std::string& label) const;
  /// Zero row sums, non-positive off-diagonals, symmetric PSD, one zero
  /// eigenvalue per connected component (only one when connected).
  bool satisfies_invariants(double tol = 1e-9) const;
};

LaplacianMatrix build_laplacian(const NetworkGraph& graph);

/// Schur complement onto `keep` (in the order given).
LaplacianMatrix kron_reduce(const LaplacianMatrix& L, std::span<const std::string> keep);

/// One frequency-participating unit of the loop: a forming device (T: Δp -> Δf),
/// a following device (T: Δf -> Δp), or a synchronous generator (forming).
struct Unit {
  std::string name;
  std::string bus;
  design::Role role = design::Role::Forming;
  RationalTF tf;
  /// COI weight
  double weight = 1.0;
};

/// Swing-equation machine 1/(2 H S s + S/R) on the system base.
Unit make_sg_unit(const std::string& name, const std::string& bus, double rating_mva, double h,
                  double droop, double base_mva);

/// Active units of the fleet placed at their buses, COI weight = rating.
std::vector<Unit> units_from_fleet(const design::Fleet& fleet);

/// Electrical angle rate per pu frequency deviation, 2π·50 Hz.
inline constexpr double kOmegaBase = 100.0 * 3.14159265358979323846;

struct ClosedLoopModel {
  lti::StateSpaceModel ss;
  std::vector<std::string> units;
  std::vector<std::string> buses;
  std::vector<double> coi_weights;
};

/// Closed-loop frequency dynamics. Inputs are `dp.<bus>` (injection
/// disturbances); outputs `f.<unit>`, `p.<unit>` (unit injection), `f.<bus>`,
/// `f_coi` and `theta.<bus>` (angle up to a common offset).
/// Line flows are Δp_e = L θ with θ' = omega_base Δf.
ClosedLoopModel build_frequency_loop(std::span<const Unit> units, const LaplacianMatrix& L,
                                     double omega_base = kOmegaBase);

/// Forming device k sits at node k of L; following devices attach at their bus
/// label if present in L, otherwise at node k.
ClosedLoopModel build_frequency_loop(const design::Fleet& fleet, const LaplacianMatrix& L,
                                     double omega_base = kOmegaBase);

/// Σ_forming T^-1 + Σ_following T^fp, inverted.
RationalTF coherent_response(std::span<const Unit> units);
RationalTF coherent_response(const design::Fleet& fleet);

struct CoherencyGap {
  std::vector<std::string> units;
  /// ‖f_i − f_coh‖₂ / ‖f_coh‖₂ on [0, horizon], continuous time
  std::vector<double> relative;
  double max_relative = 0.0;
};

/// Unit step injected at `bus`: gap between each unit's frequency and the
/// coherent prediction coherent_response(units)·step. The numerator is the
/// exact infinite-horizon L2 norm (the error decays), so the instantaneous
/// pre-synchronization transient is weighted by its true duration.
CoherencyGap coherency_gap(std::span<const Unit> units, const LaplacianMatrix& L, const std::string& bus,
                           double horizon, double omega_base = kOmegaBase);

/// Single-bus coherent model driven by the total disturbance: input `dp`,
/// outputs `f.<bus>` for every bus, `f.<unit>`, `p.<unit>`, `f_coi`. All
/// outputs share one denominator; pass `common_den` (a multiple of the model's
/// own denominator) to keep the realization fixed across parameter changes.
ClosedLoopModel build_aggregate_model(std::span<const Unit> units, std::span<const std::string> buses,
                                      const lti::Polynomial& common_den = lti::Polynomial());

/// Least common denominator of the aggregate model's outputs.
lti::Polynomial aggregate_denominator(std::span<const Unit> units);

/// Least common multiple of two polynomials (roots matched within the cancellation tolerance).
lti::Polynomial poly_lcm(const lti::Polynomial& a, const lti::Polynomial& b);

/// Δv_pcc = Δv_ext + K_g Δq_agg with Δq_agg = -Σ T_i^vq Δv_pcc. Returns
/// `v_pcc`, `q_agg` and `q.<device>`. The disturbance is the `v_ext` channel,
/// or the only channel.
lti::TimeSeries voltage_loop(const design::Fleet& fleet, double k_g, const lti::TimeSeries& v_disturbance,
                             double dt);

std::vector<double> coi_frequency(const lti::TimeSeries& outputs,
                                  std::span<const std::pair<std::string, double>> weights);

}  // namespace dvpp::net
