#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dvpp/design/design.hpp"
#include "dvpp/errors.hpp"
#include "dvpp/network/network.hpp"

namespace dvpp::scenario {

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class ModelKind { Aggregate, Network, Area };
const char* to_string(ModelKind k);

struct SystemBase {
  double mva = 100.0;
  double kv = 230.0;
  double hz = 50.0;
};

struct SgSpec {
  std::string name;
  std::string bus;
  double rating = 0.0;
  double h = 5.0;
  double droop = 0.01;
};

struct Event {
  enum class Kind { Load, Capacity, Outage };
  Kind kind = Kind::Load;
  double time = 0.0;
  /// bus for loads, device otherwise
  std::string target;
  /// load Δp (pu injection) or new p_capacity (pu)
  double value = 0.0;
  /// load Δq (pu injection)
  double q = 0.0;
};

struct RxMonteCarlo {
  double min_ratio = 0.4;
  double max_ratio = 2.0;
  std::size_t samples = 24;
  std::uint64_t seed = 1;
};

struct Tolerances {
  /// condition residuals
  double residual = 1e-6;
  /// frequency aggregation residual below the PLL band when following devices exist
  double hybrid = 1e-3;
  /// relative L∞ trace matching
  double trace = 0.02;
  /// seconds after each event excluded from trace matching
  double sync_window = 0.02;
};

struct Scenario {
  SystemBase base;
  std::string preset;
  ModelKind model = ModelKind::Aggregate;
  /// realized, hybrid split already applied
  design::Fleet fleet;
  std::optional<double> epsilon;
  std::vector<SgSpec> sgs;
  net::NetworkGraph network;
  std::vector<std::string> pocs;
  /// design R/X of an area
  std::optional<double> rx;
  double vq_droop_factor = 0.5;
  std::vector<Event> events;
  std::optional<RxMonteCarlo> montecarlo;
  double dt = 1e-3;
  double t_end = 10.0;
  /// channel names or `prefix*` patterns; empty selects the defaults
  std::vector<std::string> outputs;
  Tolerances tol;

  /// Buses a load may target.
  std::vector<std::string> known_buses() const;
  /// Network units: active fleet devices plus synchronous generators.
  std::vector<net::Unit> units(const design::Fleet& fleet) const;
};

/// Built-in scenario text for `case1`, `case2`, `case3`; throws SemanticError otherwise.
std::string_view preset_text(std::string_view name);

/// Sections given in `text` replace the preset's; [system] and [tdes] keys override individually.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

}  // namespace dvpp::scenario
