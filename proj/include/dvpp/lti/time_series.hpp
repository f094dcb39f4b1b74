#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dvpp::lti {

/// Uniformly sampled signals sharing one time axis.
struct TimeSeries {
  std::vector<double> t;
  std::vector<std::pair<std::string, std::vector<double>>> channels;

  static TimeSeries uniform(double dt, std::size_t samples);

  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  std::size_t size() const { return t.size(); }

  bool has(const std::string& name) const;
  /// Throws MissingChannel.
  const std::vector<double>& channel(const std::string& name) const;
  std::vector<double>& channel(const std::string& name);
  std::vector<double>& add(const std::string& name, std::vector<double> values = {});

  /// Checks the shared-length and constant-spacing invariants.
  void validate() const;

  /// CSV with header `t,<channels...>` and %.9e values.
  void write_csv(std::ostream& os) const;
};

}  // namespace dvpp::lti
