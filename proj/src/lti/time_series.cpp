#include "dvpp/lti/time_series.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dvpp/errors.hpp"

namespace dvpp::lti {

TimeSeries TimeSeries::uniform(double dt, std::size_t samples) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  TimeSeries ts;
  ts.t.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) ts.t[k] = static_cast<double>(k) * dt;
  return ts;
}

bool TimeSeries::has(const std::string& name) const {
  for (const auto& [n, v] : channels)
    if (n == name) return true;
  return false;
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
  for (const auto& [n, v] : channels)
    if (n == name) return v;
  throw Error(ErrorKind::MissingChannel, "no channel '" + name + "'");
}

std::vector<double>& TimeSeries::channel(const std::string& name) {
  for (auto& [n, v] : channels)
    if (n == name) return v;
  throw Error(ErrorKind::MissingChannel, "no channel '" + name + "'");
}

std::vector<double>& TimeSeries::add(const std::string& name, std::vector<double> values) {
  if (values.empty()) values.assign(t.size(), 0.0);
  if (values.size() != t.size())
    throw Error(ErrorKind::DimensionMismatch, "channel '" + name + "' length differs from t");
  channels.emplace_back(name, std::move(values));
  return channels.back().second;
}

void TimeSeries::validate() const {
  for (const auto& [n, v] : channels)
    if (v.size() != t.size())
      throw Error(ErrorKind::DimensionMismatch, "channel '" + n + "' length differs from t");
  if (t.size() < 2) return;
  const double h = t[1] - t[0];
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "time axis not increasing");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs((t[k] - t[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(t[k])))
      throw Error(ErrorKind::InvalidArgument, "time axis not uniform");
}

void TimeSeries::write_csv(std::ostream& os) const {
  os << 't';
  for (const auto& [n, v] : channels) os << ',' << n;
  os << '\n';
  char buf[32];
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9e", t[k]);
    os << buf;
    for (const auto& [n, v] : channels) {
      std::snprintf(buf, sizeof buf, "%.9e", v[k]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace dvpp::lti
