#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "dvpp/errors.hpp"
#include "dvpp/scenario/runner.hpp"
#include "dvpp/scenario/scenario.hpp"
#include "gen.hpp"

using namespace dvpp;
using namespace dvpp::scenario;

namespace {

bool throws_kind(auto&& fn, ErrorKind k) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

Scenario preset(const std::string& name, const std::string& extra = {}) {
  return parse_scenario("[system]\npreset = " + name + "\n" + extra);
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double peak(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("presets parse with the documented layout") {
  const auto c1 = preset("case1");
  CHECK(c1.model == ModelKind::Network);
  CHECK(c1.fleet.devices.size() == 3);
  CHECK(c1.events.size() == 1);
  const auto c2 = preset("case2");
  CHECK(c2.sgs.size() == 2);
  CHECK(c2.fleet.has_following());
  const auto c3 = preset("case3");
  CHECK(c3.model == ModelKind::Area);
  CHECK(c3.pocs.size() == 2);
  REQUIRE(c3.montecarlo);
  CHECK(c3.montecarlo->samples == 24);
  CHECK(throws_kind([] { preset("case9"); }, ErrorKind::ParseError));
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_scenario("[system]\npreset = case1\n[events]\nload x bus2 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 6);
  }
  try {
    parse_scenario("[bogus]\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  CHECK(throws_kind([] { parse_scenario("[system]\npreset = case1\nwho = 3\n"); }, ErrorKind::ParseError));
}

TEST_CASE("unsorted events are rejected") {
  CHECK(throws_kind([] { preset("case1", "[events]\nload 2 bus2 -0.1\nload 1 bus2 -0.1\n"); },
                    ErrorKind::SemanticError));
  CHECK(throws_kind([] { preset("case1", "[events]\nload 1 nowhere -0.1\n"); }, ErrorKind::SemanticError));
}

TEST_CASE("empty event list gives a flat response") {
  auto sc = preset("case1", "[events]\n");
  const auto r = run(sc, {.dt = 1e-3, .t_end = 2.0});
  for (const auto& [n, v] : r.series.channels) CHECK(peak(v) == 0.0);
  CHECK(r.metrics.nadir == 0.0);
  CHECK(r.metrics.rocof == 0.0);
  CHECK(r.metrics.nadir_normalized == 0.0);
}

TEST_CASE("case1 settles at the desired droop") {
  const auto r = run(preset("case1"));
  CHECK(r.metrics.steady_state == doctest::Approx(-0.28 / 33.33).epsilon(1e-4));
  CHECK(r.metrics.dp_load == doctest::Approx(-0.28));
  for (const auto& l : r.metrics.limits) CHECK(l.violations == 0);
}

TEST_CASE("case1 COI trace within the trace band at b = 10") {
  const auto r = run(preset("case1", "[system]\nt_end = 6\n"));
  CHECK(*r.metrics.trace_error < 0.02);
}

TEST_CASE("case1 COI trace within the trace band at b = 100") {
  const auto r = run(preset("case1", "[system]\nt_end = 6\n[network]\nwind bus2 100\npv bus2 100\nbess bus2 100\n"));
  CHECK(*r.metrics.trace_error < 0.02);
}

TEST_CASE("capacity event redistributes devices but keeps the aggregate") {
  const std::string sys = "[system]\npreset = case1\nmodel = aggregate\nt_end = 8\n";
  const auto a = run(parse_scenario(sys + "[events]\nload 1 pcc -0.28\n"));
  const auto b = run(parse_scenario(sys + "[events]\ncapacity 1 pv 0.45\n"));
  const auto& fa = a.series.channel("f_coi");
  const auto& fb = b.series.channel("f_coi");
  CHECK(linf(fa, fb) < 1e-6);
  const double dev = linf(a.series.channel("p.pv"), b.series.channel("p.pv"));
  CHECK(dev > 0.1 * peak(a.series.channel("p.pv")));
}

TEST_CASE("outage drops the lost generation and readapts") {
  const auto r = run(preset("case1", "[system]\nt_end = 8\n[events]\nload 1 bus2 -0.28\noutage 4 pv\n"));
  const auto& p = r.series.channel("p.pv");
  CHECK(std::abs(p.back()) < 1e-9);
  CHECK(r.metrics.trace_error.has_value());
  CHECK(std::isfinite(r.metrics.steady_state));
}

TEST_CASE("metrics on a first-order response") {
  const double dt = 1e-4;
  const std::size_t n = 20001;
  auto ts = lti::TimeSeries::uniform(dt, n);
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = -0.28 / 33.33 * (1.0 - std::exp(-33.33 / 5.55 * k * dt));
  ts.add("f_coi", f);
  const auto m = compute_metrics(ts, -0.28, dt);
  CHECK(m.nadir == doctest::Approx(std::abs(f.back())).epsilon(1e-9));
  CHECK(m.rocof == doctest::Approx(0.28 / 5.55).epsilon(1e-3));
  CHECK(m.rocof == doctest::Approx(0.050450).epsilon(1e-3));
  CHECK(m.nadir_normalized == doctest::Approx(m.nadir / 0.28));

  auto z = lti::TimeSeries::uniform(dt, 10);
  z.add("f_coi", std::vector<double>(10, 0.0));
  const auto mz = compute_metrics(z, 0.0);
  CHECK(mz.nadir == 0.0);
  CHECK(mz.rocof == 0.0);
  CHECK(mz.nadir_normalized == 0.0);

  auto bad = lti::TimeSeries::uniform(dt, 10);
  bad.add("f.x", std::vector<double>(10, 0.0));
  CHECK(throws_kind([&] { compute_metrics(bad, 0.0); }, ErrorKind::MissingChannel));
}

TEST_CASE("verify accepts the presets and flags broken gains") {
  const auto v = verify(preset("case1"));
  CHECK(v.pass());
  for (const auto& c : v.checks)
    if (c.enforced) CHECK(c.value < 1e-9);

  const auto bad = preset("case1", "[devices]\nwind forming lpf 1.5 0.3 46 1.5\npv forming lpf 0.6 0.6 73 0.6\n"
                                   "[network]\nwind bus2 10\npv bus2 10\n");
  const auto vb = verify(bad);
  CHECK_FALSE(vb.pass());
  double dc = 0.0;
  for (const auto& c : vb.checks)
    if (c.name == "participation.fp.dc_gain") dc = c.value;
  CHECK(dc == doctest::Approx(0.1).epsilon(1e-9));

  const auto v3 = verify(preset("case3"));
  CHECK(v3.pass());
}

TEST_CASE("bode table columns") {
  const auto t = bode(preset("case1"), 0.1, 100.0, 31);
  REQUIRE(t.w.size() == 31);
  REQUIRE(t.columns.size() >= 4);
  CHECK(t.columns[0].first == "mag.tdes_pf");
  for (std::size_t k = 0; k < t.w.size(); ++k) CHECK(t.columns[0].second[k] == doctest::Approx(t.columns[2].second[k]).epsilon(1e-9));
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str().starts_with("w,mag.tdes_pf"));
}

TEST_CASE("runs are deterministic and converge in dt") {
  const auto sc = preset("case1", "[system]\nt_end = 6\n");
  const auto a = run(sc), b = run(sc);
  std::ostringstream sa, sb;
  a.series.write_csv(sa);
  b.series.write_csv(sb);
  CHECK(sa.str() == sb.str());
  const auto h = run(sc, {.dt = 5e-4});
  CHECK(h.metrics.steady_state == doctest::Approx(a.metrics.steady_state).epsilon(0.01));
  CHECK(h.metrics.rocof == doctest::Approx(a.metrics.rocof).epsilon(0.01));
}

TEST_CASE("case2 hybrid fleet with synchronous generators runs") {
  const auto r = run(preset("case2", "[system]\nt_end = 10\n"));
  CHECK(std::isfinite(r.metrics.nadir));
  CHECK(r.metrics.nadir > 0.0);
  CHECK(r.series.has("p.sg1"));
}

TEST_CASE("case3 area run tracks the desired response at the POCs") {
  const auto r = run(preset("case3"));
  CHECK(*r.metrics.trace_error < 0.02);
  CHECK(r.series.has("f_poc.bus4"));
  CHECK(r.series.has("q.bess"));
}

TEST_CASE("Monte Carlo sampling") {
  auto sc = preset("case3", "[system]\nt_end = 3\n");
  const auto mc = montecarlo(sc, 24, 1);
  CHECK(mc.samples.size() == 24);
  CHECK(mc.all_stable);
  std::ostringstream a;
  mc.write_samples_csv(a);
  const auto mc2 = montecarlo(sc, 24, 1, 1);
  std::ostringstream b;
  mc2.write_samples_csv(b);
  CHECK(a.str() == b.str());

  const auto few = montecarlo(sc, 5, 1);
  for (std::size_t i = 0; i < 5; ++i) CHECK(few.samples[i].ratios == mc.samples[i].ratios);

  auto unit = preset("case3", "[system]\nt_end = 3\n[events]\nload 1 d5 -0.2\nrx-montecarlo 1 1 1 7\n");
  const auto one = montecarlo(unit, std::nullopt, std::nullopt);
  REQUIRE(one.samples.size() == 1);
  CHECK(one.samples[0].max_deviation < 1e-12);
  CHECK(throws_kind([] { montecarlo(preset("case1"), 2, 1); }, ErrorKind::InvalidArgument));
}
