#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <sstream>

#include "dvpp/errors.hpp"
#include "dvpp/lti/polynomial.hpp"
#include "dvpp/lti/rational_tf.hpp"
#include "dvpp/lti/norms.hpp"
#include "dvpp/lti/simulate.hpp"
#include "dvpp/lti/state_space.hpp"
#include "gen.hpp"

using namespace dvpp;
using namespace dvpp::lti;
using cd = std::complex<double>;

namespace {

const RationalTF kTdes({1.0}, {33.33, 5.55});

bool throws_kind(auto&& fn, ErrorKind k) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

TimeSeries step(double dt, double t_end, double amp, double t0 = 0.0, const char* name = "u") {
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  auto ts = TimeSeries::uniform(dt, n);
  auto& u = ts.add(name);
  u.resize(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = ts.t[k] >= t0 - 1e-12 ? amp : 0.0;
  return ts;
}

double rel_err(cd a, cd b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("tf_eval examples") {
  const cd v = tf_eval(kTdes, 0.0);
  CHECK(v.real() == doctest::Approx(1.0 / 33.33).epsilon(1e-12));
  CHECK(v.real() == doctest::Approx(0.030003).epsilon(1e-5));
  CHECK(v.imag() == 0.0);
  CHECK(tf_eval(RationalTF::constant(1.0), cd(0, 10)) == cd(1, 0));
  CHECK(tf_eval(RationalTF({0, 1}, {1, 1}), 0.0) == cd(0, 0));
  CHECK(throws_kind([] { tf_eval(RationalTF({1}, {0, 1}), 0.0); }, ErrorKind::PoleAtQueryPoint));
}

TEST_CASE("tf_arith examples") {
  const RationalTF a({0.5}, {1, 1}), b({0.5, 1}, {1, 1});
  const auto sum = tf_arith(a, b, TfOp::Add);
  CHECK(sum.is_static());
  CHECK(sum.num().at(0) == doctest::Approx(1.0));

  const auto inv = tf_arith(kTdes, {}, TfOp::InverseOfA);
  CHECK(inv.den().degree() == 0);
  CHECK(inv.num().at(0) == doctest::Approx(33.33));
  CHECK(inv.num().at(1) == doctest::Approx(5.55));

  const auto prod = tf_arith(RationalTF({1}, {1, 1}), RationalTF({1, 1}, {1}), TfOp::Mul);
  CHECK(prod.is_static());
  CHECK(prod.num().at(0) == doctest::Approx(1.0));

  CHECK(throws_kind([] { RationalTF().inverse(); }, ErrorKind::InverseOfZero));
}

TEST_CASE("nearby but distinct roots are not cancelled") {
  const RationalTF zero({1.0, 1.0}, {1.0});
  const auto t = zero * RationalTF({1.0}, {1.0 + 1e-6, 1.0});
  CHECK(t.den().degree() == 1);
  const auto u = zero * RationalTF({1.0}, {1.0 + 1e-12, 1.0});
  CHECK(u.is_static());
}

TEST_CASE("polynomial degree cap") {
  Polynomial p({1.0, 1.0});
  CHECK(p.pow(16).degree() == 16);
  CHECK(throws_kind([&] { (void)p.pow(17); }, ErrorKind::DegreeCapExceeded));
}

TEST_CASE("polynomial roots round-trip") {
  gen::Rng r(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = Polynomial(gen::any_poly(r, r.integer(1, 6)));
    for (const auto& z : p.roots()) CHECK(std::abs(p(z)) < 1e-8 * (1 + std::pow(std::abs(z), p.degree())));
  }
}

TEST_CASE("to_state_space examples") {
  const auto ss = to_state_space(kTdes);
  REQUIRE(ss.states() == 1);
  CHECK(ss.A(0, 0) == doctest::Approx(-33.33 / 5.55).epsilon(1e-12));
  CHECK(ss.A(0, 0) == doctest::Approx(-6.0054).epsilon(1e-4));
  CHECK(rel_err(ss.response(cd(0, 1))(0, 0), tf_eval(kTdes, cd(0, 1))) < 1e-9);

  const auto st = to_state_space(RationalTF::constant(0.01));
  CHECK(st.states() == 0);
  CHECK(st.D(0, 0) == doctest::Approx(0.01));

  const auto hp = to_state_space(RationalTF({0, 1}, {1, 1}));
  REQUIRE(hp.states() == 1);
  CHECK(hp.D(0, 0) == doctest::Approx(1.0));
  // residual of s/(s+1) - 1 = -1/(s+1): C B = -1 for the pole at -1
  CHECK((hp.C * hp.B)(0, 0) == doctest::Approx(-1.0));
  CHECK(hp.A(0, 0) == doctest::Approx(-1.0));

  CHECK(throws_kind([] { to_state_space(RationalTF({0, 1}, {1})); },
                    ErrorKind::ImproperTransferFunction));
}

TEST_CASE("property: realization response matches tf_eval on a log grid") {
  gen::Rng r(21);
  const auto w = gen::logspace(1e-2, 1e3, 60);
  for (int trial = 0; trial < 60; ++trial) {
    const int nd = r.integer(0, 4);
    const int nn = r.integer(0, nd);
    const RationalTF tf(gen::any_poly(r, nn), gen::stable_poly(r, nd));
    const auto ss = to_state_space(tf, "p");
    CHECK(ss.states() == tf.den().degree());
    CHECK((ss.D(0, 0) != 0.0) == (tf.num().degree() == tf.den().degree()));
    for (double wk : w) {
      const cd s(0, wk);
      CHECK(rel_err(ss.response(s)(0, 0), tf_eval(tf, s)) < 1e-9);
    }
  }
}

TEST_CASE("property: batched response equals pointwise evaluation") {
  gen::Rng r(5);
  const auto w = gen::logspace(1e-2, 1e3, 57);
  for (int trial = 0; trial < 30; ++trial) {
    const RationalTF tf(gen::any_poly(r, r.integer(0, 3)), gen::stable_poly(r, 3));
    const auto resp = tf.response(w);
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(rel_err(resp[k], tf_eval(tf, cd(0, w[k]))) < 1e-12);
  }
}

TEST_CASE("property: add and mul are associative and commutative") {
  gen::Rng r(9);
  for (int trial = 0; trial < 40; ++trial) {
    auto pick = [&] { return RationalTF(gen::any_poly(r, r.integer(0, 2)), gen::stable_poly(r, r.integer(1, 2))); };
    const auto a = pick(), b = pick(), c = pick();
    CHECK(approx_equal(a + b, b + a, 1e-9));
    CHECK(approx_equal(a * b, b * a, 1e-9));
    CHECK(approx_equal((a + b) + c, a + (b + c), 1e-9));
    CHECK(approx_equal((a * b) * c, a * (b * c), 1e-9));
  }
}

TEST_CASE("simulate examples") {
  const auto y = simulate(to_state_space(RationalTF::first_order(1.0, 0.01)), step(1e-4, 0.06, 1.0), 1e-4);
  const auto& ch = y.channel("y");
  CHECK(std::abs(ch[500] - (1.0 - std::exp(-5.0))) < 1e-3);
  CHECK(std::abs(1.0 - std::exp(-5.0) - 0.99326) < 1e-5);

  const auto z = simulate(to_state_space(kTdes), step(1e-3, 1.0, 0.0), 1e-3);
  for (double v : z.channel("y")) CHECK(v == 0.0);

  const auto s = simulate(to_state_space(RationalTF::constant(0.01)), step(1e-3, 1.0, 1.0), 1e-3);
  for (double v : s.channel("y")) CHECK(v == doctest::Approx(0.01));

  CHECK(throws_kind([] { simulate(to_state_space(kTdes), step(1e-3, 1.0, 1.0), 2e-3); },
                    ErrorKind::InvalidArgument));
}

TEST_CASE("property: first-order step converges to DC gain after ten time constants") {
  gen::Rng r(13);
  for (int trial = 0; trial < 20; ++trial) {
    const double tau = r.log_uniform(0.01, 1.0), k = r.uniform(-5, 5), amp = r.uniform(0.1, 2);
    const double dt = tau / 50;
    const auto y = simulate(to_state_space(RationalTF::first_order(k, tau)), step(dt, 10 * tau, amp), dt);
    CHECK(std::abs(y.channel("y").back() - k * amp) <= 1e-4 * std::abs(k * amp));
  }
}

TEST_CASE("property: Tustin keeps stable poles inside the unit circle for any dt") {
  gen::Rng r(17);
  for (int trial = 0; trial < 40; ++trial) {
    const RationalTF tf({1.0}, gen::stable_poly(r, r.integer(1, 4)));
    const double dt = r.log_uniform(1e-5, 10.0);
    CHECK_NOTHROW(TustinStepper(to_state_space(tf), dt));
  }
}

TEST_CASE("stepper state handoff by label") {
  auto a = to_state_space(RationalTF::first_order(1.0, 0.5), "dev.");
  TustinStepper s1(a, 1e-3);
  const std::vector<double> u{1.0};
  for (int k = 0; k < 100; ++k) s1.advance(u, u);
  TustinStepper s2(a, 1e-3);
  s2.import_state(s1);
  CHECK(s2.state()[0] == s1.state()[0]);
  auto b = to_state_space(RationalTF::first_order(1.0, 0.5), "other.");
  TustinStepper s3(b, 1e-3);
  s3.import_state(s1);
  CHECK(s3.state()[0] == 0.0);
}

TEST_CASE("lpv_track examples") {
  const double dt = 1e-3;
  LpvGain g{Schedule::constant(1.0), RationalTF({-100.0}, {1.0, 0.01})};
  auto y = lpv_track(g, step(dt, 2.0, 0.01), dt);
  CHECK(std::abs(y.channels[0].second.back() - (-1.0)) < 1e-3);

  g.schedule = Schedule{{0.0, 3.0}, {1.0, 0.5}};
  y = lpv_track(g, step(dt, 6.0, 0.01), dt);
  const auto& ch = y.channels[0].second;
  CHECK(std::abs(ch[2900] + 1.0) < 1e-3);
  CHECK(std::abs(ch[3000] + 0.5) < 1e-3);
  CHECK(std::abs(ch.back() + 0.5) < 1e-3);

  g.schedule = Schedule::constant(0.0);
  y = lpv_track(g, step(dt, 1.0, 0.01), dt);
  for (double v : y.channels[0].second) CHECK(v == 0.0);

  g.schedule = Schedule{{1.0, 1.0}, {1.0, 2.0}};
  CHECK(throws_kind([&] { lpv_track(g, step(dt, 1.0, 0.01), dt); }, ErrorKind::InvalidArgument));
}

TEST_CASE("time series csv layout") {
  auto ts = TimeSeries::uniform(0.5, 2);
  ts.add("a", {1.0, 2.0});
  std::ostringstream os;
  ts.write_csv(os);
  CHECK(os.str() == "t,a\n0.000000000e+00,1.000000000e+00\n5.000000000e-01,2.000000000e+00\n");
  CHECK(throws_kind([&] { (void)ts.channel("b"); }, ErrorKind::MissingChannel));
}

TEST_CASE("h2 and step-transient norms against closed forms") {
  for (double a : {0.5, 2.0, 40.0}) {
    const auto m = lti::to_state_space(lti::RationalTF({1.0}, {a, 1.0}));
    CHECK(lti::h2_norm(m) == doctest::Approx(1.0 / std::sqrt(2.0 * a)).epsilon(1e-10));
    CHECK(lti::step_transient_l2(m, 0, 0) == doctest::Approx(1.0 / (a * std::sqrt(2.0 * a))).epsilon(1e-10));
    const double b = 3.0;
    const auto bi = lti::to_state_space(lti::RationalTF({b, 1.0}, {a, 1.0}));
    CHECK(lti::step_transient_l2(bi, 0, 0) == doctest::Approx(std::abs(1.0 - b / a) / std::sqrt(2.0 * a)).epsilon(1e-10));
  }
  std::srand(31);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(4, 4) - 6.0 * Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Random(4, 4);
    Q = Q * Q.transpose();
    const auto X = lti::lyapunov(A, Q);
    CHECK((A * X + X * A.transpose() + Q).cwiseAbs().maxCoeff() < 1e-10);
  }
}
