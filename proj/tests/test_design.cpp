#include <doctest.h>

#include <cmath>

#include "dvpp/errors.hpp"
#include "fixtures.hpp"
#include "gen.hpp"

using namespace dvpp;
using namespace dvpp::design;
using cd = std::complex<double>;

namespace {

bool throws_kind(auto&& fn, ErrorKind k) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

const DesiredBehavior kDes = make_tdes(5.55, 33.33, 0.01);

}  // namespace

TEST_CASE("make_tdes examples") {
  CHECK(kDes.tf_pf.dc_gain() == doctest::Approx(0.030003).epsilon(1e-5));
  CHECK(kDes.tf_qv.dc_gain() == doctest::Approx(0.01));
  const auto unit = make_tdes(0, 1, 1);
  CHECK(unit.tf_pf.is_static());
  CHECK(unit.tf_pf.dc_gain() == 1.0);
  const auto poles = kDes.tf_pf.den().roots();
  REQUIRE(poles.size() == 1);
  CHECK(poles[0].real() == doctest::Approx(-33.33 / 5.55));
  CHECK(poles[0].real() == doctest::Approx(-6.0054).epsilon(1e-4));
  CHECK(throws_kind([] { make_tdes(1, 0, 1); }, ErrorKind::NonPositiveDroop));
  CHECK(throws_kind([] { make_tdes(1, 1, -1); }, ErrorKind::NonPositiveDroop));
}

TEST_CASE("make_adpf examples") {
  CHECK(make_adpf(FactorKind::Lpf, 1.5, 0.5, Channel::Fp).tf(0.0).real() == 0.5);
  const auto hp = make_adpf(FactorKind::Hpf, 0.2, 0.7, Channel::Fp);
  CHECK(hp.mu == 0.0);
  CHECK(hp.tf.num().at(0) == 0.0);
  const auto lp = make_adpf(FactorKind::Lpf, 0.6, 0.6134, Channel::Fp);
  CHECK(std::abs(lp.tf(cd(0, 1 / 0.6))) == doctest::Approx(0.6134 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(0.6134 / std::sqrt(2.0) - 0.4338) < 1e-4);
  const auto bp = make_adpf(FactorKind::Bpf, 2.0, 0.0, Channel::Fp, 0.1);
  CHECK(bp.tf.num().at(0) == 0.0);
  CHECK(throws_kind([] { make_adpf(FactorKind::Bpf, 0.1, 0, Channel::Fp, 0.2); }, ErrorKind::InvalidBandSplit));
  CHECK(throws_kind([] { make_adpf(FactorKind::Lpf, 1, 1.2, Channel::Fp); }, ErrorKind::InvalidGain));
}

TEST_CASE("complete_fleet examples") {
  const std::vector<ParticipationFactor> two{make_adpf(FactorKind::Lpf, 1.5, 0.3866, Channel::Fp),
                                             make_adpf(FactorKind::Lpf, 0.6, 0.6134, Channel::Fp)};
  const auto c = complete_fleet(two, Channel::Fp);
  CHECK(c.tf.num().at(0) == 0.0);
  CHECK(c.tf(0.0) == cd(0, 0));
  CHECK(std::abs(c.tf(cd(0, 1e4)) - 1.0) < 1e-3);
  CHECK(c.completes.size() == 2);

  const std::vector<ParticipationFactor> one{make_adpf(FactorKind::Lpf, 0.8, 1.0, Channel::Fp)};
  CHECK(lti::approx_equal(complete_fleet(one, Channel::Fp).tf, RationalTF({0, 0.8}, {1, 0.8}), 1e-12));

  const std::vector<ParticipationFactor> hp{make_adpf(FactorKind::Hpf, 0.2, 0, Channel::Fp)};
  const auto lc = complete_fleet(hp, Channel::Fp);
  CHECK(lti::approx_equal(lc.tf, RationalTF::first_order(1.0, 0.2), 1e-12));
  CHECK(lc.dc_gain() == doctest::Approx(1.0));

  const std::vector<ParticipationFactor> over{make_adpf(FactorKind::Lpf, 1, 0.7, Channel::Fp),
                                              make_adpf(FactorKind::Lpf, 2, 0.4, Channel::Fp)};
  CHECK(throws_kind([&] { complete_fleet(over, Channel::Fp); }, ErrorKind::OverSubscribed));
}

TEST_CASE("check_participation examples") {
  const auto grid = log_grid(1e-2, 1e3, 200);
  const auto f = fixture::case1_fleet();
  CHECK(check_participation(f, Channel::Fp, grid).max_deviation < 1e-9);
  CHECK(check_participation(f, Channel::Vq, grid).max_deviation < 1e-9);
  CHECK(check_participation(f, Channel::Fp, grid).dc_residual < 1e-12);

  Fleet g;
  g.desired = kDes;
  for (double mu : {0.5, 0.4}) {
    DeviceSpec d;
    d.name = "d" + std::to_string(g.devices.size());
    d.factor_fp = make_adpf(FactorKind::Lpf, 1.0, mu, Channel::Fp);
    d.factor_vq = d.factor_fp;
    g.devices.push_back(d);
  }
  CHECK(check_participation(g, Channel::Fp, grid).dc_residual == doctest::Approx(0.1));

  Fleet single;
  single.desired = kDes;
  DeviceSpec d;
  d.name = "only";
  d.factor_fp = ParticipationFactor{};
  d.factor_fp->tf = RationalTF::constant(1.0);
  single.devices.push_back(d);
  CHECK(check_participation(single, Channel::Fp, grid).max_deviation == 0.0);
  CHECK(throws_kind([&] { check_participation(single, Channel::Vq, grid); }, ErrorKind::MissingFactor));
}

TEST_CASE("property: completed fleets sum to one at random frequencies") {
  gen::Rng r(99);
  for (int trial = 0; trial < 25; ++trial) {
    Fleet f;
    f.desired = kDes;
    const int n = r.integer(1, 4);
    double left = 1.0;
    for (int i = 0; i < n; ++i) {
      DeviceSpec d;
      d.name = "d" + std::to_string(i);
      const int kind = r.integer(0, 2);
      if (kind == 0) {
        const double mu = r.uniform(0.0, left);
        left -= mu;
        d.factor_fp = make_adpf(FactorKind::Lpf, r.uniform(0.1, 3), mu, Channel::Fp);
      } else if (kind == 1) {
        d.factor_fp = make_adpf(FactorKind::Hpf, r.uniform(0.05, 1), 0, Channel::Fp);
      } else {
        const double lo = r.uniform(0.5, 3);
        d.factor_fp = make_adpf(FactorKind::Bpf, lo, 0, Channel::Fp, lo * r.uniform(0.05, 0.5));
      }
      f.devices.push_back(d);
    }
    DeviceSpec c;
    c.name = "c";
    c.factor_fp = ParticipationFactor{};
    c.factor_fp->kind = FactorKind::Complement;
    f.devices.push_back(c);
    close_participation(f, Channel::Fp);
    std::vector<double> w(100);
    for (auto& x : w) x = r.log_uniform(1e-3, 1e4);
    CHECK(check_participation(f, Channel::Fp, w).max_deviation < 1e-9);
    for (const auto& d : f.devices)
      if (d.factor_fp->kind == FactorKind::Hpf || d.factor_fp->kind == FactorKind::Bpf)
        CHECK(d.factor_fp->tf.num().at(0) == 0.0);
  }
}

TEST_CASE("disaggregate_forming examples") {
  const auto m = make_adpf(FactorKind::Lpf, 1.5, 0.3866, Channel::Fp);
  const auto mv = make_adpf(FactorKind::Lpf, 0.6, 0.5, Channel::Vq);
  const auto [pf, vq] = disaggregate_forming(kDes, m, mv);
  const RationalTF oracle(lti::Polynomial({1.0, 1.5}), lti::Polynomial({33.33 * 0.3866, 5.55 * 0.3866}));
  CHECK(lti::approx_equal(pf, oracle, 1e-12));
  CHECK(pf.dc_gain() == doctest::Approx(1.0 / (0.3866 * 33.33)).epsilon(1e-12));
  CHECK(pf.dc_gain() == doctest::Approx(0.077607).epsilon(1e-5));
  CHECK(vq.dc_gain() == doctest::Approx(50.0).epsilon(1e-12));

  ParticipationFactor unit;
  unit.tf = RationalTF::constant(1.0);
  CHECK(lti::approx_equal(disaggregate_forming(kDes, unit, unit).first, kDes.tf_pf, 1e-14));

  const auto hp = make_adpf(FactorKind::Hpf, 0.2, 0, Channel::Fp);
  const auto hpf_ref = disaggregate_forming(kDes, hp, mv).first;
  CHECK(hpf_ref.den().at(0) == 0.0);

  // zero inertia: (τs+1)/(μ D) is improper and gets a pole at 1000 rad/s
  const auto droop = disaggregate_forming(make_tdes(0, 33.33, 0.01), m, mv).first;
  CHECK(droop.is_proper());
  CHECK(droop.den().roots()[0].real() == doctest::Approx(-kProperFixRate));
}

TEST_CASE("disaggregate_following examples") {
  const auto m = make_adpf(FactorKind::Lpf, 0.6, 0.6134, Channel::Fp);
  const auto mv = make_adpf(FactorKind::Lpf, 0.6, 0.5, Channel::Vq);
  const auto fp = disaggregate_following(kDes, m, mv, 0.01, 1).first;
  const RationalTF oracle(lti::Polynomial({0.6134 * 33.33, 0.6134 * 5.55}),
                          lti::Polynomial({1.0, 0.6}) * lti::Polynomial({1.0, 0.01}));
  CHECK(lti::approx_equal(fp, oracle, 1e-12));
  CHECK(fp.is_proper());
  CHECK(fp.dc_gain() == doctest::Approx(0.6134 * 33.33));

  ParticipationFactor unit;
  unit.tf = RationalTF::constant(1.0);
  const auto droop = disaggregate_following(make_tdes(0, 33.33, 0.01), unit, unit, 0.01).first;
  CHECK(lti::approx_equal(droop, RationalTF::first_order(33.33, 0.01), 1e-12));

  const auto hp = make_adpf(FactorKind::Hpf, 0.2, 0, Channel::Fp);
  const auto hfp = disaggregate_following(kDes, hp, mv, 0.01).first;
  CHECK(hfp.is_proper());
  CHECK(hfp.den().degree() == 2);  // (0.2s+1)(0.01s+1)
}

TEST_CASE("verify_aggregation examples") {
  const auto grid = log_grid(1e-2, 1e2, 200);
  const auto f = fixture::case1_fleet();
  const auto rep = verify_aggregation(f, grid);
  CHECK(rep.freq_low < 1e-9);
  CHECK(rep.volt_low < 1e-9);
  CHECK(rep.freq_high == 0.0);

  Fleet empty;
  empty.desired = kDes;
  CHECK(verify_aggregation(empty, grid).empty);
  CHECK(std::isinf(verify_aggregation(empty, grid).freq_low));

  Fleet raw = f;
  raw.devices[0].realized = false;
  CHECK(throws_kind([&] { verify_aggregation(raw, grid); }, ErrorKind::UnrealizedDevice));
}

TEST_CASE("hybrid mismatch follows the PLL filter bound") {
  // (Σ form T^-1 + Σ foll T^fp)^-1 = T_des / (ε + (1-ε) F), F = 1/(τ s + 1)
  const auto f = fixture::case1_fleet();
  for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto h = hybrid_split(f, eps);
    for (double w : log_grid(1e-2, 10.0, 40)) {
      const std::vector<double> one{w};
      const double err = verify_aggregation(h, one).freq_low;
      const cd F = 1.0 / (cd(0, 0.01 * w) + 1.0);
      const double bound = std::abs(1.0 / (eps + (1.0 - eps) * F) - 1.0);
      CHECK(std::abs(err - bound) <= 1e-6 * bound + 1e-12);
      CHECK(err <= (1.0 - eps) * 0.01 * w + 1e-12);
    }
  }
}

TEST_CASE("hybrid_split examples") {
  const auto f = fixture::case1_fleet();
  const auto h = hybrid_split(f, 0.5);
  CHECK(h.devices.size() == 6);
  CHECK(h.device("wind").rating == 23.0);
  CHECK(h.device("wind_foll").rating == 23.0);
  CHECK(h.device("wind_foll").role == Role::Following);

  const auto same = hybrid_split(f, 1.0);
  REQUIRE(same.devices.size() == f.devices.size());
  for (std::size_t i = 0; i < f.devices.size(); ++i) {
    CHECK(same.devices[i].name == f.devices[i].name);
    CHECK(same.devices[i].ref_pf.num() == f.devices[i].ref_pf.num());
    CHECK(same.devices[i].ref_pf.den() == f.devices[i].ref_pf.den());
  }
  const auto q = hybrid_split(f, 0.25);
  CHECK(check_participation(q, Channel::Fp, log_grid(1e-2, 1e3, 100)).max_deviation < 1e-9);
  CHECK(check_participation(q, Channel::Vq, log_grid(1e-2, 1e3, 100)).max_deviation < 1e-9);
  CHECK(hybrid_split(f, 0.0).devices.size() == 3);
}
