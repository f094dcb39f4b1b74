#pragma once

#include "dvpp/design/design.hpp"

namespace fixture {

using namespace dvpp::design;

/// Wind/PV LPFs plus a BESS complement, gains proportional to ratings.
inline Fleet case1_fleet() {
  Fleet f;
  f.desired = make_tdes(5.55, 33.33, 0.01);
  const double mw = 46.0 / 119.0, mp = 73.0 / 119.0;
  auto dev = [](const char* name, double rating, double tau_dc, ParticipationFactor fp, ParticipationFactor vq) {
    DeviceSpec d;
    d.name = name;
    d.rating = rating;
    d.tau_dc = tau_dc;
    d.p_capacity = rating / 100.0;
    d.factor_fp = std::move(fp);
    d.factor_vq = std::move(vq);
    return d;
  };
  f.devices.push_back(dev("wind", 46, 1.5, make_adpf(FactorKind::Lpf, 1.5, mw, Channel::Fp),
                          make_adpf(FactorKind::Lpf, 1.5, mw, Channel::Vq)));
  f.devices.push_back(dev("pv", 73, 0.6, make_adpf(FactorKind::Lpf, 0.6, mp, Channel::Fp),
                          make_adpf(FactorKind::Lpf, 0.6, mp, Channel::Vq)));
  ParticipationFactor c;
  c.kind = FactorKind::Complement;
  c.channel = Channel::Fp;
  ParticipationFactor cq = c;
  cq.channel = Channel::Vq;
  f.devices.push_back(dev("bess", 60, 0.2, c, cq));
  close_participation(f, Channel::Fp);
  close_participation(f, Channel::Vq);
  realize(f);
  return f;
}

}  // namespace fixture

#include "dvpp/network/network.hpp"

namespace fixture {

/// Each case-1 device on its own bus, tied to bus2 with susceptance b.
inline dvpp::net::NetworkGraph case1_graph(double b) {
  dvpp::net::NetworkGraph g;
  g.add_node("bus2");
  for (const char* d : {"wind", "pv", "bess"}) g.add_edge(d, "bus2", b);
  return g;
}

inline Fleet case1_placed() {
  auto f = case1_fleet();
  for (auto& d : f.devices) d.bus = d.name;
  return f;
}

}  // namespace fixture

#include "dvpp/spatial/spatial.hpp"

namespace fixture {

/// MV feeder below two transmission buses; MV lines carry R/X = rx, the two
/// transformers take the design ratio.
inline dvpp::spatial::AreaModel case3_area(double rx = 1.0) {
  dvpp::spatial::AreaModel a;
  a.graph.add_edge("bus4", "d1b", 10.0);
  a.graph.add_edge("bus6", "d1a", 10.0);
  const char* lines[][2] = {{"d1b", "d7"}, {"d7", "d8"}, {"d7", "d6"}, {"d6", "d5"}, {"d1a", "d5"},
                            {"d1a", "d2"}, {"d2", "d3"}, {"d2", "d4"}, {"d6", "d3"}};
  for (auto& l : lines) a.graph.add_edge(l[0], l[1], 20.0, rx);
  a.pocs = {"bus4", "bus6"};
  a.homogeneous_ratio = rx;
  a.devices = case1_fleet();
  a.devices.device("wind").bus = "d8";
  a.devices.device("pv").bus = "d3";
  a.devices.device("bess").bus = "d6";
  return a;
}

}  // namespace fixture
