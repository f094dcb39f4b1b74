#include "dvpp/scenario/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dvpp/adaptation/adaptation.hpp"

namespace dvpp::scenario {

using design::Channel;
using design::FactorKind;
using design::Role;

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Aggregate: return "aggregate";
    case ModelKind::Network: return "network";
    case ModelKind::Area: return "area";
  }
  return "?";
}

namespace {

constexpr std::string_view kCase1 = R"(
[system]
model = network
t_end = 30

[tdes]
hp = 5.55
dp = 33.33
dq = 0.01

[devices]
wind forming lpf 1.5 auto 46 1.5
pv   forming lpf 0.6 auto 73 0.6
bess forming complement - - 60 0.2

[network]
wind bus2 10
pv   bus2 10
bess bus2 10

[events]
load 1 bus2 -0.28

[outputs]
f_coi f.* p.*
)";

constexpr std::string_view kCase2 = R"(
[system]
model = network
epsilon = 0.5
t_end = 30

[tdes]
hp = 5.55
dp = 33.33
dq = 0.01

[devices]
wind forming lpf 1.5 auto 46 1.5
pv   forming lpf 0.6 auto 73 0.6
bess forming complement - - 60 0.2
sg1  sg - - - 250 - bus=g1
sg3  sg - - - 64 - bus=g3

[network]
wind bus2 10
pv   bus2 10
bess bus2 10
g1 bus2 5
g3 bus2 5
g1 g3 5

[events]
load 1 bus2 -0.42

[outputs]
f_coi f.* p.*
)";

constexpr std::string_view kCase3 = R"(
[system]
model = area
rx = 1
t_end = 10

[tdes]
hp = 5.55
dp = 33.33
dq = 0.01

[devices]
wind forming lpf 1.5 auto 46 1.5 bus=d8
pv   forming lpf 0.6 auto 73 0.6 bus=d3
bess forming complement - - 60 0.2 bus=d6

[network]
poc bus4
poc bus6
bus4 d1b 10
bus6 d1a 10
d1b d7 20 1
d7  d8 20 1
d7  d6 20 1
d6  d5 20 1
d1a d5 20 1
d1a d2 20 1
d2  d3 20 1
d2  d4 20 1
d6  d3 20 1

[events]
load 1 d5 -0.2
rx-montecarlo 0.4 2 24 1

[outputs]
f_poc.* f_coi p.* q.* p'.*
)";

struct Token {
  std::string text;
  int col = 1;
};

struct Line {
  int no = 0;
  std::string raw;
  std::vector<Token> tokens;
};

struct Raw {
  std::map<std::string, std::vector<Line>> sections;
};

const std::set<std::string> kSections{"system", "tdes", "devices", "network", "events", "outputs"};

Raw split(std::string_view text) {
  Raw raw;
  std::string current;
  int no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Line l{no, line, {}};
    for (std::size_t i = 0; i < line.size();) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      l.tokens.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
      i = j;
    }
    if (l.tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto& first = l.tokens.front().text;
    if (first.front() == '[') {
      if (l.tokens.size() != 1 || first.back() != ']')
        throw ParseError(no, l.tokens.front().col, "malformed section header");
      current = first.substr(1, first.size() - 2);
      if (!kSections.count(current)) throw ParseError(no, l.tokens.front().col + 1, "unknown section [" + current + "]");
      raw.sections[current];
    } else {
      if (current.empty()) throw ParseError(no, l.tokens.front().col, "content before the first section");
      raw.sections[current].push_back(std::move(l));
    }
    if (end == text.size()) break;
  }
  return raw;
}

double number(const Token& t, int line) {
  double v = 0.0;
  const char* b = t.text.data();
  const char* e = b + t.text.size();
  if (!t.text.empty() && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) throw ParseError(line, t.col, "expected a number, got '" + t.text + "'");
  return v;
}

double number(const std::string& text, int line, int col) { return number(Token{text, col}, line); }

struct KeyValue {
  std::string key, value;
  int line = 0, key_col = 1, value_col = 1;
};

KeyValue key_value(const Line& l) {
  const auto eq = l.raw.find('=');
  if (eq == std::string::npos) throw ParseError(l.no, l.tokens.front().col, "expected key = value");
  auto trim = [](const std::string& s, std::size_t& first) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    first = a;
    return s.substr(a, b - a);
  };
  std::size_t ka = 0, va = 0;
  KeyValue kv;
  kv.key = trim(l.raw.substr(0, eq), ka);
  kv.value = trim(l.raw.substr(eq + 1), va);
  kv.line = l.no;
  kv.key_col = static_cast<int>(ka) + 1;
  kv.value_col = static_cast<int>(eq + 1 + va) + 1;
  if (kv.key.empty()) throw ParseError(l.no, kv.key_col, "missing key");
  if (kv.value.empty()) throw ParseError(l.no, kv.value_col, "missing value for '" + kv.key + "'");
  return kv;
}

std::map<std::string, KeyValue> keys(const std::vector<Line>& lines, const std::set<std::string>& allowed,
                                     std::map<std::string, KeyValue> into = {}) {
  for (const auto& l : lines) {
    auto kv = key_value(l);
    if (!allowed.count(kv.key)) throw ParseError(kv.line, kv.key_col, "unknown key '" + kv.key + "'");
    into[kv.key] = kv;
  }
  return into;
}

bool is_dash(const Token& t) { return t.text == "-"; }

design::ParticipationFactor parse_factor(const std::string& kind, const Token& tau, const Token& mu, double tau_high,
                                         double share, Channel ch, int line, double auto_mu) {
  try {
    if (kind == "complement") {
      design::ParticipationFactor f;
      f.kind = FactorKind::Complement;
      f.channel = ch;
      f.share = share;
      return f;
    }
    const double t = number(tau, line);
    if (kind == "lpf") {
      const double m = mu.text == "auto" ? auto_mu : number(mu, line);
      return design::make_adpf(FactorKind::Lpf, t, m, ch);
    }
    if (!is_dash(mu) && number(mu, line) != 0.0)
      throw ParseError(line, mu.col, kind + " factors have zero DC gain; use '-'");
    auto f = kind == "hpf" ? design::make_adpf(FactorKind::Hpf, t, 0.0, ch)
                           : design::make_adpf(FactorKind::Bpf, t, 0.0, ch, tau_high);
    return share == 1.0 ? f : design::scaled(f, share);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(line, tau.col, e.what());
  }
}

struct PendingDevice {
  design::DeviceSpec spec;
  std::string kind_fp, kind_vq;
  Token tau_fp, mu_fp, tau_vq, mu_vq;
  double tau_high_fp = 0.0, tau_high_vq = 0.0, share = 1.0;
  int line = 0;
};

const std::set<std::string> kFactorKinds{"lpf", "hpf", "bpf", "complement"};

void parse_devices(const std::vector<Line>& lines, Scenario& sc, double sg_h, double sg_droop) {
  std::vector<PendingDevice> pending;
  std::set<std::string> names;
  for (const auto& l : lines) {
    const auto& t = l.tokens;
    if (t.size() < 7) {
      const int col = static_cast<int>(l.raw.find_last_not_of(" \t")) + 2;
      throw ParseError(l.no, col, "device line needs: name role kind tau mu rating tau_dc");
    }
    const std::string& name = t[0].text;
    if (!names.insert(name).second) throw ParseError(l.no, t[0].col, "duplicate device '" + name + "'");
    const std::string& role = t[1].text;
    const double rating = number(t[5], l.no);
    if (!(rating > 0.0)) throw ParseError(l.no, t[5].col, "rating must be positive");
    std::map<std::string, Token> opts;
    for (std::size_t i = 7; i < t.size(); ++i) {
      const auto eq = t[i].text.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == t[i].text.size())
        throw ParseError(l.no, t[i].col, "expected key=value");
      opts[t[i].text.substr(0, eq)] = Token{t[i].text.substr(eq + 1), t[i].col + static_cast<int>(eq) + 1};
    }
    auto check_opts = [&](const std::set<std::string>& allowed) {
      for (std::size_t i = 7; i < t.size(); ++i) {
        const auto key = t[i].text.substr(0, t[i].text.find('='));
        if (!allowed.count(key)) throw ParseError(l.no, t[i].col, "unknown device option '" + key + "'");
      }
    };
    if (role == "sg") {
      check_opts({"bus", "h", "droop"});
      for (const auto* tok : {&t[2], &t[3], &t[4], &t[6]})
        if (!is_dash(*tok)) throw ParseError(l.no, tok->col, "synchronous generators take '-' here");
      SgSpec sg{name, name, rating, sg_h, sg_droop};
      if (opts.count("bus")) sg.bus = opts["bus"].text;
      if (opts.count("h")) sg.h = number(opts["h"], l.no);
      if (opts.count("droop")) sg.droop = number(opts["droop"], l.no);
      if (!(sg.h > 0.0)) throw ParseError(l.no, opts.count("h") ? opts["h"].col : t[0].col, "inertia must be positive");
      if (!(sg.droop > 0.0))
        throw ParseError(l.no, opts.count("droop") ? opts["droop"].col : t[0].col, "droop must be positive");
      sc.sgs.push_back(sg);
      continue;
    }
    check_opts({"bus", "pcap", "tau_high", "share", "vq"});
    PendingDevice d;
    d.line = l.no;
    d.spec.name = name;
    if (role == "forming") d.spec.role = Role::Forming;
    else if (role == "following") d.spec.role = Role::Following;
    else throw ParseError(l.no, t[1].col, "role must be forming, following or sg");
    d.spec.bus = opts.count("bus") ? opts["bus"].text : name;
    d.spec.rating = rating;
    d.spec.tau_dc = is_dash(t[6]) ? 0.0 : number(t[6], l.no);
    d.spec.p_capacity = opts.count("pcap") ? number(opts["pcap"], l.no) : rating / sc.base.mva;
    if (d.spec.p_capacity < 0.0 || d.spec.p_capacity > rating / sc.base.mva * (1.0 + 1e-12))
      throw ParseError(l.no, opts.count("pcap") ? opts["pcap"].col : t[5].col, "p capacity must lie in [0, rating]");
    if (!kFactorKinds.count(t[2].text)) throw ParseError(l.no, t[2].col, "unknown factor kind '" + t[2].text + "'");
    d.kind_fp = t[2].text;
    d.tau_fp = t[3];
    d.mu_fp = t[4];
    if (d.kind_fp != "complement" && is_dash(t[3])) throw ParseError(l.no, t[3].col, "time constant required");
    if (d.kind_fp == "lpf" && is_dash(t[4])) throw ParseError(l.no, t[4].col, "LPF needs a gain or 'auto'");
    if (opts.count("tau_high")) d.tau_high_fp = number(opts["tau_high"], l.no);
    if (opts.count("share")) d.share = number(opts["share"], l.no);
    if (d.kind_fp == "bpf" && !opts.count("tau_high")) throw ParseError(l.no, t[2].col, "bpf needs tau_high=");
    d.kind_vq = d.kind_fp;
    d.tau_vq = d.tau_fp;
    d.mu_vq = d.mu_fp;
    d.tau_high_vq = d.tau_high_fp;
    if (opts.count("vq") && opts["vq"].text != "same") {
      const auto& v = opts["vq"];
      std::vector<std::string> parts;
      std::stringstream ss(v.text);
      for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
      if (parts.empty() || !kFactorKinds.count(parts[0])) throw ParseError(l.no, v.col, "vq must be same or kind:tau[:mu|:tau_high]");
      d.kind_vq = parts[0];
      const std::size_t need = d.kind_vq == "complement" ? 1 : (d.kind_vq == "hpf" ? 2 : 3);
      if (parts.size() != need) throw ParseError(l.no, v.col, "wrong number of fields in vq factor");
      d.tau_vq = Token{need > 1 ? parts[1] : "-", v.col};
      d.mu_vq = Token{d.kind_vq == "lpf" ? parts[2] : "-", v.col};
      d.tau_high_vq = d.kind_vq == "bpf" ? number(parts[2], l.no, v.col) : 0.0;
    }
    pending.push_back(std::move(d));
  }

  // `auto` LPF gains split the unit DC gain in proportion to rating.
  auto auto_total = [&](bool vq) {
    double total = 0.0;
    bool any_auto = false, any_explicit = false;
    for (const auto& d : pending) {
      if ((vq ? d.kind_vq : d.kind_fp) != "lpf") continue;
      const bool a = (vq ? d.mu_vq : d.mu_fp).text == "auto";
      any_auto |= a;
      any_explicit |= !a;
      if (a) total += d.spec.rating;
    }
    if (any_auto && any_explicit)
      throw Error(ErrorKind::SemanticError, "mixing 'auto' and explicit LPF gains on one channel");
    return total;
  };
  const double tot_fp = auto_total(false), tot_vq = auto_total(true);
  for (auto& d : pending) {
    d.spec.factor_fp = parse_factor(d.kind_fp, d.tau_fp, d.mu_fp, d.tau_high_fp, d.share, Channel::Fp, d.line,
                                    tot_fp > 0.0 ? d.spec.rating / tot_fp : 0.0);
    d.spec.factor_vq = parse_factor(d.kind_vq, d.tau_vq, d.mu_vq, d.tau_high_vq, d.share, Channel::Vq, d.line,
                                    tot_vq > 0.0 ? d.spec.rating / tot_vq : 0.0);
    sc.fleet.devices.push_back(std::move(d.spec));
  }
}

void parse_network(const std::vector<Line>& lines, Scenario& sc) {
  for (const auto& l : lines) {
    const auto& t = l.tokens;
    if (t[0].text == "poc") {
      if (t.size() != 2) throw ParseError(l.no, t[0].col, "expected: poc <bus>");
      sc.pocs.push_back(t[1].text);
      sc.network.add_node(t[1].text);
      continue;
    }
    if (t.size() < 3 || t.size() > 4) throw ParseError(l.no, t[0].col, "expected: from to b [rx]");
    if (t[0].text == t[1].text) throw ParseError(l.no, t[1].col, "self-loop");
    const double b = number(t[2], l.no);
    if (!(b > 0.0)) throw ParseError(l.no, t[2].col, "susceptance must be positive");
    double rx = std::numeric_limits<double>::quiet_NaN();
    if (t.size() == 4 && !is_dash(t[3])) {
      rx = number(t[3], l.no);
      if (rx < 0.0) throw ParseError(l.no, t[3].col, "R/X must be non-negative");
    }
    sc.network.add_edge(t[0].text, t[1].text, b, rx);
  }
}

void parse_events(const std::vector<Line>& lines, Scenario& sc) {
  for (const auto& l : lines) {
    const auto& t = l.tokens;
    const auto& kind = t[0].text;
    if (kind == "rx-montecarlo") {
      if (t.size() < 4 || t.size() > 5) throw ParseError(l.no, t[0].col, "expected: rx-montecarlo min max samples [seed]");
      RxMonteCarlo mc;
      mc.min_ratio = number(t[1], l.no);
      mc.max_ratio = number(t[2], l.no);
      const double n = number(t[3], l.no);
      if (!(n >= 1.0) || n != std::floor(n)) throw ParseError(l.no, t[3].col, "sample count must be a positive integer");
      mc.samples = static_cast<std::size_t>(n);
      if (t.size() == 5) {
        const double s = number(t[4], l.no);
        if (s < 0.0 || s != std::floor(s)) throw ParseError(l.no, t[4].col, "seed must be a non-negative integer");
        mc.seed = static_cast<std::uint64_t>(s);
      }
      if (!(mc.min_ratio > 0.0) || mc.max_ratio < mc.min_ratio) throw ParseError(l.no, t[1].col, "need 0 < min <= max");
      sc.montecarlo = mc;
      continue;
    }
    Event e;
    if (kind == "load") {
      if (t.size() < 4 || t.size() > 5) throw ParseError(l.no, t[0].col, "expected: load <t> <bus> <dp> [dq]");
      e.kind = Event::Kind::Load;
      e.value = number(t[3], l.no);
      if (t.size() == 5) e.q = number(t[4], l.no);
    } else if (kind == "capacity") {
      if (t.size() != 4) throw ParseError(l.no, t[0].col, "expected: capacity <t> <device> <pcap>");
      e.kind = Event::Kind::Capacity;
      e.value = number(t[3], l.no);
      if (e.value < 0.0) throw ParseError(l.no, t[3].col, "capacity must be non-negative");
    } else if (kind == "outage") {
      if (t.size() != 3) throw ParseError(l.no, t[0].col, "expected: outage <t> <device>");
      e.kind = Event::Kind::Outage;
    } else {
      throw ParseError(l.no, t[0].col, "unknown event '" + kind + "'");
    }
    e.time = number(t[1], l.no);
    if (e.time < 0.0) throw ParseError(l.no, t[1].col, "event time must be non-negative");
    e.target = t[2].text;
    sc.events.push_back(e);
  }
}

}  // namespace

std::vector<std::string> Scenario::known_buses() const {
  std::vector<std::string> out = network.nodes;
  auto add = [&](const std::string& b) {
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  };
  for (const auto& d : fleet.devices) add(d.bus);
  for (const auto& g : sgs) add(g.bus);
  if (model == ModelKind::Aggregate) add("pcc");
  return out;
}

std::vector<net::Unit> Scenario::units(const design::Fleet& f) const {
  auto out = net::units_from_fleet(f);
  for (const auto& g : sgs) out.push_back(net::make_sg_unit(g.name, g.bus, g.rating, g.h, g.droop, base.mva));
  return out;
}

std::string_view preset_text(std::string_view name) {
  if (name == "case1") return kCase1;
  if (name == "case2") return kCase2;
  if (name == "case3") return kCase3;
  throw Error(ErrorKind::SemanticError, "unknown preset '" + std::string(name) + "'");
}

Scenario parse_scenario(std::string_view text) {
  const Raw user = split(text);
  const std::set<std::string> system_keys{"preset",  "model",      "epsilon",  "base_mva",   "base_kv",
                                          "base_hz", "dt",         "t_end",    "tau_pll",    "pll_order",
                                          "rx",      "vq_droop",   "residual_tol", "hybrid_tol", "trace_tol",
                                          "sync_window", "sg_h",   "sg_droop"};
  const std::set<std::string> tdes_keys{"hp", "dp", "dq"};

  std::map<std::string, KeyValue> sys;
  Raw preset;
  Scenario sc;
  if (auto it = user.sections.find("system"); it != user.sections.end()) {
    const auto user_sys = keys(it->second, system_keys);
    if (auto p = user_sys.find("preset"); p != user_sys.end()) {
      try {
        preset = split(preset_text(p->second.value));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(p->second.line, p->second.value_col, e.what());
      }
      sc.preset = p->second.value;
      if (auto ps = preset.sections.find("system"); ps != preset.sections.end()) sys = keys(ps->second, system_keys);
    }
    sys = keys(it->second, system_keys, sys);
  }
  auto section = [&](const std::string& name) -> const std::vector<Line>* {
    if (auto it = user.sections.find(name); it != user.sections.end()) return &it->second;
    if (auto it = preset.sections.find(name); it != preset.sections.end()) return &it->second;
    return nullptr;
  };

  auto num = [&](const std::string& k, double& target) {
    if (auto it = sys.find(k); it != sys.end()) target = number(it->second.value, it->second.line, it->second.value_col);
  };
  auto positive = [&](const std::string& k, double& target) {
    num(k, target);
    if (auto it = sys.find(k); it != sys.end() && !(target > 0.0))
      throw ParseError(it->second.line, it->second.value_col, k + " must be positive");
  };
  positive("base_mva", sc.base.mva);
  positive("base_kv", sc.base.kv);
  positive("base_hz", sc.base.hz);
  positive("dt", sc.dt);
  positive("t_end", sc.t_end);
  positive("residual_tol", sc.tol.residual);
  positive("hybrid_tol", sc.tol.hybrid);
  positive("trace_tol", sc.tol.trace);
  num("sync_window", sc.tol.sync_window);
  num("vq_droop", sc.vq_droop_factor);
  positive("tau_pll", sc.fleet.tau_pll);
  double sg_h = 5.0, sg_droop = 0.01;
  positive("sg_h", sg_h);
  positive("sg_droop", sg_droop);
  if (auto it = sys.find("pll_order"); it != sys.end()) {
    const double o = number(it->second.value, it->second.line, it->second.value_col);
    if (o < 0.0 || o != std::floor(o) || o > 8) throw ParseError(it->second.line, it->second.value_col, "pll_order must be 0..8");
    sc.fleet.pll_order = static_cast<int>(o);
  }
  if (auto it = sys.find("rx"); it != sys.end()) {
    sc.rx = number(it->second.value, it->second.line, it->second.value_col);
    if (*sc.rx < 0.0) throw ParseError(it->second.line, it->second.value_col, "rx must be non-negative");
  }
  if (auto it = sys.find("epsilon"); it != sys.end()) {
    sc.epsilon = number(it->second.value, it->second.line, it->second.value_col);
    if (*sc.epsilon < 0.0 || *sc.epsilon > 1.0)
      throw ParseError(it->second.line, it->second.value_col, "epsilon must lie in [0, 1]");
  }

  std::map<std::string, KeyValue> td;
  if (auto it = preset.sections.find("tdes"); it != preset.sections.end()) td = keys(it->second, tdes_keys);
  if (auto it = user.sections.find("tdes"); it != user.sections.end()) td = keys(it->second, tdes_keys, td);
  for (const char* k : {"hp", "dp", "dq"})
    if (!td.count(k)) throw Error(ErrorKind::SemanticError, std::string("[tdes] is missing '") + k + "'");
  try {
    sc.fleet.desired = design::make_tdes(number(td["hp"].value, td["hp"].line, td["hp"].value_col),
                                         number(td["dp"].value, td["dp"].line, td["dp"].value_col),
                                         number(td["dq"].value, td["dq"].line, td["dq"].value_col));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(td["dp"].line, td["dp"].value_col, e.what());
  }

  if (const auto* s = section("devices")) parse_devices(*s, sc, sg_h, sg_droop);
  if (const auto* s = section("network")) parse_network(*s, sc);
  if (const auto* s = section("events")) parse_events(*s, sc);
  if (const auto* s = section("outputs"))
    for (const auto& l : *s)
      for (const auto& t : l.tokens) sc.outputs.push_back(t.text);

  if (auto it = sys.find("model"); it != sys.end()) {
    const auto& v = it->second.value;
    if (v == "aggregate") sc.model = ModelKind::Aggregate;
    else if (v == "network") sc.model = ModelKind::Network;
    else if (v == "area") sc.model = ModelKind::Area;
    else throw ParseError(it->second.line, it->second.value_col, "model must be aggregate, network or area");
  } else {
    sc.model = !sc.pocs.empty() ? ModelKind::Area : (sc.network.edges.empty() ? ModelKind::Aggregate : ModelKind::Network);
  }

  // Semantic checks.
  if (sc.fleet.devices.empty() && sc.sgs.empty()) throw Error(ErrorKind::SemanticError, "no devices");
  try {
    for (const Channel ch : {Channel::Fp, Channel::Vq}) design::close_participation(sc.fleet, ch);
    design::realize(sc.fleet);
    if (sc.epsilon) sc.fleet = design::hybrid_split(sc.fleet, *sc.epsilon);
  } catch (const Error& e) {
    throw Error(ErrorKind::SemanticError, std::string("device set: ") + e.what());
  }
  if (sc.model != ModelKind::Aggregate) {
    if (sc.network.edges.empty()) throw Error(ErrorKind::SemanticError, "network model without lines");
    sc.network.validate();
    for (const auto& d : sc.fleet.devices)
      if (!sc.network.has(d.bus)) throw Error(ErrorKind::SemanticError, "device '" + d.name + "' on unknown bus '" + d.bus + "'");
    for (const auto& g : sc.sgs)
      if (!sc.network.has(g.bus)) throw Error(ErrorKind::SemanticError, "generator '" + g.name + "' on unknown bus '" + g.bus + "'");
  }
  if (sc.model == ModelKind::Area) {
    if (sc.pocs.empty()) throw Error(ErrorKind::SemanticError, "area model needs at least one poc");
    if (!sc.sgs.empty()) throw Error(ErrorKind::SemanticError, "area model takes converter devices only");
  } else if (!sc.pocs.empty()) {
    throw Error(ErrorKind::SemanticError, "poc lines need model = area");
  }
  const auto buses = sc.known_buses();
  double last = -1.0;
  for (const auto& e : sc.events) {
    if (e.time < last) throw Error(ErrorKind::SemanticError, "events are not sorted by time");
    last = e.time;
    if (e.kind == Event::Kind::Load) {
      if (std::find(buses.begin(), buses.end(), e.target) == buses.end())
        throw Error(ErrorKind::SemanticError, "load on unknown bus '" + e.target + "'");
    } else {
      bool found = false;
      for (const auto& d : sc.fleet.devices) found |= d.name == e.target || d.name == e.target + "_foll";
      if (e.kind == Event::Kind::Outage)
        for (const auto& g : sc.sgs) found |= g.name == e.target;
      if (!found) throw Error(ErrorKind::SemanticError, "event targets unknown device '" + e.target + "'");
    }
  }
  if (!sc.events.empty() && !(sc.t_end > last)) throw Error(ErrorKind::SemanticError, "t_end must exceed the last event time");
  if (sc.dt > sc.t_end) throw Error(ErrorKind::SemanticError, "dt exceeds t_end");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace dvpp::scenario
