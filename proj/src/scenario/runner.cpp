#include "dvpp/scenario/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "dvpp/adaptation/adaptation.hpp"
#include "dvpp/lti/simulate.hpp"
#include "dvpp/spatial/spatial.hpp"

namespace dvpp::scenario {

using design::Channel;
using design::FactorKind;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

}  // namespace

bool MetricsReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.enforced || c.pass; });
}

void MetricsReport::write(std::ostream& os) const {
  os << "name,value\n";
  os << "nadir," << fmt(nadir) << '\n';
  os << "rocof," << fmt(rocof) << '\n';
  os << "steady_state," << fmt(steady_state) << '\n';
  os << "dp_load," << fmt(dp_load) << '\n';
  os << "nadir_normalized," << fmt(nadir_normalized) << '\n';
  os << "rocof_normalized," << fmt(rocof_normalized) << '\n';
  if (trace_error) os << "trace_error," << fmt(*trace_error) << '\n';
  for (const auto& [n, v] : peaks) os << "peak." << n << ',' << fmt(v) << '\n';
  for (const auto& l : limits) os << "limit_violations." << l.device << ',' << l.violations << '\n';
}

void MetricsReport::write_checks(std::ostream& os) const {
  os << "check,value,tol,status,note\n";
  for (const auto& c : checks)
    os << c.name << ',' << fmt(c.value) << ',' << fmt(c.tol) << ',' << (!c.enforced ? "INFO" : c.pass ? "PASS" : "FAIL")
       << ',' << c.note << '\n';
}

MetricsReport compute_metrics(const lti::TimeSeries& series, double dp_load, double window) {
  const auto& f = series.channel("f_coi");
  MetricsReport r;
  r.dp_load = dp_load;
  const double dt = series.dt();
  const std::size_t w = (dt > 0.0 && window > dt) ? static_cast<std::size_t>(std::llround(window / dt)) : 1;
  for (std::size_t k = 0; k < f.size(); ++k) {
    r.nadir = std::max(r.nadir, std::abs(f[k]));
    if (k >= w && dt > 0.0) r.rocof = std::max(r.rocof, std::abs(f[k] - f[k - w]) / (static_cast<double>(w) * dt));
  }
  if (!f.empty()) r.steady_state = f.back();
  if (dp_load != 0.0) {
    r.nadir_normalized = r.nadir / std::abs(dp_load);
    r.rocof_normalized = r.rocof / std::abs(dp_load);
  }
  for (const auto& [name, v] : series.channels) {
    if (!name.starts_with("p.") && !name.starts_with("q.")) continue;
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    r.peaks.emplace_back(name, m);
  }
  return r;
}

namespace {

struct Config {
  design::Fleet fleet;
  adapt::CapacityState caps;
  std::vector<SgSpec> sgs;
};

std::vector<std::string> event_devices(const design::Fleet& f, const std::string& target) {
  std::vector<std::string> out;
  for (const auto& d : f.devices)
    if (d.name == target || d.name == target + "_foll") out.push_back(d.name);
  return out;
}

void readapt(Config& c) {
  for (const Channel ch : {Channel::Fp, Channel::Vq}) {
    double total = 0.0;
    for (const auto& d : c.fleet.devices) {
      const auto& f = ch == Channel::Vq ? d.factor_vq : d.factor_fp;
      if (f && f->kind == FactorKind::Lpf) {
        const auto& cap = c.caps.at(d.name);
        total += ch == Channel::Vq ? cap.q_capacity : cap.p_capacity;
      }
    }
    if (total > 0.0) c.fleet = adapt::update_dc_gains(c.fleet, c.caps, ch);
    else design::close_participation(c.fleet, ch);
  }
  design::realize(c.fleet);
}

/// Returns the injection change at the device bus caused by the event (excluding outage deviations).
double apply_event(Config& c, const Event& e) {
  double delta = 0.0;
  if (e.kind == Event::Kind::Capacity) {
    const auto names = event_devices(c.fleet, e.target);
    double rating = 0.0;
    for (const auto& n : names) rating += c.fleet.device(n).rating;
    for (const auto& n : names) {
      const double share = c.fleet.device(n).rating / rating;
      const double old = c.caps.at(n).p_capacity;
      std::tie(c.fleet, c.caps) = adapt::apply_capacity_event(c.fleet, c.caps, {e.time, n, share * e.value});
      delta += share * e.value - old;
    }
  } else if (e.kind == Event::Kind::Outage) {
    const auto names = event_devices(c.fleet, e.target);
    for (const auto& n : names) {
      delta -= c.caps.at(n).p_capacity;
      c.caps.devices.erase(n);
      std::erase_if(c.fleet.devices, [&](const design::DeviceSpec& d) { return d.name == n; });
    }
    std::erase_if(c.sgs, [&](const SgSpec& g) { return g.name == e.target; });
    readapt(c);
  }
  return delta;
}

std::string event_bus(const Config& c, const Event& e) {
  if (e.kind == Event::Kind::Load) return e.target;
  for (const auto& d : c.fleet.devices)
    if (d.name == e.target || d.name == e.target + "_foll") return d.bus;
  for (const auto& g : c.sgs)
    if (g.name == e.target) return g.bus;
  throw Error(ErrorKind::UnknownDevice, "no device '" + e.target + "'");
}

std::vector<std::string> event_units(const Config& c, const Event& e) {
  std::vector<std::string> out = event_devices(c.fleet, e.target);
  for (const auto& g : c.sgs)
    if (g.name == e.target) out.push_back(g.name);
  return out;
}

struct Plant {
  net::NetworkGraph graph;
  bool perturbed = false;
};

net::ClosedLoopModel build_model(const Scenario& sc, const Config& c, const Plant& plant, const lti::Polynomial& den) {
  const auto units = sc.units(c.fleet);
  switch (sc.model) {
    case ModelKind::Aggregate: {
      const std::vector<std::string> buses{"pcc"};
      return net::build_aggregate_model(units, buses, den);
    }
    case ModelKind::Network: return net::build_frequency_loop(units, net::build_laplacian(plant.graph));
    case ModelKind::Area: {
      spatial::AreaModel a;
      a.graph = plant.graph;
      a.devices = c.fleet;
      a.pocs = sc.pocs;
      a.homogeneous_ratio = sc.rx;
      a.vq_droop_factor = sc.vq_droop_factor;
      return spatial::build_area_model(a, plant.perturbed ? spatial::AreaMode::PerturbedPlant : spatial::AreaMode::Strict);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown model kind");
}

double design_ratio(const Scenario& sc) {
  spatial::AreaModel a;
  a.graph = sc.network;
  a.homogeneous_ratio = sc.rx;
  return spatial::design_ratio(a);
}

using Loads = std::map<std::string, std::pair<double, double>>;

std::vector<double> fill_inputs(const Scenario& sc, const lti::StateSpaceModel& m, const Loads& loads,
                                const spatial::RotationParams& rot) {
  std::vector<double> u(m.inputs(), 0.0);
  for (const auto& [bus, pq] : loads) {
    switch (sc.model) {
      case ModelKind::Aggregate: u[m.input_index("dp")] += pq.first; break;
      case ModelKind::Network: u[m.input_index("dp." + bus)] += pq.first; break;
      case ModelKind::Area: {
        const auto [pr, qr] = spatial::rotate_power(pq.first, pq.second, rot);
        u[m.input_index("dp'." + bus)] += pr;
        u[m.input_index("dq'." + bus)] += qr;
        break;
      }
    }
  }
  return u;
}

bool selected(const std::string& name, const std::vector<std::string>& patterns) {
  for (const auto& p : patterns) {
    if (!p.empty() && p.back() == '*') {
      if (name.starts_with(p.substr(0, p.size() - 1))) return true;
    } else if (name == p) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> default_outputs(ModelKind k) {
  if (k == ModelKind::Area) return {"f_poc.*", "f_coi", "dp'_poc", "p.*", "q.*", "p'.*"};
  return {"f_coi", "f.*", "p.*"};
}

struct Simulation {
  RunResult result;
  bool stable = true;
};

Simulation simulate_scenario(const Scenario& sc, const Plant& plant, const RunOptions& opt, bool require_stable) {
  const double dt = opt.dt.value_or(sc.dt);
  const double t_end = opt.t_end.value_or(sc.t_end);
  if (!(dt > 0.0) || !(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt and t_end must be positive");
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;

  // Configurations after each fleet-changing event.
  std::vector<Config> configs;
  configs.push_back({sc.fleet, adapt::CapacityState::from_fleet(sc.fleet, sc.base.mva), sc.sgs});
  std::vector<std::size_t> ev_sample, ev_config;
  std::vector<double> ev_delta;
  std::vector<std::string> ev_bus;
  std::vector<std::vector<std::string>> ev_units;
  std::vector<double> ev_pcap_lost;
  for (const auto& e : sc.events) {
    ev_sample.push_back(static_cast<std::size_t>(std::ceil(e.time / dt - 1e-9)));
    Config c = configs.back();
    ev_bus.push_back(event_bus(c, e));
    ev_units.push_back(e.kind == Event::Kind::Outage ? event_units(c, e) : std::vector<std::string>{});
    if (e.kind == Event::Kind::Load) {
      ev_delta.push_back(e.value);
      ev_config.push_back(configs.size() - 1);
      continue;
    }
    ev_delta.push_back(apply_event(c, e));
    configs.push_back(std::move(c));
    ev_config.push_back(configs.size() - 1);
  }

  lti::Polynomial den;
  if (sc.model == ModelKind::Aggregate)
    for (const auto& c : configs) den = net::poly_lcm(den, net::aggregate_denominator(sc.units(c.fleet)));
  std::vector<net::ClosedLoopModel> models;
  Simulation sim;
  for (const auto& c : configs) {
    models.push_back(build_model(sc, c, plant, den));
    if (!models.back().ss.is_stable()) {
      sim.stable = false;
      if (require_stable) throw Error(ErrorKind::InvalidArgument, "closed loop is unstable");
      return sim;
    }
  }

  // Channel universe across pieces.
  std::vector<std::string> names;
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<std::size_t>> maps;
  for (const auto& m : models) {
    std::vector<std::size_t> idx;
    for (const auto& o : m.ss.output_labels) {
      auto [it, fresh] = slot.emplace(o, names.size());
      if (fresh) names.push_back(o);
      idx.push_back(it->second);
    }
    maps.push_back(std::move(idx));
  }
  std::vector<std::vector<double>> rec(names.size(), std::vector<double>(n, 0.0));

  const auto rot = sc.model == ModelKind::Area ? spatial::RotationParams::from_ratio(design_ratio(sc))
                                               : spatial::RotationParams::from_ratio(0.0);
  const auto ref_model = lti::to_state_space(net::coherent_response(sc.units(configs.front().fleet)));
  lti::TustinStepper ref(ref_model, dt);

  std::size_t cfg = 0, ei = 0;
  auto stepper = std::make_unique<lti::TustinStepper>(models[0].ss, dt);
  Loads loads;
  std::vector<double> u(models[0].ss.inputs(), 0.0), y(models[0].ss.outputs());
  double total = 0.0, total_p = 0.0;
  std::vector<double> ur{0.0}, yr{0.0};
  std::vector<double> disturbance(n), reference(n);
  std::vector<std::size_t> event_samples;
  std::map<std::string, std::pair<double, std::size_t>> limits;

  for (std::size_t k = 0; k < n; ++k) {
    bool changed = false;
    while (ei < sc.events.size() && ev_sample[ei] <= k) {
      const auto& e = sc.events[ei];
      double dp = ev_delta[ei];
      if (e.kind == Event::Kind::Outage && k > 0)
        for (const auto& unit : ev_units[ei])
          if (auto it = slot.find("p." + unit); it != slot.end()) dp -= rec[it->second][k - 1];
      loads[ev_bus[ei]].first += dp;
      if (e.kind == Event::Kind::Load) loads[ev_bus[ei]].second += e.q;
      total_p += dp;
      if (ev_config[ei] != cfg) {
        cfg = ev_config[ei];
        auto next = std::make_unique<lti::TustinStepper>(models[cfg].ss, dt);
        next->import_state(*stepper);
        stepper = std::move(next);
        y.assign(models[cfg].ss.outputs(), 0.0);
      }
      event_samples.push_back(k);
      changed = true;
      ++ei;
    }
    if (changed) {
      u = fill_inputs(sc, models[cfg].ss, loads, rot);
      total = 0.0;
      for (const auto& [bus, pq] : loads) total += sc.model == ModelKind::Area ? spatial::rotate_power(pq.first, pq.second, rot).first : pq.first;
      ur[0] = total;
    }
    stepper->output(u, y);
    for (std::size_t o = 0; o < y.size(); ++o) rec[maps[cfg][o]][k] = y[o];
    ref.output(ur, yr);
    disturbance[k] = total;
    reference[k] = yr[0];
    for (const auto& d : configs[cfg].fleet.devices) {
      auto it = slot.find("p." + d.name);
      if (it == slot.end()) continue;
      auto& lim = limits[d.name];
      const double p = std::abs(rec[it->second][k]);
      lim.first = std::max(lim.first, p);
      if (p > configs[cfg].caps.at(d.name).p_capacity * (1.0 + 1e-9)) ++lim.second;
    }
    stepper->advance(u, u);
    ref.advance(ur, ur);
  }

  lti::TimeSeries all = lti::TimeSeries::uniform(dt, n);
  for (std::size_t c = 0; c < names.size(); ++c) all.add(names[c], std::move(rec[c]));
  auto& res = sim.result;
  res.metrics = compute_metrics(all, total_p);
  for (const auto& d : sc.fleet.devices)
    if (auto it = limits.find(d.name); it != limits.end())
      res.metrics.limits.push_back({d.name, d.p_capacity, it->second.first, it->second.second});

  // Trace matching outside the synchronization windows.
  std::vector<std::string> traced;
  for (const auto& nm : names)
    if (sc.model == ModelKind::Area ? nm.starts_with("f_poc.") : nm == "f_coi") traced.push_back(nm);
  const auto skip = static_cast<std::size_t>(std::llround(sc.tol.sync_window / dt));
  double gap = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    peak = std::max(peak, std::abs(reference[k]));
    bool masked = false;
    for (auto s : event_samples) masked |= k >= s && k < s + skip;
    if (masked) continue;
    for (const auto& nm : traced) gap = std::max(gap, std::abs(all.channel(nm)[k] - reference[k]));
  }
  res.metrics.trace_error = peak > 0.0 ? gap / peak : gap;
  res.metrics.checks.push_back({"trace." + std::string(sc.model == ModelKind::Area ? "f_poc" : "f_coi"),
                                *res.metrics.trace_error, sc.tol.trace, true, *res.metrics.trace_error < sc.tol.trace,
                                "relative to the desired response peak"});
  for (const auto& l : res.metrics.limits)
    res.metrics.checks.push_back({"limit." + l.device, static_cast<double>(l.violations), 1.0, false,
                                  l.violations == 0, "samples above p_capacity"});
  res.disturbance = std::move(disturbance);
  res.reference = std::move(reference);

  const auto patterns = sc.outputs.empty() ? default_outputs(sc.model) : sc.outputs;
  for (const auto& p : patterns) {
    bool any = false;
    for (const auto& nm : names) any |= selected(nm, {p});
    if (!any) throw Error(ErrorKind::MissingChannel, "output selection '" + p + "' matches no channel");
  }
  res.series = lti::TimeSeries::uniform(dt, n);
  for (auto& [nm, v] : all.channels)
    if (selected(nm, patterns)) res.series.add(nm, std::move(v));
  return sim;
}

}  // namespace

RunResult run(const Scenario& sc, const RunOptions& opt) {
  return simulate_scenario(sc, Plant{sc.network, false}, opt, true).result;
}

RunResult run_plant(const Scenario& sc, const std::vector<double>& line_ratios, const RunOptions& opt) {
  if (sc.model != ModelKind::Area) throw Error(ErrorKind::InvalidArgument, "plant perturbation needs an area scenario");
  Plant p{sc.network, true};
  std::size_t j = 0;
  for (auto& e : p.graph.edges) {
    if (std::isnan(e.rx)) continue;
    if (j >= line_ratios.size()) throw Error(ErrorKind::DimensionMismatch, "too few line ratios");
    e.rx = line_ratios[j++];
  }
  if (j != line_ratios.size()) throw Error(ErrorKind::DimensionMismatch, "too many line ratios");
  return simulate_scenario(sc, p, opt, true).result;
}

MetricsReport verify(const Scenario& sc, int points, double wmin, double wmax) {
  const auto grid = design::log_grid(wmin, wmax, points);
  MetricsReport r;
  const auto& f = sc.fleet;
  const double tol = sc.tol.residual;
  auto add = [&](std::string name, double v, double t, bool enforced, std::string note = {}) {
    r.checks.push_back({std::move(name), v, t, enforced, v < t, std::move(note)});
  };
  if (f.devices.empty()) {
    add("forming_present", 0.0, 0.5, false, "no DVPP devices");
    return r;
  }
  for (const Channel ch : {Channel::Fp, Channel::Vq}) {
    const auto p = design::check_participation(f, ch, grid);
    const std::string c = ch == Channel::Fp ? "fp" : "vq";
    add("participation." + c + ".sum", p.max_deviation, tol, true);
    add("participation." + c + ".dc_gain", p.dc_residual, tol, true);
  }
  const auto a = design::verify_aggregation(f, grid);
  const bool hybrid = f.has_following();
  const std::string band = hybrid ? "below " + fmt(a.band_edge) + " rad/s" : "";
  add("aggregation.freq.low", a.freq_low, hybrid ? sc.tol.hybrid : tol, true, band);
  add("aggregation.volt.low", a.volt_low, hybrid ? sc.tol.hybrid : tol, true, band);
  add("aggregation.freq.high", a.freq_high, tol, !hybrid, hybrid ? "above the PLL band, reported only" : "");
  add("aggregation.volt.high", a.volt_high, tol, !hybrid, hybrid ? "above the PLL band, reported only" : "");
  const bool forming = f.has_forming() || !sc.sgs.empty();
  r.checks.push_back({"forming_present", forming ? 1.0 : 0.0, 1.0, false, forming,
                      forming ? "" : "no forming device present"});
  return r;
}

void BodeTable::write_csv(std::ostream& os) const {
  os << "w";
  for (const auto& [n, v] : columns) os << ',' << n;
  os << '\n';
  for (std::size_t k = 0; k < w.size(); ++k) {
    os << fmt(w[k]);
    for (const auto& [n, v] : columns) os << ',' << fmt(v[k]);
    os << '\n';
  }
}

BodeTable bode(const Scenario& sc, double wmin, double wmax, int points) {
  const auto grid = design::log_grid(wmin, wmax, points);
  BodeTable t;
  t.w = grid;
  auto add_tf = [&](const std::string& name, const lti::RationalTF& tf, bool phase) {
    const auto resp = tf.response(grid);
    std::vector<double> mag(grid.size()), ph(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      mag[k] = std::abs(resp[k]);
      ph[k] = std::arg(resp[k]) * 180.0 / 3.14159265358979323846;
    }
    t.columns.emplace_back("mag." + name, std::move(mag));
    if (phase) t.columns.emplace_back("phase." + name, std::move(ph));
  };
  add_tf("tdes_pf", sc.fleet.desired.tf_pf, true);
  add_tf("agg_pf", net::coherent_response(net::units_from_fleet(sc.fleet)), true);
  for (const auto& d : sc.fleet.devices) {
    if (d.factor_fp) add_tf(d.name + ".fp", d.factor_fp->tf, false);
    if (d.factor_vq) add_tf(d.name + ".vq", d.factor_vq->tf, false);
  }
  return t;
}

void MonteCarloResult::write_samples_csv(std::ostream& os) const {
  os << "sample,seed,stable,max_dev_f_poc,spec_residual";
  for (const auto& l : lines) os << ",rx." << l;
  if (!samples.empty()) {
    for (const auto& [n, v] : samples.front().peak_p) os << ",peak_p." << n;
    for (const auto& [n, v] : samples.front().peak_q) os << ",peak_q." << n;
  }
  os << '\n';
  for (const auto& s : samples) {
    os << s.index << ',' << s.seed << ',' << (s.stable ? 1 : 0) << ',' << fmt(s.max_deviation) << ','
       << fmt(s.spec_residual);
    for (double r : s.ratios) os << ',' << fmt(r);
    for (const auto& [n, v] : s.peak_p) os << ',' << fmt(v);
    for (const auto& [n, v] : s.peak_q) os << ',' << fmt(v);
    os << '\n';
  }
}

void MonteCarloResult::write_summary_csv(std::ostream& os) const {
  std::vector<std::pair<std::string, double>> pp, pq;
  double mean = 0.0, spec = 0.0;
  for (const auto& s : samples) {
    mean += s.max_deviation / static_cast<double>(samples.size());
    spec = std::max(spec, s.spec_residual);
    if (pp.empty()) {
      pp = s.peak_p;
      pq = s.peak_q;
    }
    for (std::size_t i = 0; i < pp.size() && i < s.peak_p.size(); ++i) pp[i].second = std::max(pp[i].second, s.peak_p[i].second);
    for (std::size_t i = 0; i < pq.size() && i < s.peak_q.size(); ++i) pq[i].second = std::max(pq[i].second, s.peak_q[i].second);
  }
  os << "samples,all_stable,max_dev_f_poc,mean_dev_f_poc,max_spec_residual";
  for (const auto& [n, v] : pp) os << ",peak_p." << n;
  for (const auto& [n, v] : pq) os << ",peak_q." << n;
  os << '\n';
  os << samples.size() << ',' << (all_stable ? 1 : 0) << ',' << fmt(max_deviation) << ',' << fmt(mean) << ','
     << fmt(spec);
  for (const auto& [n, v] : pp) os << ',' << fmt(v);
  for (const auto& [n, v] : pq) os << ',' << fmt(v);
  os << '\n';
}

MonteCarloResult montecarlo(const Scenario& sc, std::optional<std::size_t> samples, std::optional<std::uint64_t> seed,
                            unsigned threads, const RunOptions& opt) {
  if (sc.model != ModelKind::Area) throw Error(ErrorKind::InvalidArgument, "Monte Carlo needs an area scenario");
  const RxMonteCarlo block = sc.montecarlo.value_or(RxMonteCarlo{});
  const std::size_t n = samples.value_or(block.samples);
  const std::uint64_t base = seed.value_or(block.seed);

  MonteCarloResult out;
  std::size_t n_lines = 0;
  for (const auto& e : sc.network.edges)
    if (!std::isnan(e.rx)) {
      ++n_lines;
      out.lines.push_back(sc.network.nodes[e.from] + "-" + sc.network.nodes[e.to]);
    }
  if (n_lines == 0) throw Error(ErrorKind::InvalidArgument, "no line carries an explicit R/X to perturb");
  const auto ratios = spatial::sample_rx(block.min_ratio, block.max_ratio, n_lines, n, base);

  out.baseline = run(sc, opt);
  std::vector<std::string> pocs;
  for (const auto& [nm, v] : out.baseline.series.channels)
    if (nm.starts_with("f_poc.")) pocs.push_back(nm);
  if (pocs.empty())
    for (const auto& p : sc.pocs) pocs.push_back("f_poc." + p);

  Scenario probe = sc;
  probe.outputs = {"f_poc.*", "f_coi", "p.*", "q.*"};
  out.samples.resize(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      auto& s = out.samples[i];
      s.index = i;
      s.seed = base + i;
      s.ratios = ratios[i];
      try {
        Plant p{sc.network, true};
        std::size_t j = 0;
        for (auto& e : p.graph.edges)
          if (!std::isnan(e.rx)) e.rx = ratios[i][j++];
        const auto sim = simulate_scenario(probe, p, opt, false);
        s.stable = sim.stable;
        if (!sim.stable) {
          s.max_deviation = std::numeric_limits<double>::infinity();
          continue;
        }
        for (const auto& c : pocs) {
          const auto& a = sim.result.series.channel(c);
          const auto& b = out.baseline.series.channel(c);
          for (std::size_t k = 0; k < a.size(); ++k) s.max_deviation = std::max(s.max_deviation, std::abs(a[k] - b[k]));
        }
        s.spec_residual = sim.result.metrics.trace_error.value_or(0.0);
        for (const auto& [nm, v] : sim.result.metrics.peaks) {
          if (nm.starts_with("p.")) s.peak_p.emplace_back(nm.substr(2), v);
          if (nm.starts_with("q.")) s.peak_q.emplace_back(nm.substr(2), v);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned hw = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  hw = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < hw; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& s : out.samples) {
    out.all_stable &= s.stable;
    out.max_deviation = std::max(out.max_deviation, s.max_deviation);
  }
  return out;
}

}  // namespace dvpp::scenario
