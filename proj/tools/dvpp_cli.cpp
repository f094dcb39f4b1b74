#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "dvpp/errors.hpp"
#include "dvpp/scenario/runner.hpp"
#include "dvpp/scenario/scenario.hpp"

namespace fs = std::filesystem;
using namespace dvpp;
using namespace dvpp::scenario;

namespace {

enum Exit { kPass = 0, kVerifyFail = 1, kParse = 2, kSim = 3 };

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void print_checks(const MetricsReport& r) { r.write_checks(std::cout); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic virtual power plant scenario tool"};
  app.require_subcommand(1);

  std::string file;
  std::optional<double> dt, tend;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario");
  run_cmd->add_option("file", file, "scenario file")->required();
  run_cmd->add_option("--dt", dt, "step size in seconds");
  run_cmd->add_option("--tend", tend, "end time in seconds");
  run_cmd->add_option("--out", out_dir, "directory for timeseries.csv and metrics.csv");

  auto* verify_cmd = app.add_subcommand("verify", "check participation and aggregation conditions");
  verify_cmd->add_option("file", file, "scenario file")->required();

  double wmin = 1e-2, wmax = 1e3;
  int points = 200;
  auto* bode_cmd = app.add_subcommand("bode", "frequency response table");
  bode_cmd->add_option("file", file, "scenario file")->required();
  bode_cmd->add_option("--wmin", wmin, "lowest frequency in rad/s")->check(CLI::PositiveNumber);
  bode_cmd->add_option("--wmax", wmax, "highest frequency in rad/s")->check(CLI::PositiveNumber);
  bode_cmd->add_option("--points", points, "grid points")->check(CLI::PositiveNumber);
  bode_cmd->add_option("--out", out_dir, "directory for bode.csv");

  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  auto* mc_cmd = app.add_subcommand("montecarlo", "sample heterogeneous R/X plants");
  mc_cmd->add_option("file", file, "scenario file")->required();
  mc_cmd->add_option("--samples", samples, "number of sampled plants")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", seed, "base seed");
  mc_cmd->add_option("--threads", threads, "worker threads, 0 for all cores");
  mc_cmd->add_option("--dt", dt, "step size in seconds");
  mc_cmd->add_option("--tend", tend, "end time in seconds");
  mc_cmd->add_option("--out", out_dir, "directory for montecarlo_samples.csv and montecarlo_summary.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kParse;
  }

  Scenario sc;
  try {
    sc = load_scenario(file);
  } catch (const Error& e) {
    std::cerr << file << ": " << e.what() << '\n';
    return kParse;
  }

  try {
    if (!out_dir.empty()) fs::create_directories(out_dir);
    const fs::path out(out_dir);
    const RunOptions opt{dt, tend};

    if (*run_cmd) {
      const auto r = run(sc, opt);
      if (!out_dir.empty()) {
        auto ts = open_out(out / "timeseries.csv");
        r.series.write_csv(ts);
        auto m = open_out(out / "metrics.csv");
        r.metrics.write(m);
        auto c = open_out(out / "checks.csv");
        r.metrics.write_checks(c);
      }
      r.metrics.write(std::cout);
      print_checks(r.metrics);
      return r.metrics.pass() ? kPass : kVerifyFail;
    }
    if (*verify_cmd) {
      const auto r = verify(sc);
      print_checks(r);
      return r.pass() ? kPass : kVerifyFail;
    }
    if (*bode_cmd) {
      const auto t = bode(sc, wmin, wmax, points);
      if (!out_dir.empty()) {
        auto f = open_out(out / "bode.csv");
        t.write_csv(f);
      } else {
        t.write_csv(std::cout);
      }
      return kPass;
    }
    if (*mc_cmd) {
      const auto r = montecarlo(sc, samples, seed, threads, opt);
      if (!out_dir.empty()) {
        auto s = open_out(out / "montecarlo_samples.csv");
        r.write_samples_csv(s);
        auto m = open_out(out / "montecarlo_summary.csv");
        r.write_summary_csv(m);
      }
      r.write_summary_csv(std::cout);
      return r.all_stable ? kPass : kVerifyFail;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::SemanticError ? kParse : kSim;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSim;
  }
  return kPass;
}
