// lab: experiment driver.
//   lab run <config.json> [--out DIR]
//   lab selftest [--covolume-factor F] [--grid G]
//   lab hilbert --D 5,13 --ell 12 [--out DIR]
//   lab convergence --weight fs+bump --kmax 256 [--out DIR]
// Exit codes: 0 success, 2 config error, 3 numerical contract violation.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "toriclab/harness/run.hpp"

using namespace toriclab;
using namespace toriclab::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitContract = 3;

int report(const std::vector<Check>& checks, bool verbose) {
  for (const auto& c : checks)
    if (verbose || !c.pass) std::printf("%s  %s  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  if (const Check* f = first_failure(checks)) {
    std::fprintf(stderr, "contract violation: %s (%s)\n", f->name.c_str(), f->detail.c_str());
    return kExitContract;
  }
  return 0;
}

int run_config(ExperimentConfig c, const std::string& out, bool verbose) {
  if (!out.empty()) c.output = out;
  const RunResult r = run(c);
  for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
  return report(r.checks, verbose);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toric Hilbert-Samuel laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "print every check");

  auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string config_path, out_dir;
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides the config)");

  auto* self_cmd = app.add_subcommand("selftest", "small-scale invariant suite");
  SelftestOptions self;
  self_cmd->add_option("--covolume-factor", self.covolume_factor, "covolume normalisation factor (mutation test)");
  self_cmd->add_option("--grid", self.G, "grid cells")->check(CLI::Range(8, 1 << 20));

  auto* hil_cmd = app.add_subcommand("hilbert", "Hilbert modular slope constant");
  std::vector<std::int64_t> Ds, ells;
  hil_cmd->add_option("--D", Ds, "discriminants")->required()->delimiter(',');
  hil_cmd->add_option("--ell", ells, "levels")->required()->delimiter(',');
  std::string hil_out;
  hil_cmd->add_option("--out", hil_out, "output directory");

  auto* conv_cmd = app.add_subcommand("convergence", "L_k -> E convergence study, k doubling from 8");
  std::string weight = "fs+bump", conv_out;
  int kmax = 256, G = 4096;
  conv_cmd->add_option("--weight", weight, "weight shorthand (fs, ml, fs+bump, fs+log, fs+shift)");
  conv_cmd->add_option("--kmax", kmax, "largest k")->check(CLI::Range(8, 4096));
  conv_cmd->add_option("--grid", G, "grid cells")->check(CLI::Range(8, 1 << 20));
  conv_cmd->add_option("--out", conv_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return run_config(load_config(config_path), out_dir, verbose);
    if (*self_cmd) {
      const SelftestReport r = selftest(self);
      const int code = report(r.checks, verbose);
      std::printf("selftest %s in %.1f s\n", code == 0 ? "passed" : "FAILED", r.seconds);
      return code;
    }
    if (*hil_cmd) {
      nlohmann::json doc = {{"kind", "hilbert"}, {"D", Ds}, {"ell", ells}};
      if (!hil_out.empty()) return run_config(parse_config(doc), hil_out, verbose);
      const HilbertStudy s = hilbert_study(Ds, ells);
      for (const auto& h : s.records) std::printf("%s\n", hilbert_json(h).dump().c_str());
      return report(s.checks, verbose);
    }
    if (*conv_cmd) {
      nlohmann::json doc = {{"kind", "convergence"},
                            {"weight", weight},
                            {"grid", {{"T", 30.0}, {"G", G}}},
                            {"k", {{"start", 8}, {"stop", kmax}, {"factor", 2}}},
                            {"svg", true}};
      const ExperimentConfig c = parse_config(doc);
      return run_config(c, conv_out.empty() ? "lab_out" : conv_out, verbose);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return kExitContract;
  }
  return 0;
}
