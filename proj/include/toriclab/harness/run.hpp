#pragma once

// JSON-configured experiment runs and the small-scale selftest.
//
// Config document:
//   {"kind": "functional" | "convergence" | "geodesic" | "morse" | "adeg" | "hilbert",
//    "weight": SPEC, "reference": SPEC, "endpoint": SPEC, "weights": [SPEC...],
//    "k": [int...] | {"start", "stop", "factor"} | {"start", "stop", "step"},
//    "grid": {"T", "G"}, "tolerances": {name: value}, "samples", "seed",
//    "lattice_trials", "D": [int...], "ell": [int...], "svg": bool, "output": dir}
// SPEC is a shorthand string ("fs", "ml", "fs+bump", "fs+log", "fs+shift")
// or {"type": "fs" | "max_linear" | "perturbed" | "log_singular" | "shifted",
//     "m", "base", "amplitude", "center", "width", "epsilon", "c"}.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "toriclab/convex.hpp"
#include "toriclab/harness/studies.hpp"

namespace toriclab::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string kind;
  nlohmann::json document;  // as given, minus "output"
  std::string hash;         // FNV-1a 64 of the canonical dump, hex
  std::uint64_t seed = 0;
  double T = 30.0;
  std::size_t G = 4096;
  std::vector<int> k_list;
  int samples = 11;
  int lattice_trials = 1000;
  bool svg = false;
  std::filesystem::path output = "lab_out";
  nlohmann::json tolerances = nlohmann::json::object();
};

std::uint64_t fnv1a64(const std::string& bytes);
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Weight spec from JSON with grid defaults from the config; ConfigError on
/// malformed specs.
WeightSpec parse_weight_spec(const nlohmann::json& j, double T, std::size_t G);

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::vector<Check> checks;
  nlohmann::json manifest;
  [[nodiscard]] bool ok() const { return first_failure(checks) == nullptr; }
};

/// Runs the experiment and writes manifest.json plus CSVs (and SVGs) into
/// config.output. Every file carries the config hash.
RunResult run(const ExperimentConfig& config);

/// Line plot with the given series; y on a log scale when log_y.
std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& x, const std::vector<double>& y, bool log_y,
                     const std::string& hash);

struct SelftestOptions {
  double covolume_factor = 2.0;  // mutation knob for the bridge sentinel
  std::size_t G = 1024;
  double T = 12.0;  // FS is affine to e^{-2T} beyond |t| = T
};

struct SelftestReport {
  std::vector<Check> checks;
  double seconds = 0.0;
  [[nodiscard]] bool ok() const { return first_failure(checks) == nullptr; }
};

/// Invariant suite at k <= 32 on a G-cell grid.
SelftestReport selftest(const SelftestOptions& options = {});

}  // namespace toriclab::harness

namespace toriclab::harness {

/// {D, ell, d_ell, zeta_F_m1: "p/q", zeta_F_prime_m1, bracket, slope, k3_coefficient[, warning]}.
nlohmann::json hilbert_json(const HilbertConstant& h);

}  // namespace toriclab::harness
