#include <cstdio>
#include <fstream>
#include <set>

#include "toriclab/harness/run.hpp"

namespace toriclab::harness {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

const std::set<std::string> kKinds = {"functional", "convergence", "geodesic", "morse", "adeg", "hilbert"};
const std::set<std::string> kKeys = {"kind",  "weight",    "reference", "endpoint",       "weights", "k",
                                     "grid",  "tolerances", "samples",  "seed",           "D",       "ell",
                                     "svg",   "output",    "lattice_trials"};

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

int integer(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return j[key].get<int>();
}

std::vector<int> parse_k(const json& j) {
  std::vector<int> ks;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw ConfigError("'k' entries must be integers");
      ks.push_back(v.get<int>());
    }
  } else if (j.is_object()) {
    const int start = integer(j, "start", 0), stop = integer(j, "stop", 0);
    if (start < 1 || stop < start) throw ConfigError("'k' range needs 1 <= start <= stop");
    if (j.contains("factor")) {
      const int f = integer(j, "factor", 2);
      if (f < 2) throw ConfigError("'k.factor' must be >= 2");
      for (long k = start; k <= stop; k *= f) ks.push_back(static_cast<int>(k));
    } else {
      const int step = integer(j, "step", 1);
      if (step < 1) throw ConfigError("'k.step' must be >= 1");
      for (int k = start; k <= stop; k += step) ks.push_back(k);
    }
  } else {
    throw ConfigError("'k' must be an array or a range object");
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw ConfigError("'k' values must be positive");
    if (i > 0 && ks[i] <= ks[i - 1]) throw ConfigError("'k' values must increase");
  }
  return ks;
}

}  // namespace

WeightSpec parse_weight_spec(const json& j, double T, std::size_t G) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const WeightSpec fs = WeightSpec::fubini_study(1, T, G);
    if (s == "fs") return fs;
    if (s == "ml") return WeightSpec::max_linear(1, T, G);
    if (s == "fs+bump") return WeightSpec::perturbed(fs, 0.3, 0.0, 1.0);
    if (s == "fs+log") return WeightSpec::log_singular(fs, 0.2);
    if (s == "fs+shift") return WeightSpec::shifted(fs, 0.5);
    throw ConfigError("unknown weight shorthand '" + s + "'");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ConfigError("weight spec must be a shorthand string or an object with a 'type'");
  const std::string type = j["type"].get<std::string>();
  const int m = integer(j, "m", 1);
  const double t_half = number(j, "T", T);
  const double cells = number(j, "G", static_cast<double>(G));
  if (!(cells >= 2) || cells != std::floor(cells)) throw ConfigError("'G' must be an integer >= 2");
  auto base = [&]() {
    if (!j.contains("base")) throw ConfigError("weight type '" + type + "' needs a 'base'");
    return parse_weight_spec(j["base"], T, G);
  };
  if (type == "fs") return WeightSpec::fubini_study(m, t_half, static_cast<std::size_t>(cells));
  if (type == "max_linear") return WeightSpec::max_linear(m, t_half, static_cast<std::size_t>(cells));
  if (type == "perturbed")
    return WeightSpec::perturbed(base(), number(j, "amplitude", 0.0), number(j, "center", 0.0),
                                 number(j, "width", 1.0));
  if (type == "log_singular") return WeightSpec::log_singular(base(), number(j, "epsilon", 0.0));
  if (type == "shifted") return WeightSpec::shifted(base(), number(j, "c", 0.0));
  throw ConfigError("unknown weight type '" + type + "'");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ConfigError("config needs a string 'kind'");

  ExperimentConfig c;
  c.kind = doc["kind"].get<std::string>();
  if (!kKinds.count(c.kind)) throw ConfigError("unknown experiment kind '" + c.kind + "'");
  c.document = doc;
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("'output' must be a string");
    c.output = doc["output"].get<std::string>();
    c.document.erase("output");
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(c.document.dump())));
  c.hash = hex;

  if (doc.contains("seed")) {
    const json& sd = doc["seed"];
    if (!sd.is_number_unsigned() && !(sd.is_number_integer() && sd.get<std::int64_t>() >= 0))
      throw ConfigError("'seed' must be a non-negative integer");
    c.seed = sd.get<std::uint64_t>();
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) throw ConfigError("'grid' must be an object");
    c.T = number(g, "T", c.T);
    c.G = static_cast<std::size_t>(integer(g, "G", static_cast<int>(c.G)));
    if (!(c.T > 0) || c.G < 2) throw ConfigError("'grid' needs T > 0 and G >= 2");
  }
  if (doc.contains("k")) c.k_list = parse_k(doc["k"]);
  c.samples = integer(doc, "samples", c.samples);
  if (c.samples < 3) throw ConfigError("'samples' must be >= 3");
  c.lattice_trials = integer(doc, "lattice_trials", c.lattice_trials);
  if (c.lattice_trials < 0) throw ConfigError("'lattice_trials' must be >= 0");
  if (doc.contains("svg")) {
    if (!doc["svg"].is_boolean()) throw ConfigError("'svg' must be a boolean");
    c.svg = doc["svg"].get<bool>();
  }
  if (doc.contains("tolerances")) {
    if (!doc["tolerances"].is_object()) throw ConfigError("'tolerances' must be an object");
    for (const auto& [key, value] : doc["tolerances"].items())
      if (!value.is_number()) throw ConfigError("tolerance '" + key + "' must be a number");
    c.tolerances = doc["tolerances"];
  }

  // Kind-specific requirements.
  auto need = [&](const char* key) {
    if (!doc.contains(key)) throw ConfigError("kind '" + c.kind + "' needs '" + key + "'");
  };
  if (c.kind == "hilbert") {
    need("D");
    need("ell");
  } else if (c.kind == "functional") {
    need("weights");
  } else {
    need("weight");
    if (c.kind == "geodesic") need("endpoint");
    if (c.kind != "geodesic" && c.k_list.empty()) throw ConfigError("kind '" + c.kind + "' needs 'k'");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace toriclab::harness
