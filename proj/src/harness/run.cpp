#include <chrono>
#include <fstream>
#include <random>

#include "toriclab/harness/run.hpp"
#include "toriclab/kernels.hpp"

namespace toriclab::harness {

using nlohmann::json;

json hilbert_json(const HilbertConstant& h) {
  json j = {{"D", h.D},
            {"ell", h.ell},
            {"d_ell", h.d_ell},
            {"zeta_F_m1", h.zeta_F_m1.str()},
            {"zeta_F_prime_m1", h.zeta_F_prime_m1},
            {"bracket", h.bracket},
            {"slope", h.slope},
            {"k3_coefficient", h.k3_coefficient}};
  if (!h.warning.empty()) j["warning"] = h.warning;
  return j;
}

namespace {

class Writer {
 public:
  Writer(const ExperimentConfig& c, RunResult& r) : c_(c), r_(r) {
    std::error_code ec;
    std::filesystem::create_directories(c.output, ec);
    if (ec) throw ConfigError("cannot create output directory '" + c.output.string() + "': " + ec.message());
  }

  void csv(const std::string& name, const std::string& body) {
    write(name, "# config_hash=" + c_.hash + " seed=" + std::to_string(c_.seed) + "\n" + body);
  }
  void text(const std::string& name, const std::string& body) { write(name, body); }

 private:
  void write(const std::string& name, const std::string& body) {
    const auto path = c_.output / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    r_.files.push_back(path);
  }
  const ExperimentConfig& c_;
  RunResult& r_;
};

ToricWeight build(const json& spec, const ExperimentConfig& c) {
  const WeightSpec s = parse_weight_spec(spec, c.T, c.G);
  try {
    return make_weight(s);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("weight spec is not constructible: ") + e.what());
  }
}

ToricWeight reference_for(const ToricWeight& u, const ExperimentConfig& c) {
  if (c.document.contains("reference")) return build(c.document["reference"], c);
  return make_weight(WeightSpec::fubini_study(u.degree(), c.T, c.G));
}

double tolerance(const ExperimentConfig& c, const char* key, double fallback) {
  return c.tolerances.contains(key) ? c.tolerances[key].get<double>() : fallback;
}

std::vector<std::int64_t> int_list(const json& j, const char* key) {
  std::vector<std::int64_t> out;
  const json& v = j[key];
  if (v.is_number_integer()) return {v.get<std::int64_t>()};
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an integer or an array");
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ConfigError(std::string("'") + key + "' entries must be integers");
    out.push_back(x.get<std::int64_t>());
  }
  return out;
}

void append(std::vector<Check>& to, const std::vector<Check>& from) { to.insert(to.end(), from.begin(), from.end()); }

void run_functional(const ExperimentConfig& c, RunResult& r, Writer& w) {
  const json& list = c.document["weights"];
  if (!list.is_array() || list.empty()) throw ConfigError("'weights' must be a non-empty array");
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> amp(0.01, 0.3), center(-2.0, 2.0), width(0.5, 2.0);
  std::string csv = "index,energy_direct,energy_legendre,mass\n";
  for (std::size_t i = 0; i < list.size(); ++i) {
    const WeightSpec spec = parse_weight_spec(list[i], c.T, c.G);
    const ToricWeight u = build(list[i], c);
    const ToricWeight u0 = reference_for(u, c);
    const double mass = monge_ampere(u).total_mass();
    double ed, el;
    if (u.has_minimal_singularities()) {
      ed = energy_direct(u, u0);
      el = energy_legendre(u, u0);
      r.checks.push_back({"weight " + std::to_string(i) + ": energies agree", std::abs(ed - el) <= kTolEnergy,
                          "|diff| = " + fmt(std::abs(ed - el))});
      r.checks.push_back({"weight " + std::to_string(i) + ": full Monge-Ampere mass",
                          std::abs(mass - 1.0) <= kTolMass, "mass " + fmt(mass)});
      // Seeded monotonicity probes: adding a positive bump cannot lower E.
      bool monotone = true;
      for (int probe = 0; probe < 8; ++probe) {
        const ToricWeight v = make_weight(WeightSpec::perturbed(spec, amp(rng), center(rng), width(rng)));
        monotone &= energy_direct(v, u0) >= ed - kTolEnergy;
      }
      r.checks.push_back({"weight " + std::to_string(i) + ": energy monotone under positive bumps", monotone, ""});
    } else {
      ed = el = energy_of(u, u0);
    }
    csv += std::to_string(i) + "," + fmt(ed) + "," + fmt(el) + "," + fmt(mass) + "\n";
  }
  w.csv("functional.csv", csv);
}

void run_convergence(const ExperimentConfig& c, RunResult& r, Writer& w) {
  const ToricWeight u = build(c.document["weight"], c);
  const ToricWeight u0 = reference_for(u, c);
  const auto s = convergence_study(u, u0, c.k_list, tolerance(c, "gap_factor", 0.05));
  append(r.checks, s.checks);
  w.csv("convergence.csv", convergence_csv(s));
  r.manifest["energy"] = s.energy_direct;
  if (c.svg) {
    std::vector<double> x, y;
    for (const auto& row : s.rows) x.push_back(row.k), y.push_back(row.gap);
    w.text("convergence.svg", svg_plot("|L_k - E| against k", "k", "gap", x, y, true, c.hash));
  }
}

void run_geodesic(const ExperimentConfig& c, RunResult& r, Writer& w) {
  const ToricWeight u0 = build(c.document["weight"], c);
  const ToricWeight u1 = build(c.document["endpoint"], c);
  const int k = c.k_list.empty() ? 32 : c.k_list.front();
  const auto s = geodesic_study(u0, u1, c.samples, k);
  append(r.checks, s.checks);
  w.csv("geodesic.csv", geodesic_csv(s));
  if (c.svg) {
    std::vector<double> x, y;
    for (const auto& row : s.rows) x.push_back(row.s), y.push_back(row.energy);
    w.text("geodesic.svg", svg_plot("energy along the geodesic", "s", "E", x, y, false, c.hash));
  }
}

void run_morse(const ExperimentConfig& c, RunResult& r, Writer& w) {
  const ToricWeight u = build(c.document["weight"], c);
  const auto s = morse_study(u, c.k_list);
  append(r.checks, s.checks);
  w.csv("morse.csv", morse_csv(s));
  if (c.svg) {
    std::vector<double> x, y;
    for (const auto& row : s.rows) x.push_back(row.k), y.push_back(std::abs(row.delta));
    w.text("morse.svg", svg_plot("|delta_k| against k", "k", "|delta|", x, y, true, c.hash));
  }
}

void run_adeg(const ExperimentConfig& c, RunResult& r, Writer& w) {
  const ToricWeight u = build(c.document["weight"], c);
  const ToricWeight u0 = reference_for(u, c);
  const double rel = tolerance(c, "slope_rel", u.has_minimal_singularities() ? 0.02 : 0.05);
  const auto s = adeg_study(u, u0, c.k_list, rel);
  append(r.checks, s.checks);
  w.csv("height.csv", height_csv(s.difference));
  r.manifest["energy"] = s.energy;
  r.manifest["extrapolated_slope"] = s.difference.extrapolated_slope;
  if (c.lattice_trials > 0) {
    const auto l = lattice_study(c.seed, c.lattice_trials);
    append(r.checks, l.checks);
    r.manifest["lattice"] = {{"trials", l.trials}, {"held", l.held}, {"min_margin", l.min_margin}};
  }
}

void run_hilbert(const ExperimentConfig& c, RunResult& r, Writer& w) {
  HilbertStudy s;
  try {
    s = hilbert_study(int_list(c.document, "D"), int_list(c.document, "ell"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  append(r.checks, s.checks);
  json records = json::array();
  for (const auto& h : s.records) records.push_back(hilbert_json(h));
  w.text("hilbert.json", json({{"config_hash", c.hash}, {"seed", c.seed}, {"records", records}}).dump(2) + "\n");
  w.csv("hilbert.csv", hilbert_csv(s));
}

}  // namespace

RunResult run(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  r.manifest = json::object();
  Writer w(c, r);
  if (c.kind == "functional") run_functional(c, r, w);
  else if (c.kind == "convergence") run_convergence(c, r, w);
  else if (c.kind == "geodesic") run_geodesic(c, r, w);
  else if (c.kind == "morse") run_morse(c, r, w);
  else if (c.kind == "adeg") run_adeg(c, r, w);
  else if (c.kind == "hilbert") run_hilbert(c, r, w);
  else throw ConfigError("unknown experiment kind '" + c.kind + "'");

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json checks = json::array();
  for (const auto& ch : r.checks) checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
  json outputs = json::array();
  for (const auto& f : r.files) outputs.push_back(f.filename().string());
  json results = r.manifest;
  r.manifest = {{"tool", "lab"},
                {"version", "0.1.0"},
                {"kind", c.kind},
                {"config", c.document},
                {"config_hash", c.hash},
                {"seed", c.seed},
                {"backend", std::string(kernels::backend_name(kernels::active_backend()))},
                {"wall_time_s", seconds},
                {"outputs", outputs},
                {"results", results},
                {"checks", checks},
                {"status", r.ok() ? "pass" : "contract_violation"}};
  w.text("manifest.json", r.manifest.dump(2) + "\n");
  return r;
}

}  // namespace toriclab::harness
