#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "toriclab/harness/run.hpp"

using namespace toriclab;
using namespace toriclab::harness;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("toriclab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
  CHECK_THROWS_AS(parse_config({{"kind", "nope"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"kind", "convergence"}, {"weight", "fs"}}), ConfigError);  // no k
  CHECK_THROWS_AS(parse_config({{"kind", "convergence"}, {"weight", "fs"}, {"k", {16, 8}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"kind", "hilbert"}, {"D", {5}}, {"ell", {12}}, {"typo", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_weight_spec("fs+unknown", 30, 64), ConfigError);
  CHECK_THROWS_AS(parse_weight_spec(json{{"type", "perturbed"}}, 30, 64), ConfigError);

  const auto c = parse_config({{"kind", "convergence"},
                               {"weight", "fs+bump"},
                               {"k", {{"start", 8}, {"stop", 64}, {"factor", 2}}},
                               {"output", "somewhere"}});
  CHECK(c.k_list == std::vector<int>{8, 16, 32, 64});
  CHECK(c.output == "somewhere");
  // The output directory does not enter the hash.
  const auto d = parse_config({{"kind", "convergence"}, {"weight", "fs+bump"}, {"k", {{"start", 8}, {"stop", 64}, {"factor", 2}}}});
  CHECK(c.hash == d.hash);
  CHECK(c.hash.size() == 16);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

  const auto spec = parse_weight_spec(json{{"type", "log_singular"}, {"base", "fs"}, {"epsilon", 0.2}}, 30, 512);
  CHECK(make_weight(spec).is_singular());
}

TEST_CASE("runs are deterministic and tagged with the config hash") {
  json doc = {{"kind", "convergence"},
              {"weight", "fs+bump"},
              {"k", {8, 16, 32}},
              {"grid", {{"T", 30}, {"G", 1024}}},
              {"svg", true},
              {"seed", 5}};
  auto a = parse_config(doc), b = parse_config(doc);
  a.output = scratch("det_a");
  b.output = scratch("det_b");
  const auto ra = run(a), rb = run(b);
  CHECK(ra.ok());
  REQUIRE(ra.files.size() == 3);
  CHECK(slurp(a.output / "convergence.csv") == slurp(b.output / "convergence.csv"));
  for (const auto& f : ra.files) CHECK(slurp(f).find(a.hash) != std::string::npos);
  const json m = json::parse(slurp(a.output / "manifest.json"));
  CHECK(m["config_hash"] == a.hash);
  CHECK(m["seed"] == 5);
  CHECK(m["status"] == "pass");
}

TEST_CASE("hilbert batch") {
  auto c = parse_config({{"kind", "hilbert"}, {"D", {5, 13, 17}}, {"ell", {12}}});
  c.output = scratch("hilbert");
  const auto r = run(c);
  CHECK(r.ok());
  const json j = json::parse(slurp(c.output / "hilbert.json"));
  REQUIRE(j["records"].size() == 3);
  CHECK(j["records"][0]["zeta_F_m1"] == "1/30");
  CHECK(j["records"][1]["zeta_F_m1"] == "1/6");
  CHECK(j["config_hash"] == c.hash);

  auto bad = parse_config({{"kind", "hilbert"}, {"D", {8}}, {"ell", {12}}});
  bad.output = scratch("hilbert_bad");
  CHECK_THROWS_AS(run(bad), ConfigError);
}

TEST_CASE("functional and adeg runs") {
  auto f = parse_config({{"kind", "functional"}, {"weights", {"fs", "fs+bump", "fs+log"}}, {"seed", 2}});
  f.output = scratch("functional");
  CHECK(run(f).ok());

  auto a = parse_config({{"kind", "adeg"},
                         {"weight", "fs+bump"},
                         {"k", {{"start", 32}, {"stop", 128}, {"step", 16}}},
                         {"lattice_trials", 50},
                         {"seed", 4}});
  a.output = scratch("adeg");
  const auto r = run(a);
  CHECK(r.ok());
  CHECK(r.manifest["results"]["lattice"]["held"] == 50);
}

TEST_CASE("selftest and its sentinels") {
  const auto ok = selftest();
  for (const auto& c : ok.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
  CHECK(ok.seconds < 60.0);

  SelftestOptions mutated;
  mutated.covolume_factor = 1.0;
  const auto m = selftest(mutated);
  REQUIRE(first_failure(m.checks) != nullptr);
  CHECK(first_failure(m.checks)->name == "bridge identity");

  SelftestOptions coarse;
  coarse.G = 64;
  const auto c = selftest(coarse);
  bool flagged = false;
  for (const auto& ch : c.checks)
    if (ch.name == "FS Gram entries match Beta integrals" || ch.name == "L_k stable under grid doubling")
      flagged |= !ch.pass;
  CHECK(flagged);
}

TEST_CASE("svg plot") {
  const auto s = svg_plot("t", "x", "y", {1, 2, 3}, {1e-1, 1e-2, 1e-3}, true, "abc");
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("config_hash=abc") != std::string::npos);
  CHECK(s.find("<polyline") != std::string::npos);
}
