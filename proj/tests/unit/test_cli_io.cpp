#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fracsp/config.hpp"
#include "fracsp/error.hpp"
#include "fracsp/io.hpp"
#include "fracsp/run.hpp"
#include "helpers.hpp"
#include "json.hpp"

using namespace fracsp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fracsp_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> violations(const std::string& text,
                                    const std::vector<Override>& ov = {}) {
  try {
    parse_config_string(text, ov);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> bits;
  int tested = 0;
  while (tested < 2000) {
    double x = std::bit_cast<double>(bits(rng));
    if (!std::isfinite(x)) continue;
    std::string s = format_double(x);
    double y = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
    REQUIRE(ec == std::errc());
    CHECK(ptr == s.data() + s.size());
    CHECK(std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y));
    ++tested;
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv escaping and layout") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  fs::path dir = scratch("csv");
  write_csv((dir / "sub" / "t.csv").string(), {"x", "y"}, std::vector<std::vector<double>>{{1.5, -2}, {0.1, 3}});
  CHECK(slurp(dir / "sub" / "t.csv") == "x,y\r\n1.5,-2\r\n0.1,3\r\n");
  write_csv((dir / "s.csv").string(), {"name"}, std::vector<std::vector<std::string>>{{"a,b"}});
  CHECK(slurp(dir / "s.csv") == "name\r\n\"a,b\"\r\n");
}

TEST_CASE("field dumps round-trip bit for bit") {
  fs::path dir = scratch("field");
  Grid g(8, 2.5);
  Field u = testing::random_field(g, 3);
  write_field((dir / "u").string(), u);
  CHECK(fs::file_size(dir / "u.f64") == g.size() * 8);
  auto meta = nlohmann::json::parse(slurp(dir / "u.json"));
  CHECK(meta["n"] == 8);
  CHECK(meta["L"] == 2.5);
  CHECK(meta["dtype"] == "f64le");
  Field back = read_field((dir / "u").string());
  CHECK(back.grid() == g);
  CHECK(back.data() == u.data());
  Field raw = read_raw_field((dir / "u.f64").string(), g);
  CHECK(raw.data() == u.data());
  CHECK_THROWS_AS(read_raw_field((dir / "u.f64").string(), Grid(10, 2.5)), Error);
  CHECK_THROWS_AS(read_field((dir / "missing").string()), Error);
}

TEST_CASE("defaults parse from an empty config") {
  RunConfig c = parse_config_string("");
  CHECK(c.n == 64);
  CHECK(c.L == 16.0);
  CHECK(c.params.s == 0.9);
  CHECK(c.params.p == 2.5);
  CHECK(c.potential.kind == PotentialKind::single_well);
}

TEST_CASE("config sections and overrides") {
  const std::string text = R"(
seed = 7
[params]
s = 0.8
a = 2.0
[grid]
n = 32
L = 10.0
[potential]
kind = "multi_well"
V_inf = 5.0
wells = [ { x = [1.0, 0.0, 0.0], r = 2.0 }, [[-1.0, 0.0, 0.0], 4.0] ]
[solver]
variant = "V0"
seed_kind = "rescaled_Q"
seed_well = 1
[sweep]
a_factors = [2, 4, 8, 16]
[output]
dir = "elsewhere"
formats = ["json"]
)";
  RunConfig c = parse_config_string(text, {{"grid.n", "48"}, {"params.m", "1.5"}});
  CHECK(c.seed == 7);
  CHECK(c.solver.seed == 7);
  CHECK(c.params.s == 0.8);
  CHECK(c.params.m == 1.5);
  CHECK(c.n == 48);
  CHECK(c.L == 10.0);
  REQUIRE(c.potential.wells.size() == 2);
  CHECK(c.potential.wells[1].first[0] == -1.0);
  CHECK(c.potential.wells[1].second == 4.0);
  CHECK(c.variant == Variant::V0);
  CHECK(c.solver.seed_kind == SeedKind::rescaled_Q);
  CHECK(c.a_factors == std::vector<double>{2, 4, 8, 16});
  CHECK(c.output_dir == "elsewhere");
  CHECK(c.write_json);
  CHECK_FALSE(c.write_csv);

  // The resolved config serialises to JSON and parses back to the same JSON.
  auto j = nlohmann::json::parse(config_json(c));
  CHECK(j["grid"]["n"] == 48);
  CHECK(j["potential"]["wells"].size() == 2);
}

TEST_CASE("config errors: every violation, with locations") {
  auto v = violations("[params]\ns = 0.2\np = 9.0\n[grid]\nn = 31\n");
  CHECK(v.size() >= 3);
  CHECK(any_contains(v, "s"));
  CHECK(any_contains(v, "p"));
  CHECK(any_contains(v, "n"));

  auto u = violations("[grid]\nbogus = 1\n");
  REQUIRE(u.size() == 1);
  CHECK(u[0].find("bogus") != std::string::npos);
  CHECK(u[0].find("line 2") != std::string::npos);

  auto syn = violations("[grid\n");
  REQUIRE(syn.size() == 1);
  CHECK(syn[0].find("<string>:1:") == 0);

  CHECK(any_contains(violations("[grid]\nn = -3\n"), "n"));
  CHECK(any_contains(violations("[sweep]\na_factors = [4, 2]\n"), "a_factors"));
  CHECK(any_contains(violations("[potential]\nkind = \"single_well\"\nV_inf = 0\n"), "V_inf"));
  CHECK(any_contains(violations("[solver]\nseed_kind = \"custom\"\n"), "custom"));
  CHECK(any_contains(violations("[nosuch]\n"), "nosuch"));
  CHECK(any_contains(violations("", {{"grid.L", "\"wide\""}}), "L"));
  CHECK(violations("[params]\ns = 0.5\nallow_any_s = true\n").size() >= 1);
  CHECK(violations("allow_any_s = true\n[params]\ns = 0.5\np = 2.2\n").empty());
  CHECK_THROWS_AS(parse_config("/nonexistent/fracsp.toml"), ConfigError);
}

TEST_CASE("build_potential follows the spec") {
  Grid g(16, 4.0);
  PotentialSpec s;
  s.kind = PotentialKind::constant;
  s.value = 2.0;
  CHECK(build_potential(s, g, 4.0)({0.3, 0.1, 0.0}) == 2.0);
  s.kind = PotentialKind::single_well;
  s.center = {0.5, 0, 0};
  s.V_inf = 3.0;
  Potential p = build_potential(s, g, 4.0);
  REQUIRE(p.wells().size() == 1);
  CHECK(p.wells()[0].x[0] == 0.5);
  CHECK(p.V_inf() == 3.0);
}

TEST_CASE("run: unknown subcommand and a small solve-q") {
  std::ostringstream log;
  RunConfig c = parse_config_string("");
  CHECK(run("frob", c, log) == 2);
  CHECK(log.str().find("usage: fracsp") != std::string::npos);

  fs::path dir = scratch("run");
  c = parse_config_string("", {{"grid.n", "32"}, {"grid.L", "8.0"},
                               {"output.dir", "\"" + dir.string() + "\""}});
  CHECK(run("solve-q", c, log) == 0);
  auto j = nlohmann::json::parse(slurp(dir / "solve_q.json"));
  CHECK(j["subcommand"] == "solve-q");
  CHECK(j["status"] == "ok");
  CHECK(j["failures"].empty());
  CHECK(j["config"]["grid"]["n"] == 32);
  CHECK(fs::exists(dir / "solve_q.csv"));
  CHECK(slurp(dir / "solve_q.csv").rfind("x,Q\r\n", 0) == 0);

  // A numerical failure is reported in the JSON and the exit status.
  c.q_max_iter = 1;
  c.n = 16;
  CHECK(run("solve-q", c, log) == 1);
  auto k = nlohmann::json::parse(slurp(dir / "solve_q.json"));
  CHECK(k["status"] == "failed");
  CHECK_FALSE(k["failures"].empty());
}

TEST_CASE("subcommand list") {
  CHECK(subcommand_names() ==
        std::vector<std::string>{"solve-q", "solve", "sweep", "landscape", "check"});
  CHECK(usage_text().rfind("usage: fracsp", 0) == 0);
}
