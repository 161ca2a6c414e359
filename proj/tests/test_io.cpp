#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "stabfs/generators.hpp"
#include "stabfs/io.hpp"
#include "stabfs/state_space.hpp"

using namespace stabfs;

namespace {

std::optional<std::size_t> error_line(auto&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  FAIL("no ParseError");
  return std::nullopt;
}

}  // namespace

TEST_CASE("topology files") {
  Topology t = parse_topology(R"({"nodes": 3, "root": 0, "edges": [[0, 1], [1, 2]]})");
  CHECK(t.size() == 3);
  CHECK(t.diameter() == 2);
  Topology back = parse_topology(format_topology(t));
  CHECK(back.edges() == t.edges());
  CHECK(back.root() == t.root());

  Topology g = make_topology("grid:3x2");
  CHECK(parse_topology(format_topology(g)).edges() == g.edges());

  CHECK_THROWS_AS(parse_topology(R"({"nodes": 3})"), ParseError);
  CHECK_THROWS_AS(parse_topology(R"({"edges": [[0, 1, 2]]})"), ParseError);
  CHECK_THROWS_AS(parse_topology(R"({"edges": [[0, -1]]})"), ParseError);
  CHECK_THROWS_AS(parse_topology(R"({"edges": [[0, 1], [2, 3]]})"), TopologyError);
}

TEST_CASE("syntax errors name the line") {
  const std::string text = "{\n  \"nodes\": 2,\n  \"edges\": [[0, 1],,]\n}\n";
  CHECK(error_line([&] { parse_topology(text); }) == 3u);
  try {
    parse_topology(text);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
  }
  Topology p2 = make_topology("p2");
  CHECK(error_line([&] { parse_configuration("{\n\"0\": {\"C\": 0,\n", p2); }).has_value());
}

TEST_CASE("configuration files") {
  Topology t = make_topology("p3");
  const std::string text = R"({
    "0": {"C": 1, "S": "Power", "ph": "b"},
    "1": {"P": 0, "TS": 0, "C": 1, "S": "Idle", "ph": "b"},
    "2": {"P": null, "TS": 1, "C": 0, "S": "WeakE", "ph": "a"}
  })";
  Configuration c = parse_configuration(text, t);
  CHECK_FALSE(c[0].parent.has_value());
  CHECK(c[0].status == Status::Power);
  CHECK(c[0].phase == Phase::B);
  CHECK(c[1].parent == 0u);
  CHECK(c[2].tree_parent == 1u);
  CHECK(c[2].status == Status::WeakE);
  CHECK(parse_configuration(format_configuration(c), t) == c);

  for (std::uint64_t s = 0; s < 100; ++s) {
    Topology g = make_topology("random:9,0.4", s);
    Configuration r = random_configuration(g, s);
    CHECK(parse_configuration(format_configuration(r), g) == r);
  }

  CHECK_THROWS_AS(parse_configuration(R"({"0": {"C": 0, "S": "Working", "ph": "a"}})", t), ParseError);
  CHECK_THROWS_AS(parse_configuration(R"({"0": {"C": 0, "S": "Idle", "ph": "a"},
      "1": {"C": 0, "S": "Idle", "ph": "a"}, "2": {"C": 0, "S": "Idle", "ph": "a"}})", t),
                  ParseError);  // root cannot be Idle
  CHECK_THROWS_AS(parse_configuration(R"({"0": {"C": 2, "S": "Working", "ph": "a"},
      "1": {"C": 0, "S": "Idle", "ph": "a"}, "2": {"C": 0, "S": "Idle", "ph": "a"}})", t),
                  ParseError);
  CHECK_THROWS_AS(parse_configuration(R"({"0": {"C": 0, "S": "Working", "ph": "a"},
      "1": {"C": 0, "S": "Idle", "ph": "a"}, "2": {"P": 0, "C": 0, "S": "Idle", "ph": "a"}})", t),
                  ParseError);  // 0 is not a neighbor of 2
  CHECK_THROWS_AS(parse_configuration(R"({"x": {}})", t), ParseError);
  CHECK_THROWS_AS(parse_configuration(R"({"7": {}})", t), ParseError);
  CHECK_THROWS_AS(parse_configuration(R"({"0": {"C": 0, "S": "Sleeping", "ph": "a"},
      "1": {"C": 0, "S": "Idle", "ph": "a"}, "2": {"C": 0, "S": "Idle", "ph": "a"}})", t),
                  ParseError);
}

TEST_CASE("adversary scripts and step records") {
  const auto script = parse_script("[[1, 2], [0]]");
  REQUIRE(script.size() == 2);
  CHECK(script[0] == std::vector<NodeId>{1, 2});
  CHECK_THROWS_AS(parse_script("[1, 2]"), ParseError);
  CHECK_THROWS_AS(parse_script("{}"), ParseError);

  const std::vector<Move> moves{{0, {RuleName::R1, std::nullopt}}, {2, {RuleName::R3, 1}}};
  const auto record = nlohmann::json::parse(format_step_record(4, moves, 2));
  CHECK(record["step"] == 4);
  CHECK(record["round"] == 2);
  REQUIRE(record["activated"].size() == 2);
  CHECK(record["activated"][0]["node"] == 0);
  CHECK(record["activated"][0]["rule"] == "R1");
  CHECK(record["activated"][1]["rule"] == "R3");
  CHECK(record["activated"][1]["target"] == 1);
}

TEST_CASE("reading files") {
  const auto path = std::filesystem::temp_directory_path() / "stabfs_io_test.json";
  {
    std::ofstream out(path);
    out << "{\"edges\": [[0, 1]]}";
  }
  CHECK(parse_topology(read_file(path)).size() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS(read_file(path));
}

TEST_CASE("generators") {
  CHECK(make_path(5).diameter() == 4);
  CHECK(make_cycle(6).diameter() == 3);
  CHECK(make_star(5).diameter() == 2);
  CHECK(make_star(5).degree(0) == 4);
  CHECK(make_grid(3, 3).diameter() == 4);
  CHECK(make_complete(5).edges().size() == 10);
  CHECK(make_topology("star4").size() == 4);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Topology r = make_random_connected(15, 0.2, s);
    CHECK(r.size() == 15);
    CHECK(r.root() == 0u);
  }
  CHECK(make_topology("random:10,0.3", 4).edges() == make_topology("random:10,0.3", 4).edges());
  CHECK_THROWS(make_random_connected(30, 0.001, 1, 3));
  CHECK_THROWS(make_random_connected(5, 0.0, 1));
  CHECK_THROWS(make_path(1));
  CHECK_THROWS(make_cycle(2));
  for (const char* bad : {"path", "path:x", "grid:3", "random:5", "random:5,abc", "torus:4", ""}) {
    CAPTURE(bad);
    CHECK_THROWS(make_topology(bad));
  }
  CHECK(topology_kind("p3") == "path");
  CHECK(topology_kind("triangle") == "cycle");
  CHECK(topology_kind("random:10,0.2") == "random");
  CHECK(topology_kind("grid:2x3") == "grid");
}
