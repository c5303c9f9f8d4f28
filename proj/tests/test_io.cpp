#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "fid/json_io.hpp"

using namespace fid;

namespace {

const char* kMini = R"json({
  "nodes": [
    {"name": "L", "kind": "chance", "outcomes": ["L0", "L1"],
     "table": {"L0": "(.03, 0.05, .03)", "L1": "(.03, 0.95, .03)"}},
    {"name": "S", "kind": "chance", "outcomes": ["S0", "S1"], "parents": ["L"],
     "table": {"S1,L1": "1", "S0,L0": "1"}}
  ]
})json";

}  // namespace

TEST_CASE("parse a minimal diagram") {
  auto d = parse_string(kMini, "mini");
  CHECK(d.size() == 2);
  CHECK(d.node("L").table->row(0).at("L1").mean() == doctest::Approx(0.95));
  // unlisted cells default to crisp zero
  CHECK(d.node("S").table->row({1}).at("S0").mean() == doctest::Approx(0.0));
  CHECK(d.node("S").table->row({1}).at("S1").mean() == doctest::Approx(1.0));
}

TEST_CASE("serialize then parse round trips, byte for byte") {
  auto d = parse_file(std::string(FID_DATA_DIR) + "/assembly_decision.fid.json");
  const std::string s1 = serialize(d);
  auto d2 = parse_string(s1, "round");
  CHECK(d == d2);
  CHECK(serialize(d2) == s1);
}

TEST_CASE("unknown top-level and node fields are rejected") {
  CHECK_THROWS_AS(parse_string(R"({"nodes": [], "extra": 1})", "t"), ParseError);
  CHECK_THROWS_AS(
      parse_string(
          R"({"nodes": [{"name":"X","kind":"chance","outcomes":["a","b"],
              "table":{"a":"0.5","b":"0.5"},"frobnicate":true}]})",
          "t"),
      ParseError);
}

TEST_CASE("unknown table keys are rejected") {
  try {
    parse_string(R"({"nodes": [
      {"name":"X","kind":"chance","outcomes":["a","b"],
       "table":{"a":"0.5","b":"0.5","zz":"0.1"}}]})",
                 "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(!e.errors.empty());
    bool mentions = false;
    for (const auto& msg : e.errors)
      if (msg.find("zz") != std::string::npos) mentions = true;
    CHECK(mentions);
  }
}

TEST_CASE("bad probability sums name the offending node") {
  try {
    parse_string(R"({"nodes": [
      {"name":"X","kind":"chance","outcomes":["a","b"],
       "table":{"a":"0.6","b":"0.5"}}]})",
                 "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    bool mentions = false;
    for (const auto& msg : e.errors)
      if (msg.find("X") != std::string::npos) mentions = true;
    CHECK(mentions);
  }
}

TEST_CASE("decision and value nodes, cost forms") {
  const char* text = R"json({
    "nodes": [
      {"name": "A", "kind": "chance", "outcomes": ["a0", "a1"],
       "table": {"a0": "0.3", "a1": "0.7"}},
      {"name": "D", "kind": "decision", "outcomes": ["d0", "d1"]},
      {"name": "C", "kind": "value", "parents": ["A", "D"],
       "costs": {"a0,d0": 10, "a0,d1": "(1, 20, 2)", "a1,d0": 30, "a1,d1": 40}}
    ]
  })json";
  auto d = parse_string(text, "t");
  const auto& v = d.node("C");
  CHECK(v.costs.size() == 4);
  CHECK(v.costs[0].is_crisp());
  CHECK(v.costs[1].left_spread() == doctest::Approx(1));
  CHECK(v.costs[1].mean() == doctest::Approx(20));

  // a missing cost cell is an error
  CHECK_THROWS_AS(parse_string(R"({
    "nodes": [
      {"name": "A", "kind": "chance", "outcomes": ["a0", "a1"],
       "table": {"a0": "0.3", "a1": "0.7"}},
      {"name": "C", "kind": "value", "parents": ["A"], "costs": {"a0": 10}}
    ]})",
                               "t"),
                  ParseError);
}

TEST_CASE("malformed JSON and bad kinds") {
  CHECK_THROWS_AS(parse_string("{nope", "t"), ParseError);
  CHECK_THROWS_AS(parse_string(R"({"nodes":[{"name":"X","kind":"banana",
    "outcomes":["a","b"],"table":{"a":"0.5","b":"0.5"}}]})",
                               "t"),
                  ParseError);
  CHECK_THROWS_AS(parse_file("/nonexistent/file.json"), ParseError);
}

TEST_CASE("boundary-membership triplets round trip through JSON") {
  auto d = parse_file(std::string(FID_DATA_DIR) + "/assembly_inference.fid.json");
  const auto& io = *d.node("IO").table;
  const auto& p = io.row(0).at("IO0");
  CHECK(p.mean() == doctest::Approx(0.01));
  CHECK(p.boundary_membership_at_zero() == doctest::Approx(0.66));
  auto d2 = parse_string(serialize(d), "rt");
  CHECK(d == d2);
}
