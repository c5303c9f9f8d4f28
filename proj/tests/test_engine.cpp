#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "fid/engine.hpp"
#include "fid/json_io.hpp"

using namespace fid;

namespace {

InfluenceDiagram load(const char* name) {
  return parse_file(std::string(FID_DATA_DIR) + "/" + name);
}

// Random crisp diagram: chain-or-DAG over up to max_nodes chance nodes with
// up to 3 outcomes each; every mean strictly positive so any evidence is
// consistent.
InfluenceDiagram random_diagram(std::mt19937& rng, int max_nodes = 4) {
  std::uniform_int_distribution<int> nnodes(1, max_nodes);
  std::uniform_int_distribution<int> nout(2, 3);
  std::uniform_real_distribution<double> U(0.05, 1.0);
  const int n = nnodes(rng);
  std::vector<DiagramNode> nodes;
  std::vector<OutcomeSpace> spaces;
  for (int i = 0; i < n; ++i) {
    const std::string name = "N" + std::to_string(i);
    const int k = nout(rng);
    std::vector<std::string> outs;
    for (int o = 0; o < k; ++o) outs.push_back(name + "_" + std::to_string(o));
    OutcomeSpace space{name, outs};

    std::vector<std::string> parents;
    std::vector<OutcomeSpace> pspaces;
    for (int j = 0; j < i; ++j)
      if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.45) {
        parents.push_back(nodes[static_cast<size_t>(j)].name);
        pspaces.push_back(spaces[static_cast<size_t>(j)]);
      }
    size_t rows = 1;
    for (const auto& s : pspaces) rows *= s.size();
    std::vector<FuzzyDistribution> table;
    for (size_t r = 0; r < rows; ++r) {
      std::vector<double> w(static_cast<size_t>(k));
      double tot = 0;
      for (auto& x : w) tot += (x = U(rng));
      std::vector<FuzzyProbability> p;
      for (double x : w) p.push_back(FuzzyProbability::crisp(x / tot));
      table.emplace_back(space, std::move(p));
    }
    nodes.push_back({name, NodeKind::Chance, space, parents,
                     ConditionalTable(space, pspaces, std::move(table)), {}});
    spaces.push_back(space);
  }
  auto res = InfluenceDiagram::build(std::move(nodes));
  REQUIRE(res.ok());
  return *res.diagram;
}

}  // namespace

TEST_CASE("posterior means on the two-sensor fixture") {
  auto d = load("assembly_inference.fid.json");

  // prior marginal of the deterministic child: P(S1) = 0.95 * 0.99
  auto s = infer(d, {"S", {}});
  CHECK(s.entries[s.space.index_of("S1")].mean == doctest::Approx(0.9405));
  CHECK(s.entries[s.space.index_of("S0")].mean == doctest::Approx(0.0595));

  // diagnosis: P(IO0 | S0) = 0.01 * 1 / 0.0595 (S0 is certain when IO0)
  auto io = infer(d, {"IO", {{"S", "S0"}}});
  const auto& e0 = io.entries[static_cast<size_t>(io.space.index_of("IO0"))];
  CHECK(e0.mean == doctest::Approx(0.01 / 0.0595));
  // support: clipped at 0 with a membership jump, upper end past the mean
  CHECK(e0.lo == doctest::Approx(0.0));
  CHECK(e0.mu_lo == doctest::Approx(0.66).epsilon(0.05));
  CHECK(e0.hi == doctest::Approx(0.6757).epsilon(0.01));

  const auto& e1 = io.entries[static_cast<size_t>(io.space.index_of("IO1"))];
  CHECK(e1.mean == doctest::Approx(1.0 - 0.01 / 0.0595));
  CHECK(e1.lo == doctest::Approx(0.3243).epsilon(0.02));
  CHECK(e1.hi == doctest::Approx(1.0));
}

TEST_CASE("result entries convert back to sensible fuzzy probabilities") {
  auto d = load("assembly_inference.fid.json");
  auto io = infer(d, {"IO", {{"S", "S0"}}});
  auto p = io.entries[static_cast<size_t>(io.space.index_of("IO0"))].as_probability();
  // nominal spread restored from the boundary membership at 0
  CHECK(p.boundary_membership_at_zero() == doctest::Approx(0.66).epsilon(0.05));
  CHECK(p.left_nominal() == doctest::Approx(p.mean() / (1 - 0.66)).epsilon(0.1));
}

TEST_CASE("evidence validation errors") {
  auto d = load("assembly_inference.fid.json");
  CHECK_THROWS_AS(infer(d, {"IO", {{"S", "nope"}}}), EngineError);
  CHECK_THROWS_AS(infer(d, {"nope", {}}), EngineError);
  CHECK_THROWS_AS(infer(d, {"IO", {{"S", "S0"}, {"S", "S1"}}}), EngineError);
}

TEST_CASE("decide on the repair fixture") {
  auto d = load("assembly_decision.fid.json");
  auto res = decide(d, {{"S", "S0"}});
  REQUIRE(res.alternatives.size() == 2);
  const size_t dl = res.alternatives[0] == "D_L" ? 0 : 1;
  const auto& cl = res.costs[dl];
  const auto& cio = res.costs[1 - dl];
  CHECK(cl.mean == doctest::Approx(226).epsilon(0.005));
  CHECK(cio.mean == doctest::Approx(285).epsilon(0.005));
  CHECK(cl.mean - cl.lo == doctest::Approx(26).epsilon(0.1));
  CHECK(cl.hi - cl.mean == doctest::Approx(78).epsilon(0.05));
  CHECK(cio.mean - cio.lo == doctest::Approx(50).epsilon(0.05));
  CHECK(cio.hi - cio.mean == doctest::Approx(15).epsilon(0.1));
  CHECK(res.alternatives[static_cast<size_t>(res.chosen)] == "D_L");

  // maximizing flips the choice
  auto mx = decide(d, {{"S", "S0"}}, {}, Objective::Maximize);
  CHECK(mx.alternatives[static_cast<size_t>(mx.chosen)] == "D_IO");
}

TEST_CASE("mean channel equals joint enumeration on random diagrams") {
  std::mt19937 rng(2024);
  int done = 0;
  while (done < 200) {
    auto d = random_diagram(rng);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(d.size()) - 1);
    const int target = pick(rng);
    std::vector<std::pair<std::string, std::string>> given;
    for (size_t i = 0; i < d.size(); ++i) {
      if (static_cast<int>(i) == target) continue;
      if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.4) {
        const auto& sp = d.node(static_cast<int>(i)).space;
        given.emplace_back(sp.node,
                           sp.outcomes[static_cast<size_t>(
                               std::uniform_int_distribution<int>(
                                   0, static_cast<int>(sp.size()) - 1)(rng))]);
      }
    }
    Query q{d.node(target).name, given};
    auto engine = infer(d, q);
    auto reference = crisp_posterior(d, q);
    REQUIRE(engine.entries.size() == reference.size());
    for (size_t k = 0; k < reference.size(); ++k)
      CHECK(std::fabs(engine.entries[k].mean - reference[k]) < 1e-9);
    done++;
  }
}

TEST_CASE("arc reversal: mean channel is Bayes and pairing survives") {
  auto d = load("assembly_inference.fid.json");
  // S has parents L, IO; reverse IO -> S
  OpCounter ops;
  auto r = reverse_arc(d, "IO", "S", &ops);
  CHECK(r.has_arc(r.index("S"), r.index("IO")));
  CHECK(!r.has_arc(r.index("IO"), r.index("S")));
  CHECK(ops.mults > 0);

  // P(IO0 | S0, L1) = 0.01*1 / (0.01*1 + 0.99*0) = 1
  const auto& t = *r.node("IO").table;
  // posterior means match Bayes on every row with positive margin
  for (size_t row = 0; row < t.row_count(); ++row) {
    auto errs = t.row(row).validate("IO");
    CHECK(errs.empty());
  }

  // reversing back yields the original means
  auto rr = reverse_arc(r, "S", "IO");
  auto p0 = infer(rr, {"S", {}});
  CHECK(p0.entries[static_cast<size_t>(p0.space.index_of("S1"))].mean ==
        doctest::Approx(0.9405));
}

TEST_CASE("sum out and barren removal keep the queried marginal") {
  auto d = load("assembly_inference.fid.json");
  auto before = infer(d, {"L", {}});
  auto reduced = sum_out_chance(d, "IO");
  CHECK(!reduced.has_node("IO"));
  auto after = infer(reduced, {"L", {}});
  for (size_t k = 0; k < 2; ++k) {
    CHECK(after.entries[k].mean == doctest::Approx(before.entries[k].mean));
    CHECK(after.entries[k].lo == doctest::Approx(before.entries[k].lo).epsilon(0.01));
    CHECK(after.entries[k].hi == doctest::Approx(before.entries[k].hi).epsilon(0.01));
  }
}

TEST_CASE("absorb a chance node into the value node") {
  auto d = load("assembly_decision.fid.json");
  OpCounter ops;
  auto g = absorb_into_value(d, "R", &ops);
  CHECK(!g.has_node("R"));
  REQUIRE(g.value_node());
  // decision analysis is unchanged in the means
  auto a = decide(d, {{"S", "S0"}});
  auto b = decide(g, {{"S", "S0"}});
  for (size_t i = 0; i < a.costs.size(); ++i)
    CHECK(a.costs[i].mean == doctest::Approx(b.costs[i].mean));
}

TEST_CASE("operation count of fuzzy vs crisp reversal (reported)") {
  auto d = load("assembly_inference.fid.json");
  OpCounter fuzzy_ops;
  (void)reverse_arc(d, "IO", "S", &fuzzy_ops);

  detail::Tables tb = detail::Tables::from(d);
  OpCounter crisp_ops;
  std::map<int, int> none;
  auto net = detail::make_net(d, tb, none, /*include_value=*/false,
                              detail::ancestors_closure(d, {d.index("S")}), &crisp_ops);
  net.reverse(d.index("IO"), d.index("S"));

  const double mult_ratio =
      static_cast<double>(fuzzy_ops.mults) / std::max<long long>(1, crisp_ops.mults);
  const double add_ratio =
      static_cast<double>(fuzzy_ops.adds) / std::max<long long>(1, crisp_ops.adds);
  MESSAGE("reversal op ratio fuzzy/crisp: mults=" << mult_ratio
                                                  << " adds=" << add_ratio);
  CHECK(crisp_ops.mults > 0);
  CHECK(fuzzy_ops.mults > 0);
}
