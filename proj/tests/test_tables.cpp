#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "fid/tables.hpp"

using namespace fid;

namespace {

OutcomeSpace sp(std::string n, std::vector<std::string> o) {
  return OutcomeSpace{std::move(n), std::move(o)};
}

FuzzyDistribution binary(const std::string& node, FuzzyProbability p1) {
  return FuzzyDistribution(sp(node, {node + "0", node + "1"}),
                           {p1.complement(), p1});
}

}  // namespace

TEST_CASE("outcome space lookup") {
  auto s = sp("X", {"a", "b", "c"});
  CHECK(s.size() == 3);
  CHECK(s.index_of("b") == 1);
  CHECK(s.index_of("z") == -1);
}

TEST_CASE("distribution validation: means must sum to one") {
  auto ok = binary("L", FuzzyProbability(0.03, 0.95, 0.03));
  CHECK(ok.validate("L").empty());

  FuzzyDistribution bad(sp("X", {"a", "b"}),
                        {FuzzyProbability::crisp(0.6), FuzzyProbability::crisp(0.5)});
  auto errs = bad.validate("X");
  REQUIRE(!errs.empty());
  CHECK(errs[0].find("X") != std::string::npos);
}

TEST_CASE("binary complement pairing is enforced") {
  // binary rows must be complements of each other (support symmetry)
  FuzzyDistribution bad(sp("X", {"a", "b"}),
                        {FuzzyProbability(0.1, 0.4, 0.0), FuzzyProbability(0.0, 0.6, 0.2)});
  CHECK(!bad.validate("X").empty());
  FuzzyDistribution good(sp("X", {"a", "b"}),
                         {FuzzyProbability(0.1, 0.4, 0.2), FuzzyProbability(0.2, 0.6, 0.1)});
  CHECK(good.validate("X").empty());
}

TEST_CASE("config indexing round trip") {
  std::vector<OutcomeSpace> spaces = {sp("A", {"a0", "a1"}), sp("B", {"b0", "b1", "b2"})};
  CHECK(detail::config_count(spaces) == 6);
  for (size_t i = 0; i < 6; ++i) {
    auto coord = detail::config_unindex(spaces, i);
    CHECK(detail::config_index(spaces, coord) == i);
  }
  CHECK(detail::config_label(spaces, detail::config_unindex(spaces, 5)) == "a1,b2");
}

TEST_CASE("conditional table rows and validation") {
  auto row0 = binary("S", FuzzyProbability::crisp(0.0));
  auto row1 = binary("S", FuzzyProbability::crisp(1.0));
  ConditionalTable t(sp("S", {"S0", "S1"}), {sp("L", {"L0", "L1"})}, {row0, row1});
  CHECK(t.row_count() == 2);
  CHECK(t.row({1}).at("S1").mean() == doctest::Approx(1.0));
  CHECK(t.validate().empty());

  auto m = ConditionalTable::marginal(binary("L", FuzzyProbability(0.03, 0.95, 0.03)));
  CHECK(m.parents().empty());
  CHECK(m.row_count() == 1);
}

TEST_CASE("product and conditioning on the mean channel") {
  auto l = binary("L", FuzzyProbability::crisp(0.95));
  ConditionalTable cond(sp("S", {"S0", "S1"}), {sp("L", {"L0", "L1"})},
                        {binary("S", FuzzyProbability::crisp(0.1)),
                         binary("S", FuzzyProbability::crisp(0.8))});
  auto joint = product(cond, l);
  CHECK(joint.validate().empty());
  CHECK(joint.mean_total() == doctest::Approx(1.0));
  // P(S1) = 0.05*0.1 + 0.95*0.8
  double ps1 = joint.cell({1, 0}).mean() + joint.cell({1, 1}).mean();
  CHECK(ps1 == doctest::Approx(0.05 * 0.1 + 0.95 * 0.8));

  auto slice = condition_slice(cond, {"L1"});
  CHECK(slice.at("S1").mean() == doctest::Approx(0.8));
}
