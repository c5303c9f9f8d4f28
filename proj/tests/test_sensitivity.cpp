#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "fid/json_io.hpp"
#include "fid/sensitivity.hpp"

using namespace fid;

namespace {

InfluenceDiagram load(const char* name) {
  return parse_file(std::string(FID_DATA_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("alpha* on the reference cost triplets") {
  FuzzyValue dl(26, 226, 78), dio(50, 285, 15);
  // left halves diverge below both supports; right halves cross near 299
  CHECK(!half_intersection(dl, dio, Side::Left));
  auto r = half_intersection(dl, dio, Side::Right);
  REQUIRE(r);
  CHECK(r->x == doctest::Approx(18840.0 / 63.0));
  CHECK(r->alpha == doctest::Approx(0.0635).epsilon(0.02));

  const double a = alpha_star({dl, dio});
  CHECK(a == doctest::Approx(0.0635).epsilon(0.02));
  CHECK(1.0 - a == doctest::Approx(0.936).epsilon(0.01));
}

TEST_CASE("half intersection edge cases") {
  // coincident lines: intersect at the shared mean with full membership
  FuzzyValue a(10, 50, 10), b(10, 50, 10);
  auto hit = half_intersection(a, b, Side::Left);
  REQUIRE(hit);
  CHECK(hit->x == doctest::Approx(50));
  CHECK(hit->alpha == doctest::Approx(1.0));

  // parallel distinct lines: none
  FuzzyValue c(10, 60, 10);
  CHECK(!half_intersection(a, c, Side::Left));

  // degenerate side vs sloped side
  FuzzyValue pt(0, 45, 5), sl(10, 50, 10);
  auto h2 = half_intersection(sl, pt, Side::Left);
  REQUIRE(h2);
  CHECK(h2->x == doctest::Approx(45));
  CHECK(h2->alpha == doctest::Approx(0.5));
}

TEST_CASE("property: alpha* is in [0,1], symmetric and affine invariant") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<FuzzyValue> v;
    const int n = 2 + static_cast<int>(U(rng) * 3);
    for (int k = 0; k < n; ++k)
      v.emplace_back(U(rng) * 40, 100 + U(rng) * 200, U(rng) * 40);

    const double a = alpha_star(v);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);

    // symmetric under permutation of alternatives
    std::vector<FuzzyValue> w = v;
    std::shuffle(w.begin(), w.end(), rng);
    CHECK(alpha_star(w) == doctest::Approx(a).epsilon(1e-9));

    // invariant under positive affine rescaling of the cost axis
    const double scale = 0.5 + U(rng) * 4, shift = -100 + U(rng) * 200;
    std::vector<FuzzyValue> t;
    for (const auto& x : v)
      t.emplace_back(scale * x.left_spread(), scale * x.mean() + shift,
                     scale * x.right_spread());
    CHECK(alpha_star(t) == doctest::Approx(a).epsilon(1e-7));
  }
}

TEST_CASE("property: deterministic dominance implies alpha* = 0") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    FuzzyValue m(U(rng) * 20, 100 + U(rng) * 20, U(rng) * 20);
    // place n's support strictly above m's
    const double gap = 1e-6 + U(rng) * 50;
    const double llo = U(rng) * 20, rhi = U(rng) * 20;
    FuzzyValue n(llo, m.support().hi + gap + llo, rhi);
    REQUIRE(deterministic_dominance(m, n));
    CHECK(alpha_star({m, n}) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("property: pointwise-dominant crisp costs give alpha* = 0") {
  // single chance predecessor, crisp everything, alternative 0 strictly
  // cheaper in every outcome: the cheaper alternative wins outright.
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double c00 = U(rng) * 100, c01 = U(rng) * 100;
    FuzzyValue a0(0, c00, 0), a1(0, c00 + 1 + U(rng) * 50, 0);
    FuzzyValue b0(0, c01, 0), b1(0, c01 + 1 + U(rng) * 50, 0);
    const double p = U(rng);
    // expected costs under the two alternatives
    FuzzyValue e0(0, p * a0.mean() + (1 - p) * b0.mean(), 0);
    FuzzyValue e1(0, p * a1.mean() + (1 - p) * b1.mean(), 0);
    CHECK(alpha_star({e0, e1}) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("end-to-end sensitivity on the repair fixture") {
  auto d = load("assembly_decision.fid.json");
  auto rep = analyze_sensitivity(d, {{"S", "S0"}});
  REQUIRE(rep.costs.size() == 2);
  CHECK(rep.alternatives[static_cast<size_t>(rep.chosen)] == "D_L");
  CHECK(rep.alpha >= 0.03);
  CHECK(rep.alpha <= 0.10);
  CHECK(rep.possibility == doctest::Approx(1.0 - rep.alpha));
  // diagnostic cross-side alpha is larger than the corresponding-half alpha
  CHECK(rep.cross_alpha > rep.alpha);
  CHECK(rep.dominated.empty());
  CHECK(!rep.intersections.empty());
}

TEST_CASE("difference dominance on the repair fixture is mixed") {
  auto d = load("assembly_decision.fid.json");
  auto dd = difference_dominance(d, {{"S", "S0"}}, "D_L", "D_IO", {21, 128});
  CHECK(dd.verdict == DominanceVerdict::Mixed);
  CHECK(dd.curve.lo < 0.0);   // D_L can come out cheaper...
  CHECK(dd.curve.hi > 0.0);   // ...or dearer, depending on the fuzzy rows
  CHECK(std::string(to_string(dd.verdict)) == "mixed");
}

TEST_CASE("alpha_star rejects fewer than two alternatives") {
  CHECK_THROWS_AS(alpha_star({FuzzyValue(1, 2, 3)}), std::invalid_argument);
}
