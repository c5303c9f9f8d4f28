#ifndef FID_SENSITIVITY_HPP
#define FID_SENSITIVITY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fid/engine.hpp"
#include "fid/oracle.hpp"

namespace fid {

enum class Side { Left, Right };

struct HalfIntersection {
  double x = 0.0;
  double alpha = 0.0;
};

/// Intersection of the two same-side membership lines of M and N, returned
/// only where both memberships are in (0,1]. Parallel distinct lines have no
/// intersection; coincident lines intersect at the shared mean with alpha 1.
inline std::optional<HalfIntersection> half_intersection(const FuzzyValue& m,
                                                         const FuzzyValue& n,
                                                         Side side) {
  const double tol = 1e-9;
  const double m1 = m.mean(), m2 = n.mean();
  const double s1 = side == Side::Left ? m1 - m.support().lo : m.support().hi - m1;
  const double s2 = side == Side::Left ? m2 - n.support().lo : n.support().hi - m2;

  auto line = [&](double mean, double s, double x) {
    return side == Side::Left ? 1.0 - (mean - x) / s : 1.0 - (x - mean) / s;
  };

  if (s1 <= tol && s2 <= tol)
    return std::fabs(m1 - m2) <= tol ? std::optional<HalfIntersection>({m1, 1.0})
                                     : std::nullopt;
  if (s1 <= tol || s2 <= tol) {
    // One side is a point: meet the other line at that mean, if it reaches.
    const double xv = s1 <= tol ? m1 : m2;
    const double mo = s1 <= tol ? m2 : m1;
    const double so = s1 <= tol ? s2 : s1;
    const double alpha = line(mo, so, xv);
    if (alpha <= tol || alpha > 1.0 + tol) return std::nullopt;
    if (side == Side::Left ? xv > mo + tol : xv < mo - tol) return std::nullopt;
    return HalfIntersection{xv, std::min(alpha, 1.0)};
  }
  if (std::fabs(s1 - s2) <= tol) {
    if (std::fabs(m1 - m2) <= tol) return HalfIntersection{m1, 1.0};
    return std::nullopt;  // parallel, distinct
  }
  const double x = (s2 * m1 - s1 * m2) / (s2 - s1);
  const double alpha = line(m1, s1, x);
  if (alpha <= tol || alpha > 1.0 + tol) return std::nullopt;
  // alpha in (0,1] puts x inside both half-domains by construction.
  return HalfIntersection{x, std::min(alpha, 1.0)};
}

/// alpha*: largest corresponding-half intersection membership
/// between the mean-optimal alternative and each other alternative.
inline double alpha_star(const std::vector<FuzzyValue>& alternatives,
                         Objective objective = Objective::Minimize) {
  if (alternatives.size() < 2)
    throw std::invalid_argument("alpha_star needs at least 2 alternatives");
  const double sgn = objective == Objective::Minimize ? 1.0 : -1.0;
  size_t best = 0;
  for (size_t i = 1; i < alternatives.size(); ++i)
    if (sgn * alternatives[i].mean() < sgn * alternatives[best].mean()) best = i;
  double out = 0.0;
  for (size_t i = 0; i < alternatives.size(); ++i) {
    if (i == best) continue;
    for (Side side : {Side::Left, Side::Right})
      if (auto hit = half_intersection(alternatives[best], alternatives[i], side))
        out = std::max(out, hit->alpha);
  }
  return out;
}

/// True iff M's entire support lies at or below N's (M surely cheaper).
inline bool deterministic_dominance(const FuzzyValue& m, const FuzzyValue& n) {
  return m.support().hi <= n.support().lo + 1e-12;
}

enum class DominanceVerdict { Positive, Negative, Mixed };

inline const char* to_string(DominanceVerdict v) {
  switch (v) {
    case DominanceVerdict::Positive: return "positive";
    case DominanceVerdict::Negative: return "negative";
    case DominanceVerdict::Mixed: return "mixed";
  }
  return "?";
}

struct DifferenceDominance {
  DominanceVerdict verdict = DominanceVerdict::Mixed;
  MembershipCurve curve;  // fuzzy curve of cost(alt1) - cost(alt2)
};

/// Sign analysis of cost(alt1) - cost(alt2) over every consistent oracle
/// configuration with membership > 0; strict positivity/negativity gives a
/// dominance verdict, anything else (including identical zero) is mixed.
inline DifferenceDominance difference_dominance(
    const InfluenceDiagram& d,
    const std::vector<std::pair<std::string, std::string>>& given,
    const std::string& alt1, const std::string& alt2, const OracleOptions& opts = {}) {
  const auto decisions = d.decision_nodes();
  if (decisions.size() != 1 || !d.value_node())
    throw EngineError("difference_dominance needs a value node and one decision node");
  const int dec = decisions[0];
  const int a1 = d.node(dec).space.index_of(alt1);
  const int a2 = d.node(dec).space.index_of(alt2);
  if (a1 < 0 || a2 < 0) throw EngineError("difference_dominance: unknown alternative");

  const auto ev = detail::resolve_evidence(d, given);
  std::set<int> chance;
  for (size_t i = 0; i < d.size(); ++i)
    if (d.node(static_cast<int>(i)).kind == NodeKind::Chance)
      chance.insert(static_cast<int>(i));
  const detail::ParamSpace ps = detail::ParamSpace::from(d, chance, /*costs=*/true);
  const detail::Tables base = detail::Tables::from(d);

  std::vector<std::pair<double, double>> samples;
  bool any_pos = false, any_neg = false, any_zero = false;
  detail::for_each_consistent_config(ps, opts.grid_n, [&](const detail::Assignment& a,
                                                          double mu) {
    detail::Tables tb = base;
    ps.apply_to(tb, a);
    const double diff = detail::enum_expected_cost(d, tb, ev, {{dec, a1}}) -
                        detail::enum_expected_cost(d, tb, ev, {{dec, a2}});
    samples.emplace_back(diff, mu);
    if (mu > 0.0) {
      if (diff > 1e-9)
        any_pos = true;
      else if (diff < -1e-9)
        any_neg = true;
      else
        any_zero = true;
    }
  });

  DifferenceDominance out;
  if (any_pos && !any_neg && !any_zero)
    out.verdict = DominanceVerdict::Positive;
  else if (any_neg && !any_pos && !any_zero)
    out.verdict = DominanceVerdict::Negative;
  else
    out.verdict = DominanceVerdict::Mixed;

  MembershipCurve& c = out.curve;
  if (!samples.empty()) {
    c.lo = c.hi = samples[0].first;
    for (const auto& [v, m] : samples) {
      c.lo = std::min(c.lo, v);
      c.hi = std::max(c.hi, v);
    }
    const int nbins = c.hi - c.lo < 1e-12 ? 1 : opts.bins;
    c.mu.assign(static_cast<size_t>(nbins), 0.0);
    c.counts.assign(static_cast<size_t>(nbins), 0);
    for (const auto& [v, m] : samples) {
      size_t i = 0;
      if (nbins > 1)
        i = static_cast<size_t>(std::clamp((v - c.lo) / (c.hi - c.lo) * nbins, 0.0,
                                           static_cast<double>(nbins - 1)));
      c.mu[i] = std::max(c.mu[i], m);
      c.counts[i]++;
    }
  }
  return out;
}

struct PairwiseIntersection {
  size_t a = 0, b = 0;
  Side side = Side::Left;
  HalfIntersection hit;
};

struct SensitivityReport {
  std::string decision;
  std::vector<std::string> alternatives;
  std::vector<FuzzyValue> costs;            // support-faithful triplets
  std::vector<PairwiseIntersection> intersections;
  double alpha = 0.0;        ///< alpha* (corresponding-half intersection rule)
  double possibility = 1.0;  ///< 1 - alpha*
  double cross_alpha = 0.0;  ///< diagnostic: conventional opposite-half possibility
  int chosen = -1;
  std::vector<std::pair<size_t, size_t>> dominated;  // (winner, loser) pairs
};

/// End-to-end sensitivity analysis: solve the decision problem, then apply
/// the alpha-intersection criterion to the resulting fuzzy expected costs.
inline SensitivityReport analyze_sensitivity(
    const InfluenceDiagram& d,
    const std::vector<std::pair<std::string, std::string>>& given,
    const EvalOptions& eval_opts = {}, Objective objective = Objective::Minimize) {
  const DecideResult dec = decide(d, given, eval_opts, objective);
  SensitivityReport rep;
  rep.decision = dec.decision;
  rep.alternatives = dec.alternatives;
  rep.chosen = dec.chosen;
  for (const auto& c : dec.costs) rep.costs.push_back(c.as_value());

  for (size_t a = 0; a < rep.costs.size(); ++a)
    for (size_t b = a + 1; b < rep.costs.size(); ++b) {
      for (Side side : {Side::Left, Side::Right})
        if (auto hit = half_intersection(rep.costs[a], rep.costs[b], side))
          rep.intersections.push_back({a, b, side, *hit});
      if (deterministic_dominance(rep.costs[a], rep.costs[b]))
        rep.dominated.emplace_back(a, b);
      if (deterministic_dominance(rep.costs[b], rep.costs[a]))
        rep.dominated.emplace_back(b, a);
    }

  rep.alpha = alpha_star(rep.costs, objective);
  rep.possibility = 1.0 - rep.alpha;

  // Conventional possibility of the runner-up beating the chosen alternative:
  // right half of the chosen cost against left halves of the others. Not the
  // primary criterion; reported for comparison only.
  if (rep.chosen >= 0) {
    const auto& best = rep.costs[static_cast<size_t>(rep.chosen)];
    for (size_t i = 0; i < rep.costs.size(); ++i) {
      if (static_cast<int>(i) == rep.chosen) continue;
      const auto& other = rep.costs[i];
      const double s1 = best.support().hi - best.mean();
      const double s2 = other.mean() - other.support().lo;
      if (other.mean() <= best.mean() + 1e-12) {
        rep.cross_alpha = 1.0;
        continue;
      }
      if (s1 + s2 <= 1e-12) continue;
      const double a = 1.0 - (other.mean() - best.mean()) / (s1 + s2);
      rep.cross_alpha = std::max(rep.cross_alpha, std::clamp(a, 0.0, 1.0));
    }
  }
  return rep;
}

}  // namespace fid

#endif  // FID_SENSITIVITY_HPP
