#ifndef FID_ORACLE_HPP
#define FID_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fid/detail/crisp_net.hpp"
#include "fid/detail/extremize.hpp"
#include "fid/engine.hpp"

namespace fid {

struct OracleOptions {
  int grid_n = 101;  ///< lattice points per free parameter; odd, >= 3
  int bins = 256;    ///< output membership-curve bins
};

/// Piecewise-constant sup-membership over an output interval, produced by
/// constrained extension-principle grid sampling.
struct MembershipCurve {
  double lo = 0.0;                ///< support minimum over feasible configs
  double hi = 0.0;                ///< support maximum over feasible configs
  std::vector<double> mu;         ///< per-bin sup of config membership
  std::vector<long long> counts;  ///< configs mapped into each bin

  double bin_width() const {
    return mu.empty() ? 0.0 : (hi - lo) / static_cast<double>(mu.size());
  }
  double bin_center(size_t i) const {
    return lo + (static_cast<double>(i) + 0.5) * bin_width();
  }
  /// Sup membership of the bin containing x; 0 outside the support.
  double value_at(double x) const {
    if (mu.empty()) return 0.0;
    if (hi - lo < 1e-12) return std::fabs(x - lo) <= 1e-9 ? mu[0] : 0.0;
    if (x < lo - 1e-12 || x > hi + 1e-12) return 0.0;
    const auto i = static_cast<size_t>(std::clamp(
        (x - lo) / bin_width(), 0.0, static_cast<double>(mu.size()) - 1.0));
    return mu[i];
  }
};

/// What the oracle evaluates per configuration: one posterior probability or
/// one decision alternative's expected cost.
struct CurveTarget {
  bool is_cost = false;
  Query query;              // posterior target + evidence
  std::string outcome;      // outcome of the posterior target
  std::vector<std::pair<std::string, std::string>> given;  // cost evidence
  std::string alternative;  // decision alternative

  static CurveTarget posterior(Query q, std::string out) {
    CurveTarget t;
    t.query = std::move(q);
    t.outcome = std::move(out);
    return t;
  }
  static CurveTarget cost(std::vector<std::pair<std::string, std::string>> given,
                          std::string alternative) {
    CurveTarget t;
    t.is_cost = true;
    t.given = std::move(given);
    t.alternative = std::move(alternative);
    return t;
  }
};

namespace detail {

inline void check_grid(int grid_n) {
  if (grid_n < 3 || grid_n % 2 == 0)
    throw std::invalid_argument("oracle grid_n must be odd and >= 3");
}

/// grid_n points covering [lo, hi] with the mean always included: half the
/// lattice on each side of the mean.
inline std::vector<double> side_grid(double lo, double mean, double hi, int grid_n) {
  const int h = (grid_n - 1) / 2;
  std::vector<double> out;
  out.reserve(static_cast<size_t>(grid_n));
  for (int i = 0; i <= h; ++i)
    out.push_back(lo + (mean - lo) * static_cast<double>(i) / h);
  for (int i = 1; i <= h; ++i)
    out.push_back(mean + (hi - mean) * static_cast<double>(i) / h);
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
            out.end());
  return out;
}

/// Sweeps the consistent-perturbation lattice of a parameter space: each
/// fuzzy row contributes k-1 free lattice coordinates (the last outcome
/// absorbs the slack and must stay inside its own support), each fuzzy cost
/// cell contributes one. Calls fn(assignment, membership) per feasible
/// config, including boundary configs of membership 0.
template <typename Fn>
void for_each_consistent_config(const ParamSpace& ps, int grid_n, Fn&& fn) {
  check_grid(grid_n);
  struct Slot {
    std::vector<double> values;
    size_t row;     // row index in ps, or SIZE_MAX for a cost cell
    size_t entry;   // outcome index within the row / cost index
  };
  std::vector<Slot> slots;
  for (size_t r = 0; r < ps.rows.size(); ++r) {
    const auto& row = ps.rows[r];
    for (size_t o = 0; o + 1 < row.fp.size(); ++o) {
      const Interval s = row.fp[o].support();
      slots.push_back({side_grid(s.lo, row.fp[o].mean(), s.hi, grid_n), r, o});
    }
  }
  for (size_t c = 0; c < ps.costs.size(); ++c) {
    const Interval s = ps.costs[c].fv.support();
    slots.push_back({side_grid(s.lo, ps.costs[c].fv.mean(), s.hi, grid_n),
                     static_cast<size_t>(-1), c});
  }

  Assignment a = ps.means();
  std::vector<size_t> idx(slots.size(), 0);
  while (true) {
    for (size_t s = 0; s < slots.size(); ++s) {
      const double v = slots[s].values[idx[s]];
      if (slots[s].row == static_cast<size_t>(-1))
        a.costs[slots[s].entry] = v;
      else
        a.rows[slots[s].row][slots[s].entry] = v;
    }
    double mu = 1.0;
    bool feasible = true;
    for (size_t r = 0; r < ps.rows.size() && feasible; ++r) {
      const auto& row = ps.rows[r];
      const size_t last = row.fp.size() - 1;
      double rest = 1.0;
      for (size_t o = 0; o < last; ++o) rest -= a.rows[r][o];
      const Interval s = row.fp[last].support();
      if (rest < s.lo - 1e-9 || rest > s.hi + 1e-9) {
        feasible = false;
        break;
      }
      a.rows[r][last] = std::clamp(rest, s.lo, s.hi);
      for (size_t o = 0; o <= last; ++o)
        mu = std::min(mu, row.fp[o].membership(a.rows[r][o]));
    }
    if (feasible) {
      for (size_t c = 0; c < ps.costs.size(); ++c)
        mu = std::min(mu, ps.costs[c].fv.membership(a.costs[c]));
      fn(static_cast<const Assignment&>(a), mu);
    }
    size_t s = slots.size();
    bool done = slots.empty();
    while (s > 0) {
      --s;
      if (++idx[s] < slots[s].values.size()) break;
      idx[s] = 0;
      if (s == 0) done = true;
    }
    if (done) break;
  }
}

}  // namespace detail

/// Number of consistent lattice configurations for the whole diagram.
inline long long count_configs(const InfluenceDiagram& d, int grid_n) {
  std::set<int> chance;
  for (size_t i = 0; i < d.size(); ++i)
    if (d.node(static_cast<int>(i)).kind == NodeKind::Chance)
      chance.insert(static_cast<int>(i));
  const detail::ParamSpace ps = detail::ParamSpace::from(d, chance, true);
  long long n = 0;
  detail::for_each_consistent_config(ps, grid_n,
                                     [&](const detail::Assignment&, double) { ++n; });
  return n;
}

/// Constrained extension-principle curve of the target quantity: every
/// consistent lattice config is evaluated crisply by joint enumeration and
/// deposits its min-membership; per-bin sup is kept.
inline MembershipCurve ep_curve(const InfluenceDiagram& d, const CurveTarget& target,
                                const OracleOptions& opts = {}) {
  detail::check_grid(opts.grid_n);

  std::set<int> param_nodes;
  std::vector<std::pair<int, int>> ev;
  int target_node = -1, target_outcome = -1;
  std::set<int> relevant;
  std::map<int, int> choice;

  if (target.is_cost) {
    for (size_t i = 0; i < d.size(); ++i)
      if (d.node(static_cast<int>(i)).kind == NodeKind::Chance)
        param_nodes.insert(static_cast<int>(i));
    ev = detail::resolve_evidence(d, target.given);
    const auto decisions = d.decision_nodes();
    if (decisions.size() != 1)
      throw EngineError("oracle cost target needs exactly one decision node");
    const int alt = d.node(decisions[0]).space.index_of(target.alternative);
    if (alt < 0)
      throw EngineError("oracle: unknown alternative '" + target.alternative + "'");
    choice[decisions[0]] = alt;
  } else {
    target_node = detail::chance_index(d, target.query.target, "target");
    target_outcome = d.node(target_node).space.index_of(target.outcome);
    if (target_outcome < 0)
      throw EngineError("oracle: unknown outcome '" + target.outcome + "'");
    ev = detail::resolve_evidence(d, target.query.given);
    std::vector<int> seeds{target_node};
    for (const auto& [e, k] : ev) seeds.push_back(e);
    relevant = detail::ancestors_closure(d, seeds);
    for (int r : relevant)
      if (d.node(r).kind == NodeKind::Decision)
        throw EngineError("oracle: query depends on a decision node");
    param_nodes = relevant;
  }

  const detail::ParamSpace ps =
      detail::ParamSpace::from(d, param_nodes, /*costs=*/target.is_cost);
  const detail::Tables base = detail::Tables::from(d);

  std::vector<std::pair<double, double>> samples;  // (value, membership)
  detail::for_each_consistent_config(ps, opts.grid_n, [&](const detail::Assignment& a,
                                                          double mu) {
    detail::Tables tb = base;
    ps.apply_to(tb, a);
    const double v = target.is_cost
                         ? detail::enum_expected_cost(d, tb, ev, choice)
                         : detail::enum_posterior(d, tb, target_node, ev, relevant)
                               [static_cast<size_t>(target_outcome)];
    samples.emplace_back(v, mu);
  });

  MembershipCurve curve;
  if (samples.empty()) return curve;
  curve.lo = curve.hi = samples[0].first;
  for (const auto& [v, m] : samples) {
    curve.lo = std::min(curve.lo, v);
    curve.hi = std::max(curve.hi, v);
  }
  const int nbins = curve.hi - curve.lo < 1e-12 ? 1 : opts.bins;
  curve.mu.assign(static_cast<size_t>(nbins), 0.0);
  curve.counts.assign(static_cast<size_t>(nbins), 0);
  for (const auto& [v, m] : samples) {
    size_t i = 0;
    if (nbins > 1)
      i = static_cast<size_t>(std::clamp((v - curve.lo) / (curve.hi - curve.lo) * nbins,
                                         0.0, static_cast<double>(nbins - 1)));
    curve.mu[i] = std::max(curve.mu[i], m);
    curve.counts[i]++;
  }
  return curve;
}

/// Engine-vs-oracle agreement report.
struct CompareReport {
  double support_dev = 0.0;        ///< max |engine endpoint - oracle endpoint|
  double max_membership_dev = 0.0; ///< max pointwise deviation outside the band
  double tol_support = 0.0;
  double tol_membership = 0.0;
  bool support_ok = false;
  bool membership_ok = false;
  bool ok() const { return support_ok && membership_ok; }
};

/// Compares an engine result against an oracle curve. Bins within `band` of
/// either result's support endpoints are excluded from the pointwise check
/// (both representations have jump discontinuities there).
inline CompareReport compare(const FuzzyResultEntry& engine, const MembershipCurve& curve,
                             double tol_support, double tol_membership,
                             double band = 0.02) {
  CompareReport rep;
  rep.tol_support = tol_support;
  rep.tol_membership = tol_membership;
  rep.support_dev =
      std::max(std::fabs(engine.lo - curve.lo), std::fabs(engine.hi - curve.hi));
  rep.support_ok = rep.support_dev <= tol_support;

  const double edges[] = {engine.lo, engine.hi, curve.lo, curve.hi};
  for (size_t i = 0; i < curve.mu.size(); ++i) {
    if (curve.counts[i] == 0) continue;
    const double x = curve.mu.size() == 1 ? curve.lo : curve.bin_center(i);
    bool near_edge = false;
    for (double e : edges)
      if (std::fabs(x - e) <= band) near_edge = true;
    if (near_edge) continue;
    rep.max_membership_dev =
        std::max(rep.max_membership_dev, std::fabs(curve.mu[i] - engine.membership(x)));
  }
  rep.membership_ok = rep.max_membership_dev <= tol_membership;
  return rep;
}

}  // namespace fid

#endif  // FID_ORACLE_HPP
