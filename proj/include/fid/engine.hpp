#ifndef FID_ENGINE_HPP
#define FID_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fid/detail/crisp_net.hpp"
#include "fid/detail/extremize.hpp"
#include "fid/diagram.hpp"

namespace fid {

/// A conditional probability query: P(target | given).
struct Query {
  std::string target;
  std::vector<std::pair<std::string, std::string>> given;  // (node, outcome)
};

enum class Objective { Minimize, Maximize };

/// One fuzzy result component. The membership function is linear from 1 at
/// the mean down to mu_lo at lo (resp. mu_hi at hi) and jumps to 0 outside
/// the support; nonzero endpoint memberships appear when domain clipping
/// flattens the extremum over a range of alpha levels.
struct FuzzyResultEntry {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double mu_lo = 0.0;
  double mu_hi = 0.0;

  double membership(double x) const {
    const double eps = 1e-12;
    if (x < lo - eps || x > hi + eps) return 0.0;
    if (std::fabs(x - mean) <= eps) return 1.0;
    if (x < mean) {
      if (mean - lo <= eps) return 1.0;
      return mu_lo + (1.0 - mu_lo) * (x - lo) / (mean - lo);
    }
    if (hi - mean <= eps) return 1.0;
    return mu_hi + (1.0 - mu_hi) * (hi - x) / (hi - mean);
  }

  /// Back-conversion to a nominal-spread probability. A clipped side with a
  /// boundary membership jump is restored to the nominal spread that produces
  /// that jump; an unclipped side keeps its support distance.
  FuzzyProbability as_probability() const {
    double l = mean - lo;
    double r = hi - mean;
    if (mu_lo > 1e-9 && lo <= 1e-9 && mu_lo < 1.0 - 1e-12) l = mean / (1.0 - mu_lo);
    if (mu_hi > 1e-9 && hi >= 1.0 - 1e-9 && mu_hi < 1.0 - 1e-12)
      r = (1.0 - mean) / (1.0 - mu_hi);
    return FuzzyProbability(l, mean, r);
  }

  FuzzyValue as_value() const { return FuzzyValue(mean - lo, mean, hi - mean); }
};

struct InferResult {
  OutcomeSpace space;
  std::vector<FuzzyResultEntry> entries;
  OpCounter ops;

  FuzzyDistribution distribution() const {
    std::vector<FuzzyProbability> p;
    p.reserve(entries.size());
    for (const auto& e : entries) p.push_back(e.as_probability());
    return FuzzyDistribution(space, std::move(p));
  }
};

struct DecideResult {
  std::string decision;
  std::vector<std::string> alternatives;
  std::vector<FuzzyResultEntry> costs;  // per alternative
  int chosen = -1;
  OpCounter ops;
};

namespace detail {

inline int chance_index(const InfluenceDiagram& d, const std::string& name,
                        const char* role) {
  if (!d.has_node(name))
    throw EngineError(std::string(role) + ": unknown node '" + name + "'");
  const int i = d.index(name);
  if (d.node(i).kind != NodeKind::Chance)
    throw EngineError(std::string(role) + ": node '" + name + "' is not a chance node");
  return i;
}

inline std::vector<std::pair<int, int>> resolve_evidence(
    const InfluenceDiagram& d,
    const std::vector<std::pair<std::string, std::string>>& given) {
  std::vector<std::pair<int, int>> ev;
  std::set<int> seen;
  for (const auto& [name, outcome] : given) {
    const int e = chance_index(d, name, "evidence");
    if (!seen.insert(e).second)
      throw EngineError("evidence: node '" + name + "' given more than once");
    const int k = d.node(e).space.index_of(outcome);
    if (k < 0)
      throw EngineError("evidence: '" + outcome + "' is not an outcome of '" + name + "'");
    ev.emplace_back(e, k);
  }
  return ev;
}

}  // namespace detail

/// Posterior fuzzy distribution P(target | given). Means come from the arc
/// reversal / barren node engine; support endpoints extremize the whole
/// posterior expression jointly over every fuzzy row's clipped feasible set.
inline InferResult infer(const InfluenceDiagram& d, const Query& q,
                         const EvalOptions& opts = {}) {
  const int target = detail::chance_index(d, q.target, "target");
  auto ev = detail::resolve_evidence(d, q.given);
  for (const auto& [e, k] : ev)
    if (e == target) throw EngineError("target node cannot also be evidence");

  std::vector<int> seeds{target};
  for (const auto& [e, k] : ev) seeds.push_back(e);
  const std::set<int> relevant = detail::ancestors_closure(d, seeds);
  for (int r : relevant)
    if (d.node(r).kind == NodeKind::Decision)
      throw EngineError("query depends on decision node '" + d.node(r).name +
                        "'; use decide() or remove the dependency");

  InferResult res;
  res.space = d.node(target).space;
  const detail::Tables base = detail::Tables::from(d);

  auto run_post = [&](const detail::Tables& tb, OpCounter* ops) {
    detail::CrispNet net = detail::make_net(d, tb, {}, false, relevant, ops);
    return net.posterior(target, ev);
  };
  const std::vector<double> means = run_post(base, &res.ops);

  const detail::ParamSpace ps = detail::ParamSpace::from(d, relevant, false);
  const detail::Extremizer ext(ps, opts);
  for (size_t k = 0; k < means.size(); ++k) {
    FuzzyResultEntry e;
    e.mean = means[k];
    e.lo = e.hi = means[k];
    if (opts.compute_spreads && !ps.empty()) {
      auto f = [&](const detail::Assignment& a) {
        detail::Tables tb = base;
        ps.apply_to(tb, a);
        return run_post(tb, nullptr)[k];
      };
      e.lo = ext.run(0.0, /*maximize=*/false, f);
      e.hi = ext.run(0.0, /*maximize=*/true, f);
      if (opts.boundary_membership) {
        e.mu_lo = ext.boundary_membership(/*lower=*/true, e.lo, e.mean, f);
        e.mu_hi = ext.boundary_membership(/*lower=*/false, e.hi, e.mean, f);
      }
    }
    res.entries.push_back(e);
  }
  return res;
}

/// Fuzzy expected cost of every alternative of the (single) decision node,
/// given evidence on its informational predecessors; picks the alternative
/// with the best mean cost.
inline DecideResult decide(const InfluenceDiagram& d,
                           const std::vector<std::pair<std::string, std::string>>& given,
                           const EvalOptions& opts = {},
                           Objective objective = Objective::Minimize) {
  if (!d.value_node()) throw EngineError("decide: diagram has no value node");
  const auto decisions = d.decision_nodes();
  if (decisions.size() != 1)
    throw EngineError("decide: diagram must have exactly one decision node");
  const int dec = decisions[0];

  auto ev = detail::resolve_evidence(d, given);
  std::set<int> ev_nodes;
  for (const auto& [e, k] : ev) ev_nodes.insert(e);
  for (int p : d.parents_of(dec))
    if (!ev_nodes.count(p))
      throw EngineError("decide: informational predecessor '" + d.node(p).name +
                        "' has no evidence");

  std::set<int> included;
  for (size_t i = 0; i < d.size(); ++i)
    if (d.node(static_cast<int>(i)).kind == NodeKind::Chance)
      included.insert(static_cast<int>(i));

  DecideResult res;
  res.decision = d.node(dec).name;
  res.alternatives = d.node(dec).space.outcomes;

  const detail::Tables base = detail::Tables::from(d);
  const detail::ParamSpace ps = detail::ParamSpace::from(d, included, /*costs=*/true);
  const detail::Extremizer ext(ps, opts);

  for (size_t a = 0; a < res.alternatives.size(); ++a) {
    const std::map<int, int> choice{{dec, static_cast<int>(a)}};
    auto run_cost = [&](const detail::Tables& tb, OpCounter* ops) {
      detail::CrispNet net = detail::make_net(d, tb, choice, true, included, ops);
      return net.expected_cost(ev);
    };
    FuzzyResultEntry e;
    e.mean = run_cost(base, &res.ops);
    e.lo = e.hi = e.mean;
    if (opts.compute_spreads && !ps.empty()) {
      auto f = [&](const detail::Assignment& asn) {
        detail::Tables tb = base;
        ps.apply_to(tb, asn);
        return run_cost(tb, nullptr);
      };
      e.lo = ext.run(0.0, false, f);
      e.hi = ext.run(0.0, true, f);
      if (opts.boundary_membership) {
        e.mu_lo = ext.boundary_membership(true, e.lo, e.mean, f);
        e.mu_hi = ext.boundary_membership(false, e.hi, e.mean, f);
      }
    }
    res.costs.push_back(e);
  }

  const double sgn = objective == Objective::Minimize ? 1.0 : -1.0;
  for (size_t a = 0; a < res.costs.size(); ++a)
    if (res.chosen < 0 ||
        sgn * res.costs[a].mean < sgn * res.costs[static_cast<size_t>(res.chosen)].mean - 1e-12)
      res.chosen = static_cast<int>(a);
  return res;
}

/// Independent mean-channel reference: posterior by direct joint enumeration.
inline std::vector<double> crisp_posterior(const InfluenceDiagram& d, const Query& q) {
  const int target = detail::chance_index(d, q.target, "target");
  auto ev = detail::resolve_evidence(d, q.given);
  std::vector<int> seeds{target};
  for (const auto& [e, k] : ev) seeds.push_back(e);
  const std::set<int> relevant = detail::ancestors_closure(d, seeds);
  for (int r : relevant)
    if (d.node(r).kind == NodeKind::Decision)
      throw EngineError("query depends on decision node '" + d.node(r).name + "'");
  return detail::enum_posterior(d, detail::Tables::from(d), target, ev, relevant);
}

/// Independent mean-channel reference: expected cost by direct enumeration.
inline double crisp_expected_cost(
    const InfluenceDiagram& d,
    const std::vector<std::pair<std::string, std::string>>& given,
    const std::string& alternative) {
  auto ev = detail::resolve_evidence(d, given);
  const auto decisions = d.decision_nodes();
  std::map<int, int> choice;
  if (!decisions.empty()) {
    if (decisions.size() != 1)
      throw EngineError("expected cost: diagram must have at most one decision node");
    const int k = d.node(decisions[0]).space.index_of(alternative);
    if (k < 0)
      throw EngineError("expected cost: unknown alternative '" + alternative + "'");
    choice[decisions[0]] = k;
  }
  return detail::enum_expected_cost(d, detail::Tables::from(d), ev, choice);
}

// ---------------------------------------------------------------------------
// Standalone fuzzy diagram transformations.
// ---------------------------------------------------------------------------

namespace detail {

/// Support intervals of a fuzzy row tightened by the sum-to-one constraint.
struct EffRow {
  std::vector<double> lo, hi, mean;
};

inline EffRow effective_row(const FuzzyDistribution& dist) {
  const size_t k = dist.size();
  EffRow r;
  r.lo.resize(k);
  r.hi.resize(k);
  r.mean.resize(k);
  double slo = 0.0, shi = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const Interval s = dist.at(i).support();
    r.lo[i] = s.lo;
    r.hi[i] = s.hi;
    r.mean[i] = dist.at(i).mean();
    slo += s.lo;
    shi += s.hi;
  }
  for (size_t i = 0; i < k; ++i) {
    r.lo[i] = std::max(r.lo[i], 1.0 - (shi - r.hi[i]));
    r.hi[i] = std::min(r.hi[i], 1.0 - (slo - r.lo[i]));
  }
  return r;
}

/// Extreme of sum_x p_x w_x over {p in effective box, sum p = 1}: start every
/// coordinate at its lower bound and greedily hand the remaining mass to the
/// cheapest (or dearest) weights.
inline double extreme_dot(const EffRow& p, const std::vector<double>& w, bool maximize,
                          OpCounter* ops) {
  const size_t k = w.size();
  std::vector<size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (ops) ops->comparisons++;
    return maximize ? w[a] > w[b] : w[a] < w[b];
  });
  std::vector<double> v = p.lo;
  double rem = 1.0;
  for (double x : v) rem -= x;
  if (ops) ops->adds += static_cast<long long>(k);
  for (size_t i : order) {
    const double add = std::min(rem, p.hi[i] - p.lo[i]);
    if (add > 0.0) {
      v[i] += add;
      rem -= add;
    }
    if (ops) ops->comparisons++;
  }
  double acc = 0.0;
  for (size_t i = 0; i < k; ++i) acc += v[i] * w[i];
  if (ops) {
    ops->mults += static_cast<long long>(k);
    ops->adds += static_cast<long long>(k) - 1;
  }
  return acc;
}

/// Extreme of the Bayes weight p_t q_t / sum_x p_x q_x; q is one row per x
/// over the child outcome y. The target coordinate takes its extreme, the
/// remaining mass goes greedily to the opposing weights.
inline double extreme_bayes_weight(const EffRow& p, const std::vector<EffRow>& q, int y,
                                   size_t t, bool maximize, double fallback,
                                   OpCounter* ops) {
  const size_t k = p.mean.size();
  const double qt = maximize ? q[t].hi[static_cast<size_t>(y)]
                             : q[t].lo[static_cast<size_t>(y)];
  const double pt = maximize ? p.hi[t] : p.lo[t];
  std::vector<size_t> others;
  std::vector<double> w(k, 0.0);
  for (size_t x = 0; x < k; ++x) {
    if (x == t) continue;
    others.push_back(x);
    w[x] = maximize ? q[x].lo[static_cast<size_t>(y)] : q[x].hi[static_cast<size_t>(y)];
  }
  // Distribute 1 - pt over the others: ascending opposing weight when
  // maximizing the target share, descending when minimizing it.
  std::sort(others.begin(), others.end(), [&](size_t a, size_t b) {
    if (ops) ops->comparisons++;
    return maximize ? w[a] < w[b] : w[a] > w[b];
  });
  std::vector<double> v(k, 0.0);
  double rem = 1.0 - pt;
  for (size_t x : others) {
    v[x] = p.lo[x];
    rem -= p.lo[x];
  }
  if (ops) ops->adds += static_cast<long long>(k);
  for (size_t x : others) {
    const double add = std::clamp(rem, 0.0, p.hi[x] - p.lo[x]);
    v[x] += add;
    rem -= add;
    if (ops) ops->comparisons++;
  }
  double a = pt * qt, b = 0.0;
  for (size_t x : others) b += v[x] * w[x];
  if (ops) {
    ops->mults += static_cast<long long>(k);
    ops->adds += static_cast<long long>(k) - 1;
    ops->divs += 1;
  }
  if (a + b <= 0.0) return fallback;
  return a / (a + b);
}

inline std::vector<std::string> union_first_seen(const std::vector<std::string>& a,
                                                 const std::vector<std::string>& b,
                                                 const std::string& skip) {
  std::vector<std::string> out;
  auto push = [&](const std::string& s) {
    if (s == skip) return;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& s : a) push(s);
  for (const auto& s : b) push(s);
  return out;
}

inline InfluenceDiagram rebuild(std::vector<DiagramNode> nodes, const char* what) {
  auto res = InfluenceDiagram::build(std::move(nodes));
  if (!res.ok()) {
    std::string msg = std::string(what) + " produced an invalid diagram:";
    for (const auto& e : res.errors) msg += " " + e + ";";
    throw EngineError(msg);
  }
  return std::move(*res.diagram);
}

inline InfluenceDiagram remove_barren_node(const InfluenceDiagram& d, int x,
                                           const char* what) {
  if (!d.children(x).empty())
    throw EngineError(std::string(what) + ": node still has children");
  std::vector<DiagramNode> nodes;
  for (size_t i = 0; i < d.size(); ++i)
    if (static_cast<int>(i) != x) nodes.push_back(d.node(static_cast<int>(i)));
  return rebuild(std::move(nodes), what);
}

}  // namespace detail

/// Reverses the chance arc from -> to via fuzzy Bayes. Means follow the exact
/// crisp formulas; support spreads come from closed-form greedy extremization
/// of the marginal and posterior-weight expressions over each row's effective
/// feasible set, re-linearized one line per side.
inline InfluenceDiagram reverse_arc(const InfluenceDiagram& d, const std::string& from,
                                    const std::string& to, OpCounter* ops = nullptr) {
  const auto rev = d.reversible(from, to);
  if (!rev.ok) throw EngineError("reverse_arc " + from + " -> " + to + ": " + rev.reason);
  const int i = d.index(from), j = d.index(to);
  const DiagramNode& ni = d.node(i);
  const DiagramNode& nj = d.node(j);
  const size_t kn = ni.space.size(), km = nj.space.size();

  const std::vector<std::string> U = detail::union_first_seen(ni.parents, nj.parents, from);
  std::vector<OutcomeSpace> u_spaces;
  for (const auto& s : U) u_spaces.push_back(d.node(s).space);
  size_t u_rows = 1;
  for (const auto& s : u_spaces) u_rows *= s.size();

  std::vector<FuzzyDistribution> new_j_rows(u_rows);
  std::vector<FuzzyDistribution> new_i_rows(u_rows * km);

  std::map<std::string, int> coord;
  for (size_t ur = 0; ur < u_rows; ++ur) {
    size_t rem = ur;
    for (size_t q = U.size(); q-- > 0;) {
      coord[U[q]] = static_cast<int>(rem % u_spaces[q].size());
      rem /= u_spaces[q].size();
    }
    auto row_of = [&](const DiagramNode& n) {
      std::vector<int> idx;
      for (const auto& p : n.parents) idx.push_back(coord.at(p));
      return n.table->row(idx);
    };
    coord[from] = 0;  // placeholder; set per x below
    const FuzzyDistribution pi_row = [&] {
      std::vector<int> idx;
      for (const auto& p : ni.parents) idx.push_back(coord.at(p));
      return ni.table->row(idx);
    }();
    const detail::EffRow p = detail::effective_row(pi_row);

    std::vector<detail::EffRow> q(kn);
    for (size_t x = 0; x < kn; ++x) {
      coord[from] = static_cast<int>(x);
      q[x] = detail::effective_row(row_of(nj));
    }

    std::vector<FuzzyProbability> marg(km);
    std::vector<double> marg_mean(km);
    for (size_t y = 0; y < km; ++y) {
      double m = 0.0;
      std::vector<double> wlo(kn), whi(kn);
      for (size_t x = 0; x < kn; ++x) {
        m += p.mean[x] * q[x].mean[y];
        wlo[x] = q[x].lo[y];
        whi[x] = q[x].hi[y];
      }
      if (ops) {
        ops->mults += static_cast<long long>(kn);
        ops->adds += static_cast<long long>(kn) - 1;
      }
      const double lo = detail::extreme_dot(p, wlo, false, ops);
      const double hi = detail::extreme_dot(p, whi, true, ops);
      marg_mean[y] = m;
      marg[y] = FuzzyProbability(m - lo, m, hi - m);
    }
    new_j_rows[ur] = FuzzyDistribution(nj.space, std::move(marg));

    for (size_t y = 0; y < km; ++y) {
      std::vector<FuzzyProbability> cond(kn);
      for (size_t x = 0; x < kn; ++x) {
        double m;
        if (marg_mean[y] > 0.0) {
          m = p.mean[x] * q[x].mean[y] / marg_mean[y];
          if (ops) {
            ops->mults += 1;
            ops->divs += 1;
          }
        } else {
          m = 1.0 / static_cast<double>(kn);
        }
        const double lo =
            detail::extreme_bayes_weight(p, q, static_cast<int>(y), x, false, m, ops);
        const double hi =
            detail::extreme_bayes_weight(p, q, static_cast<int>(y), x, true, m, ops);
        cond[x] = FuzzyProbability(m - std::min(lo, m), m, std::max(hi, m) - m);
      }
      new_i_rows[ur * km + y] = FuzzyDistribution(ni.space, std::move(cond));
    }
  }

  std::vector<DiagramNode> nodes = d.nodes();
  DiagramNode& mj = nodes[static_cast<size_t>(j)];
  mj.parents = U;
  mj.table = ConditionalTable(nj.space, u_spaces, std::move(new_j_rows));
  DiagramNode& mi = nodes[static_cast<size_t>(i)];
  mi.parents = U;
  mi.parents.push_back(to);
  std::vector<OutcomeSpace> i_parent_spaces = u_spaces;
  i_parent_spaces.push_back(nj.space);
  mi.table = ConditionalTable(ni.space, std::move(i_parent_spaces), std::move(new_i_rows));
  return detail::rebuild(std::move(nodes), "reverse_arc");
}

/// Removes a chance node by marginalization: reverse its outgoing arcs until
/// one child remains (which then carries the marginal), then drop the node.
inline InfluenceDiagram sum_out_chance(const InfluenceDiagram& d, const std::string& name,
                                       OpCounter* ops = nullptr) {
  if (!d.has_node(name)) throw EngineError("sum_out: unknown node '" + name + "'");
  const int x0 = d.index(name);
  if (d.node(x0).kind != NodeKind::Chance)
    throw EngineError("sum_out: '" + name + "' is not a chance node");
  for (int c : d.children(x0))
    if (d.node(c).kind != NodeKind::Chance)
      throw EngineError("sum_out: '" + name + "' has a non-chance child '" +
                        d.node(c).name + "'");

  InfluenceDiagram cur = d;
  while (true) {
    const int x = cur.index(name);
    auto ch = cur.children(x);
    if (ch.empty()) break;
    const auto order = cur.topo_order();
    std::vector<int> pos(cur.size(), 0);
    for (size_t r = 0; r < order.size(); ++r) pos[static_cast<size_t>(order[r])] =
        static_cast<int>(r);
    int best = ch[0];
    for (int c : ch)
      if (pos[static_cast<size_t>(c)] < pos[static_cast<size_t>(best)]) best = c;
    cur = reverse_arc(cur, name, cur.node(best).name, ops);
    if (ch.size() == 1) break;  // after reversing the last arc the node is barren
  }
  return detail::remove_barren_node(cur, cur.index(name), "sum_out");
}

/// Folds a chance predecessor of the value node into the cost table
/// (expectation over its outcomes). Chance children are reversed away first.
inline InfluenceDiagram absorb_into_value(const InfluenceDiagram& d,
                                          const std::string& name,
                                          OpCounter* ops = nullptr) {
  if (!d.has_node(name)) throw EngineError("absorb: unknown node '" + name + "'");
  if (d.node(d.index(name)).kind != NodeKind::Chance)
    throw EngineError("absorb: '" + name + "' is not a chance node");

  InfluenceDiagram cur = d;
  while (true) {
    const int x = cur.index(name);
    std::vector<int> chance_children;
    for (int c : cur.children(x)) {
      const auto kind = cur.node(c).kind;
      if (kind == NodeKind::Decision)
        throw EngineError("absorb: '" + name + "' has a decision child");
      if (kind == NodeKind::Chance) chance_children.push_back(c);
    }
    if (chance_children.empty()) break;
    const auto order = cur.topo_order();
    std::vector<int> pos(cur.size(), 0);
    for (size_t r = 0; r < order.size(); ++r)
      pos[static_cast<size_t>(order[r])] = static_cast<int>(r);
    int best = chance_children[0];
    for (int c : chance_children)
      if (pos[static_cast<size_t>(c)] < pos[static_cast<size_t>(best)]) best = c;
    cur = reverse_arc(cur, name, cur.node(best).name, ops);
  }

  const int x = cur.index(name);
  const auto vi = cur.value_node();
  if (!vi || !cur.has_arc(x, *vi))
    throw EngineError("absorb: '" + name + "' is not a predecessor of the value node");
  const DiagramNode& nx = cur.node(x);
  const DiagramNode& nv = cur.node(*vi);
  const size_t kn = nx.space.size();

  const std::vector<std::string> U = detail::union_first_seen(nx.parents, nv.parents, name);
  std::vector<OutcomeSpace> u_spaces;
  for (const auto& s : U) u_spaces.push_back(cur.node(s).space);
  size_t u_rows = 1;
  for (const auto& s : u_spaces) u_rows *= s.size();

  std::vector<FuzzyValue> new_costs(u_rows);
  std::map<std::string, int> coord;
  for (size_t ur = 0; ur < u_rows; ++ur) {
    size_t rem = ur;
    for (size_t q = U.size(); q-- > 0;) {
      coord[U[q]] = static_cast<int>(rem % u_spaces[q].size());
      rem /= u_spaces[q].size();
    }
    std::vector<int> idx;
    for (const auto& p : nx.parents) idx.push_back(coord.at(p));
    const FuzzyDistribution& prow = nx.table->row(idx);
    const detail::EffRow p = detail::effective_row(prow);

    std::vector<double> cm(kn), clo(kn), chi(kn);
    for (size_t k = 0; k < kn; ++k) {
      coord[name] = static_cast<int>(k);
      size_t vrow = 0;
      for (const auto& vp : nv.parents)
        vrow = vrow * cur.node(vp).space.size() +
               static_cast<size_t>(coord.at(vp));
      const FuzzyValue& c = nv.costs[vrow];
      cm[k] = c.mean();
      const Interval s = c.support();
      clo[k] = s.lo;
      chi[k] = s.hi;
    }
    coord.erase(name);
    double m = 0.0;
    for (size_t k = 0; k < kn; ++k) m += p.mean[k] * cm[k];
    if (ops) {
      ops->mults += static_cast<long long>(kn);
      ops->adds += static_cast<long long>(kn) - 1;
    }
    const double lo = detail::extreme_dot(p, clo, false, ops);
    const double hi = detail::extreme_dot(p, chi, true, ops);
    new_costs[ur] = FuzzyValue(m - lo, m, hi - m);
  }

  std::vector<DiagramNode> nodes;
  for (size_t i = 0; i < cur.size(); ++i) {
    if (static_cast<int>(i) == x) continue;
    DiagramNode n = cur.node(static_cast<int>(i));
    if (static_cast<int>(i) == *vi) {
      n.parents = U;
      n.costs = new_costs;
    }
    nodes.push_back(std::move(n));
  }
  return detail::rebuild(std::move(nodes), "absorb");
}

}  // namespace fid

#endif  // FID_ENGINE_HPP
