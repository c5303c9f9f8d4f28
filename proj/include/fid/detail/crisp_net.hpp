#ifndef FID_DETAIL_CRISP_NET_HPP
#define FID_DETAIL_CRISP_NET_HPP

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "fid/diagram.hpp"

namespace fid {

/// Counts of ordinary arithmetic operations performed by an evaluation.
struct OpCounter {
  long long adds = 0;
  long long mults = 0;
  long long divs = 0;
  long long comparisons = 0;

  OpCounter& operator+=(const OpCounter& o) {
    adds += o.adds;
    mults += o.mults;
    divs += o.divs;
    comparisons += o.comparisons;
    return *this;
  }
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Crisp (mean-channel) snapshot of a diagram's numeric content. Probability
/// tables share the ConditionalTable layout: row-major over parent configs in
/// declared order, entry index = row * n_outcomes + outcome.
struct Tables {
  std::vector<std::vector<double>> prob;  // per diagram node; empty for non-chance
  std::vector<double> cost;               // value node costs (means)

  static Tables from(const InfluenceDiagram& d) {
    Tables t;
    t.prob.resize(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
      const auto& n = d.node(static_cast<int>(i));
      if (n.kind == NodeKind::Chance) {
        const auto& tab = *n.table;
        const size_t k = n.space.size();
        t.prob[i].resize(tab.row_count() * k);
        for (size_t r = 0; r < tab.row_count(); ++r)
          for (size_t o = 0; o < k; ++o) t.prob[i][r * k + o] = tab.row(r).at(o).mean();
      } else if (n.kind == NodeKind::Value) {
        t.cost.reserve(n.costs.size());
        for (const auto& c : n.costs) t.cost.push_back(c.mean());
      }
    }
    return t;
  }
};

inline size_t row_index_for(const std::vector<int>& pa, const std::vector<int>& sizes,
                            const std::vector<int>& coord) {
  size_t idx = 0;
  for (int p : pa) idx = idx * static_cast<size_t>(sizes[static_cast<size_t>(p)]) +
                         static_cast<size_t>(coord[static_cast<size_t>(p)]);
  return idx;
}

struct CNode {
  int n = 0;
  std::vector<int> pa;     // diagram node ids of (chance) parents
  std::vector<double> t;   // row-major over pa configs
  bool alive = false;
};

/// Mutable crisp influence-diagram evaluator: arc reversal, barren-node
/// removal, evidence instantiation and value-node absorption, with operation
/// counting. Node indices follow the source diagram.
class CrispNet {
 public:
  std::vector<CNode> nodes;
  std::vector<int> sizes;       // outcome count per diagram node (all kinds)
  std::vector<int> vpa;
  std::vector<double> vcost;
  bool has_value = false;
  OpCounter* ops = nullptr;

  void count_add(long long k = 1) const { if (ops) ops->adds += k; }
  void count_mul(long long k = 1) const { if (ops) ops->mults += k; }
  void count_div(long long k = 1) const { if (ops) ops->divs += k; }

  size_t rows_of(const std::vector<int>& pa) const {
    size_t r = 1;
    for (int p : pa) r *= static_cast<size_t>(sizes[static_cast<size_t>(p)]);
    return r;
  }

  std::vector<int> children(int i) const {
    std::vector<int> out;
    for (size_t j = 0; j < nodes.size(); ++j) {
      if (!nodes[j].alive) continue;
      for (int p : nodes[j].pa)
        if (p == i) {
          out.push_back(static_cast<int>(j));
          break;
        }
    }
    return out;
  }

  /// Topological position per alive node (larger = later); -1 when dead.
  std::vector<int> topo_positions() const {
    std::vector<int> pos(nodes.size(), -1);
    std::vector<int> indeg(nodes.size(), 0);
    std::vector<int> ready;
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].alive) continue;
      indeg[i] = static_cast<int>(nodes[i].pa.size());
      if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
    }
    int t = 0;
    while (!ready.empty()) {
      std::sort(ready.begin(), ready.end());
      int u = ready.front();
      ready.erase(ready.begin());
      pos[static_cast<size_t>(u)] = t++;
      for (int c : children(u))
        if (--indeg[static_cast<size_t>(c)] == 0) ready.push_back(c);
    }
    return pos;
  }

  /// Bayes-reverse arc i -> j (i must be a parent of j; no alternate path).
  void reverse(int i, int j) {
    CNode& ni = nodes[static_cast<size_t>(i)];
    CNode& nj = nodes[static_cast<size_t>(j)];
    std::vector<int> U;
    for (int p : ni.pa) U.push_back(p);
    for (int p : nj.pa)
      if (p != i) U.push_back(p);
    std::sort(U.begin(), U.end());
    U.erase(std::unique(U.begin(), U.end()), U.end());

    std::vector<int> pa_i_new = U;
    pa_i_new.push_back(j);

    const int kn = ni.n, km = nj.n;
    std::vector<double> tj(rows_of(U) * static_cast<size_t>(km));
    std::vector<double> ti(rows_of(pa_i_new) * static_cast<size_t>(kn));

    std::vector<int> coord(nodes.size(), 0);
    const size_t u_rows = rows_of(U);
    for (size_t ur = 0; ur < u_rows; ++ur) {
      // decode ur into coords of U
      size_t rem = ur;
      for (size_t q = U.size(); q-- > 0;) {
        const int node = U[q];
        coord[static_cast<size_t>(node)] =
            static_cast<int>(rem % static_cast<size_t>(sizes[static_cast<size_t>(node)]));
        rem /= static_cast<size_t>(sizes[static_cast<size_t>(node)]);
      }
      const size_t ri = row_index_for(ni.pa, sizes, coord);
      for (int y = 0; y < km; ++y) {
        double marg = 0.0;
        for (int x = 0; x < kn; ++x) {
          coord[static_cast<size_t>(i)] = x;
          const size_t rj = row_index_for(nj.pa, sizes, coord);
          marg += ni.t[ri * static_cast<size_t>(kn) + static_cast<size_t>(x)] *
                  nj.t[rj * static_cast<size_t>(km) + static_cast<size_t>(y)];
        }
        count_mul(kn);
        count_add(kn - 1);
        tj[ur * static_cast<size_t>(km) + static_cast<size_t>(y)] = marg;
        coord[static_cast<size_t>(j)] = y;
        const size_t rin = row_index_for(pa_i_new, sizes, coord);
        for (int x = 0; x < kn; ++x) {
          coord[static_cast<size_t>(i)] = x;
          const size_t rj = row_index_for(nj.pa, sizes, coord);
          const double num = ni.t[ri * static_cast<size_t>(kn) + static_cast<size_t>(x)] *
                             nj.t[rj * static_cast<size_t>(km) + static_cast<size_t>(y)];
          count_mul();
          double w;
          if (marg > 0.0) {
            w = num / marg;
            count_div();
          } else {
            w = 1.0 / kn;  // unreachable conditioning event; any proper row works
          }
          ti[rin * static_cast<size_t>(kn) + static_cast<size_t>(x)] = w;
        }
      }
      coord[static_cast<size_t>(i)] = 0;
      coord[static_cast<size_t>(j)] = 0;
    }
    nj.pa = U;
    nj.t = std::move(tj);
    ni.pa = std::move(pa_i_new);
    ni.t = std::move(ti);
  }

  void remove_barren(const std::set<int>& keep) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].alive || keep.count(static_cast<int>(i))) continue;
        if (!children(static_cast<int>(i)).empty()) continue;
        if (has_value &&
            std::find(vpa.begin(), vpa.end(), static_cast<int>(i)) != vpa.end())
          continue;
        nodes[i].alive = false;
        changed = true;
      }
    }
  }

  /// Reverse arcs into e until it has no parents.
  void make_root(int e) {
    while (!nodes[static_cast<size_t>(e)].pa.empty()) {
      const auto pos = topo_positions();
      int best = -1;
      for (int p : nodes[static_cast<size_t>(e)].pa)
        if (best < 0 || pos[static_cast<size_t>(p)] > pos[static_cast<size_t>(best)])
          best = p;
      reverse(best, e);
    }
  }

  /// e must be a root. Slices every child table (and the cost table) at
  /// e = k and removes e. Returns the prior probability of the observation.
  double instantiate(int e, int k) {
    CNode& ne = nodes[static_cast<size_t>(e)];
    const double pe = ne.t[static_cast<size_t>(k)];
    for (int c : children(e)) slice_table(nodes[static_cast<size_t>(c)], e, k);
    if (has_value) slice_value(e, k);
    ne.alive = false;
    return pe;
  }

  /// Make x barren by reversing arcs to its children, then remove it.
  void sum_out(int x) {
    while (true) {
      auto ch = children(x);
      if (ch.empty()) break;
      const auto pos = topo_positions();
      int best = ch[0];
      for (int c : ch)
        if (pos[static_cast<size_t>(c)] < pos[static_cast<size_t>(best)]) best = c;
      reverse(x, best);
    }
    nodes[static_cast<size_t>(x)].alive = false;
  }

  /// x must have no chance children; folds it into the value node.
  void absorb_into_value(int x) {
    CNode& nx = nodes[static_cast<size_t>(x)];
    std::vector<int> U;
    for (int p : nx.pa) U.push_back(p);
    for (int p : vpa)
      if (p != x) U.push_back(p);
    std::sort(U.begin(), U.end());
    U.erase(std::unique(U.begin(), U.end()), U.end());

    std::vector<double> nc(rows_of(U));
    std::vector<int> coord(nodes.size(), 0);
    for (size_t ur = 0; ur < nc.size(); ++ur) {
      size_t rem = ur;
      for (size_t q = U.size(); q-- > 0;) {
        const int node = U[q];
        coord[static_cast<size_t>(node)] =
            static_cast<int>(rem % static_cast<size_t>(sizes[static_cast<size_t>(node)]));
        rem /= static_cast<size_t>(sizes[static_cast<size_t>(node)]);
      }
      const size_t rx = row_index_for(nx.pa, sizes, coord);
      double acc = 0.0;
      for (int k = 0; k < nx.n; ++k) {
        coord[static_cast<size_t>(x)] = k;
        const size_t rv = row_index_for(vpa, sizes, coord);
        acc += nx.t[rx * static_cast<size_t>(nx.n) + static_cast<size_t>(k)] * vcost[rv];
      }
      count_mul(nx.n);
      count_add(nx.n - 1);
      nc[ur] = acc;
      coord[static_cast<size_t>(x)] = 0;
    }
    vpa = std::move(U);
    vcost = std::move(nc);
    nx.alive = false;
  }

  /// Posterior P(target | evidence) by sequential transformations.
  std::vector<double> posterior(int target, std::vector<std::pair<int, int>> evidence) {
    std::set<int> keep{target};
    for (const auto& [e, k] : evidence) keep.insert(e);
    remove_barren(keep);
    for (const auto& [e, k] : evidence) {
      make_root(e);
      const double pe = instantiate(e, k);
      if (pe <= 1e-14)
        throw EngineError("evidence has zero probability in the mean channel");
      keep.erase(e);
      remove_barren(keep);
    }
    while (true) {
      const auto pos = topo_positions();
      int x = -1;
      for (size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].alive || static_cast<int>(i) == target) continue;
        if (x < 0 || pos[i] > pos[static_cast<size_t>(x)]) x = static_cast<int>(i);
      }
      if (x < 0) break;
      sum_out(x);
    }
    const CNode& nt = nodes[static_cast<size_t>(target)];
    std::vector<double> out(nt.t.begin(), nt.t.begin() + nt.n);
    double s = 0.0;
    for (double v : out) s += v;
    if (s > 0.0)
      for (double& v : out) v /= s;
    return out;
  }

  /// Expected cost of the value node given evidence (decisions already fixed).
  double expected_cost(std::vector<std::pair<int, int>> evidence) {
    if (!has_value) throw EngineError("diagram has no value node");
    std::set<int> keep;
    for (const auto& [e, k] : evidence) keep.insert(e);
    remove_barren(keep);
    for (const auto& [e, k] : evidence) {
      make_root(e);
      const double pe = instantiate(e, k);
      if (pe <= 1e-14)
        throw EngineError("evidence has zero probability in the mean channel");
      keep.erase(e);
      remove_barren(keep);
    }
    while (true) {
      const auto pos = topo_positions();
      int x = -1;
      for (size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].alive) continue;
        if (x < 0 || pos[i] > pos[static_cast<size_t>(x)]) x = static_cast<int>(i);
      }
      if (x < 0) break;
      const bool is_vpa = std::find(vpa.begin(), vpa.end(), x) != vpa.end();
      if (!is_vpa && children(x).empty())
        nodes[static_cast<size_t>(x)].alive = false;
      else
        absorb_into_value(x);
    }
    return vcost.empty() ? 0.0 : vcost[0];
  }

 private:
  void slice_table(CNode& c, int e, int k) {
    std::vector<int> new_pa;
    for (int p : c.pa)
      if (p != e) new_pa.push_back(p);
    std::vector<double> nt(rows_of(new_pa) * static_cast<size_t>(c.n));
    std::vector<int> coord(nodes.size(), 0);
    coord[static_cast<size_t>(e)] = k;
    const size_t nrows = rows_of(new_pa);
    for (size_t r = 0; r < nrows; ++r) {
      size_t rem = r;
      for (size_t q = new_pa.size(); q-- > 0;) {
        const int node = new_pa[q];
        coord[static_cast<size_t>(node)] =
            static_cast<int>(rem % static_cast<size_t>(sizes[static_cast<size_t>(node)]));
        rem /= static_cast<size_t>(sizes[static_cast<size_t>(node)]);
      }
      const size_t old_r = row_index_for(c.pa, sizes, coord);
      for (int o = 0; o < c.n; ++o)
        nt[r * static_cast<size_t>(c.n) + static_cast<size_t>(o)] =
            c.t[old_r * static_cast<size_t>(c.n) + static_cast<size_t>(o)];
    }
    c.pa = std::move(new_pa);
    c.t = std::move(nt);
  }

  void slice_value(int e, int k) {
    if (std::find(vpa.begin(), vpa.end(), e) == vpa.end()) return;
    std::vector<int> new_pa;
    for (int p : vpa)
      if (p != e) new_pa.push_back(p);
    std::vector<double> nc(rows_of(new_pa));
    std::vector<int> coord(nodes.size(), 0);
    coord[static_cast<size_t>(e)] = k;
    for (size_t r = 0; r < nc.size(); ++r) {
      size_t rem = r;
      for (size_t q = new_pa.size(); q-- > 0;) {
        const int node = new_pa[q];
        coord[static_cast<size_t>(node)] =
            static_cast<int>(rem % static_cast<size_t>(sizes[static_cast<size_t>(node)]));
        rem /= static_cast<size_t>(sizes[static_cast<size_t>(node)]);
      }
      nc[r] = vcost[row_index_for(vpa, sizes, coord)];
    }
    vpa = std::move(new_pa);
    vcost = std::move(nc);
  }
};

/// Builds the crisp evaluator from a diagram snapshot. Decision nodes are
/// instantiated (children sliced at the chosen alternative); only nodes in
/// `included` become live chance nodes.
inline CrispNet make_net(const InfluenceDiagram& d, const Tables& tb,
                         const std::map<int, int>& decision_choice, bool include_value,
                         const std::set<int>& included, OpCounter* ops) {
  CrispNet net;
  net.ops = ops;
  net.nodes.resize(d.size());
  net.sizes.resize(d.size(), 1);
  for (size_t i = 0; i < d.size(); ++i) {
    const auto& n = d.node(static_cast<int>(i));
    if (n.kind != NodeKind::Value) net.sizes[i] = static_cast<int>(n.space.size());
  }

  auto chance_parents = [&](int i, std::vector<int>& out_pa,
                            std::vector<int>& all_pa) {
    out_pa.clear();
    all_pa = d.parents_of(i);
    for (int p : all_pa) {
      const auto& pn = d.node(p);
      if (pn.kind == NodeKind::Chance)
        out_pa.push_back(p);
      else if (pn.kind == NodeKind::Decision && !decision_choice.count(p))
        throw EngineError("node " + d.node(i).name +
                          " depends on an uninstantiated decision node " + pn.name);
    }
  };

  for (int i : included) {
    const auto& n = d.node(i);
    if (n.kind != NodeKind::Chance) continue;
    CNode& cn = net.nodes[static_cast<size_t>(i)];
    cn.n = static_cast<int>(n.space.size());
    std::vector<int> all_pa;
    chance_parents(i, cn.pa, all_pa);
    cn.t.resize(net.rows_of(cn.pa) * static_cast<size_t>(cn.n));
    std::vector<int> coord(d.size(), 0);
    for (const auto& [dn, alt] : decision_choice) coord[static_cast<size_t>(dn)] = alt;
    const size_t nrows = net.rows_of(cn.pa);
    for (size_t r = 0; r < nrows; ++r) {
      size_t rem = r;
      for (size_t q = cn.pa.size(); q-- > 0;) {
        const int node = cn.pa[q];
        coord[static_cast<size_t>(node)] =
            static_cast<int>(rem % static_cast<size_t>(net.sizes[static_cast<size_t>(node)]));
        rem /= static_cast<size_t>(net.sizes[static_cast<size_t>(node)]);
      }
      // original row over all declared parents
      size_t old_r = 0;
      for (int p : all_pa)
        old_r = old_r * static_cast<size_t>(net.sizes[static_cast<size_t>(p)]) +
                static_cast<size_t>(coord[static_cast<size_t>(p)]);
      for (int o = 0; o < cn.n; ++o)
        cn.t[r * static_cast<size_t>(cn.n) + static_cast<size_t>(o)] =
            tb.prob[static_cast<size_t>(i)][old_r * static_cast<size_t>(cn.n) +
                                            static_cast<size_t>(o)];
    }
    cn.alive = true;
  }

  if (include_value) {
    auto vi = d.value_node();
    if (vi) {
      net.has_value = true;
      const auto& vn = d.node(*vi);
      std::vector<int> all_pa = d.parents_of(*vi);
      for (int p : all_pa) {
        const auto& pn = d.node(p);
        if (pn.kind == NodeKind::Chance)
          net.vpa.push_back(p);
        else if (pn.kind == NodeKind::Decision && !decision_choice.count(p))
          throw EngineError("value node depends on an uninstantiated decision node");
      }
      net.vcost.resize(net.rows_of(net.vpa));
      std::vector<int> coord(d.size(), 0);
      for (const auto& [dn, alt] : decision_choice) coord[static_cast<size_t>(dn)] = alt;
      for (size_t r = 0; r < net.vcost.size(); ++r) {
        size_t rem = r;
        for (size_t q = net.vpa.size(); q-- > 0;) {
          const int node = net.vpa[q];
          coord[static_cast<size_t>(node)] = static_cast<int>(
              rem % static_cast<size_t>(net.sizes[static_cast<size_t>(node)]));
          rem /= static_cast<size_t>(net.sizes[static_cast<size_t>(node)]);
        }
        size_t old_r = 0;
        for (int p : all_pa)
          old_r = old_r * static_cast<size_t>(net.sizes[static_cast<size_t>(p)]) +
                  static_cast<size_t>(coord[static_cast<size_t>(p)]);
        net.vcost[r] = tb.cost[old_r];
      }
      (void)vn;
    }
  }
  return net;
}

/// Chance-node ancestors closure of the given seed nodes.
inline std::set<int> ancestors_closure(const InfluenceDiagram& d, std::vector<int> seeds) {
  std::set<int> out;
  while (!seeds.empty()) {
    int u = seeds.back();
    seeds.pop_back();
    if (!out.insert(u).second) continue;
    for (int p : d.parents_of(u)) seeds.push_back(p);
  }
  return out;
}

/// Independent reference evaluator: direct joint enumeration over all outcome
/// configurations of the included chance nodes, using only means.
struct JointEnumerator {
  const InfluenceDiagram& d;
  const Tables& tb;
  std::vector<int> chance;  // enumerated nodes, topological-ish (diagram order)
  std::map<int, int> fixed; // decision choices (and anything pinned)

  JointEnumerator(const InfluenceDiagram& dia, const Tables& t, const std::set<int>& inc,
                  std::map<int, int> decision_choice)
      : d(dia), tb(t), fixed(std::move(decision_choice)) {
    for (size_t i = 0; i < d.size(); ++i)
      if (d.node(static_cast<int>(i)).kind == NodeKind::Chance &&
          inc.count(static_cast<int>(i)))
        chance.push_back(static_cast<int>(i));
  }

  template <typename Fn>
  void for_each_config(Fn&& fn) const {
    std::vector<int> coord(d.size(), 0);
    for (const auto& [n, k] : fixed) coord[static_cast<size_t>(n)] = k;
    std::vector<int> c(chance.size(), 0);
    while (true) {
      for (size_t i = 0; i < chance.size(); ++i)
        coord[static_cast<size_t>(chance[i])] = c[i];
      double w = 1.0;
      for (int n : chance) {
        const auto& node = d.node(n);
        const size_t k = node.space.size();
        size_t row = 0;
        for (int p : d.parents_of(n))
          row = row * d.node(p).space.size() +
                static_cast<size_t>(coord[static_cast<size_t>(p)]);
        w *= tb.prob[static_cast<size_t>(n)]
                    [row * k + static_cast<size_t>(coord[static_cast<size_t>(n)])];
      }
      fn(coord, w);
      size_t i = chance.size();
      while (i > 0) {
        --i;
        if (++c[i] < static_cast<int>(d.node(chance[i]).space.size())) break;
        c[i] = 0;
        if (i == 0) return;
      }
      if (chance.empty()) return;
    }
  }
};

inline std::vector<double> enum_posterior(const InfluenceDiagram& d, const Tables& tb,
                                          int target,
                                          const std::vector<std::pair<int, int>>& evidence,
                                          const std::set<int>& included) {
  JointEnumerator je(d, tb, included, {});
  const size_t k = d.node(target).space.size();
  std::vector<double> num(k, 0.0);
  double den = 0.0;
  je.for_each_config([&](const std::vector<int>& coord, double w) {
    for (const auto& [e, o] : evidence)
      if (coord[static_cast<size_t>(e)] != o) return;
    den += w;
    num[static_cast<size_t>(coord[static_cast<size_t>(target)])] += w;
  });
  if (den <= 1e-14) throw EngineError("evidence has zero probability in the mean channel");
  for (double& v : num) v /= den;
  return num;
}

inline double enum_expected_cost(const InfluenceDiagram& d, const Tables& tb,
                                 const std::vector<std::pair<int, int>>& evidence,
                                 const std::map<int, int>& decision_choice) {
  auto vi = d.value_node();
  if (!vi) throw EngineError("diagram has no value node");
  std::set<int> included;
  for (size_t i = 0; i < d.size(); ++i)
    if (d.node(static_cast<int>(i)).kind == NodeKind::Chance)
      included.insert(static_cast<int>(i));
  JointEnumerator je(d, tb, included, decision_choice);
  double num = 0.0, den = 0.0;
  const auto vpa = d.parents_of(*vi);
  je.for_each_config([&](const std::vector<int>& coord, double w) {
    for (const auto& [e, o] : evidence)
      if (coord[static_cast<size_t>(e)] != o) return;
    size_t row = 0;
    for (int p : vpa)
      row = row * d.node(p).space.size() + static_cast<size_t>(coord[static_cast<size_t>(p)]);
    den += w;
    num += w * tb.cost[row];
  });
  if (den <= 1e-14) throw EngineError("evidence has zero probability in the mean channel");
  return num / den;
}

}  // namespace detail
}  // namespace fid

#endif  // FID_DETAIL_CRISP_NET_HPP
