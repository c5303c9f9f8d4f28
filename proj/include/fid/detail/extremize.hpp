#ifndef FID_DETAIL_EXTREMIZE_HPP
#define FID_DETAIL_EXTREMIZE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "fid/detail/crisp_net.hpp"
#include "fid/diagram.hpp"

namespace fid {

/// Knobs for spread computation and boundary-membership search.
struct EvalOptions {
  bool compute_spreads = true;       ///< compute support endpoints, not just means
  bool boundary_membership = true;   ///< bisect for membership jumps at endpoints
  int coord_points = 33;             ///< sweep resolution of coordinate descent
  int descent_passes = 12;           ///< max coordinate-descent passes
  size_t max_vertex_product = 200000;///< exhaustive vertex cap before falling back
  int bisect_iters = 30;             ///< bisection steps for boundary membership
};

namespace detail {

/// One fuzzy probability row treated as a jointly-constrained parameter:
/// values live in the clipped alpha-cut box intersected with the simplex.
struct ProbRowParam {
  int node = 0;
  size_t row = 0;
  std::vector<FuzzyProbability> fp;
};

struct CostCellParam {
  size_t index = 0;  // flat index into the value node's cost vector
  FuzzyValue fv;
};

/// A concrete crisp setting of every fuzzy parameter.
struct Assignment {
  std::vector<std::vector<double>> rows;  // aligned with ParamSpace::rows
  std::vector<double> costs;              // aligned with ParamSpace::costs
};

/// The set of independently perturbable fuzzy quantities of a query.
struct ParamSpace {
  std::vector<ProbRowParam> rows;
  std::vector<CostCellParam> costs;

  bool empty() const { return rows.empty() && costs.empty(); }

  /// Collects fuzzy rows of the given chance nodes (crisp rows are skipped)
  /// and, optionally, the fuzzy cost cells of the value node.
  static ParamSpace from(const InfluenceDiagram& d, const std::set<int>& chance_nodes,
                         bool include_costs) {
    ParamSpace ps;
    for (int i : chance_nodes) {
      const auto& n = d.node(i);
      if (n.kind != NodeKind::Chance) continue;
      const auto& tab = *n.table;
      for (size_t r = 0; r < tab.row_count(); ++r) {
        const auto& dist = tab.row(r);
        bool crisp = true;
        for (size_t o = 0; o < dist.size(); ++o)
          if (dist.at(o).kind() != FuzzyKind::Crisp) crisp = false;
        if (crisp) continue;
        ProbRowParam p;
        p.node = i;
        p.row = r;
        for (size_t o = 0; o < dist.size(); ++o) p.fp.push_back(dist.at(o));
        ps.rows.push_back(std::move(p));
      }
    }
    if (include_costs) {
      if (auto vi = d.value_node()) {
        const auto& vn = d.node(*vi);
        for (size_t c = 0; c < vn.costs.size(); ++c)
          if (!vn.costs[c].is_crisp())
            ps.costs.push_back({c, vn.costs[c]});
      }
    }
    return ps;
  }

  Assignment means() const {
    Assignment a;
    a.rows.reserve(rows.size());
    for (const auto& r : rows) {
      std::vector<double> v;
      v.reserve(r.fp.size());
      for (const auto& f : r.fp) v.push_back(f.mean());
      a.rows.push_back(std::move(v));
    }
    for (const auto& c : costs) a.costs.push_back(c.fv.mean());
    return a;
  }

  /// Overrides parameter cells of a mean-channel snapshot in place.
  void apply_to(Tables& tb, const Assignment& a) const {
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& rp = rows[i];
      const size_t k = rp.fp.size();
      for (size_t o = 0; o < k; ++o)
        tb.prob[static_cast<size_t>(rp.node)][rp.row * k + o] = a.rows[i][o];
    }
    for (size_t i = 0; i < costs.size(); ++i) tb.cost[costs[i].index] = a.costs[i];
  }

  Tables materialize(const InfluenceDiagram& d, const Assignment& a) const {
    Tables tb = Tables::from(d);
    apply_to(tb, a);
    return tb;
  }
};

inline Interval clipped_cut(const FuzzyProbability& p, double alpha) {
  return alpha <= 0.0 ? p.support() : p.alpha_cut(alpha);
}

inline Interval clipped_cut(const FuzzyValue& v, double alpha) {
  return alpha <= 0.0 ? v.support() : v.alpha_cut(alpha);
}

/// Feasible [lo,hi] per entry at level alpha: the clipped alpha-cut box
/// tightened by the sum-to-one constraint against the other entries.
inline void row_box(const ProbRowParam& r, double alpha, std::vector<double>& lo,
                    std::vector<double>& hi) {
  const size_t k = r.fp.size();
  lo.resize(k);
  hi.resize(k);
  double sum_lo = 0.0, sum_hi = 0.0;
  for (size_t o = 0; o < k; ++o) {
    const Interval c = clipped_cut(r.fp[o], alpha);
    lo[o] = c.lo;
    hi[o] = c.hi;
    sum_lo += c.lo;
    sum_hi += c.hi;
  }
  for (size_t o = 0; o < k; ++o) {
    lo[o] = std::max(lo[o], 1.0 - (sum_hi - hi[o]));
    hi[o] = std::min(hi[o], 1.0 - (sum_lo - lo[o]));
    if (lo[o] > hi[o]) {  // numerically infeasible cut; collapse to the mean
      lo[o] = hi[o] = r.fp[o].mean();
    }
  }
}

/// Candidate vertices of {alpha-cut box} ∩ {sum = 1}: for each absorber entry
/// the remaining entries take box corners and the absorber picks up the slack.
inline std::vector<std::vector<double>> row_candidates(const ProbRowParam& r,
                                                       double alpha) {
  const size_t k = r.fp.size();
  std::vector<double> lo, hi;
  row_box(r, alpha, lo, hi);

  std::vector<std::vector<double>> out;
  std::vector<double> mean(k);
  for (size_t o = 0; o < k; ++o) mean[o] = r.fp[o].mean();
  out.push_back(mean);

  std::vector<double> v(k);
  for (size_t a = 0; a < k; ++a) {
    const size_t free_count = k - 1;
    const size_t masks = static_cast<size_t>(1) << free_count;
    for (size_t m = 0; m < masks; ++m) {
      double s = 0.0;
      size_t bit = 0;
      for (size_t o = 0; o < k; ++o) {
        if (o == a) continue;
        v[o] = ((m >> bit) & 1) ? hi[o] : lo[o];
        s += v[o];
        ++bit;
      }
      const double va = 1.0 - s;
      if (va < lo[a] - 1e-12 || va > hi[a] + 1e-12) continue;
      v[a] = std::clamp(va, lo[a], hi[a]);
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](const std::vector<double>& x, const std::vector<double>& y) {
                          for (size_t i = 0; i < x.size(); ++i)
                            if (std::fabs(x[i] - y[i]) > 1e-12) return false;
                          return true;
                        }),
            out.end());
  return out;
}

/// Extremizes a crisp functional of the assignment over the joint feasible
/// set at membership level alpha: exhaustive vertex enumeration when the
/// product of per-parameter candidate counts is small, then (always) a
/// pairwise coordinate-descent polish that can reach non-vertex optima.
class Extremizer {
 public:
  using EvalFn = std::function<double(const Assignment&)>;

  Extremizer(const ParamSpace& space, const EvalOptions& opts)
      : space_(space), opts_(opts) {}

  double run(double alpha, bool maximize, const EvalFn& f) const {
    Assignment best = space_.means();
    double best_v = f(best);
    const double sgn = maximize ? 1.0 : -1.0;

    // Vertex enumeration.
    std::vector<std::vector<std::vector<double>>> row_cands;
    row_cands.reserve(space_.rows.size());
    size_t product = 1;
    bool overflow = false;
    for (const auto& r : space_.rows) {
      row_cands.push_back(row_candidates(r, alpha));
      product *= row_cands.back().size();
      if (product > opts_.max_vertex_product) overflow = true;
    }
    std::vector<std::vector<double>> cost_cands;
    for (const auto& c : space_.costs) {
      const Interval cut = clipped_cut(c.fv, alpha);
      std::vector<double> cc{cut.lo, c.fv.mean(), cut.hi};
      std::sort(cc.begin(), cc.end());
      cc.erase(std::unique(cc.begin(), cc.end()), cc.end());
      cost_cands.push_back(cc);
      product *= cost_cands.back().size();
      if (product > opts_.max_vertex_product) overflow = true;
    }
    if (!overflow) {
      Assignment a = best;
      std::vector<size_t> idx(row_cands.size() + cost_cands.size(), 0);
      while (true) {
        for (size_t i = 0; i < row_cands.size(); ++i) a.rows[i] = row_cands[i][idx[i]];
        for (size_t i = 0; i < cost_cands.size(); ++i)
          a.costs[i] = cost_cands[i][idx[row_cands.size() + i]];
        const double v = f(a);
        if (sgn * v > sgn * best_v) {
          best_v = v;
          best = a;
        }
        size_t i = idx.size();
        bool done = idx.empty();
        while (i > 0) {
          --i;
          const size_t n = i < row_cands.size() ? row_cands[i].size()
                                                : cost_cands[i - row_cands.size()].size();
          if (++idx[i] < n) break;
          idx[i] = 0;
          if (i == 0) done = true;
        }
        if (done) break;
      }
    }

    // Coordinate-descent polish (handles interior optima of ratio objectives).
    for (int pass = 0; pass < opts_.descent_passes; ++pass) {
      bool improved = false;
      for (size_t ri = 0; ri < space_.rows.size(); ++ri) {
        std::vector<double> lo, hi;
        row_box(space_.rows[ri], alpha, lo, hi);
        const size_t k = lo.size();
        for (size_t ia = 0; ia < k; ++ia) {
          for (size_t ib = ia + 1; ib < k; ++ib) {
            const double total = best.rows[ri][ia] + best.rows[ri][ib];
            const double a_lo = std::max(lo[ia], total - hi[ib]);
            const double a_hi = std::min(hi[ia], total - lo[ib]);
            if (a_hi - a_lo < 1e-14) continue;
            Assignment trial = best;
            for (int s = 0; s < opts_.coord_points; ++s) {
              const double va =
                  a_lo + (a_hi - a_lo) * s / (opts_.coord_points - 1);
              trial.rows[ri][ia] = va;
              trial.rows[ri][ib] = total - va;
              const double v = f(trial);
              if (sgn * v > sgn * best_v + 1e-14) {
                best_v = v;
                best = trial;
                improved = true;
              }
            }
          }
        }
      }
      for (size_t ci = 0; ci < space_.costs.size(); ++ci) {
        const Interval cut = clipped_cut(space_.costs[ci].fv, alpha);
        if (cut.hi - cut.lo < 1e-14) continue;
        Assignment trial = best;
        for (int s = 0; s < opts_.coord_points; ++s) {
          const double vc = cut.lo + (cut.hi - cut.lo) * s / (opts_.coord_points - 1);
          trial.costs[ci] = vc;
          const double v = f(trial);
          if (sgn * v > sgn * best_v + 1e-14) {
            best_v = v;
            best = trial;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    return best_v;
  }

  /// Membership at a support endpoint: largest alpha whose cut still attains
  /// the endpoint value x0 (non-zero when clipping flattens the extremum).
  double boundary_membership(bool lower, double x0, double mean, const EvalFn& f) const {
    const double scale = std::max({std::fabs(x0), std::fabs(mean), 1.0});
    const double tol = 1e-6 * scale;
    if (std::fabs(mean - x0) <= tol) return 0.0;  // degenerate side
    auto extremum = [&](double a) { return run(a, !lower, f); };
    double lo = 0.0, hi = 1.0;
    if (std::fabs(extremum(1.0 - 1e-9) - x0) <= tol) return 1.0;
    for (int it = 0; it < opts_.bisect_iters; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (std::fabs(extremum(mid) - x0) <= tol)
        lo = mid;
      else
        hi = mid;
    }
    return lo < 1e-3 ? 0.0 : lo;
  }

 private:
  const ParamSpace& space_;
  const EvalOptions& opts_;
};

}  // namespace detail
}  // namespace fid

#endif  // FID_DETAIL_EXTREMIZE_HPP
