#ifndef FID_TABLES_HPP
#define FID_TABLES_HPP

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fid/fuzzy.hpp"

namespace fid {

/// Ordered outcome labels of a node (the universes X = {x_1..x_n}).
struct OutcomeSpace {
  std::string node;
  std::vector<std::string> outcomes;

  size_t size() const { return outcomes.size(); }

  int index_of(std::string_view label) const {
    for (size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i] == label) return static_cast<int>(i);
    return -1;
  }

  bool operator==(const OutcomeSpace&) const = default;
};

/// A list of invariant violations; empty means valid.
using ValidationReport = std::vector<std::string>;

/// One fuzzy probability per outcome of a single space, meant to sum to the
/// crisp number 1 in the mean channel.
class FuzzyDistribution {
 public:
  FuzzyDistribution() = default;
  FuzzyDistribution(OutcomeSpace space, std::vector<FuzzyProbability> probs)
      : space_(std::move(space)), p_(std::move(probs)) {
    if (p_.size() != space_.size())
      throw std::invalid_argument("FuzzyDistribution: entry count != outcome count");
  }

  const OutcomeSpace& space() const { return space_; }
  size_t size() const { return p_.size(); }
  const std::vector<FuzzyProbability>& entries() const { return p_; }
  const FuzzyProbability& at(size_t i) const { return p_.at(i); }
  const FuzzyProbability& at(std::string_view label) const {
    int i = space_.index_of(label);
    if (i < 0) throw std::invalid_argument("unknown outcome: " + std::string(label));
    return p_[static_cast<size_t>(i)];
  }

  ValidationReport validate(const std::string& where = "") const {
    ValidationReport r;
    const std::string ctx = where.empty() ? space_.node : where;
    if (space_.size() < 2) r.push_back(ctx + ": outcome space needs >= 2 labels");
    double sum = 0.0, lo_sum = 0.0, hi_sum = 0.0;
    for (const auto& f : p_) {
      sum += f.mean();
      lo_sum += f.support().lo;
      hi_sum += f.support().hi;
    }
    if (std::abs(sum - 1.0) > kTol)
      r.push_back(ctx + ": means sum to " + detail::format_number(sum) + ", expected 1");
    if (lo_sum > 1.0 + kTol)
      r.push_back(ctx + ": lower support endpoints sum to " +
                  detail::format_number(lo_sum) + " > 1 (spread infeasible)");
    if (hi_sum < 1.0 - kTol)
      r.push_back(ctx + ": upper support endpoints sum to " +
                  detail::format_number(hi_sum) + " < 1 (spread infeasible)");
    if (p_.size() == 2 && !p_[1].almost_equal(p_[0].complement(), 1e-6))
      r.push_back(ctx + ": binary entries are not complement-paired");
    return r;
  }

 private:
  OutcomeSpace space_;
  std::vector<FuzzyProbability> p_;
};

namespace detail {

inline size_t config_count(const std::vector<OutcomeSpace>& spaces) {
  size_t n = 1;
  for (const auto& s : spaces) n *= s.size();
  return n;
}

/// Mixed-radix index; first space is most significant.
inline size_t config_index(const std::vector<OutcomeSpace>& spaces,
                           const std::vector<int>& outcome) {
  size_t idx = 0;
  for (size_t i = 0; i < spaces.size(); ++i)
    idx = idx * spaces[i].size() + static_cast<size_t>(outcome[i]);
  return idx;
}

inline std::vector<int> config_unindex(const std::vector<OutcomeSpace>& spaces,
                                       size_t idx) {
  std::vector<int> out(spaces.size());
  for (size_t i = spaces.size(); i-- > 0;) {
    out[i] = static_cast<int>(idx % spaces[i].size());
    idx /= spaces[i].size();
  }
  return out;
}

inline std::string config_label(const std::vector<OutcomeSpace>& spaces,
                                const std::vector<int>& outcome) {
  std::string s;
  for (size_t i = 0; i < spaces.size(); ++i) {
    if (i) s += ",";
    s += spaces[i].outcomes[static_cast<size_t>(outcome[i])];
  }
  return s;
}

}  // namespace detail

/// Event-indexed table of FP(child | parents): one FuzzyDistribution per joint
/// parent configuration. A table with no parents is a marginal with one row.
class ConditionalTable {
 public:
  ConditionalTable() = default;
  ConditionalTable(OutcomeSpace child, std::vector<OutcomeSpace> parents,
                   std::vector<FuzzyDistribution> rows)
      : child_(std::move(child)), parents_(std::move(parents)), rows_(std::move(rows)) {
    if (rows_.size() != detail::config_count(parents_))
      throw std::invalid_argument("ConditionalTable: row count != parent config count");
  }

  static ConditionalTable marginal(FuzzyDistribution d) {
    auto space = d.space();
    return ConditionalTable(std::move(space), {}, {std::move(d)});
  }

  const OutcomeSpace& child() const { return child_; }
  const std::vector<OutcomeSpace>& parents() const { return parents_; }
  const std::vector<FuzzyDistribution>& rows() const { return rows_; }
  size_t row_count() const { return rows_.size(); }

  const FuzzyDistribution& row(size_t config) const { return rows_.at(config); }

  const FuzzyDistribution& row(const std::vector<int>& parent_outcomes) const {
    return rows_.at(detail::config_index(parents_, parent_outcomes));
  }

  ValidationReport validate() const {
    ValidationReport r;
    for (size_t c = 0; c < rows_.size(); ++c) {
      if (rows_[c].space() != child_) {
        r.push_back(child_.node + ": row space mismatch at config " + std::to_string(c));
        continue;
      }
      auto sub = rows_[c].validate(
          child_.node + (parents_.empty()
                             ? ""
                             : " | " + detail::config_label(
                                           parents_, detail::config_unindex(parents_, c))));
      r.insert(r.end(), sub.begin(), sub.end());
    }
    return r;
  }

 private:
  OutcomeSpace child_;
  std::vector<OutcomeSpace> parents_;
  std::vector<FuzzyDistribution> rows_;
};

/// Joint fuzzy probability over a list of spaces; one cell per configuration.
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<OutcomeSpace> spaces, std::vector<FuzzyProbability> cells)
      : spaces_(std::move(spaces)), cells_(std::move(cells)) {
    if (cells_.size() != detail::config_count(spaces_))
      throw std::invalid_argument("JointTable: cell count != config count");
  }

  const std::vector<OutcomeSpace>& spaces() const { return spaces_; }
  const std::vector<FuzzyProbability>& cells() const { return cells_; }
  const FuzzyProbability& cell(const std::vector<int>& outcome) const {
    return cells_.at(detail::config_index(spaces_, outcome));
  }

  double mean_total() const {
    double s = 0.0;
    for (const auto& c : cells_) s += c.mean();
    return s;
  }

  ValidationReport validate() const {
    ValidationReport r;
    double sum = 0.0, lo_sum = 0.0, hi_sum = 0.0;
    for (const auto& c : cells_) {
      sum += c.mean();
      lo_sum += c.support().lo;
      hi_sum += c.support().hi;
    }
    if (std::abs(sum - 1.0) > kTol)
      r.push_back("joint: cell means sum to " + detail::format_number(sum) +
                  ", expected 1");
    if (lo_sum > 1.0 + kTol) r.push_back("joint: lower support endpoints sum > 1");
    if (hi_sum < 1.0 - kTol) r.push_back("joint: upper support endpoints sum < 1");
    return r;
  }

 private:
  std::vector<OutcomeSpace> spaces_;
  std::vector<FuzzyProbability> cells_;
};

/// v_ij = w_ij (x) u_j: joint over [child, parent] from a single-parent
/// conditional and the matching marginal.
inline JointTable product(const ConditionalTable& conditional,
                          const FuzzyDistribution& marginal) {
  if (conditional.parents().size() != 1 ||
      conditional.parents()[0] != marginal.space())
    throw std::invalid_argument("product: marginal space does not match parent space");
  const size_t n = conditional.child().size();
  const size_t m = marginal.space().size();
  std::vector<FuzzyProbability> cells(n * m);
  for (size_t j = 0; j < m; ++j)
    for (size_t i = 0; i < n; ++i)
      cells[i * m + j] = fuzzy_mul(conditional.row(j).at(i), marginal.at(j));
  return JointTable({conditional.child(), marginal.space()}, std::move(cells));
}

/// Joint over [child, parents...] from a multi-parent conditional and a joint
/// table over exactly the parent spaces.
inline JointTable product(const ConditionalTable& conditional, const JointTable& parent_joint) {
  if (conditional.parents() != parent_joint.spaces())
    throw std::invalid_argument("product: joint spaces do not match parent spaces");
  std::vector<OutcomeSpace> spaces;
  spaces.push_back(conditional.child());
  for (const auto& s : conditional.parents()) spaces.push_back(s);
  const size_t n = conditional.child().size();
  const size_t m = parent_joint.cells().size();
  std::vector<FuzzyProbability> cells(n * m);
  for (size_t j = 0; j < m; ++j)
    for (size_t i = 0; i < n; ++i)
      cells[i * m + j] = fuzzy_mul(conditional.row(j).at(i), parent_joint.cells()[j]);
  return JointTable(std::move(spaces), std::move(cells));
}

/// Joint of two independent marginals (no arc between them).
inline JointTable independent_joint(const FuzzyDistribution& a, const FuzzyDistribution& b) {
  const size_t n = a.space().size(), m = b.space().size();
  std::vector<FuzzyProbability> cells(n * m);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) cells[i * m + j] = fuzzy_mul(a.at(i), b.at(j));
  return JointTable({a.space(), b.space()}, std::move(cells));
}

/// The row for a parent configuration, by value.
inline FuzzyDistribution condition_slice(const ConditionalTable& table,
                                         const std::vector<std::string>& parent_outcomes) {
  if (parent_outcomes.size() != table.parents().size())
    throw std::invalid_argument("condition_slice: configuration arity mismatch");
  std::vector<int> idx(parent_outcomes.size());
  for (size_t i = 0; i < parent_outcomes.size(); ++i) {
    int k = table.parents()[i].index_of(parent_outcomes[i]);
    if (k < 0)
      throw std::invalid_argument("condition_slice: unknown outcome '" +
                                  parent_outcomes[i] + "' for " + table.parents()[i].node);
    idx[i] = k;
  }
  return table.row(idx);
}

}  // namespace fid

#endif  // FID_TABLES_HPP
