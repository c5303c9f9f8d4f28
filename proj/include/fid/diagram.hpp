#ifndef FID_DIAGRAM_HPP
#define FID_DIAGRAM_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fid/tables.hpp"

namespace fid {

enum class NodeKind { Chance, Decision, Value };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Chance: return "chance";
    case NodeKind::Decision: return "decision";
    case NodeKind::Value: return "value";
  }
  return "?";
}

struct DiagramNode {
  std::string name;
  NodeKind kind = NodeKind::Chance;
  OutcomeSpace space;                 // empty for value nodes
  std::vector<std::string> parents;   // declared order; defines the arcs
  std::optional<ConditionalTable> table;  // chance nodes only
  std::vector<FuzzyValue> costs;      // value node only; one per parent config

  bool operator==(const DiagramNode& o) const {
    if (name != o.name || kind != o.kind || space != o.space || parents != o.parents)
      return false;
    if (table.has_value() != o.table.has_value()) return false;
    if (table) {
      if (table->child() != o.table->child() || table->parents() != o.table->parents())
        return false;
      for (size_t r = 0; r < table->row_count(); ++r)
        for (size_t i = 0; i < table->child().size(); ++i)
          if (!table->row(r).at(i).almost_equal(o.table->row(r).at(i), 1e-12)) return false;
    }
    if (costs.size() != o.costs.size()) return false;
    for (size_t i = 0; i < costs.size(); ++i)
      if (!costs[i].almost_equal(o.costs[i], 1e-12)) return false;
    return true;
  }
};

/// DAG of chance, decision and value nodes with attached tables and a cost
/// function. Immutable after build; transformations produce new diagrams.
struct DiagramBuildResult;

class InfluenceDiagram {
 public:
  using BuildResult = DiagramBuildResult;

  /// Validates and assembles a diagram; defined after DiagramBuildResult.
  static DiagramBuildResult build(std::vector<DiagramNode> nodes);

  size_t size() const { return nodes_.size(); }
  const std::vector<DiagramNode>& nodes() const { return nodes_; }
  const DiagramNode& node(int i) const { return nodes_.at(static_cast<size_t>(i)); }
  const DiagramNode& node(std::string_view name) const { return node(index(name)); }

  int index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end())
      throw std::invalid_argument("unknown node: " + std::string(name));
    return it->second;
  }
  bool has_node(std::string_view name) const { return index_.count(std::string(name)) > 0; }

  std::vector<int> parents_of(int i) const {
    std::vector<int> out;
    for (const auto& p : nodes_[static_cast<size_t>(i)].parents) out.push_back(index_.at(p));
    return out;
  }

  std::vector<int> children(int i) const {
    std::vector<int> out;
    for (size_t j = 0; j < nodes_.size(); ++j)
      for (const auto& p : nodes_[j].parents)
        if (index_.at(p) == i) {
          out.push_back(static_cast<int>(j));
          break;
        }
    return out;
  }

  bool has_arc(int i, int j) const {
    for (const auto& p : nodes_[static_cast<size_t>(j)].parents)
      if (index_.at(p) == i) return true;
    return false;
  }

  std::optional<int> value_node() const {
    for (size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == NodeKind::Value) return static_cast<int>(i);
    return std::nullopt;
  }

  std::vector<int> decision_nodes() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == NodeKind::Decision) out.push_back(static_cast<int>(i));
    return out;
  }

  /// Directed path i -> ... -> j; optionally ignoring the direct arc i->j.
  bool path_exists(int i, int j, bool skip_direct_arc = false) const {
    std::vector<int> stack{i};
    std::set<int> seen;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int c : children(u)) {
        if (u == i && c == j && skip_direct_arc) continue;
        if (c == j) return true;
        if (seen.insert(c).second) stack.push_back(c);
      }
    }
    return false;
  }

  struct Reversibility {
    bool ok = false;
    std::string reason;
  };

  /// An arc is reversible iff both endpoints are chance nodes and the arc is
  /// the only directed path between them. Arcs to and from decision nodes are
  /// informational/causal and cannot be reversed.
  Reversibility reversible(std::string_view from, std::string_view to) const {
    int i = index(from), j = index(to);
    if (!has_arc(i, j)) return {false, "no such arc"};
    if (node(i).kind != NodeKind::Chance)
      return {false, std::string(from) + " is not a chance node"};
    if (node(j).kind != NodeKind::Chance)
      return {false, std::string(to) + " is not a chance node"};
    if (path_exists(i, j, /*skip_direct_arc=*/true))
      return {false, "another directed path exists; reversal would create a cycle"};
    return {true, ""};
  }

  std::vector<int> topo_order() const {
    std::vector<int> order;
    std::vector<int> indeg(nodes_.size(), 0);
    for (size_t j = 0; j < nodes_.size(); ++j)
      indeg[j] = static_cast<int>(nodes_[j].parents.size());
    std::vector<int> ready;
    for (size_t j = 0; j < nodes_.size(); ++j)
      if (indeg[j] == 0) ready.push_back(static_cast<int>(j));
    while (!ready.empty()) {
      int u = ready.front();
      ready.erase(ready.begin());
      order.push_back(u);
      for (int c : children(u))
        if (--indeg[static_cast<size_t>(c)] == 0) ready.push_back(c);
    }
    return order;
  }

  bool operator==(const InfluenceDiagram& o) const { return nodes_ == o.nodes_; }

 private:
  InfluenceDiagram() = default;

  bool has_cycle() const { return topo_order().size() != nodes_.size(); }

  std::vector<DiagramNode> nodes_;
  std::map<std::string, int> index_;
};


/// Result of InfluenceDiagram::build: either a diagram or the validation
/// errors that prevented assembly.
struct DiagramBuildResult {
  std::optional<InfluenceDiagram> diagram;
  ValidationReport errors;
  bool ok() const { return errors.empty() && diagram.has_value(); }
};

inline DiagramBuildResult InfluenceDiagram::build(std::vector<DiagramNode> nodes) {
    ValidationReport errors;
    std::map<std::string, int> index;
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (index.count(nodes[i].name))
        errors.push_back("duplicate node name: " + nodes[i].name);
      index[nodes[i].name] = static_cast<int>(i);
    }
    int value_count = 0;
    for (const auto& n : nodes) {
      for (const auto& p : n.parents)
        if (!index.count(p))
          errors.push_back(n.name + ": unknown parent '" + p + "'");
      if (n.kind == NodeKind::Value) value_count++;
    }
    if (value_count > 1) errors.push_back("more than one value node");
    if (!errors.empty()) return {std::nullopt, errors};

    InfluenceDiagram d;
    d.nodes_ = std::move(nodes);
    d.index_ = std::move(index);

    if (d.has_cycle()) errors.push_back("graph is cyclic");

    for (const auto& n : d.nodes_) {
      switch (n.kind) {
        case NodeKind::Chance: {
          if (n.space.size() < 2)
            errors.push_back(n.name + ": chance node needs >= 2 outcomes");
          if (!n.table) {
            errors.push_back(n.name + ": chance node has no table");
            break;
          }
          if (n.table->child() != n.space)
            errors.push_back(n.name + ": table child space mismatch");
          std::vector<std::string> tp;
          for (const auto& s : n.table->parents()) tp.push_back(s.node);
          if (tp != n.parents)
            errors.push_back(n.name + ": table parents do not equal graph parents");
          else
            for (size_t i = 0; i < n.parents.size(); ++i) {
              const auto& pn = d.nodes_[static_cast<size_t>(d.index_.at(n.parents[i]))];
              if (n.table->parents()[i] != pn.space)
                errors.push_back(n.name + ": parent space mismatch for " + n.parents[i]);
            }
          auto sub = n.table->validate();
          errors.insert(errors.end(), sub.begin(), sub.end());
          break;
        }
        case NodeKind::Decision:
          if (n.space.size() < 2)
            errors.push_back(n.name + ": decision node needs >= 2 alternatives");
          if (n.table) errors.push_back(n.name + ": decision node cannot have a table");
          if (!n.costs.empty()) errors.push_back(n.name + ": decision node cannot have costs");
          for (const auto& p : n.parents) {
            const auto& pn = d.nodes_[static_cast<size_t>(d.index_.at(p))];
            if (pn.kind == NodeKind::Value)
              errors.push_back(n.name + ": value node cannot be a parent");
          }
          break;
        case NodeKind::Value: {
          if (!d.children(d.index_.at(n.name)).empty())
            errors.push_back(n.name + ": value node has children");
          size_t want = 1;
          for (const auto& p : n.parents) {
            const auto& pn = d.nodes_[static_cast<size_t>(d.index_.at(p))];
            if (pn.kind == NodeKind::Value)
              errors.push_back(n.name + ": value node cannot be a parent");
            else
              want *= pn.space.size();
          }
          if (n.costs.size() != want)
            errors.push_back(n.name + ": cost count " + std::to_string(n.costs.size()) +
                             " != parent config count " + std::to_string(want));
          break;
        }
      }
    }
    if (!errors.empty()) return {std::nullopt, errors};
    return {std::move(d), {}};
  }

}  // namespace fid

#endif  // FID_DIAGRAM_HPP
