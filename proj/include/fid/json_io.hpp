#ifndef FID_JSON_IO_HPP
#define FID_JSON_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fid/diagram.hpp"
#include "fid/engine.hpp"
#include "fid/oracle.hpp"
#include "fid/sensitivity.hpp"
#include "json.hpp"

namespace fid {

/// File/format-level failure; carries the full error list for reporting.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(ValidationReport errs)
      : std::runtime_error(join(errs)), errors(std::move(errs)) {}
  ValidationReport errors;

 private:
  static std::string join(const ValidationReport& errs) {
    std::string out;
    for (const auto& e : errs) {
      if (!out.empty()) out += "; ";
      out += e;
    }
    return out.empty() ? "parse error" : out;
  }
};

namespace detail {

using Json = nlohmann::ordered_json;

inline NodeKind parse_kind(const std::string& s, const std::string& ctx,
                           ValidationReport& errs) {
  if (s == "chance") return NodeKind::Chance;
  if (s == "decision") return NodeKind::Decision;
  if (s == "value") return NodeKind::Value;
  errs.push_back(ctx + ": unknown kind '" + s + "'");
  return NodeKind::Chance;
}

inline void check_fields(const Json& obj, const std::vector<std::string>& allowed,
                         const std::string& ctx, ValidationReport& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      errs.push_back(ctx + ": unknown field '" + it.key() + "'");
  }
}

/// Key for one table cell: child outcome, then parent outcomes, joined by ','.
inline std::string table_key(const std::string& child_outcome,
                             const std::vector<OutcomeSpace>& parents,
                             const std::vector<int>& config) {
  std::string key = child_outcome;
  for (size_t i = 0; i < parents.size(); ++i)
    key += "," + parents[i].outcomes[static_cast<size_t>(config[i])];
  return key;
}

inline std::string cost_key(const std::vector<OutcomeSpace>& parents,
                            const std::vector<int>& config) {
  std::string key;
  for (size_t i = 0; i < parents.size(); ++i) {
    if (i) key += ",";
    key += parents[i].outcomes[static_cast<size_t>(config[i])];
  }
  return key;
}

}  // namespace detail

inline InfluenceDiagram parse_string(const std::string& text,
                                     const std::string& context = "<string>") {
  using detail::Json;
  ValidationReport errs;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError({context + ": " + e.what()});
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
    throw ParseError({context + ": document must be an object with a 'nodes' array"});
  detail::check_fields(doc, {"nodes"}, context, errs);

  // First pass: names, kinds, outcome spaces (needed to resolve parent spaces).
  struct Raw {
    std::string name;
    NodeKind kind = NodeKind::Chance;
    OutcomeSpace space;
    std::vector<std::string> parents;
    const Json* obj = nullptr;
  };
  std::vector<Raw> raws;
  std::map<std::string, size_t> by_name;
  for (const auto& jn : doc["nodes"]) {
    Raw r;
    if (!jn.is_object() || !jn.contains("name") || !jn["name"].is_string()) {
      errs.push_back(context + ": every node needs a string 'name'");
      continue;
    }
    r.name = jn["name"].get<std::string>();
    const std::string ctx = context + ": node " + r.name;
    if (!jn.contains("kind") || !jn["kind"].is_string()) {
      errs.push_back(ctx + ": missing 'kind'");
      continue;
    }
    r.kind = detail::parse_kind(jn["kind"].get<std::string>(), ctx, errs);
    if (jn.contains("outcomes")) {
      if (!jn["outcomes"].is_array()) {
        errs.push_back(ctx + ": 'outcomes' must be an array of strings");
      } else {
        for (const auto& o : jn["outcomes"]) {
          if (!o.is_string())
            errs.push_back(ctx + ": 'outcomes' must be an array of strings");
          else
            r.space.outcomes.push_back(o.get<std::string>());
        }
      }
    }
    r.space.node = r.name;
    if (jn.contains("parents")) {
      if (!jn["parents"].is_array())
        errs.push_back(ctx + ": 'parents' must be an array of strings");
      else
        for (const auto& p : jn["parents"]) {
          if (!p.is_string())
            errs.push_back(ctx + ": 'parents' must be an array of strings");
          else
            r.parents.push_back(p.get<std::string>());
        }
    }
    r.obj = &jn;
    by_name[r.name] = raws.size();
    raws.push_back(std::move(r));
  }
  if (!errs.empty()) throw ParseError(errs);

  auto space_of = [&](const std::string& name) -> const OutcomeSpace* {
    auto it = by_name.find(name);
    return it == by_name.end() ? nullptr : &raws[it->second].space;
  };

  std::vector<DiagramNode> nodes;
  for (const auto& r : raws) {
    const std::string ctx = context + ": node " + r.name;
    const Json& jn = *r.obj;
    DiagramNode n;
    n.name = r.name;
    n.kind = r.kind;
    n.space = r.space;
    n.parents = r.parents;

    std::vector<OutcomeSpace> parent_spaces;
    bool parents_ok = true;
    for (const auto& p : r.parents) {
      const OutcomeSpace* s = space_of(p);
      if (!s) {
        errs.push_back(ctx + ": unknown parent '" + p + "'");
        parents_ok = false;
      } else {
        parent_spaces.push_back(*s);
      }
    }

    switch (r.kind) {
      case NodeKind::Chance: {
        detail::check_fields(jn, {"name", "kind", "outcomes", "parents", "table"}, ctx,
                             errs);
        if (!jn.contains("table") || !jn["table"].is_object()) {
          errs.push_back(ctx + ": chance node needs a 'table' object");
          break;
        }
        if (!parents_ok || n.space.size() < 2) {
          if (n.space.size() < 2) errs.push_back(ctx + ": needs >= 2 outcomes");
          break;
        }
        const Json& jt = jn["table"];
        std::set<std::string> used;
        const size_t nrows = detail::config_count(parent_spaces);
        std::vector<FuzzyDistribution> rows;
        for (size_t rc = 0; rc < nrows; ++rc) {
          const std::vector<int> cfg = detail::config_unindex(parent_spaces, rc);
          std::vector<FuzzyProbability> probs;
          for (const auto& out : n.space.outcomes) {
            const std::string key = detail::table_key(out, parent_spaces, cfg);
            used.insert(key);
            if (!jt.contains(key)) {
              probs.push_back(FuzzyProbability::crisp(0.0));
              continue;
            }
            if (!jt[key].is_string()) {
              errs.push_back(ctx + ": table[" + key + "] must be a triplet string");
              probs.push_back(FuzzyProbability::crisp(0.0));
              continue;
            }
            try {
              probs.push_back(parse_probability(jt[key].get<std::string>()));
            } catch (const std::exception& e) {
              errs.push_back(ctx + ": table[" + key + "]: " + e.what());
              probs.push_back(FuzzyProbability::crisp(0.0));
            }
          }
          rows.emplace_back(n.space, std::move(probs));
        }
        for (auto it = jt.begin(); it != jt.end(); ++it)
          if (!used.count(it.key()))
            errs.push_back(ctx + ": table key '" + it.key() +
                           "' matches no outcome configuration");
        n.table = ConditionalTable(n.space, parent_spaces, std::move(rows));
        break;
      }
      case NodeKind::Decision:
        detail::check_fields(jn, {"name", "kind", "outcomes", "parents"}, ctx, errs);
        break;
      case NodeKind::Value: {
        detail::check_fields(jn, {"name", "kind", "parents", "costs"}, ctx, errs);
        if (!jn.contains("costs") || !jn["costs"].is_object()) {
          errs.push_back(ctx + ": value node needs a 'costs' object");
          break;
        }
        if (!parents_ok) break;
        const Json& jc = jn["costs"];
        std::set<std::string> used;
        const size_t nrows = detail::config_count(parent_spaces);
        for (size_t rc = 0; rc < nrows; ++rc) {
          const std::vector<int> cfg = detail::config_unindex(parent_spaces, rc);
          const std::string key = detail::cost_key(parent_spaces, cfg);
          used.insert(key);
          if (!jc.contains(key)) {
            errs.push_back(ctx + ": missing cost for configuration '" + key + "'");
            n.costs.push_back(FuzzyValue::crisp(0.0));
            continue;
          }
          const Json& v = jc[key];
          if (v.is_number()) {
            n.costs.push_back(FuzzyValue::crisp(v.get<double>()));
          } else if (v.is_string()) {
            try {
              n.costs.push_back(parse_fuzzy_value(v.get<std::string>()));
            } catch (const std::exception& e) {
              errs.push_back(ctx + ": costs[" + key + "]: " + e.what());
              n.costs.push_back(FuzzyValue::crisp(0.0));
            }
          } else {
            errs.push_back(ctx + ": costs[" + key + "] must be a number or triplet");
            n.costs.push_back(FuzzyValue::crisp(0.0));
          }
        }
        for (auto it = jc.begin(); it != jc.end(); ++it)
          if (!used.count(it.key()))
            errs.push_back(ctx + ": cost key '" + it.key() +
                           "' matches no parent configuration");
        break;
      }
    }
    nodes.push_back(std::move(n));
  }
  if (!errs.empty()) throw ParseError(errs);

  auto built = InfluenceDiagram::build(std::move(nodes));
  if (!built.ok()) {
    for (auto& e : built.errors) e = context + ": " + e;
    throw ParseError(built.errors);
  }
  return std::move(*built.diagram);
}

inline InfluenceDiagram parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError({path + ": cannot open file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

inline std::string serialize(const InfluenceDiagram& d) {
  using detail::Json;
  Json doc;
  doc["nodes"] = Json::array();
  for (size_t i = 0; i < d.size(); ++i) {
    const DiagramNode& n = d.node(static_cast<int>(i));
    Json jn;
    jn["name"] = n.name;
    jn["kind"] = to_string(n.kind);
    if (n.kind != NodeKind::Value) jn["outcomes"] = n.space.outcomes;
    if (!n.parents.empty() || n.kind == NodeKind::Value) jn["parents"] = n.parents;
    if (n.kind == NodeKind::Chance) {
      Json jt = Json::object();
      const auto& parents = n.table->parents();
      for (size_t rc = 0; rc < n.table->row_count(); ++rc) {
        const std::vector<int> cfg = detail::config_unindex(parents, rc);
        for (size_t o = 0; o < n.space.size(); ++o)
          jt[detail::table_key(n.space.outcomes[o], parents, cfg)] =
              to_display(n.table->row(rc).at(o));
      }
      jn["table"] = std::move(jt);
    }
    if (n.kind == NodeKind::Value) {
      Json jc = Json::object();
      std::vector<OutcomeSpace> parent_spaces;
      for (const auto& p : n.parents) parent_spaces.push_back(d.node(p).space);
      for (size_t rc = 0; rc < n.costs.size(); ++rc) {
        const std::vector<int> cfg = detail::config_unindex(parent_spaces, rc);
        const FuzzyValue& c = n.costs[rc];
        const std::string key = detail::cost_key(parent_spaces, cfg);
        if (c.is_crisp())
          jc[key] = c.mean();
        else
          jc[key] = to_display(c);
      }
      jn["costs"] = std::move(jc);
    }
    doc["nodes"].push_back(std::move(jn));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Solver reports.
// ---------------------------------------------------------------------------

namespace detail {

inline Json ops_json(const OpCounter& ops) {
  Json j;
  j["additions"] = ops.adds;
  j["multiplications"] = ops.mults;
  j["divisions"] = ops.divs;
  j["comparisons"] = ops.comparisons;
  return j;
}

inline Json entry_json(const FuzzyResultEntry& e, bool probability) {
  Json j;
  j["mean"] = e.mean;
  j["support"] = {e.lo, e.hi};
  j["membership_at_lo"] = e.mu_lo;
  j["membership_at_hi"] = e.mu_hi;
  if (probability) {
    const FuzzyProbability p = e.as_probability();
    j["triplet"] = to_display(p);
    j["nominal_spreads"] = {p.left_nominal(), p.right_nominal()};
    j["kind"] = to_string(p.kind());
  } else {
    const FuzzyValue v = e.as_value();
    j["triplet"] = to_display(v);
  }
  return j;
}

inline Json given_json(const std::vector<std::pair<std::string, std::string>>& given) {
  Json j = Json::object();
  for (const auto& [n, o] : given) j[n] = o;
  return j;
}

inline Json compare_json(const CompareReport& rep) {
  Json j;
  j["support_deviation"] = rep.support_dev;
  j["max_membership_deviation"] = rep.max_membership_dev;
  j["support_ok"] = rep.support_ok;
  j["membership_ok"] = rep.membership_ok;
  j["ok"] = rep.ok();
  return j;
}

inline Json infer_report(const Query& q, const InferResult& res) {
  Json j;
  j["query"]["target"] = q.target;
  j["query"]["given"] = given_json(q.given);
  Json out = Json::object();
  for (size_t k = 0; k < res.entries.size(); ++k)
    out[res.space.outcomes[k]] = entry_json(res.entries[k], true);
  j["posterior"] = std::move(out);
  j["ops"] = ops_json(res.ops);
  return j;
}

inline Json decide_report(const std::vector<std::pair<std::string, std::string>>& given,
                          const DecideResult& res) {
  Json j;
  j["query"]["decision"] = res.decision;
  j["query"]["given"] = given_json(given);
  Json costs = Json::object();
  for (size_t a = 0; a < res.alternatives.size(); ++a)
    costs[res.alternatives[a]] = entry_json(res.costs[a], false);
  j["expected_costs"] = std::move(costs);
  j["chosen"] = res.chosen >= 0 ? Json(res.alternatives[static_cast<size_t>(res.chosen)])
                                : Json(nullptr);
  j["ops"] = ops_json(res.ops);
  return j;
}

inline Json sensitivity_report(
    const std::vector<std::pair<std::string, std::string>>& given,
    const SensitivityReport& rep) {
  Json j;
  j["query"]["decision"] = rep.decision;
  j["query"]["given"] = given_json(given);
  Json costs = Json::object();
  for (size_t a = 0; a < rep.alternatives.size(); ++a)
    costs[rep.alternatives[a]] = to_display(rep.costs[a]);
  j["expected_costs"] = std::move(costs);
  j["chosen"] = rep.chosen >= 0
                    ? Json(rep.alternatives[static_cast<size_t>(rep.chosen)])
                    : Json(nullptr);
  Json hits = Json::array();
  for (const auto& h : rep.intersections) {
    Json jh;
    jh["pair"] = {rep.alternatives[h.a], rep.alternatives[h.b]};
    jh["side"] = h.side == Side::Left ? "left" : "right";
    jh["x"] = h.hit.x;
    jh["alpha"] = h.hit.alpha;
    hits.push_back(std::move(jh));
  }
  j["half_intersections"] = std::move(hits);
  j["alpha_star"] = rep.alpha;
  j["possibility"] = rep.possibility;
  j["cross_side_alpha_diagnostic"] = rep.cross_alpha;
  Json dom = Json::array();
  for (const auto& [w, l] : rep.dominated)
    dom.push_back({{"dominates", rep.alternatives[w]}, {"over", rep.alternatives[l]}});
  j["deterministic_dominance"] = std::move(dom);
  return j;
}

}  // namespace detail
}  // namespace fid

#endif  // FID_JSON_IO_HPP
