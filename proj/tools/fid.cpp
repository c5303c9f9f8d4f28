// fid — fuzzy influence diagram solver CLI.
//
// Subcommands: validate, infer, decide, sensitivity, plot, check.
// Exit codes: 0 success, 1 check failure, 2 validation/parse error,
// 3 solver error, 64 unknown flags / bad usage.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fid/json_io.hpp"

namespace {

using fid::detail::Json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitUsage = 64;

std::vector<std::pair<std::string, std::string>> parse_given(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& g : raw) {
    const auto eq = g.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == g.size())
      throw fid::EngineError("--given expects NODE=OUTCOME, got '" + g + "'");
    out.emplace_back(g.substr(0, eq), g.substr(eq + 1));
  }
  return out;
}

/// Expression grammar:
///   posterior entry:  TARGET=OUTCOME[|N=o[,N=o...]]
///   decision cost:    cost:ALTERNATIVE[|N=o[,N=o...]]
fid::CurveTarget parse_expr(const std::string& expr) {
  std::string head = expr;
  std::vector<std::pair<std::string, std::string>> given;
  if (const auto bar = expr.find('|'); bar != std::string::npos) {
    head = expr.substr(0, bar);
    std::string rest = expr.substr(bar + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string item =
          rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
        throw fid::EngineError("bad evidence term '" + item + "' in --expr");
      given.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (head.rfind("cost:", 0) == 0)
    return fid::CurveTarget::cost(std::move(given), head.substr(5));
  const auto eq = head.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == head.size())
    throw fid::EngineError(
        "bad --expr: want TARGET=OUTCOME[|N=o,...] or cost:ALT[|N=o,...]");
  return fid::CurveTarget::posterior(fid::Query{head.substr(0, eq), std::move(given)},
                                     head.substr(eq + 1));
}

/// Engine-side result entry for a plot/check expression.
fid::FuzzyResultEntry solve_expr(const fid::InfluenceDiagram& d,
                                 const fid::CurveTarget& t) {
  if (t.is_cost) {
    const auto res = fid::decide(d, t.given);
    for (size_t a = 0; a < res.alternatives.size(); ++a)
      if (res.alternatives[a] == t.alternative) return res.costs[a];
    throw fid::EngineError("unknown alternative '" + t.alternative + "'");
  }
  const auto res = fid::infer(d, t.query);
  const int k = res.space.index_of(t.outcome);
  if (k < 0)
    throw fid::EngineError("unknown outcome '" + t.outcome + "' of '" + t.query.target +
                           "'");
  return res.entries[static_cast<size_t>(k)];
}

struct Sample {
  double x = 0.0;
  double membership = 0.0;
  std::optional<double> oracle;
};

std::vector<Sample> sample_entry(const fid::FuzzyResultEntry& e,
                                 const fid::MembershipCurve* oracle, int points) {
  std::vector<Sample> out;
  const double lo = oracle ? std::min(e.lo, oracle->lo) : e.lo;
  const double hi = oracle ? std::max(e.hi, oracle->hi) : e.hi;
  const double pad = (hi - lo) * 0.05 + 1e-9;
  for (int i = 0; i < points; ++i) {
    const double x = (lo - pad) + (hi - lo + 2 * pad) * i / (points - 1);
    Sample s;
    s.x = x;
    s.membership = e.membership(x);
    if (oracle) s.oracle = oracle->value_at(x);
    out.push_back(s);
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<Sample>& samples) {
  os << "x,membership";
  if (!samples.empty() && samples.front().oracle) os << ",oracle_membership";
  os << "\n";
  char buf[128];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g", s.x, s.membership);
    os << buf;
    if (s.oracle) {
      std::snprintf(buf, sizeof buf, ",%.9g", *s.oracle);
      os << buf;
    }
    os << "\n";
  }
}

void write_svg(std::ostream& os, const std::vector<Sample>& samples,
               const std::string& title) {
  const int w = 640, h = 400, ml = 50, mr = 20, mt = 30, mb = 40;
  const double x0 = samples.front().x, x1 = samples.back().x;
  auto px = [&](double x) {
    return ml + (x - x0) / (x1 - x0 + 1e-300) * (w - ml - mr);
  };
  auto py = [&](double mu) { return h - mb - mu * (h - mt - mb); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
     << title << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << py(0) << "\" x2=\"" << w - mr << "\" y2=\""
     << py(0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << py(0) << "\" x2=\"" << ml << "\" y2=\""
     << py(1) << "\" stroke=\"black\"/>\n";
  char buf[64];
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">" << buf << "</text>\n";
  }
  auto polyline = [&](bool oracle, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& s : samples) {
      const double mu = oracle ? s.oracle.value_or(0.0) : s.membership;
      os << px(s.x) << "," << py(mu) << " ";
    }
    os << "\"/>\n";
  };
  if (!samples.empty() && samples.front().oracle) polyline(true, "#cc3333");
  polyline(false, "#2255cc");
  os << "</svg>\n";
}

int run(int argc, char** argv) {
  CLI::App app{"fuzzy influence diagram solver"};
  app.require_subcommand(1);

  std::string file, target, expr, out_path, objective = "min";
  std::vector<std::string> given_raw;
  int grid = 101, points = 256, oracle_grid = 0;
  double tol_support = 0.02, tol_membership = 0.15;

  auto add_file = [&](CLI::App* c) {
    c->add_option("file", file, "diagram JSON file")->required();
  };
  auto* vcmd = app.add_subcommand("validate", "validate a diagram file");
  add_file(vcmd);
  auto* icmd = app.add_subcommand("infer", "posterior fuzzy distribution");
  add_file(icmd);
  icmd->add_option("--target", target, "target chance node")->required();
  icmd->add_option("--given", given_raw, "evidence NODE=OUTCOME");
  auto* dcmd = app.add_subcommand("decide", "fuzzy expected costs and policy");
  add_file(dcmd);
  dcmd->add_option("--given", given_raw, "evidence NODE=OUTCOME");
  dcmd->add_option("--objective", objective, "min|max")
      ->check(CLI::IsMember({"min", "max"}));
  auto* scmd = app.add_subcommand("sensitivity", "alpha* sensitivity report");
  add_file(scmd);
  scmd->add_option("--given", given_raw, "evidence NODE=OUTCOME");
  scmd->add_option("--objective", objective, "min|max")
      ->check(CLI::IsMember({"min", "max"}));
  auto* pcmd = app.add_subcommand("plot", "membership curve samples (CSV or SVG)");
  add_file(pcmd);
  pcmd->add_option("--expr", expr, "TARGET=OUTCOME[|N=o,...] or cost:ALT[|N=o,...]")
      ->required();
  pcmd->add_option("--out", out_path, "output path (.csv or .svg)")->required();
  pcmd->add_option("--points", points, "sample count (default 256)");
  pcmd->add_option("--oracle", oracle_grid, "overlay oracle curve at this grid");
  auto* ccmd = app.add_subcommand("check", "compare engine result against the oracle");
  add_file(ccmd);
  ccmd->add_option("--expr", expr, "query expression")->required();
  ccmd->add_option("--grid", grid, "oracle grid (odd, >= 3)");
  ccmd->add_option("--tol-support", tol_support, "support tolerance");
  ccmd->add_option("--tol-membership", tol_membership, "pointwise tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  fid::InfluenceDiagram diagram = [&] {
    try {
      return fid::parse_file(file);
    } catch (const fid::ParseError& e) {
      for (const auto& err : e.errors) std::cerr << "error: " << err << "\n";
      std::exit(kExitValidation);
    }
  }();

  try {
    const auto given = parse_given(given_raw);
    const fid::Objective obj =
        objective == "max" ? fid::Objective::Maximize : fid::Objective::Minimize;

    if (vcmd->parsed()) {
      std::cout << "valid: " << diagram.size() << " nodes\n";
      return kExitOk;
    }
    if (icmd->parsed()) {
      const auto res = fid::infer(diagram, fid::Query{target, given});
      std::cout << fid::detail::infer_report(fid::Query{target, given}, res).dump(2)
                << "\n";
      return kExitOk;
    }
    if (dcmd->parsed()) {
      const auto res = fid::decide(diagram, given, {}, obj);
      std::cout << fid::detail::decide_report(given, res).dump(2) << "\n";
      return kExitOk;
    }
    if (scmd->parsed()) {
      const auto rep = fid::analyze_sensitivity(diagram, given, {}, obj);
      std::cout << fid::detail::sensitivity_report(given, rep).dump(2) << "\n";
      return kExitOk;
    }
    if (pcmd->parsed()) {
      if (points < 2) throw fid::EngineError("--points must be >= 2");
      const auto t = parse_expr(expr);
      const auto entry = solve_expr(diagram, t);
      std::optional<fid::MembershipCurve> oracle;
      if (oracle_grid > 0)
        oracle = fid::ep_curve(diagram, t, {oracle_grid, 256});
      const auto samples = sample_entry(entry, oracle ? &*oracle : nullptr, points);
      std::ofstream os(out_path, std::ios::binary);
      if (!os) throw fid::EngineError("cannot write '" + out_path + "'");
      if (out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".svg")
        write_svg(os, samples, expr);
      else
        write_csv(os, samples);
      return kExitOk;
    }
    if (ccmd->parsed()) {
      const auto t = parse_expr(expr);
      const auto entry = solve_expr(diagram, t);
      const auto curve = fid::ep_curve(diagram, t, {grid, 256});
      // Cost-valued targets get the same relative tolerances, scaled by span.
      const double scale = t.is_cost ? std::max(1.0, curve.hi - curve.lo) : 1.0;
      const auto rep =
          fid::compare(entry, curve, tol_support * scale, tol_membership, 0.02 * scale);
      Json j = fid::detail::compare_json(rep);
      j["expr"] = expr;
      j["engine_support"] = {entry.lo, entry.hi};
      j["oracle_support"] = {curve.lo, curve.hi};
      std::cout << j.dump(2) << "\n";
      return rep.ok() ? kExitOk : kExitCheckFail;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fid::EngineError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
