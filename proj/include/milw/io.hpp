#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "formula.hpp"
#include "order.hpp"
#include "pmorphism.hpp"
#include "proofcheck.hpp"
#include "semantics.hpp"

namespace milw {

// A frame plus optional valuation as read from disk. Valuation keeps point
// index lists so frames larger than the model-checking cap still parse.
struct ParsedModel {
  FinOrder order;
  std::map<std::string, std::vector<int>> valuation;
};

inline Model to_model(const ParsedModel& pm) { return Model::from_sets(pm.order, pm.valuation); }

namespace iodetail {

// '#' opens a comment only at line start or after whitespace, so point names
// such as x#1 (fresh copies minted by the construction) survive round trips.
inline std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i)
    if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
      return line.substr(0, i);
  return line;
}

inline std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

// Builds the order from names and explicit pairs: the reflexive closure is
// added for free, transitivity is the writer's job.
inline FinOrder build_order(const std::vector<std::string>& names,
                            const std::vector<std::pair<int, int>>& pairs) {
  std::size_t n = names.size();
  std::vector<Bitset> up(n, Bitset(n));
  for (std::size_t i = 0; i < n; ++i) up[i].set(i);
  for (auto [a, b] : pairs) up[a].set(b);
  try {
    return FinOrder::validate(names, std::move(up));
  } catch (const not_transitive& e) {
    throw io_error("leq is not transitive: " + names[e.i] + "<=" + names[e.j] + " and " +
                   names[e.j] + "<=" + names[e.k] + " require " + names[e.i] + "<=" + names[e.k]);
  }
}

inline int index_of(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw unknown_point(name);
}

}  // namespace iodetail

// Text format, one directive per line; a whitespace-preceded (or leading) #
// starts a comment, so # may appear inside point names:
//   points: x xp y z
//   leq: y<=x y<=xp z<=x z<=xp
//   val: p = y
// leq lists the non-reflexive pairs (reflexive closure is implied); the
// relation must already be transitive.
inline ParsedModel parse_order_text(const std::string& text) {
  std::vector<std::string> names;
  bool have_points = false;
  std::vector<std::pair<int, int>> pairs;
  std::map<std::string, std::vector<int>> val;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = iodetail::strip_comment(raw);
    auto toks = iodetail::tokens(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0];
    if (head == "points:") {
      if (have_points) throw io_error("line " + std::to_string(lineno) + ": duplicate points line");
      have_points = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        for (const auto& known : names)
          if (known == toks[i])
            throw io_error("line " + std::to_string(lineno) + ": duplicate point " + toks[i]);
        names.push_back(toks[i]);
      }
      if (names.empty()) throw io_error("line " + std::to_string(lineno) + ": no points");
    } else if (head == "leq:") {
      if (!have_points) throw io_error("line " + std::to_string(lineno) + ": leq before points");
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto pos = toks[i].find("<=");
        if (pos == std::string::npos)
          throw io_error("line " + std::to_string(lineno) + ": expected NAME<=NAME, got " +
                         toks[i]);
        int a = iodetail::index_of(names, toks[i].substr(0, pos));
        int b = iodetail::index_of(names, toks[i].substr(pos + 2));
        pairs.emplace_back(a, b);
      }
    } else if (head == "val:") {
      if (!have_points) throw io_error("line " + std::to_string(lineno) + ": val before points");
      if (toks.size() < 3 || toks[2] != "=")
        throw io_error("line " + std::to_string(lineno) + ": expected val: LETTER = POINTS");
      const std::string& letter = toks[1];
      if (val.count(letter))
        throw io_error("line " + std::to_string(lineno) + ": duplicate valuation for " + letter);
      std::vector<int> points;
      for (std::size_t i = 3; i < toks.size(); ++i)
        points.push_back(iodetail::index_of(names, toks[i]));
      val[letter] = std::move(points);
    } else {
      throw io_error("line " + std::to_string(lineno) + ": unknown directive " + head);
    }
  }
  if (!have_points) throw io_error("missing points line");
  return {iodetail::build_order(names, pairs), std::move(val)};
}

// JSON equivalent: {"points": [...], "leq": [["y","x"], ...], "val": {"p": ["y"]}}
inline ParsedModel parse_order_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("bad json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("points")) throw io_error("json model needs a points array");
  std::vector<std::string> names;
  for (const auto& p : j["points"]) {
    std::string name = p.get<std::string>();
    for (const auto& known : names)
      if (known == name) throw io_error("duplicate point " + name);
    names.push_back(std::move(name));
  }
  if (names.empty()) throw io_error("json model needs at least one point");
  std::vector<std::pair<int, int>> pairs;
  if (j.contains("leq"))
    for (const auto& pr : j["leq"]) {
      if (!pr.is_array() || pr.size() != 2) throw io_error("leq entries must be pairs");
      pairs.emplace_back(iodetail::index_of(names, pr[0].get<std::string>()),
                         iodetail::index_of(names, pr[1].get<std::string>()));
    }
  std::map<std::string, std::vector<int>> val;
  if (j.contains("val"))
    for (const auto& [letter, arr] : j["val"].items()) {
      std::vector<int> points;
      for (const auto& p : arr) points.push_back(iodetail::index_of(names, p.get<std::string>()));
      val[letter] = std::move(points);
    }
  return {iodetail::build_order(names, pairs), std::move(val)};
}

// Sniffs json by a leading '{'.
inline ParsedModel parse_order_auto(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? parse_order_json(text) : parse_order_text(text);
  }
  throw io_error("empty model input");
}

inline std::string print_order_text(const FinOrder& F,
                                    const std::map<std::string, std::vector<int>>& val = {}) {
  std::ostringstream out;
  out << "points:";
  for (int i = 0; i < F.size(); ++i) out << ' ' << F.name(i);
  out << '\n';
  std::ostringstream leq;
  for (int i = 0; i < F.size(); ++i)
    for (int j = 0; j < F.size(); ++j)
      if (i != j && F.leq(i, j)) leq << ' ' << F.name(i) << "<=" << F.name(j);
  if (!leq.str().empty()) out << "leq:" << leq.str() << '\n';
  for (const auto& [letter, points] : val) {
    out << "val: " << letter << " =";
    for (int p : points) out << ' ' << F.name(p);
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json order_json(const FinOrder& F,
                                 const std::map<std::string, std::vector<int>>& val = {}) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (int i = 0; i < F.size(); ++i) j["points"].push_back(F.name(i));
  j["leq"] = nlohmann::json::array();
  for (int i = 0; i < F.size(); ++i)
    for (int k = 0; k < F.size(); ++k)
      if (i != k && F.leq(i, k)) j["leq"].push_back({F.name(i), F.name(k)});
  if (!val.empty()) {
    j["val"] = nlohmann::json::object();
    for (const auto& [letter, points] : val) {
      nlohmann::json arr = nlohmann::json::array();
      for (int p : points) arr.push_back(F.name(p));
      j["val"][letter] = std::move(arr);
    }
  }
  return j;
}

inline std::map<std::string, std::vector<int>> valuation_sets(const Model& M) {
  std::map<std::string, std::vector<int>> out;
  for (const auto& [letter, mask] : M.valuation) {
    std::vector<int> points;
    for (int i = 0; i < M.frame.size(); ++i)
      if ((mask >> i) & 1u) points.push_back(i);
    out[letter] = std::move(points);
  }
  return out;
}

// Hasse diagram of the asymmetric part; mutually related pairs get a dashed
// double edge.
inline std::string print_dot(const FinOrder& F) {
  int n = F.size();
  auto strict = [&](int i, int j) { return F.leq(i, j) && !F.leq(j, i); };
  std::ostringstream out;
  out << "digraph order {\n  rankdir=BT;\n";
  for (int i = 0; i < n; ++i) out << "  \"" << F.name(i) << "\";\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!strict(i, j)) continue;
      bool covered = false;
      for (int k = 0; k < n && !covered; ++k)
        if (k != i && k != j && strict(i, k) && strict(k, j)) covered = true;
      if (!covered) out << "  \"" << F.name(i) << "\" -> \"" << F.name(j) << "\";\n";
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (F.leq(i, j) && F.leq(j, i))
        out << "  \"" << F.name(i) << "\" -> \"" << F.name(j)
            << "\" [dir=both style=dashed];\n";
  out << "}\n";
  return out.str();
}

// Map file: one "src -> tgt" line per source point, # comments allowed.
inline OrderMap parse_map_text(const std::string& text, const FinOrder& src, const FinOrder& tgt) {
  std::vector<int> map(src.size(), -1);
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = iodetail::strip_comment(raw);
    auto toks = iodetail::tokens(line);
    if (toks.empty()) continue;
    if (toks.size() != 3 || toks[1] != "->")
      throw io_error("line " + std::to_string(lineno) + ": expected SRC -> TGT");
    int a = src.index(toks[0]);
    int b = tgt.index(toks[2]);
    if (map[a] >= 0)
      throw io_error("line " + std::to_string(lineno) + ": " + toks[0] + " mapped twice");
    map[a] = b;
  }
  for (int i = 0; i < src.size(); ++i)
    if (map[i] < 0) throw io_error("map does not cover source point " + src.name(i));
  return OrderMap(src, tgt, std::move(map));
}

inline std::string print_map_text(const OrderMap& m) {
  std::ostringstream out;
  for (int i = 0; i < m.source.size(); ++i)
    out << m.source.name(i) << " -> " << m.target.name(m(i)) << '\n';
  return out.str();
}

// Proof file:
// {"goal": "...", "lines": [{"formula": "...", "rule": "...",
//                            "refs": [1, 2], "subst": {"p": "..."}}]}
// rule is an axiom schema name (Re., 4, Co., Dk., NormOrL, NormOrR,
// NormBotL, NormBotR, L1, L2, KRes) or taut | mp | mono-left | mono-right |
// left-nec. refs are 1-based line numbers.
inline Proof parse_proof_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("bad json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("goal") || !j.contains("lines"))
    throw io_error("proof json needs goal and lines");
  Proof proof;
  proof.goal = Formula::parse(j["goal"].get<std::string>());
  int lineno = 0;
  for (const auto& jl : j["lines"]) {
    ++lineno;
    ProofLine ln;
    ln.formula = Formula::parse(jl.at("formula").get<std::string>());
    std::string rule = jl.at("rule").get<std::string>();
    std::vector<int> refs;
    if (jl.contains("refs"))
      for (const auto& r : jl["refs"]) refs.push_back(r.get<int>());
    auto need_refs = [&](std::size_t k) {
      if (refs.size() != k)
        throw io_error("proof line " + std::to_string(lineno) + ": rule " + rule + " needs " +
                       std::to_string(k) + " refs");
    };
    if (axiom_schemas().count(rule)) {
      ln.just.kind = RuleKind::Axiom;
      ln.just.schema = rule;
      if (jl.contains("subst"))
        for (const auto& [letter, repl] : jl["subst"].items())
          ln.just.subst[letter] = Formula::parse(repl.get<std::string>());
    } else if (rule == "taut") {
      ln.just.kind = RuleKind::Taut;
    } else if (rule == "mp") {
      ln.just.kind = RuleKind::MP;
      need_refs(2);
      ln.just.ref1 = refs[0];
      ln.just.ref2 = refs[1];
    } else if (rule == "mono-left" || rule == "mono-right") {
      ln.just.kind = rule == "mono-left" ? RuleKind::MonoLeft : RuleKind::MonoRight;
      need_refs(1);
      ln.just.ref1 = refs[0];
    } else if (rule == "left-nec") {
      ln.just.kind = RuleKind::LeftNec;
      need_refs(1);
      ln.just.ref1 = refs[0];
    } else {
      throw io_error("proof line " + std::to_string(lineno) + ": unknown rule " + rule);
    }
    proof.lines.push_back(std::move(ln));
  }
  return proof;
}

inline nlohmann::json proof_json(const Proof& proof) {
  nlohmann::json j;
  j["goal"] = proof.goal.to_string();
  j["lines"] = nlohmann::json::array();
  for (const auto& ln : proof.lines) {
    nlohmann::json jl;
    jl["formula"] = ln.formula.to_string();
    switch (ln.just.kind) {
      case RuleKind::Axiom: {
        jl["rule"] = ln.just.schema;
        if (!ln.just.subst.empty()) {
          jl["subst"] = nlohmann::json::object();
          for (const auto& [letter, f] : ln.just.subst) jl["subst"][letter] = f.to_string();
        }
        break;
      }
      case RuleKind::Taut:
        jl["rule"] = "taut";
        break;
      case RuleKind::MP:
        jl["rule"] = "mp";
        jl["refs"] = {ln.just.ref1, ln.just.ref2};
        break;
      case RuleKind::MonoLeft:
        jl["rule"] = "mono-left";
        jl["refs"] = {ln.just.ref1};
        break;
      case RuleKind::MonoRight:
        jl["rule"] = "mono-right";
        jl["refs"] = {ln.just.ref1};
        break;
      case RuleKind::LeftNec:
        jl["rule"] = "left-nec";
        jl["refs"] = {ln.just.ref1};
        break;
    }
    j["lines"].push_back(std::move(jl));
  }
  return j;
}

}  // namespace milw
