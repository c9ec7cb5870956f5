#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "formula.hpp"
#include "semantics.hpp"

namespace milw {

// The two Hilbert systems: the base system over & and <*>, and its extension
// with the residual axioms and the residual necessitation rule.
enum class System { Mil, MilRes };

inline const char* system_name(System s) { return s == System::Mil ? "mil" : "mil-res"; }

// Named axiom schemas over schematic letters p, q, r. Biconditionals are
// spelled as conjunctions of two implications since the grammar has no <->.
inline const std::map<std::string, Formula>& axiom_schemas() {
  static const std::map<std::string, Formula> schemas = [] {
    Formula p = Formula::prop("p"), q = Formula::prop("q"), r = Formula::prop("r");
    auto iff = [](const Formula& a, const Formula& b) {
      return Formula::land(Formula::implies(a, b), Formula::implies(b, a));
    };
    std::map<std::string, Formula> m;
    m["Re."] = Formula::implies(Formula::land(p, q), Formula::fuse(p, q));
    m["4"] = Formula::implies(Formula::past(Formula::past(p)), Formula::past(p));
    m["Co."] = Formula::implies(Formula::fuse(p, q), Formula::fuse(q, p));
    m["Dk."] = Formula::implies(Formula::land(p, Formula::fuse(q, r)), Formula::fuse(p, q));
    m["NormOrL"] = iff(Formula::fuse(Formula::lor(p, q), r),
                       Formula::lor(Formula::fuse(p, r), Formula::fuse(q, r)));
    m["NormOrR"] = iff(Formula::fuse(p, Formula::lor(q, r)),
                       Formula::lor(Formula::fuse(p, q), Formula::fuse(p, r)));
    m["NormBotL"] = iff(Formula::fuse(Formula::falsum(), p), Formula::falsum());
    m["NormBotR"] = iff(Formula::fuse(p, Formula::falsum()), Formula::falsum());
    m["L1"] = Formula::implies(Formula::fuse(p, Formula::residual(p, q)), q);
    m["L2"] = Formula::implies(p, Formula::residual(q, Formula::fuse(p, q)));
    m["KRes"] = Formula::implies(
        Formula::residual(p, Formula::implies(q, r)),
        Formula::implies(Formula::residual(p, q), Formula::residual(p, r)));
    return m;
  }();
  return schemas;
}

inline bool schema_admitted(System sys, const std::string& name) {
  if (name == "L1" || name == "L2" || name == "KRes") return sys == System::MilRes;
  return axiom_schemas().count(name) > 0;
}

enum class RuleKind { Axiom, Taut, MP, MonoLeft, MonoRight, LeftNec };

struct Justification {
  RuleKind kind = RuleKind::Taut;
  std::string schema;                     // Axiom: schema name
  std::map<std::string, Formula> subst;   // Axiom: letter -> replacement
  int ref1 = 0, ref2 = 0;                 // 1-based line references, 0 = unused
};

struct ProofLine {
  Formula formula;
  Justification just;
};

struct Proof {
  std::vector<ProofLine> lines;
  Formula goal;
};

// Propositional tautology over the modal-atom abstraction: maximal Fuse- and
// Residual-rooted subformulas (and letters) become opaque atoms, then a truth
// table runs over them. Expects a desugared formula. Throws cap_exceeded when
// the abstraction needs more than atom_cap atoms.
inline bool is_tautology(const Formula& f, int atom_cap = 6) {
  std::vector<Formula> atoms;
  auto atom_index = [&](const Formula& g) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i] == g) return static_cast<int>(i);
    atoms.push_back(g);
    return static_cast<int>(atoms.size()) - 1;
  };
  std::function<void(const Formula&)> collect = [&](const Formula& g) {
    switch (g.kind()) {
      case Kind::Falsum:
        return;
      case Kind::Not:
        collect(g.child());
        return;
      case Kind::Or:
        collect(g.left());
        collect(g.right());
        return;
      case Kind::Prop:
      case Kind::Fuse:
      case Kind::Residual:
        atom_index(g);
        return;
      default:
        throw error("tautology check expects a desugared formula");
    }
  };
  collect(f);
  if (static_cast<int>(atoms.size()) > atom_cap)
    throw cap_exceeded("tautology abstraction needs " + std::to_string(atoms.size()) +
                       " atoms; cap is " + std::to_string(atom_cap));
  std::function<bool(const Formula&, unsigned)> eval = [&](const Formula& g, unsigned bits) {
    switch (g.kind()) {
      case Kind::Falsum:
        return false;
      case Kind::Not:
        return !eval(g.child(), bits);
      case Kind::Or:
        return eval(g.left(), bits) || eval(g.right(), bits);
      default:
        return ((bits >> atom_index(g)) & 1u) != 0;
    }
  };
  for (unsigned bits = 0; bits < (1u << atoms.size()); ++bits)
    if (!eval(f, bits)) return false;
  return true;
}

struct ProofCheckResult {
  bool accepted;
  int bad_line;        // 1-based; 0 when no particular line applies
  std::string reason;  // empty when accepted
  bool ok() const { return accepted; }
};

// Verifies every line against its justification. All formula comparisons are
// structural equality of desugared forms.
inline ProofCheckResult check(const Proof& proof, System sys) {
  if (proof.lines.empty()) return {false, 0, "empty proof"};
  std::vector<Formula> d(proof.lines.size());
  for (std::size_t i = 0; i < proof.lines.size(); ++i) d[i] = proof.lines[i].formula.desugar();

  auto reject = [](int line1, const std::string& why) {
    return ProofCheckResult{false, line1, why};
  };

  for (std::size_t i = 0; i < proof.lines.size(); ++i) {
    const ProofLine& ln = proof.lines[i];
    int line1 = static_cast<int>(i) + 1;
    auto premise = [&](int ref) -> const Formula* {
      if (ref < 1 || ref > static_cast<int>(i)) return nullptr;
      return &d[ref - 1];
    };
    switch (ln.just.kind) {
      case RuleKind::Axiom: {
        auto it = axiom_schemas().find(ln.just.schema);
        if (it == axiom_schemas().end())
          return reject(line1, "unknown axiom schema " + ln.just.schema);
        if (!schema_admitted(sys, ln.just.schema))
          return reject(line1, "axiom schema " + ln.just.schema + " is not part of " +
                                   system_name(sys));
        Formula inst = it->second.substitute(ln.just.subst).desugar();
        if (inst != d[i])
          return reject(line1, "formula is not the stated instance of " + ln.just.schema);
        break;
      }
      case RuleKind::Taut: {
        try {
          if (!is_tautology(d[i]))
            return reject(line1, "not a tautology over the modal-atom abstraction");
        } catch (const cap_exceeded& e) {
          return reject(line1, e.what());
        }
        break;
      }
      case RuleKind::MP: {
        const Formula* a = premise(ln.just.ref1);
        const Formula* ab = premise(ln.just.ref2);
        if (!a || !ab) return reject(line1, "mp reference out of range");
        if (*ab != Formula::lor(Formula::neg(*a), d[i]))
          return reject(line1, "second premise is not (first premise -> this line)");
        break;
      }
      case RuleKind::MonoLeft:
      case RuleKind::MonoRight: {
        const Formula* prem = premise(ln.just.ref1);
        if (!prem) return reject(line1, "mono reference out of range");
        // premise (A -> B) desugars to ~A | B
        if (prem->kind() != Kind::Or || prem->left().kind() != Kind::Not)
          return reject(line1, "premise is not an implication");
        Formula A = prem->left().child(), B = prem->right();
        const Formula& me = d[i];
        bool shape = me.kind() == Kind::Or && me.left().kind() == Kind::Not &&
                     me.left().child().kind() == Kind::Fuse && me.right().kind() == Kind::Fuse;
        if (!shape)
          return reject(line1, "conclusion is not an implication between fusions");
        Formula lf = me.left().child(), rf = me.right();
        bool good =
            ln.just.kind == RuleKind::MonoLeft
                ? lf.left() == A && rf.left() == B && lf.right() == rf.right()
                : lf.right() == A && rf.right() == B && lf.left() == rf.left();
        if (!good)
          return reject(line1, "conclusion does not apply monotonicity to the premise");
        break;
      }
      case RuleKind::LeftNec: {
        if (sys != System::MilRes)
          return reject(line1, "left-nec is not part of mil");
        const Formula* prem = premise(ln.just.ref1);
        if (!prem) return reject(line1, "left-nec reference out of range");
        if (d[i].kind() != Kind::Residual || d[i].right() != *prem)
          return reject(line1, "conclusion is not (something \\ premise)");
        break;
      }
    }
  }

  if (d.back() != proof.goal.desugar())
    return reject(static_cast<int>(proof.lines.size()), "final line is not the goal");
  return {true, 0, ""};
}

struct SpotcheckResult {
  Verdict mub, sup;
  bool ok() const { return mub.valid && sup.valid; }
};

// Exhaustively tests the accepted goal on all posets with up to max_n points
// under both modes. Throws on a proof the checker rejects.
inline SpotcheckResult soundness_spotcheck(const Proof& proof, System sys, int max_n,
                                           int size_cap = 7, int budget_nk = 20) {
  ProofCheckResult r = check(proof, sys);
  if (!r.accepted)
    throw error("soundness spotcheck on a rejected proof (line " + std::to_string(r.bad_line) +
                ": " + r.reason + ")");
  return {class_valid_upto(max_n, proof.goal, Mode::Mub, OrderKind::Poset, size_cap, budget_nk),
          class_valid_upto(max_n, proof.goal, Mode::Sup, OrderKind::Poset, size_cap, budget_nk)};
}

}  // namespace milw
