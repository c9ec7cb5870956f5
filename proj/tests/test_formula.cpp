#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include <milw/formula.hpp>

#include "oracles.hpp"

using milw::Formula;
using milw::Kind;
using milw::parse_error;

namespace {
Formula P() { return Formula::prop("p"); }
Formula Q() { return Formula::prop("q"); }
Formula R() { return Formula::prop("r"); }
}  // namespace

TEST_CASE("parse basic diamond") {
  Formula f = Formula::parse("<*> p q");
  REQUIRE(f == Formula::fuse(P(), Q()));
  REQUIRE(f.kind() == Kind::Fuse);
}

TEST_CASE("mub and sup spellings are the same token") {
  REQUIRE(Formula::parse("<mub> p q") == Formula::parse("<*> p q"));
  REQUIRE(Formula::parse("<sup> p q") == Formula::parse("<*> p q"));
}

TEST_CASE("parse residual law shape") {
  // \ binds tighter than ->, looser than prefix operators
  Formula f = Formula::parse("<*> p (p \\ q) -> q");
  REQUIRE(f == Formula::implies(Formula::fuse(P(), Formula::residual(P(), Q())), Q()));
}

TEST_CASE("parse past diamonds") {
  Formula f = Formula::parse("(<P> p & <P> q) -> <P> (<*> p q)");
  Formula expect = Formula::implies(Formula::land(Formula::past(P()), Formula::past(Q())),
                                    Formula::past(Formula::fuse(P(), Q())));
  REQUIRE(f == expect);
}

TEST_CASE("precedence ladder") {
  // ~ and modalities bind tightest, then \, &, |, -> loosest
  REQUIRE(Formula::parse("~p & q | r -> s") ==
          Formula::implies(
              Formula::lor(Formula::land(Formula::neg(P()), Q()), R()),
              Formula::prop("s")));
  REQUIRE(Formula::parse("p \\ q & r") ==
          Formula::land(Formula::residual(P(), Q()), R()));
  REQUIRE(Formula::parse("p \\ q \\ r") ==
          Formula::residual(P(), Formula::residual(Q(), R())));
  REQUIRE(Formula::parse("p -> q -> r") ==
          Formula::implies(P(), Formula::implies(Q(), R())));
  REQUIRE(Formula::parse("p | q | r") ==
          Formula::lor(Formula::lor(P(), Q()), R()));
  REQUIRE(Formula::parse("<*> p q \\ r") ==
          Formula::residual(Formula::fuse(P(), Q()), R()));
  REQUIRE(Formula::parse("~ <P> p") == Formula::neg(Formula::past(P())));
}

TEST_CASE("diamond takes two factors") {
  REQUIRE(Formula::parse("<*> <*> p q r") ==
          Formula::fuse(Formula::fuse(P(), Q()), R()));
  REQUIRE(Formula::parse("<*> p <*> q r") ==
          Formula::fuse(P(), Formula::fuse(Q(), R())));
}

TEST_CASE("keywords and identifiers") {
  REQUIRE(Formula::parse("false").kind() == Kind::Falsum);
  REQUIRE(Formula::parse("true").kind() == Kind::Verum);
  REQUIRE(Formula::parse("falsehood") == Formula::prop("falsehood"));
  REQUIRE(Formula::parse("x_1") == Formula::prop("x_1"));
}

TEST_CASE("parse errors carry positions") {
  REQUIRE_THROWS_AS(Formula::parse("<*> p"), parse_error);
  REQUIRE_THROWS_AS(Formula::parse("p &"), parse_error);
  REQUIRE_THROWS_AS(Formula::parse("(p"), parse_error);
  REQUIRE_THROWS_AS(Formula::parse("p q"), parse_error);       // trailing input
  REQUIRE_THROWS_AS(Formula::parse("<x> p q"), parse_error);   // unknown modality
  REQUIRE_THROWS_AS(Formula::parse("<*"), parse_error);        // unterminated
  REQUIRE_THROWS_AS(Formula::parse("p @ q"), parse_error);
  REQUIRE_THROWS_AS(Formula::parse(""), parse_error);
  REQUIRE_THROWS_AS(Formula::parse("p - q"), parse_error);
  try {
    Formula::parse("p &\n& q");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    REQUIRE(e.line == 2);
    REQUIRE(e.col == 1);
  }
}

TEST_CASE("printing uses minimal parentheses") {
  REQUIRE(Formula::fuse(Formula::lor(P(), Q()), R()).to_string() == "<*> (p | q) r");
  REQUIRE(Formula::implies(Formula::implies(P(), Q()), R()).to_string() == "(p -> q) -> r");
  REQUIRE(Formula::implies(P(), Formula::implies(Q(), R())).to_string() == "p -> q -> r");
  REQUIRE(Formula::residual(P(), Formula::land(Q(), R())).to_string() == "p \\ (q & r)");
  REQUIRE(Formula::land(Formula::residual(P(), Q()), R()).to_string() == "p \\ q & r");
  REQUIRE(Formula::neg(Formula::land(P(), Q())).to_string() == "~(p & q)");
  REQUIRE(Formula::land(Formula::lor(P(), Q()), R()).to_string() == "(p | q) & r");
}

TEST_CASE("parse of print is identity") {
  oracle::Rng rng(20260818);
  std::vector<std::string> letters = {"p", "q", "r"};
  for (int i = 0; i < 500; ++i) {
    Formula f = oracle::random_formula(rng, letters, 4);
    REQUIRE(Formula::parse(f.to_string()) == f);
  }
}

TEST_CASE("desugar eliminates sugar and is idempotent") {
  oracle::Rng rng(42);
  std::vector<std::string> letters = {"p", "q"};
  for (int i = 0; i < 300; ++i) {
    Formula f = oracle::random_formula(rng, letters, 4);
    Formula d = f.desugar();
    // only core connectives remain
    std::function<void(const Formula&)> scan = [&](const Formula& g) {
      switch (g.kind()) {
        case Kind::Falsum:
        case Kind::Prop:
          return;
        case Kind::Not:
          scan(g.child());
          return;
        case Kind::Or:
        case Kind::Fuse:
        case Kind::Residual:
          scan(g.left());
          scan(g.right());
          return;
        default:
          FAIL("sugar survived desugar");
      }
    };
    scan(d);
    REQUIRE(d.desugar() == d);
    REQUIRE(d.prop_letters() == f.prop_letters());
    REQUIRE(d.modal_depth() == f.modal_depth());
  }
}

TEST_CASE("desugar of the past diamond") {
  REQUIRE(Formula::parse("<P> p").desugar() ==
          Formula::fuse(P(), Formula::neg(Formula::falsum())));
}

TEST_CASE("modal depth") {
  REQUIRE(Formula::parse("p & q").modal_depth() == 0);
  REQUIRE(Formula::parse("<*> p q").modal_depth() == 1);
  REQUIRE(Formula::parse("<*> p (p \\ q) -> q").modal_depth() == 2);
  REQUIRE(Formula::parse("<P> <P> p").modal_depth() == 2);
  REQUIRE(Formula::parse("p \\ q").modal_depth() == 1);
}

TEST_CASE("prop letters") {
  auto l = Formula::parse("<*> p (q \\ r) -> p").prop_letters();
  REQUIRE(l == std::set<std::string>{"p", "q", "r"});
  REQUIRE(Formula::parse("true | false").prop_letters().empty());
}

TEST_CASE("substitution is simultaneous") {
  Formula f = Formula::parse("p -> q");
  std::map<std::string, Formula> swap = {{"p", Q()}, {"q", P()}};
  REQUIRE(f.substitute(swap) == Formula::parse("q -> p"));
  // the replacement is not itself rewritten
  std::map<std::string, Formula> loop = {{"p", Formula::parse("p & p")}};
  REQUIRE(Formula::parse("p").substitute(loop) == Formula::parse("p & p"));
}

TEST_CASE("substitution commutes with desugar") {
  oracle::Rng rng(7);
  std::vector<std::string> letters = {"p", "q"};
  for (int i = 0; i < 200; ++i) {
    Formula f = oracle::random_formula(rng, letters, 3);
    Formula rp = oracle::random_formula(rng, letters, 2);
    Formula rq = oracle::random_formula(rng, letters, 2);
    std::map<std::string, Formula> sub = {{"p", rp}, {"q", rq}};
    std::map<std::string, Formula> dsub = {{"p", rp.desugar()}, {"q", rq.desugar()}};
    REQUIRE(f.substitute(sub).desugar() == f.desugar().substitute(dsub));
  }
}

TEST_CASE("structural equality and hash") {
  Formula a = Formula::parse("<*> p q -> <*> q p");
  Formula b = Formula::parse("<*> p q -> <*> q p");
  REQUIRE(a == b);
  REQUIRE(a.hash() == b.hash());
  REQUIRE(a != Formula::parse("<*> p q -> <*> p q"));
}

TEST_CASE("formula size counts connectives") {
  REQUIRE(Formula::parse("p").size() == 0);
  REQUIRE(Formula::parse("~p").size() == 1);
  REQUIRE(Formula::parse("<*> p (p \\ q) -> q").size() == 3);
}
