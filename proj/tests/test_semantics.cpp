#include <catch2/catch_amalgamated.hpp>

#include <milw/semantics.hpp>

#include "oracles.hpp"

using milw::FinOrder;
using milw::Formula;
using milw::Mode;
using milw::Model;
using milw::OrderKind;

namespace {

FinOrder crown() {
  std::vector<std::vector<bool>> leq = {
      {true, false, false, false},
      {false, true, false, false},
      {true, true, true, false},
      {true, true, false, true},
  };
  return FinOrder::validate({"x", "xp", "y", "z"}, leq);
}

Model crown_pq() {
  return Model(crown(), {{"p", 1ULL << 2}, {"q", 1ULL << 3}});
}

}  // namespace

TEST_CASE("crown model basics") {
  Model m = crown_pq();
  // x and xp are the minimal upper bounds of {y, z}, there is no least one
  REQUIRE(milw::satisfies(m, 0, Formula::parse("<*> p q"), Mode::Mub));
  REQUIRE(milw::satisfies(m, 1, Formula::parse("<*> p q"), Mode::Mub));
  REQUIRE_FALSE(milw::satisfies(m, 0, Formula::parse("<*> p q"), Mode::Sup));
  REQUIRE(milw::extension(m, Formula::parse("<*> p q"), Mode::Sup) == 0);
  REQUIRE(milw::extension(m, Formula::parse("<P> p"), Mode::Mub) == 0x7);
  REQUIRE(milw::extension(m, Formula::parse("<P> p"), Mode::Sup) == 0x7);
  REQUIRE_FALSE(milw::satisfies(m, 2, Formula::parse("p \\ false"), Mode::Mub));
  REQUIRE(milw::extension(m, Formula::parse("p \\ false"), Mode::Mub) == 0);
}

TEST_CASE("residual on the crown") {
  Model m(crown(), {{"p", 1ULL << 2}, {"q", (1ULL << 0) | (1ULL << 1)}});
  // fusing p's only witness y with any point lands in {x, xp} or {y}
  REQUIRE(milw::extension(m, Formula::parse("p \\ q"), Mode::Mub) == 0b1011);
  REQUIRE_FALSE(milw::satisfies(m, 2, Formula::parse("p \\ q"), Mode::Mub));
}

TEST_CASE("past diamond means some point below") {
  oracle::Rng rng(31);
  for (int round = 0; round < 30; ++round) {
    FinOrder F = round % 2 == 0 ? oracle::random_poset(rng, 1 + static_cast<int>(rng.below(5)))
                                : oracle::random_preorder(rng, 1 + static_cast<int>(rng.below(5)));
    auto val = oracle::random_valuation(rng, F.size(), {"p"});
    Model m(F, oracle::masks_of(val));
    Formula f = Formula::parse("<P> p");
    for (Mode mode : {Mode::Mub, Mode::Sup}) {
      std::uint64_t ext = milw::extension(m, f, mode);
      for (int w = 0; w < F.size(); ++w) {
        bool ref = false;
        for (int t = 0; t < F.size() && !ref; ++t)
          if (F.leq(t, w) && val["p"].count(t)) ref = true;
        REQUIRE(((ext >> w) & 1u) == static_cast<std::uint64_t>(ref));
      }
    }
  }
}

TEST_CASE("model checking agrees with the reference evaluator") {
  oracle::Rng rng(91781);
  std::vector<std::string> letters = {"p", "q"};
  for (int round = 0; round < 120; ++round) {
    FinOrder F = round % 2 == 0 ? oracle::random_poset(rng, 1 + static_cast<int>(rng.below(5)))
                                : oracle::random_preorder(rng, 1 + static_cast<int>(rng.below(5)));
    auto val = oracle::random_valuation(rng, F.size(), letters);
    Model m(F, oracle::masks_of(val));
    Formula f = oracle::random_formula(rng, letters, 3);
    for (Mode mode : {Mode::Mub, Mode::Sup}) {
      std::uint64_t ext = milw::extension(m, f, mode);
      for (int w = 0; w < F.size(); ++w)
        REQUIRE(((ext >> w) & 1u) ==
                static_cast<std::uint64_t>(oracle::satisfies(F, val, w, f, mode)));
    }
  }
}

TEST_CASE("least-upper-bound fusion implies minimal-upper-bound fusion") {
  oracle::Rng rng(4242);
  std::vector<std::string> letters = {"p", "q"};
  Formula f = Formula::parse("<*> p q");
  for (int round = 0; round < 50; ++round) {
    FinOrder F = round % 2 == 0 ? oracle::random_poset(rng, 1 + static_cast<int>(rng.below(6)))
                                : oracle::random_preorder(rng, 1 + static_cast<int>(rng.below(6)));
    Model m(F, oracle::masks_of(oracle::random_valuation(rng, F.size(), letters)));
    std::uint64_t sup_ext = milw::extension(m, f, Mode::Sup);
    std::uint64_t mub_ext = milw::extension(m, f, Mode::Mub);
    REQUIRE((sup_ext & ~mub_ext) == 0);
  }
}

TEST_CASE("fusion table is symmetric and matches the quasi sets") {
  oracle::Rng rng(8);
  FinOrder F = oracle::random_preorder(rng, 6);
  for (Mode mode : {Mode::Mub, Mode::Sup}) {
    auto fus = milw::fusion_table(F, mode);
    for (int t = 0; t < 6; ++t)
      for (int u = 0; u < 6; ++u) {
        REQUIRE(fus[t * 6 + u] == fus[u * 6 + t]);
        milw::Bitset b = mode == Mode::Mub ? F.quasi_mub_set(t, u) : F.quasi_sup_set(t, u);
        REQUIRE(fus[t * 6 + u] == b.word0());
      }
  }
}

TEST_CASE("frame validity of two schemas on the crown") {
  FinOrder F = crown();
  Formula dk = Formula::parse("(p & <*> q r) -> <*> p q");
  REQUIRE(milw::frame_valid(F, dk, Mode::Sup, 12).valid);
  REQUIRE(milw::frame_valid(F, dk, Mode::Mub, 12).valid);

  Formula dist = Formula::parse("(<P> p & <P> q) -> <P> (<*> p q)");
  REQUIRE(milw::frame_valid(F, dist, Mode::Mub).valid);
  milw::Verdict v = milw::frame_valid(F, dist, Mode::Sup);
  REQUIRE_FALSE(v.valid);
  REQUIRE(v.witness.has_value());
  // the reported witness is genuine
  REQUIRE_FALSE(milw::satisfies(v.witness->model, v.witness->point, dist, Mode::Sup));
  // and it is the canonical one. Valuation integers are letter-major with p
  // in the low bits, so p = {z}, q = {y} (v = 72) precedes p = {y}, q = {z}
  // (v = 132); the lowest failing point is x.
  REQUIRE(v.witness->model.val("p") == (1ULL << 3));
  REQUIRE(v.witness->model.val("q") == (1ULL << 2));
  REQUIRE(v.witness->point == 0);
}

TEST_CASE("frame validity reports the first countermodel") {
  // single reflexive point, formula p: the very first valuation (empty) fails
  FinOrder one = FinOrder::validate({"a"}, std::vector<std::vector<bool>>{{true}});
  milw::Verdict v = milw::frame_valid(one, Formula::parse("p"), Mode::Mub);
  REQUIRE_FALSE(v.valid);
  REQUIRE(v.witness->model.val("p") == 0);
  REQUIRE(v.witness->point == 0);

  // two valuation runs give identical reports
  milw::Verdict v2 = milw::frame_valid(one, Formula::parse("p"), Mode::Mub);
  REQUIRE(v2.witness->model.valuation == v.witness->model.valuation);
  REQUIRE(v2.witness->point == v.witness->point);
}

TEST_CASE("frame validity budget") {
  oracle::Rng rng(5);
  FinOrder F6 = oracle::random_poset(rng, 6);
  // 6 points * 4 letters = 24 > 20 default budget
  Formula wide = Formula::parse("p & q & r & s_x");
  REQUIRE_THROWS_AS(milw::frame_valid(F6, wide, Mode::Mub), milw::cap_exceeded);
  FinOrder F3 = oracle::random_poset(rng, 3);
  REQUIRE_THROWS_AS(milw::frame_valid(F3, wide, Mode::Mub, 11), milw::cap_exceeded);
  REQUIRE(milw::frame_valid(F3, Formula::parse("p -> p | q"), Mode::Mub).valid);
}

TEST_CASE("class validity") {
  REQUIRE(milw::class_valid_upto(3, Formula::parse("p -> p"), Mode::Mub, OrderKind::Poset).valid);
  milw::Verdict v =
      milw::class_valid_upto(3, Formula::parse("p"), Mode::Mub, OrderKind::Poset);
  REQUIRE_FALSE(v.valid);
  REQUIRE(v.witness->model.frame.size() == 1);

  Formula dist = Formula::parse("(<P> p & <P> q) -> <P> (<*> p q)");
  milw::Verdict dv = milw::class_valid_upto(4, dist, Mode::Sup, OrderKind::Poset);
  REQUIRE_FALSE(dv.valid);
  REQUIRE(dv.witness->model.frame.size() == 4);
  // the minimal countermodel frame has no least upper bound anywhere it matters:
  // it is the crown up to isomorphism, so it has exactly four gap triples
  REQUIRE(dv.witness->model.frame.gap_triples().size() == 4);
  REQUIRE(milw::class_valid_upto(3, dist, Mode::Sup, OrderKind::Poset).valid);
}

TEST_CASE("model construction guards") {
  FinOrder one = FinOrder::validate({"a"}, std::vector<std::vector<bool>>{{true}});
  REQUIRE_THROWS_AS(Model(one, {{"p", 2}}), milw::error);  // point 1 does not exist
  REQUIRE_THROWS_AS(milw::satisfies(Model(one, {}), 1, Formula::parse("p"), Mode::Mub),
                    milw::error);

  // non-transitive frames are rejected
  std::vector<std::vector<bool>> bad = {
      {true, true, false}, {false, true, true}, {false, false, true}};
  REQUIRE_THROWS_AS(Model(FinOrder::unchecked({"a", "b", "c"}, bad), {}), milw::error);

  // 65 points exceed the word-width cap
  int n = 65;
  std::vector<std::vector<bool>> big(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) big[i][i] = true;
  REQUIRE_THROWS_AS(Model(FinOrder::validate(oracle::point_names(n), big), {}),
                    milw::cap_exceeded);
}
