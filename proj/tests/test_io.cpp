#include <catch2/catch_amalgamated.hpp>

#include <milw/io.hpp>

#include <fstream>
#include <sstream>
#include <string>

using Catch::Matchers::ContainsSubstring;
using milw::FinOrder;
using milw::Formula;
using milw::Mode;
using milw::Model;
using milw::OrderMap;
using milw::ParsedModel;
using milw::Proof;
using milw::System;

namespace {

std::string samples_path(const std::string& rel) {
  return std::string(MILW_SAMPLES_DIR) + "/" + rel;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FinOrder crown() {
  return milw::parse_order_text("points: x xp y z\nleq: y<=x y<=xp z<=x z<=xp\n").order;
}

}  // namespace

TEST_CASE("text model file round trips through the parser") {
  ParsedModel pm = milw::parse_order_auto(slurp(samples_path("crown.model")));
  const FinOrder& F = pm.order;
  REQUIRE(F.size() == 4);
  REQUIRE(F.names() == std::vector<std::string>{"x", "xp", "y", "z"});
  REQUIRE(F.leq(2, 0));
  REQUIRE(F.leq(2, 1));
  REQUIRE(F.leq(3, 0));
  REQUIRE(F.leq(3, 1));
  REQUIRE_FALSE(F.leq(0, 1));
  REQUIRE_FALSE(F.leq(1, 0));
  REQUIRE_FALSE(F.leq(0, 2));
  REQUIRE(F.leq(0, 0));
  REQUIRE(pm.valuation.at("p") == std::vector<int>{2});
  REQUIRE(pm.valuation.at("q") == std::vector<int>{3});

  Model m = milw::to_model(pm);
  REQUIRE(milw::extension(m, Formula::parse("<*> p q"), Mode::Mub) == 0x3u);
  REQUIRE(milw::extension(m, Formula::parse("<*> p q"), Mode::Sup) == 0x0u);
  REQUIRE(milw::extension(m, Formula::parse("<P> p"), Mode::Mub) == 0x7u);
  REQUIRE(milw::valuation_sets(m) == pm.valuation);
}

TEST_CASE("printed text form is canonical and reparses") {
  ParsedModel pm = milw::parse_order_auto(slurp(samples_path("crown.model")));
  std::string text = milw::print_order_text(pm.order, pm.valuation);
  REQUIRE(text ==
          "points: x xp y z\n"
          "leq: y<=x y<=xp z<=x z<=xp\n"
          "val: p = y\n"
          "val: q = z\n");
  ParsedModel again = milw::parse_order_text(text);
  REQUIRE(again.order.same_relation(pm.order));
  REQUIRE(again.order.names() == pm.order.names());
  REQUIRE(again.valuation == pm.valuation);

  // one-point frame has no leq line at all
  FinOrder one = milw::parse_order_text("points: a\n").order;
  REQUIRE(milw::print_order_text(one) == "points: a\n");
}

TEST_CASE("hash opens a comment only at line start or after whitespace") {
  // names minted by the construction contain '#', e.g. x#1; they must survive
  ParsedModel pm = milw::parse_order_text(
      "# header comment\n"
      "points: x x#1 y # trailing comment\n"
      "leq: y<=x y<=x#1   # another\n");
  REQUIRE(pm.order.names() == std::vector<std::string>{"x", "x#1", "y"});
  REQUIRE(pm.order.leq(2, 1));
  std::string text = milw::print_order_text(pm.order);
  ParsedModel again = milw::parse_order_text(text);
  REQUIRE(again.order.names() == pm.order.names());
  REQUIRE(again.order.same_relation(pm.order));
}

TEST_CASE("printed text lists the full relation, not just covers") {
  ParsedModel pm = milw::parse_order_auto(slurp(samples_path("chain3.frame")));
  REQUIRE(milw::print_order_text(pm.order) ==
          "points: a b c\n"
          "leq: a<=b a<=c b<=c\n");
}

TEST_CASE("json model form round trips") {
  ParsedModel pm = milw::parse_order_auto(slurp(samples_path("crown.model")));
  nlohmann::json j = milw::order_json(pm.order, pm.valuation);
  REQUIRE(j["points"].size() == 4);
  REQUIRE(j["leq"].size() == 4);
  REQUIRE(j["val"]["p"] == nlohmann::json::array({"y"}));
  ParsedModel again = milw::parse_order_json(j.dump());
  REQUIRE(again.order.same_relation(pm.order));
  REQUIRE(again.order.names() == pm.order.names());
  REQUIRE(again.valuation == pm.valuation);

  // val key is omitted when there is no valuation
  REQUIRE_FALSE(milw::order_json(pm.order).contains("val"));
}

TEST_CASE("auto parser sniffs json by a leading brace") {
  ParsedModel text = milw::parse_order_auto("points: a b\nleq: a<=b\n");
  REQUIRE(text.order.size() == 2);
  ParsedModel json = milw::parse_order_auto("  \n  {\"points\": [\"a\", \"b\"], \"leq\": [[\"a\", \"b\"]]}");
  REQUIRE(json.order.same_relation(text.order));
  // a leading comment means text format
  ParsedModel commented = milw::parse_order_auto("# frame\npoints: a\n");
  REQUIRE(commented.order.size() == 1);
  REQUIRE_THROWS_AS(milw::parse_order_auto("   \n  "), milw::io_error);
  REQUIRE_THROWS_WITH(milw::parse_order_auto(""), ContainsSubstring("empty model input"));
}

TEST_CASE("text parser rejects malformed input") {
  using milw::parse_order_text;
  // missing transitive pair a<=c
  REQUIRE_THROWS_AS(parse_order_text("points: a b c\nleq: a<=b b<=c\n"), milw::io_error);
  REQUIRE_THROWS_WITH(parse_order_text("points: a b c\nleq: a<=b b<=c\n"),
                      ContainsSubstring("a<=b and b<=c require a<=c"));
  REQUIRE_THROWS_AS(parse_order_text("points: a\nleq: a<=b\n"), milw::unknown_point);
  REQUIRE_THROWS_AS(parse_order_text("points: a\nval: p = b\n"), milw::unknown_point);
  REQUIRE_THROWS_WITH(parse_order_text("points: a a\n"),
                      ContainsSubstring("line 1: duplicate point a"));
  REQUIRE_THROWS_WITH(parse_order_text("points: a\nval: p = a\nval: p = a\n"),
                      ContainsSubstring("line 3: duplicate valuation for p"));
  REQUIRE_THROWS_WITH(parse_order_text("# only a comment\n"),
                      ContainsSubstring("missing points line"));
  REQUIRE_THROWS_WITH(parse_order_text("points:\n"), ContainsSubstring("no points"));
  REQUIRE_THROWS_WITH(parse_order_text("leq: a<=b\npoints: a b\n"),
                      ContainsSubstring("line 1: leq before points"));
  REQUIRE_THROWS_WITH(parse_order_text("val: p = a\npoints: a\n"),
                      ContainsSubstring("val before points"));
  REQUIRE_THROWS_WITH(parse_order_text("points: a b\nleq: ab\n"),
                      ContainsSubstring("expected NAME<=NAME"));
  REQUIRE_THROWS_WITH(parse_order_text("points: a\nval: p a\n"),
                      ContainsSubstring("expected val: LETTER = POINTS"));
  REQUIRE_THROWS_WITH(parse_order_text("frame: a\n"),
                      ContainsSubstring("unknown directive frame:"));
}

TEST_CASE("json parser rejects malformed input") {
  using milw::parse_order_json;
  REQUIRE_THROWS_WITH(parse_order_json("not json"), ContainsSubstring("bad json"));
  REQUIRE_THROWS_WITH(parse_order_json("[1]"), ContainsSubstring("needs a points array"));
  REQUIRE_THROWS_WITH(parse_order_json("{\"leq\": []}"), ContainsSubstring("needs a points array"));
  REQUIRE_THROWS_WITH(parse_order_json("{\"points\": []}"),
                      ContainsSubstring("at least one point"));
  REQUIRE_THROWS_WITH(parse_order_json("{\"points\": [\"a\", \"a\"]}"),
                      ContainsSubstring("duplicate point a"));
  REQUIRE_THROWS_WITH(parse_order_json("{\"points\": [\"a\"], \"leq\": [[\"a\"]]}"),
                      ContainsSubstring("leq entries must be pairs"));
  REQUIRE_THROWS_AS(parse_order_json("{\"points\": [\"a\"], \"leq\": [[\"a\", \"b\"]]}"),
                    milw::unknown_point);
  // transitivity is still required in json form
  REQUIRE_THROWS_AS(
      parse_order_json("{\"points\": [\"a\",\"b\",\"c\"], \"leq\": [[\"a\",\"b\"],[\"b\",\"c\"]]}"),
      milw::io_error);
}

TEST_CASE("dot output draws the Hasse diagram") {
  std::string crown_dot = milw::print_dot(crown());
  REQUIRE_THAT(crown_dot, ContainsSubstring("digraph order"));
  REQUIRE_THAT(crown_dot, ContainsSubstring("rankdir=BT"));
  REQUIRE_THAT(crown_dot, ContainsSubstring("\"y\" -> \"x\";"));
  REQUIRE_THAT(crown_dot, ContainsSubstring("\"y\" -> \"xp\";"));
  REQUIRE_THAT(crown_dot, ContainsSubstring("\"z\" -> \"x\";"));
  REQUIRE_THAT(crown_dot, ContainsSubstring("\"z\" -> \"xp\";"));
  REQUIRE_THAT(crown_dot, !ContainsSubstring("dashed"));

  // the chain keeps only cover edges: a->c is implied and omitted
  FinOrder chain = milw::parse_order_auto(slurp(samples_path("chain3.frame"))).order;
  std::string chain_dot = milw::print_dot(chain);
  REQUIRE_THAT(chain_dot, ContainsSubstring("\"a\" -> \"b\";"));
  REQUIRE_THAT(chain_dot, ContainsSubstring("\"b\" -> \"c\";"));
  REQUIRE_THAT(chain_dot, !ContainsSubstring("\"a\" -> \"c\""));

  // mutually related pairs render as one dashed double edge
  milw::Bitset all(2);
  all.set(0);
  all.set(1);
  FinOrder cyc = FinOrder::unchecked({"a", "b"}, {all, all});
  std::string cyc_dot = milw::print_dot(cyc);
  REQUIRE_THAT(cyc_dot, ContainsSubstring("\"a\" -> \"b\" [dir=both style=dashed];"));
  REQUIRE_THAT(cyc_dot, !ContainsSubstring("\"b\" -> \"a\""));
}

TEST_CASE("map files parse against source and target frames") {
  FinOrder F = crown();
  OrderMap id = milw::parse_map_text(slurp(samples_path("maps/crown_identity.map")), F, F);
  REQUIRE(id.map == std::vector<int>{0, 1, 2, 3});
  REQUIRE(milw::print_map_text(id) == "x -> x\nxp -> xp\ny -> y\nz -> z\n");
  OrderMap again = milw::parse_map_text(milw::print_map_text(id), F, F);
  REQUIRE(again.map == id.map);

  REQUIRE_THROWS_WITH(milw::parse_map_text("x -> x\n", F, F),
                      ContainsSubstring("map does not cover source point xp"));
  REQUIRE_THROWS_WITH(milw::parse_map_text("x -> x\nx -> xp\n", F, F),
                      ContainsSubstring("line 2: x mapped twice"));
  REQUIRE_THROWS_WITH(milw::parse_map_text("x => x\n", F, F),
                      ContainsSubstring("expected SRC -> TGT"));
  REQUIRE_THROWS_AS(milw::parse_map_text("w -> x\n", F, F), milw::unknown_point);
}

TEST_CASE("proof corpus files parse and check") {
  struct Entry {
    const char* file;
    System system;
  };
  const Entry corpus[] = {
      {"proofs/co_instance.json", System::Mil},
      {"proofs/p_to_past_p.json", System::Mil},
      {"proofs/past4.json", System::Mil},
      {"proofs/l2_instance.json", System::MilRes},
  };
  for (const auto& entry : corpus) {
    INFO(entry.file);
    Proof proof = milw::parse_proof_json(slurp(samples_path(entry.file)));
    milw::ProofCheckResult res = milw::check(proof, entry.system);
    INFO(res.reason);
    REQUIRE(res.accepted);
  }
}

TEST_CASE("proofs round trip through json") {
  Proof proof = milw::parse_proof_json(slurp(samples_path("proofs/p_to_past_p.json")));
  nlohmann::json j = milw::proof_json(proof);
  Proof again = milw::parse_proof_json(j.dump());
  REQUIRE(again.goal == proof.goal);
  REQUIRE(again.lines.size() == proof.lines.size());
  for (std::size_t i = 0; i < proof.lines.size(); ++i) {
    REQUIRE(again.lines[i].formula == proof.lines[i].formula);
    REQUIRE(again.lines[i].just.kind == proof.lines[i].just.kind);
  }
  REQUIRE(milw::check(again, System::Mil).accepted);
}

TEST_CASE("proof json parser rejects malformed input") {
  using milw::parse_proof_json;
  REQUIRE_THROWS_WITH(parse_proof_json("nope"), ContainsSubstring("bad json"));
  REQUIRE_THROWS_WITH(parse_proof_json("{\"goal\": \"p\"}"),
                      ContainsSubstring("needs goal and lines"));
  REQUIRE_THROWS_WITH(
      parse_proof_json(
          "{\"goal\": \"p\", \"lines\": [{\"formula\": \"p\", \"rule\": \"mp\", \"refs\": [1]}]}"),
      ContainsSubstring("rule mp needs 2 refs"));
  REQUIRE_THROWS_WITH(
      parse_proof_json(
          "{\"goal\": \"p\", \"lines\": [{\"formula\": \"p\", \"rule\": \"left-nec\"}]}"),
      ContainsSubstring("rule left-nec needs 1 refs"));
  REQUIRE_THROWS_WITH(
      parse_proof_json(
          "{\"goal\": \"p\", \"lines\": [{\"formula\": \"p\", \"rule\": \"frobnicate\"}]}"),
      ContainsSubstring("proof line 1: unknown rule frobnicate"));
  // a bad formula inside a line surfaces as a parse error, not an io error
  REQUIRE_THROWS_AS(
      parse_proof_json("{\"goal\": \"p &\", \"lines\": []}"), milw::parse_error);
}
