#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace milw {

// Connectives. Falsum..Residual form the core language; Verum, And, Implies
// and the unary past diamond are sugar eliminated by desugar().
enum class Kind {
  Falsum,
  Verum,
  Prop,
  Not,
  Or,
  And,
  Implies,
  Fuse,      // binary diamond <*>
  Residual,  // the residual of Fuse (backslash)
  Past,      // <P> a  ==  <*> a true
};

// Immutable formula handle; nodes are shared, never mutated.
class Formula {
  struct Node {
    Kind kind;
    std::string name;  // Prop only
    std::shared_ptr<const Node> left, right;
    std::size_t hash;
  };

public:
  Formula() : node_(falsum().node_) {}

  static Formula falsum() { return make(Kind::Falsum, "", nullptr, nullptr); }
  static Formula verum() { return make(Kind::Verum, "", nullptr, nullptr); }
  static Formula prop(const std::string& name) { return make(Kind::Prop, name, nullptr, nullptr); }
  static Formula neg(Formula a) { return make(Kind::Not, "", a.node_, nullptr); }
  static Formula lor(Formula a, Formula b) { return make(Kind::Or, "", a.node_, b.node_); }
  static Formula land(Formula a, Formula b) { return make(Kind::And, "", a.node_, b.node_); }
  static Formula implies(Formula a, Formula b) { return make(Kind::Implies, "", a.node_, b.node_); }
  static Formula fuse(Formula a, Formula b) { return make(Kind::Fuse, "", a.node_, b.node_); }
  static Formula residual(Formula a, Formula b) { return make(Kind::Residual, "", a.node_, b.node_); }
  static Formula past(Formula a) { return make(Kind::Past, "", a.node_, nullptr); }

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  Formula left() const { return Formula(node_->left); }
  Formula right() const { return Formula(node_->right); }
  // Unary child (Not, Past).
  Formula child() const { return Formula(node_->left); }

  bool is_binary() const {
    Kind k = kind();
    return k == Kind::Or || k == Kind::And || k == Kind::Implies || k == Kind::Fuse ||
           k == Kind::Residual;
  }
  bool is_unary() const { return kind() == Kind::Not || kind() == Kind::Past; }

  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Formula& a, const Formula& b) { return equal(a.node_, b.node_); }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  // --- parsing ----------------------------------------------------------

  static Formula parse(const std::string& text) {
    Parser p(text);
    Formula f = p.parse_implies();
    p.expect_end();
    return f;
  }

  // --- printing ---------------------------------------------------------

  // Minimal parentheses under the precedence
  //   ->  <  |  <  &  <  \  <  {~, <*>, <P>, atoms}
  // with -> and \ right-associative, | and & left-associative.
  std::string to_string() const {
    std::string out;
    print(node_, 0, out);
    return out;
  }

  // --- operations -------------------------------------------------------

  // Eliminates Verum, And, Implies and Past; result uses only
  // Falsum, Prop, Not, Or, Fuse, Residual.
  Formula desugar() const {
    switch (kind()) {
      case Kind::Falsum:
      case Kind::Prop:
        return *this;
      case Kind::Verum:
        return neg(falsum());
      case Kind::Not:
        return neg(child().desugar());
      case Kind::Or:
        return lor(left().desugar(), right().desugar());
      case Kind::And:  // a & b  ==  ~(~a | ~b)
        return neg(lor(neg(left().desugar()), neg(right().desugar())));
      case Kind::Implies:  // a -> b  ==  ~a | b
        return lor(neg(left().desugar()), right().desugar());
      case Kind::Fuse:
        return fuse(left().desugar(), right().desugar());
      case Kind::Residual:
        return residual(left().desugar(), right().desugar());
      case Kind::Past:  // <P> a  ==  <*> a true
        return fuse(child().desugar(), neg(falsum()));
    }
    return *this;  // unreachable
  }

  int modal_depth() const {
    switch (kind()) {
      case Kind::Falsum:
      case Kind::Verum:
      case Kind::Prop:
        return 0;
      case Kind::Not:
        return child().modal_depth();
      case Kind::Past:
        return 1 + child().modal_depth();
      case Kind::Or:
      case Kind::And:
      case Kind::Implies: {
        int l = left().modal_depth(), r = right().modal_depth();
        return l > r ? l : r;
      }
      case Kind::Fuse:
      case Kind::Residual: {
        int l = left().modal_depth(), r = right().modal_depth();
        return 1 + (l > r ? l : r);
      }
    }
    return 0;  // unreachable
  }

  std::set<std::string> prop_letters() const {
    std::set<std::string> out;
    collect_letters(node_, out);
    return out;
  }

  // Simultaneous substitution of formulas for proposition letters.
  Formula substitute(const std::map<std::string, Formula>& sub) const {
    switch (kind()) {
      case Kind::Falsum:
      case Kind::Verum:
        return *this;
      case Kind::Prop: {
        auto it = sub.find(name());
        return it == sub.end() ? *this : it->second;
      }
      case Kind::Not:
        return neg(child().substitute(sub));
      case Kind::Past:
        return past(child().substitute(sub));
      case Kind::Or:
        return lor(left().substitute(sub), right().substitute(sub));
      case Kind::And:
        return land(left().substitute(sub), right().substitute(sub));
      case Kind::Implies:
        return implies(left().substitute(sub), right().substitute(sub));
      case Kind::Fuse:
        return fuse(left().substitute(sub), right().substitute(sub));
      case Kind::Residual:
        return residual(left().substitute(sub), right().substitute(sub));
    }
    return *this;  // unreachable
  }

  // Number of connective nodes (atoms count zero).
  int size() const {
    switch (kind()) {
      case Kind::Falsum:
      case Kind::Verum:
      case Kind::Prop:
        return 0;
      case Kind::Not:
      case Kind::Past:
        return 1 + child().size();
      default:
        return 1 + left().size() + right().size();
    }
  }

private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Formula make(Kind k, const std::string& name, std::shared_ptr<const Node> l,
                      std::shared_ptr<const Node> r) {
    std::size_t h = static_cast<std::size_t>(k) * 0x9e3779b97f4a7c15ULL;
    for (char c : name) h = h * 131 + static_cast<unsigned char>(c);
    if (l) h = h * 0x100000001b3ULL ^ l->hash;
    if (r) h = h * 0x100000001b3ULL ^ (r->hash + 0x517cc1b727220a95ULL);
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = name;
    n->left = std::move(l);
    n->right = std::move(r);
    n->hash = h;
    return Formula(std::move(n));
  }

  static bool equal(const std::shared_ptr<const Node>& a, const std::shared_ptr<const Node>& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->hash != b->hash || a->kind != b->kind || a->name != b->name) return false;
    return equal(a->left, b->left) && equal(a->right, b->right);
  }

  static void collect_letters(const std::shared_ptr<const Node>& n, std::set<std::string>& out) {
    if (!n) return;
    if (n->kind == Kind::Prop) out.insert(n->name);
    collect_letters(n->left, out);
    collect_letters(n->right, out);
  }

  // precedence level of a node: -> 0, | 1, & 2, \ 3, everything tighter 4
  static int level(const Node& n) {
    switch (n.kind) {
      case Kind::Implies:
        return 0;
      case Kind::Or:
        return 1;
      case Kind::And:
        return 2;
      case Kind::Residual:
        return 3;
      default:
        return 4;
    }
  }

  static void print(const std::shared_ptr<const Node>& n, int min_level, std::string& out) {
    if (level(*n) < min_level) {
      out += '(';
      print(n, 0, out);
      out += ')';
      return;
    }
    switch (n->kind) {
      case Kind::Falsum:
        out += "false";
        break;
      case Kind::Verum:
        out += "true";
        break;
      case Kind::Prop:
        out += n->name;
        break;
      case Kind::Not:
        out += '~';
        print(n->left, 4, out);
        break;
      case Kind::Past:
        out += "<P> ";
        print(n->left, 4, out);
        break;
      case Kind::Fuse:
        out += "<*> ";
        print(n->left, 4, out);
        out += ' ';
        print(n->right, 4, out);
        break;
      case Kind::Residual:  // right-associative
        print(n->left, 4, out);
        out += " \\ ";
        print(n->right, 3, out);
        break;
      case Kind::And:  // left-associative
        print(n->left, 2, out);
        out += " & ";
        print(n->right, 3, out);
        break;
      case Kind::Or:
        print(n->left, 1, out);
        out += " | ";
        print(n->right, 2, out);
        break;
      case Kind::Implies:  // right-associative
        print(n->left, 1, out);
        out += " -> ";
        print(n->right, 0, out);
        break;
    }
  }

  // --- recursive-descent parser ------------------------------------------

  class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) { advance(); }

    // implies := or ('->' implies)?            (right-assoc)
    Formula parse_implies() {
      Formula a = parse_or();
      if (tok_ == Tok::Arrow) {
        advance();
        return Formula::implies(a, parse_implies());
      }
      return a;
    }

    void expect_end() {
      if (tok_ != Tok::End) fail("unexpected trailing input");
    }

  private:
    enum class Tok { End, False, True, Ident, Not, Star, Past, Backslash, And, Or, Arrow, LParen, RParen };

    // or := and ('|' and)*                     (left-assoc)
    Formula parse_or() {
      Formula a = parse_and();
      while (tok_ == Tok::Or) {
        advance();
        a = Formula::lor(a, parse_and());
      }
      return a;
    }

    // and := residual ('&' residual)*          (left-assoc)
    Formula parse_and() {
      Formula a = parse_residual();
      while (tok_ == Tok::And) {
        advance();
        a = Formula::land(a, parse_residual());
      }
      return a;
    }

    // residual := factor ('\' residual)?       (right-assoc)
    Formula parse_residual() {
      Formula a = parse_factor();
      if (tok_ == Tok::Backslash) {
        advance();
        return Formula::residual(a, parse_residual());
      }
      return a;
    }

    // factor := atom | '~' factor | '<*>' factor factor | '<P>' factor
    Formula parse_factor() {
      switch (tok_) {
        case Tok::Not:
          advance();
          return Formula::neg(parse_factor());
        case Tok::Star: {
          advance();
          Formula a = parse_factor();
          Formula b = parse_factor();
          return Formula::fuse(a, b);
        }
        case Tok::Past:
          advance();
          return Formula::past(parse_factor());
        case Tok::False:
          advance();
          return Formula::falsum();
        case Tok::True:
          advance();
          return Formula::verum();
        case Tok::Ident: {
          std::string n = ident_;
          advance();
          return Formula::prop(n);
        }
        case Tok::LParen: {
          advance();
          Formula a = parse_implies();
          if (tok_ != Tok::RParen) fail("expected ')'");
          advance();
          return a;
        }
        default:
          fail("expected a formula");
      }
      return Formula::falsum();  // unreachable
    }

    [[noreturn]] void fail(const std::string& msg) { throw parse_error(tok_line_, tok_col_, msg); }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void bump() {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }

    void advance() {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) bump();
      tok_line_ = line_;
      tok_col_ = col_;
      if (pos_ >= text_.size()) {
        tok_ = Tok::End;
        return;
      }
      char c = peek();
      if (c == '(') { bump(); tok_ = Tok::LParen; return; }
      if (c == ')') { bump(); tok_ = Tok::RParen; return; }
      if (c == '~') { bump(); tok_ = Tok::Not; return; }
      if (c == '&') { bump(); tok_ = Tok::And; return; }
      if (c == '|') { bump(); tok_ = Tok::Or; return; }
      if (c == '\\') { bump(); tok_ = Tok::Backslash; return; }
      if (c == '-') {
        bump();
        if (peek() != '>') fail("expected '->'");
        bump();
        tok_ = Tok::Arrow;
        return;
      }
      if (c == '<') {  // <*>, <mub>, <sup>, <P>
        bump();
        std::string body;
        while (pos_ < text_.size() && peek() != '>') {
          if (std::isspace(static_cast<unsigned char>(peek())) || body.size() > 3)
            fail("malformed modality; expected <*>, <mub>, <sup> or <P>");
          body += peek();
          bump();
        }
        if (pos_ >= text_.size()) fail("unterminated modality token");
        bump();  // '>'
        if (body == "*" || body == "mub" || body == "sup") {
          tok_ = Tok::Star;
        } else if (body == "P") {
          tok_ = Tok::Past;
        } else {
          fail("unknown modality <" + body + ">");
        }
        return;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        ident_.clear();
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
          ident_ += peek();
          bump();
        }
        if (ident_ == "false") tok_ = Tok::False;
        else if (ident_ == "true") tok_ = Tok::True;
        else tok_ = Tok::Ident;
        return;
      }
      fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Tok tok_ = Tok::End;
    int tok_line_ = 1, tok_col_ = 1;
    std::string ident_;
  };

  std::shared_ptr<const Node> node_;
};

}  // namespace milw
