#pragma once

#include <stdexcept>
#include <string>

namespace milw {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Formula or file syntax error with 1-based position.
struct parse_error : error {
  int line;
  int col;
  parse_error(int line_, int col_, const std::string& msg)
      : error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

struct not_reflexive : error {
  int point;
  explicit not_reflexive(int p)
      : error("relation is not reflexive at point " + std::to_string(p)), point(p) {}
};

struct not_transitive : error {
  int i, j, k;
  not_transitive(int i_, int j_, int k_)
      : error("relation is not transitive: " + std::to_string(i_) + " <= " + std::to_string(j_) +
              " and " + std::to_string(j_) + " <= " + std::to_string(k_) + " but not " +
              std::to_string(i_) + " <= " + std::to_string(k_)),
        i(i_), j(j_), k(k_) {}
};

struct not_a_poset : error {
  not_a_poset() : error("operation requires a poset (antisymmetry fails)") {}
  explicit not_a_poset(const std::string& msg) : error(msg) {}
};

struct cap_exceeded : error {
  explicit cap_exceeded(const std::string& msg) : error(msg) {}
};

// The triple handed to the extension construction is not a
// minimal-but-not-least upper bound configuration.
struct not_gap_triple : error {
  explicit not_gap_triple(const std::string& msg) : error(msg) {}
};

struct unknown_point : error {
  std::string name;
  explicit unknown_point(const std::string& n) : error("unknown point: " + n), name(n) {}
};

struct io_error : error {
  using error::error;
};

}  // namespace milw
