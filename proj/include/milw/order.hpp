#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bitset.hpp"
#include "errors.hpp"

namespace milw {

struct Triple {
  int s, t, u;
  bool operator==(const Triple&) const = default;
};

enum class OrderKind { Poset, Preorder };

// A finite reflexive-transitive order over named points. Immutable after
// construction; rows are up-sets (row i = { j : i <= j }).
class FinOrder {
public:
  // Throws not_reflexive / not_transitive on bad input.
  static FinOrder validate(std::vector<std::string> names, std::vector<Bitset> up_rows) {
    int n = static_cast<int>(names.size());
    for (int i = 0; i < n; ++i)
      if (!up_rows[i].test(i)) throw not_reflexive(i);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && up_rows[i].test(j) && !up_rows[j].subset_of(up_rows[i])) {
          Bitset missing = up_rows[j];
          missing.subtract(up_rows[i]);
          throw not_transitive(i, j, missing.first());
        }
    return FinOrder(std::move(names), std::move(up_rows));
  }

  static FinOrder validate(std::vector<std::string> names,
                           const std::vector<std::vector<bool>>& leq) {
    return validate(std::move(names), rows_from_matrix(leq));
  }

  // No validation errors thrown; reflexivity/transitivity/antisymmetry are
  // recorded as flags instead. Lets test fixtures build broken relations.
  static FinOrder unchecked(std::vector<std::string> names, std::vector<Bitset> up_rows) {
    return FinOrder(std::move(names), std::move(up_rows));
  }

  static FinOrder unchecked(std::vector<std::string> names,
                            const std::vector<std::vector<bool>>& leq) {
    return FinOrder(std::move(names), rows_from_matrix(leq));
  }

  int size() const { return n_; }
  const std::string& name(int i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  int index(const std::string& name) const {
    for (int i = 0; i < n_; ++i)
      if (names_[i] == name) return i;
    throw unknown_point(name);
  }

  bool leq(int i, int j) const { return up_[i].test(j); }
  const Bitset& up_set(int i) const { return up_[i]; }
  const Bitset& down_set(int i) const { return down_[i]; }

  bool is_preorder() const { return reflexive_ && transitive_; }
  bool is_poset() const { return is_preorder() && antisymmetric_; }
  bool is_reflexive() const { return reflexive_; }
  bool is_transitive() const { return transitive_; }
  bool is_antisymmetric() const { return antisymmetric_; }

  bool same_relation(const FinOrder& o) const { return names_ == o.names_ && up_ == o.up_; }

  // --- bounds -------------------------------------------------------------

  Bitset upper_bounds(int t, int u) const { return up_[t] & up_[u]; }

  // Minimal upper bounds; poset only.
  Bitset mub_set(int t, int u) const {
    require_poset();
    Bitset ubs = upper_bounds(t, u);
    Bitset out(n_);
    ubs.for_each([&](int s) {
      Bitset below = ubs & down_[s];
      below.reset(s);
      if (below.none()) out.set(s);
    });
    return out;
  }

  // Least upper bound if it exists; poset only.
  std::optional<int> sup_opt(int t, int u) const {
    require_poset();
    Bitset ubs = upper_bounds(t, u);
    std::optional<int> found;
    ubs.for_each([&](int s) {
      if (!found && ubs.subset_of(up_[s])) found = s;
    });
    return found;
  }

  // Quasi variants make sense on any preorder and agree with mub_set /
  // sup_opt on posets. quasi-mub: upper bounds s with every lower upper
  // bound also above s; quasi-sup: upper bounds below all upper bounds.
  Bitset quasi_mub_set(int t, int u) const {
    Bitset ubs = upper_bounds(t, u);
    Bitset out(n_);
    ubs.for_each([&](int s) {
      Bitset strictly_below = ubs & down_[s];
      strictly_below.subtract(up_[s]);
      if (strictly_below.none()) out.set(s);
    });
    return out;
  }

  Bitset quasi_sup_set(int t, int u) const {
    Bitset ubs = upper_bounds(t, u);
    Bitset out(n_);
    ubs.for_each([&](int s) {
      if (ubs.subset_of(up_[s])) out.set(s);
    });
    return out;
  }

  // --- derived structure ----------------------------------------------------

  // n*n table of binary suprema, -1 where none exists; poset only.
  std::vector<int> sup_table() const {
    require_poset();
    std::vector<int> tab(static_cast<std::size_t>(n_) * n_, -1);
    for (int t = 0; t < n_; ++t)
      for (int u = t; u < n_; ++u) {
        Bitset ubs = upper_bounds(t, u);
        int s = -1;
        ubs.for_each([&](int c) {
          if (s < 0 && ubs.subset_of(up_[c])) s = c;
        });
        tab[static_cast<std::size_t>(t) * n_ + u] = s;
        tab[static_cast<std::size_t>(u) * n_ + t] = s;
      }
    return tab;
  }

  // Least down-closed set containing {t, u} that is closed under existing
  // binary suprema; poset only.
  Bitset sup_closed_downset(int t, int u) const {
    require_poset();
    Bitset cur = down_[t] | down_[u];
    for (;;) {
      Bitset next = cur;
      std::vector<int> members = cur.to_vector();
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          Bitset ubs = upper_bounds(members[a], members[b]);
          int s = -1;
          ubs.for_each([&](int c) {
            if (s < 0 && ubs.subset_of(up_[c])) s = c;
          });
          if (s >= 0 && !next.test(s)) next |= down_[s];
        }
      if (next == cur) return cur;
      cur = next;
    }
  }

  // s is a minimal upper bound of {t, u} whose sup does not exist.
  bool is_gap_triple(int s, int t, int u) const {
    return mub_set(t, u).test(s) && !sup_opt(t, u).has_value();
  }

  // All gap triples, ascending by (s, t, u) index; poset only.
  std::vector<Triple> gap_triples() const {
    require_poset();
    std::vector<Triple> out;
    for (int t = 0; t < n_; ++t)
      for (int u = 0; u < n_; ++u) {
        Bitset ubs = upper_bounds(t, u);
        if (ubs.none()) continue;
        bool has_sup = false;
        ubs.for_each([&](int c) {
          if (!has_sup && ubs.subset_of(up_[c])) has_sup = true;
        });
        if (has_sup) continue;
        ubs.for_each([&](int s) {
          Bitset below = ubs & down_[s];
          below.reset(s);
          if (below.none()) out.push_back({s, t, u});
        });
      }
    std::sort(out.begin(), out.end(),
              [](const Triple& a, const Triple& b) {
                return std::tie(a.s, a.t, a.u) < std::tie(b.s, b.t, b.u);
              });
    return out;
  }

private:
  FinOrder(std::vector<std::string> names, std::vector<Bitset> up)
      : names_(std::move(names)), up_(std::move(up)), n_(static_cast<int>(names_.size())) {
    down_.assign(n_, Bitset(static_cast<std::size_t>(n_)));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (up_[i].test(j)) down_[j].set(i);
    reflexive_ = true;
    for (int i = 0; i < n_; ++i)
      if (!up_[i].test(i)) reflexive_ = false;
    transitive_ = true;
    for (int i = 0; i < n_ && transitive_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i != j && up_[i].test(j) && !up_[j].subset_of(up_[i])) {
          transitive_ = false;
          break;
        }
    antisymmetric_ = true;
    for (int i = 0; i < n_ && antisymmetric_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (up_[i].test(j) && up_[j].test(i)) {
          antisymmetric_ = false;
          break;
        }
  }

  static std::vector<Bitset> rows_from_matrix(const std::vector<std::vector<bool>>& leq) {
    std::size_t n = leq.size();
    std::vector<Bitset> rows(n, Bitset(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (leq[i][j]) rows[i].set(j);
    return rows;
  }

  void require_poset() const {
    if (!is_poset()) throw not_a_poset();
  }

  std::vector<std::string> names_;
  std::vector<Bitset> up_;
  std::vector<Bitset> down_;
  int n_ = 0;
  bool reflexive_ = false, transitive_ = false, antisymmetric_ = false;
};

// --- enumeration -------------------------------------------------------------

namespace detail {

// Default point names a, b, c, ... for enumerated orders.
inline std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return names;
}

// Compare the full n*n relation matrix of rows against its relabeling by
// perm (new index -> old index), row-major; returns true when the
// relabeled matrix is lexicographically smaller.
inline bool relabeling_smaller(const std::vector<std::uint64_t>& rows, int n,
                               const std::vector<int>& perm) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool orig = (rows[i] >> j) & 1u;
      bool rel = (rows[perm[i]] >> perm[j]) & 1u;
      if (rel != orig) return rel < orig;
    }
  return false;
}

}  // namespace detail

// Enumerates all reflexive-transitive orders (antisymmetric too for
// OrderKind::Poset) on n named points in lexicographic order of the
// off-diagonal strict bit pattern (row-major, columns ascending). With
// dedup_iso only the lexicographically least representative of each
// isomorphism class is yielded. The callback returns false to stop early.
// Throws cap_exceeded when n exceeds size_cap.
inline void enumerate_orders(int n, OrderKind kind, bool dedup_iso,
                             const std::function<bool(const FinOrder&)>& yield,
                             int size_cap = 7) {
  if (n < 1) throw error("enumerate_orders: need n >= 1");
  if (n > size_cap)
    throw cap_exceeded("enumerate_orders: n = " + std::to_string(n) + " exceeds cap " +
                       std::to_string(size_cap));
  std::vector<std::string> names = detail::default_names(n);

  std::vector<std::vector<int>> perms;
  if (dedup_iso) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }

  // rows[i] = reflexive closure of the strict bits chosen for row i
  std::vector<std::uint64_t> rows(n, 0);
  bool stop = false;

  // Transitivity on decided rows is maintained incrementally: when row r is
  // placed, check r's outgoing edges against decided targets and decided
  // rows' edges into r. Edges to undecided rows are checked when those rows
  // are placed.
  std::function<void(int)> place = [&](int r) {
    if (stop) return;
    if (r == n) {
      if (dedup_iso)
        for (const auto& perm : perms)
          if (detail::relabeling_smaller(rows, n, perm)) return;
      std::vector<Bitset> up(n, Bitset(static_cast<std::size_t>(n)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if ((rows[i] >> j) & 1u) up[i].set(j);
      if (!yield(FinOrder::unchecked(names, std::move(up)))) stop = true;
      return;
    }
    // Off-diagonal bit values for row r in lexicographic order: the column
    // with the smallest index is the most significant choice bit.
    std::vector<int> cols;
    for (int c = 0; c < n; ++c)
      if (c != r) cols.push_back(c);
    int bits = n - 1;
    for (std::uint64_t v = 0; v < (1ULL << bits) && !stop; ++v) {
      std::uint64_t row = 1ULL << r;
      for (int i = 0; i < bits; ++i)
        if ((v >> (bits - 1 - i)) & 1u) row |= 1ULL << cols[i];
      rows[r] = row;
      bool ok = true;
      for (int k = 0; k < n && ok; ++k) {
        if (k == r || !((row >> k) & 1u)) continue;
        if (kind == OrderKind::Poset && k < r && ((rows[k] >> r) & 1u)) ok = false;  // 2-cycle
        if (ok && k <= r - 1 && (rows[k] & ~row)) ok = false;  // r <= k but not row[k] subset row[r]
      }
      for (int j = 0; j < r && ok; ++j)
        if (((rows[j] >> r) & 1u) && (row & ~rows[j])) ok = false;  // j <= r
      if (ok) place(r + 1);
    }
    rows[r] = 0;
  };
  place(0);
}

inline std::uint64_t count_orders(int n, OrderKind kind, bool dedup_iso, int size_cap = 7) {
  std::uint64_t c = 0;
  enumerate_orders(n, kind, dedup_iso, [&](const FinOrder&) {
    ++c;
    return true;
  }, size_cap);
  return c;
}

}  // namespace milw
