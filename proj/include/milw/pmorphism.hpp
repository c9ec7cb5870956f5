#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "formula.hpp"
#include "order.hpp"
#include "semantics.hpp"

namespace milw {

// A point map between two finite orders.
struct OrderMap {
  FinOrder source, target;
  std::vector<int> map;  // map[source point] = target point

  OrderMap(FinOrder src, FinOrder tgt, std::vector<int> m)
      : source(std::move(src)), target(std::move(tgt)), map(std::move(m)) {
    if (static_cast<int>(map.size()) != source.size())
      throw error("order map must assign every source point");
    for (int v : map)
      if (v < 0 || v >= target.size())
        throw error("order map value " + std::to_string(v) + " out of target range");
  }

  int operator()(int i) const { return map[i]; }
};

// g after f: f maps P -> Q, g maps Q -> R; result maps P -> R.
inline OrderMap compose(const OrderMap& g, const OrderMap& f) {
  if (!f.target.same_relation(g.source))
    throw error("compose: inner map's target differs from outer map's source");
  std::vector<int> m(f.map.size());
  for (std::size_t i = 0; i < f.map.size(); ++i) m[i] = g.map[f.map[i]];
  return OrderMap(f.source, g.target, std::move(m));
}

// Violation witnesses. Primed components live in the source order,
// unprimed ones in the target.
struct ForthViolation {
  int xp, yp, zp;  // xp = sup{yp, zp} in source but f(xp) != sup{f(yp), f(zp)}
};
struct BackViolation {
  int xp, y, z;  // sup{y, z} = f(xp) has no source pair mapping onto (y, z) with sup xp
};
struct ResidualBackViolation {
  int yp, x, z;  // x = sup{f(yp), z} has no source pair (xp, zp) over (x, z) with xp = sup{yp, zp}
};
struct OrderViolation {
  int yp, xp;  // yp <= xp in source but f(yp) !<= f(xp)
};

// x' = sup'{y', z'} must imply f(x') = sup{f(y'), f(z')}. Both orders must be
// posets.
inline std::vector<ForthViolation> check_forth(const OrderMap& m) {
  std::vector<ForthViolation> out;
  std::vector<int> sup_src = m.source.sup_table();
  std::vector<int> sup_tgt = m.target.sup_table();
  int ns = m.source.size();
  for (int y = 0; y < ns; ++y)
    for (int z = y; z < ns; ++z) {
      int x = sup_src[static_cast<std::size_t>(y) * ns + z];
      if (x < 0) continue;
      int fx = m(x);
      if (sup_tgt[static_cast<std::size_t>(m(y)) * m.target.size() + m(z)] != fx)
        out.push_back({x, y, z});
    }
  return out;
}

namespace detail {

// For each source point x', the sorted list of target pairs (f(y'), f(z'))
// over source pairs whose sup is x'; both orientations are recorded.
inline std::vector<std::vector<std::uint64_t>> sup_pair_images(const OrderMap& m) {
  int ns = m.source.size();
  int nt = m.target.size();
  std::vector<int> sup_src = m.source.sup_table();
  std::vector<std::vector<std::uint64_t>> pairs(ns);
  for (int y = 0; y < ns; ++y)
    for (int z = y; z < ns; ++z) {
      int x = sup_src[static_cast<std::size_t>(y) * ns + z];
      if (x < 0) continue;
      pairs[x].push_back(static_cast<std::uint64_t>(m(y)) * nt + m(z));
      pairs[x].push_back(static_cast<std::uint64_t>(m(z)) * nt + m(y));
    }
  for (auto& p : pairs) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return pairs;
}

inline bool sorted_contains(const std::vector<std::uint64_t>& v, std::uint64_t x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace detail

// If sup{y, z} = f(x') in the target, some source pair (y', z') with
// sup'{y', z'} = x' must map onto (y, z).
inline std::vector<BackViolation> check_back(const OrderMap& m) {
  std::vector<BackViolation> out;
  int nt = m.target.size();
  std::vector<int> sup_tgt = m.target.sup_table();
  auto pairs = detail::sup_pair_images(m);
  for (int xp = 0; xp < m.source.size(); ++xp) {
    int fx = m(xp);
    for (int y = 0; y < nt; ++y)
      for (int z = y; z < nt; ++z) {
        if (sup_tgt[static_cast<std::size_t>(y) * nt + z] != fx) continue;
        if (!detail::sorted_contains(pairs[xp], static_cast<std::uint64_t>(y) * nt + z))
          out.push_back({xp, y, z});
      }
  }
  return out;
}

// If x = sup{f(y'), z} in the target, some source pair (x', z') with
// x' = sup'{y', z'} must have f(x') = x and f(z') = z.
inline std::vector<ResidualBackViolation> check_back_residual(const OrderMap& m) {
  std::vector<ResidualBackViolation> out;
  int ns = m.source.size();
  int nt = m.target.size();
  std::vector<int> sup_src = m.source.sup_table();
  std::vector<int> sup_tgt = m.target.sup_table();
  // witness[y'] = sorted (f(sup'{y',z'}), f(z')) pairs over partners z'
  std::vector<std::vector<std::uint64_t>> witness(ns);
  for (int yp = 0; yp < ns; ++yp) {
    for (int zp = 0; zp < ns; ++zp) {
      int xp = sup_src[static_cast<std::size_t>(yp) * ns + zp];
      if (xp < 0) continue;
      witness[yp].push_back(static_cast<std::uint64_t>(m(xp)) * nt + m(zp));
    }
    std::sort(witness[yp].begin(), witness[yp].end());
    witness[yp].erase(std::unique(witness[yp].begin(), witness[yp].end()), witness[yp].end());
  }
  for (int yp = 0; yp < ns; ++yp) {
    int fy = m(yp);
    for (int z = 0; z < nt; ++z) {
      int x = sup_tgt[static_cast<std::size_t>(fy) * nt + z];
      if (x < 0) continue;
      if (!detail::sorted_contains(witness[yp], static_cast<std::uint64_t>(x) * nt + z))
        out.push_back({yp, x, z});
    }
  }
  return out;
}

inline std::vector<OrderViolation> check_order_preserving(const OrderMap& m) {
  std::vector<OrderViolation> out;
  for (int y = 0; y < m.source.size(); ++y)
    m.source.up_set(y).for_each([&](int x) {
      if (!m.target.leq(m(y), m(x))) out.push_back({y, x});
    });
  return out;
}

// Target points with empty preimage.
inline std::vector<int> check_onto(const OrderMap& m) {
  std::vector<bool> hit(m.target.size(), false);
  for (int v : m.map) hit[v] = true;
  std::vector<int> out;
  for (int i = 0; i < m.target.size(); ++i)
    if (!hit[i]) out.push_back(i);
  return out;
}

// --- formula battery ---------------------------------------------------------

struct BatteryOptions {
  int max_letters = 2;  // letters drawn from p, q, r, ... in order
  int max_depth = 2;    // modal depth bound
  int max_size = 9;     // connective count bound
  int cap = 2048;       // total formula cap
};

// Deterministic size-ascending enumeration over the core connectives
// (falsum, letters, ~, |, <*>, \). Within one size the modal operators come
// first so the battery stays modally rich when the cap cuts generation short.
inline std::vector<Formula> generate_battery(const BatteryOptions& opt = {}) {
  static const char* kLetters[] = {"p", "q", "r", "s_", "t_"};
  std::vector<Formula> atoms = {Formula::falsum()};
  for (int i = 0; i < opt.max_letters && i < 5; ++i) atoms.push_back(Formula::prop(kLetters[i]));

  std::vector<std::vector<Formula>> by_size(static_cast<std::size_t>(opt.max_size) + 1);
  by_size[0] = atoms;
  std::vector<Formula> battery = atoms;
  if (static_cast<int>(battery.size()) >= opt.cap) {
    battery.resize(opt.cap);
    return battery;
  }

  auto emit = [&](std::vector<Formula>& level, const Formula& f) {
    if (f.modal_depth() > opt.max_depth) return false;
    level.push_back(f);
    battery.push_back(f);
    return static_cast<int>(battery.size()) >= opt.cap;
  };

  for (int size = 1; size <= opt.max_size; ++size) {
    std::vector<Formula>& level = by_size[size];
    // binary connectives, modal first: sizes (i, size-1-i), i ascending
    static const Kind kBinary[] = {Kind::Fuse, Kind::Residual, Kind::Or};
    for (Kind k : kBinary)
      for (int i = 0; i + 1 <= size; ++i) {
        int j = size - 1 - i;
        for (const Formula& a : by_size[i])
          for (const Formula& b : by_size[j]) {
            Formula f = k == Kind::Fuse       ? Formula::fuse(a, b)
                        : k == Kind::Residual ? Formula::residual(a, b)
                                              : Formula::lor(a, b);
            if (emit(level, f)) return battery;
          }
      }
    for (const Formula& a : by_size[size - 1])
      if (emit(level, Formula::neg(a))) return battery;
  }
  return battery;
}

// --- truth preservation --------------------------------------------------------

struct PreservationFailure {
  std::size_t formula;  // index into the battery
  int point;            // source point where the two sides disagree
  bool source_value, target_value;
};

struct PreservationReport {
  std::vector<PreservationFailure> failures;
  std::size_t formulas_checked = 0;
  std::size_t points_checked = 0;
  bool ok() const { return failures.empty(); }
};

// Evaluates every battery formula in the target model and in the source
// model carrying the pulled-back valuation V'(p) = f^-1(V(p)), and compares
// pointwise along the map.
inline PreservationReport truth_preservation_suite(
    const OrderMap& m, const std::map<std::string, std::uint64_t>& target_valuation,
    const std::vector<Formula>& battery, Mode mode = Mode::Sup) {
  std::map<std::string, std::uint64_t> source_valuation;
  for (const auto& [letter, tmask] : target_valuation) {
    std::uint64_t smask = 0;
    for (int i = 0; i < m.source.size(); ++i)
      if ((tmask >> m(i)) & 1u) smask |= 1ULL << i;
    source_valuation[letter] = smask;
  }
  Model src(m.source, std::move(source_valuation));
  Model tgt(m.target, target_valuation);
  Evaluator::SharedTable fus_src = Evaluator::make_table(m.source, mode);
  Evaluator::SharedTable fus_tgt = Evaluator::make_table(m.target, mode);

  auto run = [](const Model& mod, const Formula& f, int n, const Evaluator::SharedTable& fus) {
    Evaluator ev(f, n, fus);
    std::vector<std::uint64_t> masks;
    masks.reserve(ev.letters().size());
    for (const auto& l : ev.letters()) masks.push_back(mod.val(l));
    return ev.eval(masks);
  };

  PreservationReport report;
  for (std::size_t fi = 0; fi < battery.size(); ++fi) {
    std::uint64_t se = run(src, battery[fi], m.source.size(), fus_src);
    std::uint64_t te = run(tgt, battery[fi], m.target.size(), fus_tgt);
    for (int i = 0; i < m.source.size(); ++i) {
      bool sv = (se >> i) & 1u;
      bool tv = (te >> m(i)) & 1u;
      if (sv != tv) report.failures.push_back({fi, i, sv, tv});
      ++report.points_checked;
    }
    ++report.formulas_checked;
  }
  return report;
}

}  // namespace milw
