#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "formula.hpp"
#include "order.hpp"

namespace milw {

// Which reading the binary diamond gets: witnesses fuse at a minimal upper
// bound or at the least upper bound. On preorders both use the quasi
// versions, which coincide with the plain ones on posets.
enum class Mode { Mub, Sup };

inline const char* mode_name(Mode m) { return m == Mode::Mub ? "mub" : "sup"; }

// Point sets are machine words, so model checking is capped at 64 points.
inline constexpr int kMaxModelPoints = 64;

inline std::uint64_t full_mask(int n) {
  return n >= 64 ? ~0ULL : (1ULL << n) - 1;
}

// A frame plus a valuation. Letters absent from the map denote the empty set.
struct Model {
  FinOrder frame;
  std::map<std::string, std::uint64_t> valuation;

  Model(FinOrder f, std::map<std::string, std::uint64_t> val)
      : frame(std::move(f)), valuation(std::move(val)) {
    if (frame.size() > kMaxModelPoints)
      throw cap_exceeded("model has " + std::to_string(frame.size()) + " points; cap is " +
                         std::to_string(kMaxModelPoints));
    if (!frame.is_preorder()) throw error("model frame must be reflexive and transitive");
    std::uint64_t full = full_mask(frame.size());
    for (auto& [letter, mask] : valuation)
      if (mask & ~full) throw error("valuation of " + letter + " mentions points out of range");
  }

  static Model from_sets(FinOrder f, const std::map<std::string, std::vector<int>>& sets) {
    std::map<std::string, std::uint64_t> val;
    for (const auto& [letter, points] : sets) {
      std::uint64_t m = 0;
      for (int p : points) m |= 1ULL << p;
      val[letter] = m;
    }
    return Model(std::move(f), std::move(val));
  }

  std::uint64_t val(const std::string& letter) const {
    auto it = valuation.find(letter);
    return it == valuation.end() ? 0 : it->second;
  }
};

// fus[t*n+u] = point mask of the fusion targets of (t, u) -- quasi-minimal
// (Mub) or quasi-least (Sup) upper bounds. Symmetric in t, u.
inline std::vector<std::uint64_t> fusion_table(const FinOrder& F, Mode mode) {
  int n = F.size();
  if (n > kMaxModelPoints)
    throw cap_exceeded("fusion table capped at " + std::to_string(kMaxModelPoints) + " points");
  if (!F.is_preorder()) throw error("fusion table requires a preorder");
  std::vector<std::uint64_t> fus(static_cast<std::size_t>(n) * n);
  for (int t = 0; t < n; ++t)
    for (int u = t; u < n; ++u) {
      Bitset b = mode == Mode::Mub ? F.quasi_mub_set(t, u) : F.quasi_sup_set(t, u);
      std::uint64_t m = b.word0();
      fus[static_cast<std::size_t>(t) * n + u] = m;
      fus[static_cast<std::size_t>(u) * n + t] = m;
    }
  return fus;
}

// A formula compiled against one frame and one mode: the desugared tree is
// flattened to a postorder op array evaluated on point masks, and the fusion
// relation is looked up in a precomputed table. Reused across valuations;
// the table can be shared across evaluators for the same frame and mode.
class Evaluator {
public:
  using SharedTable = std::shared_ptr<const std::vector<std::uint64_t>>;

  static SharedTable make_table(const FinOrder& frame, Mode mode) {
    return std::make_shared<const std::vector<std::uint64_t>>(fusion_table(frame, mode));
  }

  Evaluator(const Formula& f, const FinOrder& frame, Mode mode)
      : Evaluator(f, frame.size(), make_table(frame, mode)) {}

  Evaluator(const Formula& f, int n, SharedTable fus) : n_(n), fus_(std::move(fus)) {
    for (const auto& l : f.prop_letters()) {
      slot_of_[l] = static_cast<int>(letters_.size());
      letters_.push_back(l);
    }
    compile(f.desugar());
  }

  const std::vector<std::string>& letters() const { return letters_; }

  // masks[i] is the extension of letters()[i]; returns the formula's extension.
  std::uint64_t eval(const std::vector<std::uint64_t>& masks) const {
    std::vector<std::uint64_t> value(ops_.size());
    std::uint64_t full = full_mask(n_);
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const Op& op = ops_[i];
      switch (op.kind) {
        case Kind::Falsum:
          value[i] = 0;
          break;
        case Kind::Prop:
          value[i] = masks[op.slot];
          break;
        case Kind::Not:
          value[i] = ~value[op.left] & full;
          break;
        case Kind::Or:
          value[i] = value[op.left] | value[op.right];
          break;
        case Kind::Fuse: {
          std::uint64_t out = 0;
          for (std::uint64_t tb = value[op.left]; tb; tb &= tb - 1) {
            int t = std::countr_zero(tb);
            const std::uint64_t* row = fus_->data() + static_cast<std::size_t>(t) * n_;
            for (std::uint64_t ub = value[op.right]; ub; ub &= ub - 1)
              out |= row[std::countr_zero(ub)];
          }
          value[i] = out;
          break;
        }
        case Kind::Residual: {
          // u is in the extension iff every fusion of a left-witness with u
          // lands inside the right extension.
          std::uint64_t out = 0;
          std::uint64_t bad = ~value[op.right];
          for (int u = 0; u < n_; ++u) {
            bool ok = true;
            for (std::uint64_t tb = value[op.left]; tb && ok; tb &= tb - 1) {
              int t = std::countr_zero(tb);
              if ((*fus_)[static_cast<std::size_t>(t) * n_ + u] & bad) ok = false;
            }
            if (ok) out |= 1ULL << u;
          }
          value[i] = out;
          break;
        }
        default:
          break;  // unreachable: input is desugared
      }
    }
    return ops_.empty() ? 0 : value.back();
  }

private:
  struct Op {
    Kind kind;
    int slot = -1;  // Prop
    int left = -1, right = -1;
  };

  int compile(const Formula& f) {
    Op op;
    op.kind = f.kind();
    switch (f.kind()) {
      case Kind::Falsum:
        break;
      case Kind::Prop:
        op.slot = slot_of_.at(f.name());
        break;
      case Kind::Not:
        op.left = compile(f.child());
        break;
      case Kind::Or:
      case Kind::Fuse:
      case Kind::Residual:
        op.left = compile(f.left());
        op.right = compile(f.right());
        break;
      default:
        throw error("evaluator expects a desugared formula");
    }
    ops_.push_back(op);
    return static_cast<int>(ops_.size()) - 1;
  }

  int n_;
  SharedTable fus_;
  std::vector<std::string> letters_;
  std::map<std::string, int> slot_of_;
  std::vector<Op> ops_;
};

// Extension of f in M: the mask of points satisfying f.
inline std::uint64_t extension(const Model& M, const Formula& f, Mode mode) {
  Evaluator ev(f, M.frame, mode);
  std::vector<std::uint64_t> masks;
  masks.reserve(ev.letters().size());
  for (const auto& l : ev.letters()) masks.push_back(M.val(l));
  return ev.eval(masks);
}

inline bool satisfies(const Model& M, int point, const Formula& f, Mode mode) {
  if (point < 0 || point >= M.frame.size())
    throw error("point index " + std::to_string(point) + " out of range");
  return (extension(M, f, mode) >> point) & 1u;
}

struct Countermodel {
  Model model;
  int point;
};

struct Verdict {
  bool valid;
  std::optional<Countermodel> witness;
};

// Exhaustive validity on one frame: every valuation of the formula's letters,
// every point. Valuations are enumerated as one integer whose bits are
// (letter-major, point-minor), ascending, so the reported countermodel is the
// first one in that order with its lowest failing point. The loop runs
// 2^(n*k) evaluations and refuses when n*k exceeds budget_nk.
inline Verdict frame_valid(const FinOrder& F, const Formula& f, Mode mode, int budget_nk = 20) {
  int n = F.size();
  std::set<std::string> letter_set = f.prop_letters();
  std::vector<std::string> letters(letter_set.begin(), letter_set.end());
  int k = static_cast<int>(letters.size());
  if (n * k > budget_nk || n * k > 62)
    throw cap_exceeded("frame_valid: " + std::to_string(n) + " points * " + std::to_string(k) +
                       " letters exceeds budget " + std::to_string(budget_nk < 62 ? budget_nk : 62));
  Evaluator ev(f, F, mode);
  std::uint64_t full = full_mask(n);
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(k));
  std::uint64_t total = 1ULL << (static_cast<unsigned>(n) * static_cast<unsigned>(k));
  for (std::uint64_t v = 0; v < total; ++v) {
    for (int j = 0; j < k; ++j) masks[j] = (v >> (j * n)) & full;
    std::uint64_t ext = ev.eval(masks);
    if (ext != full) {
      int point = std::countr_zero(~ext & full);
      std::map<std::string, std::uint64_t> val;
      for (int j = 0; j < k; ++j) val[ev.letters()[j]] = masks[j];
      return {false, Countermodel{Model(F, std::move(val)), point}};
    }
  }
  return {true, std::nullopt};
}

// Validity over all orders of the given kind with 1..max_n points, one
// representative per isomorphism class, in enumeration order; the first
// failing (frame, valuation, point) is returned.
inline Verdict class_valid_upto(int max_n, const Formula& f, Mode mode, OrderKind kind,
                                int size_cap = 7, int budget_nk = 20) {
  std::optional<Countermodel> found;
  for (int n = 1; n <= max_n && !found; ++n) {
    enumerate_orders(n, kind, /*dedup_iso=*/true, [&](const FinOrder& F) {
      Verdict v = frame_valid(F, f, mode, budget_nk);
      if (!v.valid) {
        found = std::move(v.witness);
        return false;
      }
      return true;
    }, size_cap);
  }
  if (found) return {false, std::move(found)};
  return {true, std::nullopt};
}

}  // namespace milw
