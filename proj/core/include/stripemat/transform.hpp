#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stripemat/blockmat.hpp"

namespace stripemat {

// One admissible move. Line indices are global on the given side.
struct Step {
  enum class Kind {
    swap_lines,  // exchange lines i and j of one stripe
    scale_line,  // multiply line i by the unit k
    add_within,  // line i += k * line j, same stripe
    add_cross,   // line i += k * transfer(line j) along rules(side)[rule]
  };
  Kind kind;
  Side side;
  int i = 0;
  int j = 0;
  std::int64_t k = 1;
  int rule = -1;
};

// Precomputed move data for one matrix shape. Within-stripe moves are
// mirrored onto the linked slot of the same generator family; cross-stripe
// additions act alone. Steps built for one context only apply to matrices of
// the exact same shape.
class TransformContext {
 public:
  explicit TransformContext(const BlockMatrix& shape, bool strict_units = false);

  const std::vector<AdditionRule>& rules(Side s) const {
    return s == Side::row ? row_rules_ : col_rules_;
  }
  // Global line of the linked slot, or -1.
  int partner_line(Side s, int line) const {
    return (s == Side::row ? row_partner_ : col_partner_)[line];
  }
  // True when the line's stripe is the representative of its linked pair
  // (or unpaired); within-stripe moves are emitted for these lines only.
  bool primary_line(Side s, int line) const {
    return (s == Side::row ? row_primary_ : col_primary_)[line];
  }
  // Unit scalars admissible for scaling this line (always starts with 1).
  const std::vector<std::int64_t>& line_units(Side s, int line) const;

  void apply(BlockMatrix& m, const Step& s) const;
  BlockMatrix applied(const BlockMatrix& m, const Step& s) const;

  // Multiplier-one move set whose closure is the full orbit.
  std::vector<Step> generators() const;

  // Deterministic random walk through admissible moves.
  BlockMatrix scramble(const BlockMatrix& m, int steps, std::uint64_t seed) const;

 private:
  BlockMatrix shape_;
  bool strict_units_;
  std::vector<AdditionRule> row_rules_, col_rules_;
  std::vector<int> row_partner_, col_partner_;
  std::vector<char> row_primary_, col_primary_;
  std::vector<std::vector<std::int64_t>> row_units_, col_units_;  // per stripe
  std::vector<int> row_stripe_of_, col_stripe_of_;

  void add_cross_into(BlockMatrix& m, const AdditionRule& rule, Side side, int tgt, int src,
                      std::int64_t k) const;
};

enum class SearchStatus { ok, budget_exceeded };

struct OrbitOptions {
  std::size_t max_states = 10'000'000;
  int max_lines = 8;  // per side
  bool strict_units = false;
};

struct OrbitEquivalence {
  SearchStatus status = SearchStatus::ok;
  bool equivalent = false;
  std::size_t explored = 0;
};

struct OrbitCanonical {
  SearchStatus status = SearchStatus::ok;
  BlockMatrix canon;
  std::size_t explored = 0;
};

struct OrbitSplit {
  SearchStatus status = SearchStatus::ok;
  bool indecomposable = false;
  std::optional<BlockMatrix> witness;  // an orbit member in block form, if one exists
  std::size_t explored = 0;
};

struct OrbitDecomposition {
  SearchStatus status = SearchStatus::ok;
  std::vector<BlockMatrix> summands;
  std::size_t explored = 0;
};

// Exhaustive orbit search. Exact on anything it accepts; refuses matrices
// with an integer cell (unbounded orbit) and shapes beyond max_lines.
OrbitEquivalence orbit_equivalent(const BlockMatrix& a, const BlockMatrix& b,
                                  const OrbitOptions& opt = {});
OrbitCanonical orbit_canonical(const BlockMatrix& a, const OrbitOptions& opt = {});
OrbitSplit orbit_indecomposable(const BlockMatrix& a, const OrbitOptions& opt = {});
OrbitDecomposition orbit_decompose(const BlockMatrix& a, const OrbitOptions& opt = {});

// Splits a matrix as it stands: connected components of the graph joining
// lines through nonzero entries and linked-slot pairing. No moves applied.
std::vector<BlockMatrix> split_components(const BlockMatrix& a);

}  // namespace stripemat
