#pragma once
// Stripe labels and the per-variant shape data: which cells carry which
// residue ring, which stripe pairs are slot-linked, which cross-stripe line
// additions are admissible and with which printed coefficient, and how labels
// behave under localization at 2 and 3.
//
// A label names one homology slot of one cell-complex generator. Generators
// with two slots of interest contribute two labels that must always be
// declared together with equal dimensions; line operations mirror onto the
// partner slot.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stripemat/residue.hpp"

namespace stripemat {

enum class Variant : std::uint8_t { integral, local2, local3, integral_ext };
enum class Side : std::uint8_t { row, col };

enum class GenKind : std::uint8_t {
  sphere,       // S+k: rows k in 0..3, cols k in 3..4
  cone_eta_n2,  // two slots: @0 (content) and @2 (zero cells)
  cone_eta2_n3, // @0 and @3
  cone_eta_n3,  // @1 and @3
  moore_n,      // rows, exponent s >= 1, slots @0 and @1 (both content)
  moore_n1,     // rows, exponent t >= 1, slots @1 (content) and @2 (zero)
  moore_n3,     // cols, exponent r >= 1, slots @3 and @4 (both content)
  dec_col,      // 3-local S+3 column tied to an integer invariant factor 3^r
};

struct StripeLabel {
  Side side = Side::row;
  GenKind kind = GenKind::sphere;
  std::int16_t level = 0;  // sphere degree offset
  std::int16_t slot = 0;   // homology slot for cones and Moore spaces
  std::int16_t exp = 0;    // Moore exponent (power of 3)

  bool operator==(const StripeLabel&) const = default;
  // Canonical table order within one side.
  bool operator<(const StripeLabel& o) const;
};

std::string label_token(const StripeLabel& l);
// Throws std::invalid_argument with a "unknown label token" style message.
StripeLabel parse_label(std::string_view token, Side side);

// Convenience constructors.
StripeLabel row_sphere(int level);
StripeLabel col_sphere(int level);
StripeLabel row_cone(GenKind kind, int slot);
StripeLabel row_moore_n(int exp, int slot);
StripeLabel row_moore_n1(int exp, int slot);
StripeLabel col_moore_n3(int exp, int slot);
StripeLabel col_dec(int exp);

// True when this label may appear in a matrix of the given variant.
bool label_valid(const StripeLabel& l, Variant v);

// True for stripes all of whose cells are zero in every variant (the second
// homology slot of the cones and of the degree-(n+1) Moore rows).
bool zero_slot(const StripeLabel& l);

// The other slot of a two-slot generator, if any. Partner stripes must be
// declared together with equal dimension, and line operations mirror onto
// the partner (a no-op when the partner has only zero cells).
std::optional<StripeLabel> slot_partner(const StripeLabel& l);

// Ring of the (row, col) cell: 0 = integers, 1 = zero ring, m = Z/m.
std::int64_t cell_modulus(const StripeLabel& row, const StripeLabel& col, Variant v);

// An admissible cross-stripe addition: lines of src may be added into lines
// of tgt, entering each cell through transfer_multiplier(coeff, ., .).
struct AdditionRule {
  StripeLabel src, tgt;
  int coeff = 1;
};

// All addition rules among the given labels of one side (transitively closed;
// rules whose transfer vanishes on every present cell are still listed).
std::vector<AdditionRule> addition_rules(Variant v, Side side,
                                         const std::vector<StripeLabel>& labels);

// Scalars by which lines of a stripe may be multiplied. The lcm of the
// stripe's nonzero cell moduli determines the coprimality condition; a stripe
// carrying an integer cell only admits +-1. With strict_units, every stripe
// is restricted to +-1 (degree-style scalings).
std::vector<std::int64_t> unit_scalars(std::int64_t cell_lcm, bool has_integer_cell,
                                       bool strict_units);

// Label image under localization at p in {2, 3}; nullopt when the stripe dies.
// At p = 3 the three degree-n attaching rows merge into the S+0 label and the
// two degree-(n+1) rows into S+1.
std::optional<StripeLabel> localize_label(const StripeLabel& l, int p);

Variant localized_variant(int p);

}  // namespace stripemat
