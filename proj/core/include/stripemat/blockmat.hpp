#pragma once
// The striped block matrix with labeled stripes and ring-tagged cells, plus
// its text format and localization.
//
// Stripes are kept sorted in the canonical table order; entry coordinates are
// global line indices over the concatenated stripes. Lines of slot-partnered
// stripes are paired positionally: line i of a stripe corresponds to line i
// of its partner.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stripemat/shape.hpp"

namespace stripemat {

struct Stripe {
  StripeLabel label;
  int dim = 0;
  bool operator==(const Stripe&) const = default;
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& what, int line_, int col_)
      : std::runtime_error(what + " (line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ")"),
        line(line_), col(col_) {}
};

class BlockMatrix {
 public:
  BlockMatrix() = default;

  // Sorts stripes canonically, silently adds missing slot partners with
  // matching dimension, and validates. Throws DomainError on bad input.
  static BlockMatrix make(Variant v, std::vector<Stripe> rows, std::vector<Stripe> cols);

  Variant variant() const { return variant_; }
  const std::vector<Stripe>& row_stripes() const { return rows_; }
  const std::vector<Stripe>& col_stripes() const { return cols_; }
  int rows_total() const { return rtot_; }
  int cols_total() const { return ctot_; }

  int stripe_index(Side s, const StripeLabel& l) const;  // -1 when absent
  int stripe_dim(Side s, const StripeLabel& l) const;    // 0 when absent
  int stripe_base(Side s, int stripe_idx) const;
  // (stripe index, offset) of a global line index.
  std::pair<int, int> locate(Side s, int global) const;
  const StripeLabel& line_label(Side s, int global) const;

  std::int64_t cell_mod(int r, int c) const;
  std::int64_t get(int r, int c) const { return a_[static_cast<size_t>(r) * ctot_ + c]; }
  // Reduces into the cell ring. Writing a nonzero value into a zero cell
  // throws DomainError.
  void set(int r, int c, std::int64_t v);
  // Adds and reduces; zero cells absorb silently (transfers land here as 0).
  void add_at(int r, int c, std::int64_t delta);

  int line_of(Side s, const StripeLabel& l, int offset) const;
  void set_at(const StripeLabel& rl, int roff, const StripeLabel& cl, int coff, std::int64_t v);
  std::int64_t get_at(const StripeLabel& rl, int roff, const StripeLabel& cl, int coff) const;

  int nonzero_count() const;
  bool is_zero() const { return nonzero_count() == 0; }

  // Structural checks beyond what make() enforces; returns false with a
  // reason when an invariant is broken.
  bool validate(std::string* why = nullptr) const;

  static BlockMatrix direct_sum(const BlockMatrix& a, const BlockMatrix& b);

  // Keeps the selected lines (ascending global indices per side). Pair
  // consistency across linked stripes is the caller's responsibility and is
  // re-checked by validation.
  BlockMatrix submatrix(const std::vector<int>& row_lines, const std::vector<int>& col_lines) const;

  // Copy without dim-0 stripes.
  BlockMatrix normalized() const;

  // Canonical text form (dim-0 stripes omitted, entries sorted).
  std::string serialize() const;
  static BlockMatrix parse(std::string_view text);

  // Compact identity string: variant, stripes, values. Stable across runs.
  std::string key() const;
  const std::vector<std::int64_t>& raw() const { return a_; }
  std::vector<std::int64_t>& raw() { return a_; }

  std::string pretty() const;

  bool operator==(const BlockMatrix& o) const;

 private:
  Variant variant_ = Variant::integral;
  std::vector<Stripe> rows_, cols_;
  std::vector<int> rbase_, cbase_;
  int rtot_ = 0, ctot_ = 0;
  std::vector<std::int64_t> a_;
  std::vector<std::int64_t> mods_;  // cached cell moduli, same layout as a_

  void rebuild_cache();
};

// Result of localize(): the localized matrix plus, for every line of it, the
// stripe label and offset of the integral line it came from. At p = 3 the
// three degree-n attaching rows land in one merged S+0 stripe (members in
// label order) and the two degree-(n+1) rows in S+1.
struct LocalizedMatrix {
  BlockMatrix mat;
  std::vector<std::pair<StripeLabel, int>> row_src, col_src;
};

// Localization at p in {2, 3}. Requires an integral matrix (for the extended
// variant the integer block must be empty; the classification layer resolves
// it first).
LocalizedMatrix localize(const BlockMatrix& a, int p);

}  // namespace stripemat
