#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stripemat/blockmat.hpp"

namespace stripemat {

// Letters of the four line chains of the 3-local problem. Rows fall into the
// slot-0 chain (feeding the degree-n columns block) and the slot-1 chain;
// columns likewise. Letters with a partner() are the two slots of one
// generator family and always travel together.
struct ChainLetter {
  enum class Family {
    row_a0,  // merged degree-n sphere row            e0
    row_as,  // M3^s[n]@0                             e<s>
    row_bs,  // M3^s[n]@1                             et<s>
    row_b0,  // merged degree-(n+1) sphere row        e'0
    row_bt,  // M3^t[n+1]@1                           e'<t>
    col_ar,  // M3^r[n+3]@3                           f<r>
    col_a0,  // S+3 column                            f0, decorated f0(<r>)
    col_b0,  // S+4 column                            f'0
    col_br,  // M3^r[n+3]@4                           ft<r>
  };
  Family family = Family::row_a0;
  int exp = 0;  // s, t or r for the Moore families
  int dec = 0;  // decoration on f0 columns produced by integer-cell reduction

  bool operator==(const ChainLetter&) const = default;
  bool operator<(const ChainLetter& o) const;
};

std::string letter_token(const ChainLetter& l);
ChainLetter parse_letter(std::string_view token);
bool letter_valid(const ChainLetter& l, std::string* why = nullptr);

bool letter_is_row(const ChainLetter& l);
// 0 for the slot-0/slot-3 block, 1 for the slot-1/slot-4 block.
int letter_block(const ChainLetter& l);
bool letter_paired(const ChainLetter& l);
ChainLetter letter_partner(const ChainLetter& l);  // e<s> <-> et<s>, f<r> <-> ft<r>
// Stripe and slot the letter occupies in a 3-local matrix.
StripeLabel letter_stripe(const ChainLetter& l);

// True when x may donate its line into y's line (same chain assumed).
bool chain_less(const ChainLetter& x, const ChainLetter& y);

// A string word: letters joined by alternating relations, '~' closing the
// two slots of one generator and '-' recording a unit entry between a row
// and a column of one block. Unpaired letters appear only at the ends.
struct Word {
  std::vector<ChainLetter> letters;
  std::vector<bool> tilde;  // tilde[i] joins letters[i] and letters[i+1]

  std::string print() const;
  static Word parse(std::string_view text);
  bool valid(std::string* why = nullptr) const;
  Word reversed() const;
  Word canonical() const;  // the lesser of the word and its reversal
  bool operator==(const Word&) const = default;
};

// A band: a cyclic word of m generator pairs per side,
//   e{s1} ~ et{s1} - ft{r1} ~ f{r1} - e{s2} ... f{rm} - (back to e{s1}),
// carrying an invariant factor pi^z with pi monic irreducible over F3,
// pi != x. The closing edge holds the companion matrix of pi^z.
struct BandWord {
  std::vector<int> e_exps;  // s1..sm
  std::vector<int> f_exps;  // r1..rm
  std::vector<std::int64_t> pi;  // monic, low to high, constant term nonzero
  int z = 1;

  std::string print() const;
  static BandWord parse(std::string_view text);
  bool valid(std::string* why = nullptr) const;
  BandWord canonical() const;  // minimal under rotation and inversion
  bool operator==(const BandWord&) const = default;
};

// All valid undecorated words with at most max_letters letters and Moore
// exponents at most max_exp, one representative per reversal class.
std::vector<Word> enumerate_words(int max_letters, int max_exp);
// All bands with at most max_pairs pairs per side, exponents at most
// max_exp, deg(pi) at most max_deg and multiplicity at most max_z, one
// representative per rotation/inversion class.
std::vector<BandWord> enumerate_bands(int max_pairs, int max_exp, int max_deg, int max_z);

// Undecorated words and bands realize as 3-local block matrices: one line
// per letter occurrence, a unit entry per '-' edge (the band's closing edge
// carries the companion block).
BlockMatrix realize_string(const Word& w);
BlockMatrix realize_band(const BandWord& b);

bool string_iso(const Word& a, const Word& b);
bool band_iso(const BandWord& a, const BandWord& b);

// Polynomial helpers over F3 (coefficients low to high, reduced mod 3).
std::vector<std::int64_t> f3poly_mul(const std::vector<std::int64_t>& a,
                                     const std::vector<std::int64_t>& b);
bool f3poly_irreducible(const std::vector<std::int64_t>& p);
std::vector<std::int64_t> f3poly_reciprocal(const std::vector<std::int64_t>& p);
std::vector<std::vector<std::int64_t>> f3_irreducibles(int max_deg);  // monic, pi != x

}  // namespace stripemat
