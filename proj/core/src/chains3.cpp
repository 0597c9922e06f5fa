#include "stripemat/chains3.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace stripemat {
namespace {

constexpr long kBig = 1L << 20;

using Family = ChainLetter::Family;

int chain_of(Family f) {
  switch (f) {
    case Family::row_a0:
    case Family::row_as:
      return 0;
    case Family::row_bs:
    case Family::row_b0:
    case Family::row_bt:
      return 1;
    case Family::col_ar:
    case Family::col_a0:
      return 2;
    case Family::col_b0:
    case Family::col_br:
      return 3;
  }
  return -1;
}

long chain_pos(const ChainLetter& l) {
  switch (l.family) {
    case Family::row_a0:
      return 0;
    case Family::row_as:
      return kBig - l.exp;
    case Family::row_bs:
      return l.exp;
    case Family::row_b0:
      return kBig;
    case Family::row_bt:
      return 2 * kBig - l.exp;
    case Family::col_ar:
      return l.exp;
    case Family::col_a0:
      return l.dec == 0 ? kBig : 2 * kBig - l.dec;
    case Family::col_b0:
      return 0;
    case Family::col_br:
      return kBig - l.exp;
  }
  return 0;
}

std::vector<std::int64_t> f3_reduce(std::vector<std::int64_t> p) {
  for (auto& c : p) c = ((c % 3) + 3) % 3;
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  return p;
}

}  // namespace

bool ChainLetter::operator<(const ChainLetter& o) const {
  auto key = [](const ChainLetter& l) {
    return std::tuple<int, int, int>(static_cast<int>(l.family), l.exp, l.dec);
  };
  return key(*this) < key(o);
}

std::string letter_token(const ChainLetter& l) {
  switch (l.family) {
    case Family::row_a0:
      return "e0";
    case Family::row_as:
      return "e" + std::to_string(l.exp);
    case Family::row_bs:
      return "et" + std::to_string(l.exp);
    case Family::row_b0:
      return "e'0";
    case Family::row_bt:
      return "e'" + std::to_string(l.exp);
    case Family::col_ar:
      return "f" + std::to_string(l.exp);
    case Family::col_a0:
      return l.dec == 0 ? "f0" : "f0(" + std::to_string(l.dec) + ")";
    case Family::col_b0:
      return "f'0";
    case Family::col_br:
      return "ft" + std::to_string(l.exp);
  }
  return "?";
}

ChainLetter parse_letter(std::string_view t) {
  auto bad = [&]() -> ChainLetter {
    throw std::invalid_argument("unknown chain letter: " + std::string(t));
  };
  if (t.empty()) return bad();
  char head = t[0];
  if (head != 'e' && head != 'f') return bad();
  size_t i = 1;
  bool tilde_mark = false, prime_mark = false;
  if (i < t.size() && t[i] == 't') {
    tilde_mark = true;
    ++i;
  } else if (i < t.size() && t[i] == '\'') {
    prime_mark = true;
    ++i;
  }
  size_t dig = i;
  while (dig < t.size() && std::isdigit(static_cast<unsigned char>(t[dig]))) ++dig;
  if (dig == i) return bad();
  int num = std::stoi(std::string(t.substr(i, dig - i)));
  int dec = 0;
  if (dig < t.size()) {
    // only the f0(<r>) decoration may follow the digits
    if (head != 'f' || tilde_mark || prime_mark || num != 0) return bad();
    std::string_view rest = t.substr(dig);
    if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')') return bad();
    std::string_view inner = rest.substr(1, rest.size() - 2);
    for (char c : inner)
      if (!std::isdigit(static_cast<unsigned char>(c))) return bad();
    dec = std::stoi(std::string(inner));
    if (dec < 1) return bad();
  }
  ChainLetter l;
  l.exp = num;
  l.dec = dec;
  if (head == 'e') {
    if (tilde_mark)
      l.family = Family::row_bs;
    else if (prime_mark)
      l.family = num == 0 ? Family::row_b0 : Family::row_bt;
    else
      l.family = num == 0 ? Family::row_a0 : Family::row_as;
  } else {
    if (tilde_mark) {
      l.family = Family::col_br;
    } else if (prime_mark) {
      if (num != 0) return bad();
      l.family = Family::col_b0;
    } else {
      l.family = num == 0 ? Family::col_a0 : Family::col_ar;
    }
  }
  if (l.family == Family::row_a0 || l.family == Family::row_b0 || l.family == Family::col_a0 ||
      l.family == Family::col_b0)
    l.exp = 0;
  std::string why;
  if (!letter_valid(l, &why)) throw std::invalid_argument(why);
  return l;
}

bool letter_valid(const ChainLetter& l, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  switch (l.family) {
    case Family::row_as:
    case Family::row_bs:
    case Family::row_bt:
    case Family::col_ar:
    case Family::col_br:
      if (l.exp < 1) return fail("letter needs a positive exponent: " + letter_token(l));
      break;
    default:
      if (l.exp != 0) return fail("letter carries no exponent: " + letter_token(l));
  }
  if (l.dec != 0 && l.family != Family::col_a0)
    return fail("only f0 columns carry a decoration");
  if (l.dec < 0) return fail("negative decoration");
  return true;
}

bool letter_is_row(const ChainLetter& l) { return chain_of(l.family) < 2; }

int letter_block(const ChainLetter& l) {
  int c = chain_of(l.family);
  return (c == 0 || c == 2) ? 0 : 1;
}

bool letter_paired(const ChainLetter& l) {
  return l.family == Family::row_as || l.family == Family::row_bs || l.family == Family::col_ar ||
         l.family == Family::col_br;
}

ChainLetter letter_partner(const ChainLetter& l) {
  ChainLetter p = l;
  switch (l.family) {
    case Family::row_as:
      p.family = Family::row_bs;
      return p;
    case Family::row_bs:
      p.family = Family::row_as;
      return p;
    case Family::col_ar:
      p.family = Family::col_br;
      return p;
    case Family::col_br:
      p.family = Family::col_ar;
      return p;
    default:
      throw std::invalid_argument("letter has no partner: " + letter_token(l));
  }
}

StripeLabel letter_stripe(const ChainLetter& l) {
  switch (l.family) {
    case Family::row_a0:
      return row_sphere(0);
    case Family::row_as:
      return row_moore_n(l.exp, 0);
    case Family::row_bs:
      return row_moore_n(l.exp, 1);
    case Family::row_b0:
      return row_sphere(1);
    case Family::row_bt:
      return row_moore_n1(l.exp, 1);
    case Family::col_ar:
      return col_moore_n3(l.exp, 3);
    case Family::col_a0:
      return l.dec == 0 ? col_sphere(3) : col_dec(l.dec);
    case Family::col_b0:
      return col_sphere(4);
    case Family::col_br:
      return col_moore_n3(l.exp, 4);
  }
  return row_sphere(0);
}

bool chain_less(const ChainLetter& x, const ChainLetter& y) {
  if (chain_of(x.family) != chain_of(y.family)) return false;
  return chain_pos(x) < chain_pos(y);
}

std::string Word::print() const {
  std::string out;
  for (size_t i = 0; i < letters.size(); ++i) {
    if (i) out += tilde[i - 1] ? " ~ " : " - ";
    out += letter_token(letters[i]);
  }
  return out;
}

Word Word::parse(std::string_view text) {
  Word w;
  std::string tok;
  std::vector<std::string> toks;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) toks.push_back(tok), tok.clear();
    } else {
      tok += c;
    }
  }
  if (!tok.empty()) toks.push_back(tok);
  if (toks.empty()) throw std::invalid_argument("empty word");
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i % 2 == 0) {
      w.letters.push_back(parse_letter(toks[i]));
    } else {
      if (toks[i] == "~")
        w.tilde.push_back(true);
      else if (toks[i] == "-")
        w.tilde.push_back(false);
      else
        throw std::invalid_argument("expected '-' or '~', got: " + toks[i]);
    }
  }
  if (toks.size() % 2 == 0) throw std::invalid_argument("word ends with a relation");
  return w;
}

bool Word::valid(std::string* why) const {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  size_t n = letters.size();
  if (n == 0) return fail("empty word");
  if (tilde.size() + 1 != n) return fail("relation count mismatch");
  for (const auto& l : letters)
    if (!letter_valid(l, why)) return false;
  for (size_t i = 0; i + 1 < tilde.size(); ++i)
    if (tilde[i] == tilde[i + 1]) return fail("relations must alternate");
  for (size_t i = 0; i + 1 < n; ++i) {
    const auto &a = letters[i], &b = letters[i + 1];
    if (tilde[i]) {
      if (!letter_paired(a) || !(letter_partner(a) == b))
        return fail("'~' must join the two slots of one generator");
    } else {
      if (letter_is_row(a) == letter_is_row(b))
        return fail("'-' must join a row letter and a column letter");
      if (letter_block(a) != letter_block(b))
        return fail("'-' must stay inside one block");
    }
  }
  if (n == 1) {
    if (letter_paired(letters[0])) return fail("a single paired letter is not a word");
    return true;
  }
  if (!tilde.front() && letter_paired(letters.front()))
    return fail("paired letter at a '-' end");
  if (!tilde.back() && letter_paired(letters.back()))
    return fail("paired letter at a '-' end");
  if (tilde.front() && !letter_paired(letters.front()))
    return fail("unpaired letter cannot open a '~'");
  if (tilde.back() && !letter_paired(letters.back()))
    return fail("unpaired letter cannot close a '~'");
  return true;
}

Word Word::reversed() const {
  Word r;
  r.letters.assign(letters.rbegin(), letters.rend());
  r.tilde.assign(tilde.rbegin(), tilde.rend());
  return r;
}

Word Word::canonical() const {
  Word r = reversed();
  return r.print() < print() ? r : *this;
}

std::string BandWord::print() const {
  std::string out = "band(";
  for (size_t i = 0; i < e_exps.size(); ++i) {
    if (i) out += " - ";
    out += "e" + std::to_string(e_exps[i]);
    out += " ~ et" + std::to_string(e_exps[i]);
    out += " - ft" + std::to_string(f_exps[i]);
    out += " ~ f" + std::to_string(f_exps[i]);
  }
  out += "; z=" + std::to_string(z);
  out += "; pi=";
  for (size_t i = 0; i < pi.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(pi[i]);
  }
  out += ")";
  return out;
}

BandWord BandWord::parse(std::string_view text) {
  auto bad = [&](const std::string& m) -> BandWord { throw std::invalid_argument(m); };
  std::string s(text);
  // strip whitespace-insensitive wrapper band( ... )
  auto strip = [](std::string v) {
    std::string out;
    for (char c : v)
      if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
  };
  std::string flat = strip(s);
  if (flat.rfind("band(", 0) != 0 || flat.back() != ')') return bad("expected band(...)");
  std::string body = flat.substr(5, flat.size() - 6);
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t sep = body.find(';', start);
    if (sep == std::string::npos) {
      parts.push_back(body.substr(start));
      break;
    }
    parts.push_back(body.substr(start, sep - start));
    start = sep + 1;
  }
  if (parts.size() != 3) return bad("band needs word, z and pi fields");
  BandWord b;
  {
    // word field: e<s>~et<s>-ft<r>~f<r> repeated, '-' separated
    std::string w = parts[0];
    size_t i = 0;
    auto expect = [&](const std::string& lit) {
      if (w.compare(i, lit.size(), lit) != 0)
        throw std::invalid_argument("band word malformed near position " + std::to_string(i));
      i += lit.size();
    };
    auto number = [&]() {
      size_t j = i;
      while (j < w.size() && std::isdigit(static_cast<unsigned char>(w[j]))) ++j;
      if (j == i) throw std::invalid_argument("band word expects an exponent");
      int v = std::stoi(w.substr(i, j - i));
      i = j;
      return v;
    };
    while (i < w.size()) {
      if (!b.e_exps.empty()) expect("-");
      expect("e");
      int svar = number();
      expect("~et");
      if (number() != svar) return bad("band '~' must join equal exponents");
      expect("-ft");
      int rvar = number();
      expect("~f");
      if (number() != rvar) return bad("band '~' must join equal exponents");
      b.e_exps.push_back(svar);
      b.f_exps.push_back(rvar);
    }
  }
  {
    std::string zf = parts[1];
    if (zf.rfind("z=", 0) != 0) return bad("band z field malformed");
    b.z = std::stoi(zf.substr(2));
  }
  {
    std::string pf = parts[2];
    if (pf.rfind("pi=", 0) != 0) return bad("band pi field malformed");
    std::string body2 = pf.substr(3);
    size_t p = 0;
    while (p <= body2.size()) {
      size_t c = body2.find(',', p);
      std::string piece = body2.substr(p, c == std::string::npos ? std::string::npos : c - p);
      if (piece.empty()) return bad("band pi field malformed");
      b.pi.push_back(std::stoll(piece));
      if (c == std::string::npos) break;
      p = c + 1;
    }
  }
  std::string why;
  if (!b.valid(&why)) return bad(why);
  return b;
}

bool BandWord::valid(std::string* why) const {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  size_t m = e_exps.size();
  if (m == 0 || f_exps.size() != m) return fail("band needs matching exponent lists");
  for (int s : e_exps)
    if (s < 1) return fail("band exponents must be positive");
  for (int r : f_exps)
    if (r < 1) return fail("band exponents must be positive");
  if (z < 1) return fail("band multiplicity must be positive");
  auto p = f3_reduce(pi);
  if (p.size() < 2) return fail("band pi must have positive degree");
  if (p != pi) return fail("band pi must be reduced mod 3");
  if (p.back() != 1) return fail("band pi must be monic");
  if (p.front() == 0) return fail("band pi must have nonzero constant term");
  if (!f3poly_irreducible(p)) return fail("band pi must be irreducible");
  // primitivity of the cyclic exponent pattern
  for (size_t per = 1; per < m; ++per) {
    if (m % per != 0) continue;
    bool repeats = true;
    for (size_t i = 0; i < m && repeats; ++i)
      if (e_exps[i] != e_exps[(i + per) % m] || f_exps[i] != f_exps[(i + per) % m]) repeats = false;
    if (repeats) return fail("band word must be primitive");
  }
  return true;
}

BandWord BandWord::canonical() const {
  size_t m = e_exps.size();
  BandWord best = *this;
  bool first = true;
  auto key = [](const BandWord& b) {
    return std::tuple<std::vector<int>, std::vector<int>, std::vector<std::int64_t>>(
        b.e_exps, b.f_exps, b.pi);
  };
  auto consider = [&](const BandWord& b) {
    if (first || key(b) < key(best)) best = b, first = false;
  };
  // only rotations identify bands. Reading the cycle backwards can never be
  // rewritten into the e ~ et - ft ~ f pattern, and the matrices confirm it:
  // the tilde glue applies one base change to both linked stripes, leaving
  // the oriented cycle product invariant up to conjugation, so a band and
  // its reversed cycle (reciprocal pi) are genuinely distinct summands.
  for (size_t rot = 0; rot < m; ++rot) {
    BandWord b = *this;
    for (size_t i = 0; i < m; ++i) {
      b.e_exps[i] = e_exps[(i + rot) % m];
      b.f_exps[i] = f_exps[(i + rot) % m];
    }
    consider(b);
  }
  return best;
}

std::vector<Word> enumerate_words(int max_letters, int max_exp) {
  std::vector<ChainLetter> alphabet;
  auto push = [&](Family f, int e) {
    ChainLetter l;
    l.family = f;
    l.exp = e;
    alphabet.push_back(l);
  };
  push(Family::row_a0, 0);
  push(Family::row_b0, 0);
  push(Family::col_a0, 0);
  push(Family::col_b0, 0);
  for (int e = 1; e <= max_exp; ++e) {
    push(Family::row_as, e);
    push(Family::row_bs, e);
    push(Family::row_bt, e);
    push(Family::col_ar, e);
    push(Family::col_br, e);
  }
  std::vector<Word> out;
  std::set<std::string> seen;
  Word cur;
  auto emit = [&]() {
    if (!cur.valid()) return;
    Word c = cur.canonical();
    std::string k = c.print();
    if (seen.insert(k).second) out.push_back(c);
  };
  // grow words letter by letter; relations alternate so the continuation is
  // forced to a '~' partner after '-' and to a block-mate after '~'
  std::function<void()> grow = [&]() {
    emit();
    if (static_cast<int>(cur.letters.size()) >= max_letters) return;
    const ChainLetter last = cur.letters.back();
    bool last_rel_tilde = !cur.tilde.empty() && cur.tilde.back();
    bool can_dash = cur.tilde.empty() || last_rel_tilde;
    bool can_tilde = cur.tilde.empty() || !last_rel_tilde;
    if (can_tilde && letter_paired(last)) {
      cur.letters.push_back(letter_partner(last));
      cur.tilde.push_back(true);
      grow();
      cur.letters.pop_back();
      cur.tilde.pop_back();
    }
    if (can_dash) {
      for (const auto& l : alphabet) {
        if (letter_is_row(l) == letter_is_row(last)) continue;
        if (letter_block(l) != letter_block(last)) continue;
        cur.letters.push_back(l);
        cur.tilde.push_back(false);
        grow();
        cur.letters.pop_back();
        cur.tilde.pop_back();
      }
    }
  };
  for (const auto& l : alphabet) {
    cur.letters = {l};
    cur.tilde.clear();
    grow();
  }
  std::sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
    auto ka = std::make_pair(a.letters.size(), a.print());
    auto kb = std::make_pair(b.letters.size(), b.print());
    return ka < kb;
  });
  return out;
}

std::vector<BandWord> enumerate_bands(int max_pairs, int max_exp, int max_deg, int max_z) {
  std::vector<BandWord> out;
  std::set<std::string> seen;
  auto pis = f3_irreducibles(max_deg);
  for (int m = 1; m <= max_pairs; ++m) {
    std::vector<int> e(m, 1), f(m, 1);
    auto bump = [&](std::vector<int>& v) {
      for (int i = 0; i < m; ++i) {
        if (v[i] < max_exp) {
          ++v[i];
          std::fill(v.begin(), v.begin() + i, 1);
          return true;
        }
      }
      return false;
    };
    while (true) {
      std::fill(f.begin(), f.end(), 1);
      while (true) {
        for (const auto& pi : pis) {
          for (int z = 1; z <= max_z; ++z) {
            BandWord b;
            b.e_exps = e;
            b.f_exps = f;
            b.pi = pi;
            b.z = z;
            if (!b.valid()) continue;
            BandWord c = b.canonical();
            std::string k = c.print();
            if (seen.insert(k).second) out.push_back(c);
          }
        }
        if (!bump(f)) break;
      }
      if (!bump(e)) break;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const BandWord& a, const BandWord& b) { return a.print() < b.print(); });
  return out;
}

namespace {

// letter occurrence -> (stripe, offset) assignment shared by both slots of a
// generator occurrence
struct Placement {
  std::vector<std::pair<StripeLabel, int>> at;  // per letter position
  std::vector<Stripe> rows, cols;
};

Placement place_letters(const std::vector<ChainLetter>& letters, const std::vector<bool>& tilde,
                        int copies) {
  Placement pl;
  pl.at.resize(letters.size(), {row_sphere(0), -1});
  std::map<std::string, int> dims;  // by label token, rows and cols disjoint
  auto take = [&](const StripeLabel& st) {
    std::string k = (st.side == Side::row ? "r:" : "c:") + label_token(st);
    int off = dims[k];
    dims[k] += copies;
    return off;
  };
  size_t i = 0;
  while (i < letters.size()) {
    bool pair_here = i + 1 < letters.size() && !tilde.empty() && tilde[i];
    if (pair_here) {
      StripeLabel a = letter_stripe(letters[i]);
      StripeLabel b = letter_stripe(letters[i + 1]);
      // both slots of one generator share the occurrence offset
      std::string ka = (a.side == Side::row ? "r:" : "c:") + label_token(a);
      std::string kb = (b.side == Side::row ? "r:" : "c:") + label_token(b);
      int off = std::max(dims[ka], dims[kb]);
      dims[ka] = off + copies;
      dims[kb] = off + copies;
      pl.at[i] = {a, off};
      pl.at[i + 1] = {b, off};
      i += 2;
    } else {
      StripeLabel a = letter_stripe(letters[i]);
      pl.at[i] = {a, take(a)};
      i += 1;
    }
  }
  std::map<std::string, std::pair<StripeLabel, int>> best;
  for (size_t j = 0; j < letters.size(); ++j) {
    StripeLabel st = pl.at[j].first;
    std::string k = (st.side == Side::row ? "r:" : "c:") + label_token(st);
    int need = pl.at[j].second + copies;
    auto it = best.find(k);
    if (it == best.end())
      best[k] = {st, need};
    else
      it->second.second = std::max(it->second.second, need);
  }
  for (const auto& [k, v] : best) {
    if (v.first.side == Side::row)
      pl.rows.push_back({v.first, v.second});
    else
      pl.cols.push_back({v.first, v.second});
  }
  return pl;
}

}  // namespace

BlockMatrix realize_string(const Word& w) {
  std::string why;
  if (!w.valid(&why)) throw std::invalid_argument("invalid word: " + why);
  Placement pl = place_letters(w.letters, w.tilde, 1);
  BlockMatrix m = BlockMatrix::make(Variant::local3, pl.rows, pl.cols);
  for (size_t i = 0; i + 1 < w.letters.size(); ++i) {
    if (w.tilde[i]) continue;
    size_t r = letter_is_row(w.letters[i]) ? i : i + 1;
    size_t c = letter_is_row(w.letters[i]) ? i + 1 : i;
    m.set_at(pl.at[r].first, pl.at[r].second, pl.at[c].first, pl.at[c].second, 1);
  }
  return m;
}

BlockMatrix realize_band(const BandWord& b) {
  std::string why;
  if (!b.valid(&why)) throw std::invalid_argument("invalid band: " + why);
  auto piz = std::vector<std::int64_t>{1};
  for (int i = 0; i < b.z; ++i) piz = f3poly_mul(piz, b.pi);
  int d = static_cast<int>(piz.size()) - 1;
  // companion matrix of pi^z, acting on column vectors
  std::vector<std::vector<std::int64_t>> comp(d, std::vector<std::int64_t>(d, 0));
  for (int i = 0; i + 1 < d; ++i) comp[i + 1][i] = 1;
  for (int i = 0; i < d; ++i) comp[i][d - 1] = ((-piz[i]) % 3 + 3) % 3;

  size_t m = b.e_exps.size();
  std::vector<ChainLetter> letters;
  std::vector<bool> tilde;
  for (size_t i = 0; i < m; ++i) {
    ChainLetter e, et, ft, f;
    e.family = Family::row_as;
    e.exp = b.e_exps[i];
    et.family = Family::row_bs;
    et.exp = b.e_exps[i];
    ft.family = Family::col_br;
    ft.exp = b.f_exps[i];
    f.family = Family::col_ar;
    f.exp = b.f_exps[i];
    letters.insert(letters.end(), {e, et, ft, f});
    if (i) tilde.insert(tilde.end(), {false, true, false, true});
  }
  tilde.insert(tilde.begin(), {true, false, true});
  Placement pl = place_letters(letters, tilde, d);
  BlockMatrix mat = BlockMatrix::make(Variant::local3, pl.rows, pl.cols);
  auto put_block = [&](size_t rpos, size_t cpos, bool companion) {
    for (int a = 0; a < d; ++a)
      for (int bb = 0; bb < d; ++bb) {
        std::int64_t v = companion ? comp[a][bb] : (a == bb ? 1 : 0);
        if (v)
          mat.set_at(pl.at[rpos].first, pl.at[rpos].second + a, pl.at[cpos].first,
                     pl.at[cpos].second + bb, v);
      }
  };
  for (size_t i = 0; i < m; ++i) {
    // slot-1 edge et_{s_i} - ft_{r_i}
    put_block(4 * i + 1, 4 * i + 2, false);
    // slot-0 edge f_{r_i} - e_{s_{i+1}}; the closing edge carries pi^z
    size_t next_e = 4 * ((i + 1) % m);
    put_block(next_e, 4 * i + 3, i + 1 == m);
  }
  return mat;
}

bool string_iso(const Word& a, const Word& b) {
  if (!a.valid() || !b.valid()) return false;
  return a == b || a == b.reversed();
}

bool band_iso(const BandWord& a, const BandWord& b) {
  if (!a.valid() || !b.valid()) return false;
  return a.canonical() == b.canonical();
}

std::vector<std::int64_t> f3poly_mul(const std::vector<std::int64_t>& a,
                                     const std::vector<std::int64_t>& b) {
  std::vector<std::int64_t> out(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % 3;
  return f3_reduce(out);
}

namespace {

std::vector<std::int64_t> f3poly_mod(std::vector<std::int64_t> a,
                                     const std::vector<std::int64_t>& b) {
  a = f3_reduce(a);
  while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
    std::int64_t lead = a.back();  // b is monic
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i)
      a[shift + i] = ((a[shift + i] - lead * b[i]) % 3 + 3) % 3;
    a = f3_reduce(a);
    if (a.size() == 1) break;
  }
  return a;
}

bool f3poly_zero(const std::vector<std::int64_t>& p) { return p.size() == 1 && p[0] == 0; }

void all_monic(int deg, std::vector<std::vector<std::int64_t>>& out) {
  std::vector<std::int64_t> p(deg + 1, 0);
  p[deg] = 1;
  std::function<void(int)> rec = [&](int i) {
    if (i == deg) {
      out.push_back(p);
      return;
    }
    for (int c = 0; c < 3; ++c) {
      p[i] = c;
      rec(i + 1);
    }
    p[i] = 0;
  };
  rec(0);
}

}  // namespace

bool f3poly_irreducible(const std::vector<std::int64_t>& p0) {
  auto p = f3_reduce(p0);
  int deg = static_cast<int>(p.size()) - 1;
  if (deg < 1) return false;
  if (p.back() != 1) return false;  // monic only
  if (deg == 1) return true;
  for (int d = 1; d <= deg / 2; ++d) {
    std::vector<std::vector<std::int64_t>> divs;
    all_monic(d, divs);
    for (const auto& q : divs)
      if (f3poly_zero(f3poly_mod(p, q))) return false;
  }
  return true;
}

std::vector<std::int64_t> f3poly_reciprocal(const std::vector<std::int64_t>& p0) {
  auto p = f3_reduce(p0);
  std::vector<std::int64_t> r(p.rbegin(), p.rend());
  // normalize to monic; the constant term of p is a unit for band polynomials
  std::int64_t lead = r.back();
  if (lead == 0) throw std::invalid_argument("reciprocal needs a nonzero constant term");
  std::int64_t inv = lead == 1 ? 1 : 2;  // inverses mod 3
  for (auto& c : r) c = (c * inv) % 3;
  return f3_reduce(r);
}

std::vector<std::vector<std::int64_t>> f3_irreducibles(int max_deg) {
  std::vector<std::vector<std::int64_t>> out;
  for (int d = 1; d <= max_deg; ++d) {
    std::vector<std::vector<std::int64_t>> cand;
    all_monic(d, cand);
    for (const auto& p : cand) {
      if (p.front() == 0) continue;  // excludes pi = x and non-units
      if (f3poly_irreducible(p)) out.push_back(p);
    }
  }
  return out;
}

}  // namespace stripemat
