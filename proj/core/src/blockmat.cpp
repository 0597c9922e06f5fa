#include "stripemat/blockmat.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace stripemat {

namespace {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::integral: return "integral";
    case Variant::local2: return "local2";
    case Variant::local3: return "local3";
    case Variant::integral_ext: return "integral-ext";
  }
  return "?";
}

std::optional<Variant> variant_from(std::string_view s) {
  if (s == "integral") return Variant::integral;
  if (s == "local2") return Variant::local2;
  if (s == "local3") return Variant::local3;
  if (s == "integral-ext") return Variant::integral_ext;
  return std::nullopt;
}

}  // namespace

void BlockMatrix::rebuild_cache() {
  rbase_.assign(rows_.size() + 1, 0);
  for (size_t i = 0; i < rows_.size(); ++i) rbase_[i + 1] = rbase_[i] + rows_[i].dim;
  cbase_.assign(cols_.size() + 1, 0);
  for (size_t i = 0; i < cols_.size(); ++i) cbase_[i + 1] = cbase_[i] + cols_[i].dim;
  rtot_ = rbase_.empty() ? 0 : rbase_.back();
  ctot_ = cbase_.empty() ? 0 : cbase_.back();
  a_.assign(static_cast<size_t>(rtot_) * ctot_, 0);
  mods_.assign(static_cast<size_t>(rtot_) * ctot_, 1);
  for (size_t ri = 0; ri < rows_.size(); ++ri)
    for (size_t ci = 0; ci < cols_.size(); ++ci) {
      std::int64_t m = cell_modulus(rows_[ri].label, cols_[ci].label, variant_);
      for (int r = rbase_[ri]; r < rbase_[ri + 1]; ++r)
        for (int c = cbase_[ci]; c < cbase_[ci + 1]; ++c)
          mods_[static_cast<size_t>(r) * ctot_ + c] = m;
    }
}

BlockMatrix BlockMatrix::make(Variant v, std::vector<Stripe> rows, std::vector<Stripe> cols) {
  auto prep = [&](std::vector<Stripe>& ss, Side side) {
    for (auto& s : ss) {
      if (s.label.side != side) throw DomainError("stripe label on wrong side");
      if (!label_valid(s.label, v))
        throw DomainError("label not valid in this variant: " + label_token(s.label));
      if (s.dim < 0) throw DomainError("negative stripe dimension");
    }
    std::sort(ss.begin(), ss.end(), [](const Stripe& a, const Stripe& b) { return a.label < b.label; });
    for (size_t i = 1; i < ss.size(); ++i)
      if (ss[i].label == ss[i - 1].label) throw DomainError("duplicate stripe: " + label_token(ss[i].label));
    // Complete slot partners.
    std::vector<Stripe> extra;
    for (const auto& s : ss) {
      auto p = slot_partner(s.label);
      if (!p || !label_valid(*p, v)) continue;
      bool found = false;
      for (const auto& t : ss)
        if (t.label == *p) {
          if (t.dim != s.dim) throw DomainError("linked-stripe dim mismatch: " + label_token(s.label));
          found = true;
        }
      if (!found) extra.push_back({*p, s.dim});
    }
    for (const auto& e : extra) ss.push_back(e);
    std::sort(ss.begin(), ss.end(), [](const Stripe& a, const Stripe& b) { return a.label < b.label; });
  };
  prep(rows, Side::row);
  prep(cols, Side::col);
  BlockMatrix m;
  m.variant_ = v;
  m.rows_ = std::move(rows);
  m.cols_ = std::move(cols);
  m.rebuild_cache();
  return m;
}

int BlockMatrix::stripe_index(Side s, const StripeLabel& l) const {
  const auto& ss = s == Side::row ? rows_ : cols_;
  for (size_t i = 0; i < ss.size(); ++i)
    if (ss[i].label == l) return static_cast<int>(i);
  return -1;
}

int BlockMatrix::stripe_dim(Side s, const StripeLabel& l) const {
  int i = stripe_index(s, l);
  return i < 0 ? 0 : (s == Side::row ? rows_[i].dim : cols_[i].dim);
}

int BlockMatrix::stripe_base(Side s, int idx) const {
  return s == Side::row ? rbase_[idx] : cbase_[idx];
}

std::pair<int, int> BlockMatrix::locate(Side s, int global) const {
  const auto& base = s == Side::row ? rbase_ : cbase_;
  for (size_t i = 0; i + 1 < base.size(); ++i)
    if (global < base[i + 1]) return {static_cast<int>(i), global - base[i]};
  throw DomainError("line index out of range");
}

const StripeLabel& BlockMatrix::line_label(Side s, int global) const {
  auto [i, off] = locate(s, global);
  (void)off;
  return s == Side::row ? rows_[i].label : cols_[i].label;
}

std::int64_t BlockMatrix::cell_mod(int r, int c) const {
  return mods_[static_cast<size_t>(r) * ctot_ + c];
}

void BlockMatrix::set(int r, int c, std::int64_t v) {
  std::int64_t m = cell_mod(r, c);
  if (m == 1 && v != 0) throw DomainError("entry in zero cell");
  a_[static_cast<size_t>(r) * ctot_ + c] = normalize_mod(v, m);
}

void BlockMatrix::add_at(int r, int c, std::int64_t delta) {
  auto& slot = a_[static_cast<size_t>(r) * ctot_ + c];
  slot = normalize_mod(slot + delta, cell_mod(r, c));
}

int BlockMatrix::line_of(Side s, const StripeLabel& l, int offset) const {
  int i = stripe_index(s, l);
  if (i < 0) throw DomainError("no such stripe: " + label_token(l));
  const auto& ss = s == Side::row ? rows_ : cols_;
  if (offset < 0 || offset >= ss[i].dim) throw DomainError("stripe offset out of range");
  return stripe_base(s, i) + offset;
}

void BlockMatrix::set_at(const StripeLabel& rl, int roff, const StripeLabel& cl, int coff,
                         std::int64_t v) {
  set(line_of(Side::row, rl, roff), line_of(Side::col, cl, coff), v);
}

std::int64_t BlockMatrix::get_at(const StripeLabel& rl, int roff, const StripeLabel& cl,
                                 int coff) const {
  return get(line_of(Side::row, rl, roff), line_of(Side::col, cl, coff));
}

int BlockMatrix::nonzero_count() const {
  int n = 0;
  for (auto v : a_) n += v != 0;
  return n;
}

bool BlockMatrix::validate(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  auto check_side = [&](const std::vector<Stripe>& ss, Side side) -> std::optional<std::string> {
    for (size_t i = 0; i < ss.size(); ++i) {
      if (ss[i].label.side != side) return "stripe on wrong side";
      if (!label_valid(ss[i].label, variant_)) return "label not valid in variant: " + label_token(ss[i].label);
      if (i > 0 && !(ss[i - 1].label < ss[i].label)) return "stripes out of order";
      auto p = slot_partner(ss[i].label);
      if (p && label_valid(*p, variant_)) {
        int j = stripe_index(side, *p);
        int pdim = j < 0 ? 0 : (side == Side::row ? rows_[j] : cols_[j]).dim;
        if (pdim != ss[i].dim) return "linked-stripe dim mismatch: " + label_token(ss[i].label);
      }
    }
    return std::nullopt;
  };
  if (auto e = check_side(rows_, Side::row)) return fail(*e);
  if (auto e = check_side(cols_, Side::col)) return fail(*e);
  for (int r = 0; r < rtot_; ++r)
    for (int c = 0; c < ctot_; ++c) {
      std::int64_t m = cell_mod(r, c);
      std::int64_t v = get(r, c);
      if (m == 1 && v != 0) return fail("entry in zero cell");
      if (m > 1 && (v < 0 || v >= m)) return fail("entry out of ring");
    }
  return true;
}

BlockMatrix BlockMatrix::direct_sum(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.variant_ != b.variant_) throw DomainError("direct_sum: variant mismatch");
  std::map<StripeLabel, int> rdim, cdim;
  for (const auto& s : a.rows_) rdim[s.label] += s.dim;
  for (const auto& s : b.rows_) rdim[s.label] += s.dim;
  for (const auto& s : a.cols_) cdim[s.label] += s.dim;
  for (const auto& s : b.cols_) cdim[s.label] += s.dim;
  std::vector<Stripe> rows, cols;
  for (auto& [l, d] : rdim) rows.push_back({l, d});
  for (auto& [l, d] : cdim) cols.push_back({l, d});
  BlockMatrix out = make(a.variant_, rows, cols);
  auto copy_into = [&](const BlockMatrix& src, bool second) {
    for (int r = 0; r < src.rtot_; ++r)
      for (int c = 0; c < src.ctot_; ++c) {
        std::int64_t v = src.get(r, c);
        if (v == 0) continue;
        auto [ri, roff] = src.locate(Side::row, r);
        auto [ci, coff] = src.locate(Side::col, c);
        const StripeLabel& rl = src.rows_[ri].label;
        const StripeLabel& cl = src.cols_[ci].label;
        int rshift = second ? a.stripe_dim(Side::row, rl) : 0;
        int cshift = second ? a.stripe_dim(Side::col, cl) : 0;
        out.set_at(rl, roff + rshift, cl, coff + cshift, v);
      }
  };
  copy_into(a, false);
  copy_into(b, true);
  return out;
}

BlockMatrix BlockMatrix::submatrix(const std::vector<int>& row_lines,
                                   const std::vector<int>& col_lines) const {
  std::map<StripeLabel, std::vector<int>> rsel, csel;
  for (int r : row_lines) {
    auto [i, off] = locate(Side::row, r);
    rsel[rows_[i].label].push_back(off);
  }
  for (int c : col_lines) {
    auto [i, off] = locate(Side::col, c);
    csel[cols_[i].label].push_back(off);
  }
  std::vector<Stripe> rows, cols;
  for (auto& [l, offs] : rsel) rows.push_back({l, static_cast<int>(offs.size())});
  for (auto& [l, offs] : csel) cols.push_back({l, static_cast<int>(offs.size())});
  BlockMatrix out = make(variant_, rows, cols);
  for (auto& [rl, roffs] : rsel)
    for (auto& [cl, coffs] : csel)
      for (size_t i = 0; i < roffs.size(); ++i)
        for (size_t j = 0; j < coffs.size(); ++j) {
          std::int64_t v = get_at(rl, roffs[i], cl, coffs[j]);
          if (v != 0) out.set_at(rl, static_cast<int>(i), cl, static_cast<int>(j), v);
        }
  return out;
}

BlockMatrix BlockMatrix::normalized() const {
  std::vector<Stripe> rows, cols;
  for (const auto& s : rows_)
    if (s.dim > 0) rows.push_back(s);
  for (const auto& s : cols_)
    if (s.dim > 0) cols.push_back(s);
  BlockMatrix out = make(variant_, rows, cols);
  out.a_ = a_;
  return out;
}

std::string BlockMatrix::serialize() const {
  BlockMatrix n = normalized();
  std::ostringstream os;
  os << "variant " << variant_name(n.variant_) << "\n";
  for (const auto& s : n.rows_) os << "row " << label_token(s.label) << " " << s.dim << "\n";
  for (const auto& s : n.cols_) os << "col " << label_token(s.label) << " " << s.dim << "\n";
  for (int r = 0; r < n.rtot_; ++r)
    for (int c = 0; c < n.ctot_; ++c)
      if (std::int64_t v = n.get(r, c); v != 0)
        os << "entry " << r << " " << c << " " << v << "\n";
  return os.str();
}

BlockMatrix BlockMatrix::parse(std::string_view text) {
  struct DeclStripe {
    StripeLabel label;
    int dim;
    int line;
  };
  std::optional<Variant> var;
  std::vector<DeclStripe> rdecl, cdecl;
  struct Entry {
    int r, c, line, col;
    std::int64_t v;
  };
  std::vector<Entry> entries;

  int lineno = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::pair<std::string, int>> toks;  // token, 1-based column
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      if (i > start) toks.emplace_back(std::string(line.substr(start, i - start)), static_cast<int>(start + 1));
    }
    size_t next = eol + 1;
    if (toks.empty()) {
      if (eol == text.size()) break;
      pos = next;
      continue;
    }

    auto want_int = [&](size_t ti, std::int64_t lo, std::int64_t hi, const char* what) {
      if (ti >= toks.size()) throw ParseError(std::string("missing ") + what, lineno, static_cast<int>(line.size() + 1));
      std::int64_t v = 0;
      const auto& [t, c] = toks[ti];
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || p != t.data() + t.size())
        throw ParseError(std::string("expected integer for ") + what, lineno, c);
      if (v < lo || v > hi) throw ParseError(std::string(what) + " out of range", lineno, c);
      return v;
    };

    const std::string& kw = toks[0].first;
    if (kw == "variant") {
      if (var) throw ParseError("duplicate variant line", lineno, toks[0].second);
      if (toks.size() != 2) throw ParseError("variant line needs one argument", lineno, toks[0].second);
      var = variant_from(toks[1].first);
      if (!var) throw ParseError("unknown variant: " + toks[1].first, lineno, toks[1].second);
    } else if (kw == "row" || kw == "col") {
      if (!var) throw ParseError("variant line must come first", lineno, toks[0].second);
      if (toks.size() != 3) throw ParseError(kw + " line needs label and dim", lineno, toks[0].second);
      Side side = kw == "row" ? Side::row : Side::col;
      StripeLabel l;
      try {
        l = parse_label(toks[1].first, side);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lineno, toks[1].second);
      }
      if (!label_valid(l, *var))
        throw ParseError("label not valid in this variant: " + toks[1].first, lineno, toks[1].second);
      int dim = static_cast<int>(want_int(2, 0, 1 << 20, "dim"));
      auto& decl = side == Side::row ? rdecl : cdecl;
      for (const auto& d : decl)
        if (d.label == l) throw ParseError("duplicate stripe: " + toks[1].first, lineno, toks[1].second);
      decl.push_back({l, dim, lineno});
    } else if (kw == "entry") {
      if (!var) throw ParseError("variant line must come first", lineno, toks[0].second);
      if (toks.size() != 4) throw ParseError("entry line needs row, col, value", lineno, toks[0].second);
      Entry e;
      e.r = static_cast<int>(want_int(1, 0, 1 << 20, "row index"));
      e.c = static_cast<int>(want_int(2, 0, 1 << 20, "col index"));
      e.v = want_int(3, std::numeric_limits<std::int64_t>::min() / 4,
                     std::numeric_limits<std::int64_t>::max() / 4, "value");
      e.line = lineno;
      e.col = toks[1].second;
      entries.push_back(e);
    } else {
      throw ParseError("unknown directive: " + kw, lineno, toks[0].second);
    }
    if (eol == text.size()) break;
    pos = next;
  }
  if (!var) throw ParseError("missing variant line", lineno, 1);

  // Strict partner check before construction, reported at the declaring line.
  auto partner_check = [&](const std::vector<DeclStripe>& decl, const char* side_name) {
    for (const auto& d : decl) {
      auto p = slot_partner(d.label);
      if (!p || !label_valid(*p, *var)) continue;
      int pdim = 0;
      bool found = false;
      for (const auto& e : decl)
        if (e.label == *p) {
          pdim = e.dim;
          found = true;
        }
      if (!found || pdim != d.dim)
        throw ParseError(std::string("linked-stripe dim mismatch on ") + side_name + ": " +
                             label_token(d.label),
                         d.line, 1);
    }
  };
  partner_check(rdecl, "row");
  partner_check(cdecl, "col");

  std::vector<Stripe> rows, cols;
  for (const auto& d : rdecl) rows.push_back({d.label, d.dim});
  for (const auto& d : cdecl) cols.push_back({d.label, d.dim});
  BlockMatrix m;
  try {
    m = make(*var, rows, cols);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 1, 1);
  }

  // Entry coordinates refer to declaration order; remap to canonical order.
  auto build_map = [&](const std::vector<DeclStripe>& decl, Side side) {
    std::vector<int> map;
    for (const auto& d : decl) {
      int base = m.stripe_base(side, m.stripe_index(side, d.label));
      for (int k = 0; k < d.dim; ++k) map.push_back(base + k);
    }
    return map;
  };
  std::vector<int> rmap = build_map(rdecl, Side::row), cmap = build_map(cdecl, Side::col);

  for (const auto& e : entries) {
    if (e.r >= static_cast<int>(rmap.size()) || e.c >= static_cast<int>(cmap.size()))
      throw ParseError("entry index out of range", e.line, e.col);
    int r = rmap[e.r], c = cmap[e.c];
    std::int64_t mod = m.cell_mod(r, c);
    if (mod == 1 && e.v != 0) throw ParseError("entry in Zero cell", e.line, e.col);
    if (mod > 1 && (e.v < 0 || e.v >= mod)) throw ParseError("entry out of ring", e.line, e.col);
    if (m.get(r, c) != 0) throw ParseError("duplicate entry", e.line, e.col);
    m.set(r, c, e.v);
  }
  return m;
}

std::string BlockMatrix::key() const { return serialize(); }

std::string BlockMatrix::pretty() const {
  std::ostringstream os;
  std::vector<std::string> rlab(rtot_), clab(ctot_);
  for (int r = 0; r < rtot_; ++r) {
    auto [i, off] = locate(Side::row, r);
    rlab[r] = label_token(rows_[i].label) + "[" + std::to_string(off) + "]";
  }
  for (int c = 0; c < ctot_; ++c) {
    auto [i, off] = locate(Side::col, c);
    clab[c] = label_token(cols_[i].label) + "[" + std::to_string(off) + "]";
  }
  size_t rw = 0;
  for (const auto& s : rlab) rw = std::max(rw, s.size());
  std::vector<size_t> cw(ctot_);
  for (int c = 0; c < ctot_; ++c) cw[c] = std::max<size_t>(clab[c].size(), 3);
  os << std::string(rw, ' ') << " |";
  for (int c = 0; c < ctot_; ++c) os << " " << std::string(cw[c] - clab[c].size(), ' ') << clab[c];
  os << "\n";
  for (int r = 0; r < rtot_; ++r) {
    os << std::string(rw - rlab[r].size(), ' ') << rlab[r] << " |";
    for (int c = 0; c < ctot_; ++c) {
      std::string cell;
      std::int64_t m = cell_mod(r, c);
      if (m == 1)
        cell = "";
      else if (get(r, c) == 0)
        cell = ".";
      else
        cell = std::to_string(get(r, c));
      os << " " << std::string(cw[c] >= cell.size() ? cw[c] - cell.size() : 0, ' ') << cell;
    }
    os << "\n";
  }
  return os.str();
}

bool BlockMatrix::operator==(const BlockMatrix& o) const {
  return variant_ == o.variant_ && serialize() == o.serialize();
}

LocalizedMatrix localize(const BlockMatrix& a, int p) {
  Variant sv = a.variant();
  if (sv == Variant::local2 || sv == Variant::local3)
    throw DomainError("localize: matrix is already local");
  if (sv == Variant::integral_ext) {
    // The integer block has no sensible image here; callers resolve it first.
    for (int r = 0; r < a.rows_total(); ++r)
      for (int c = 0; c < a.cols_total(); ++c)
        if (a.cell_mod(r, c) == 0 && a.get(r, c) != 0)
          throw DomainError("localize: integer block must be resolved first");
  }
  Variant tv = localized_variant(p);

  LocalizedMatrix out;
  std::map<StripeLabel, int> tdim;
  std::vector<int> rmap(a.rows_total(), -1), cmap(a.cols_total(), -1);

  // First pass: target dims. Source stripes are in canonical order, so merged
  // members accumulate in label order.
  auto pass = [&](Side side) {
    const auto& ss = side == Side::row ? a.row_stripes() : a.col_stripes();
    for (const auto& s : ss) {
      auto t = localize_label(s.label, p);
      if (t) tdim[*t] += s.dim;
    }
  };
  pass(Side::row);
  pass(Side::col);

  std::vector<Stripe> rows, cols;
  for (auto& [l, d] : tdim) (l.side == Side::row ? rows : cols).push_back({l, d});
  out.mat = BlockMatrix::make(tv, rows, cols);
  out.row_src.resize(out.mat.rows_total());
  out.col_src.resize(out.mat.cols_total());

  // Second pass: line maps and provenance.
  std::map<StripeLabel, int> used;
  auto fill = [&](Side side, std::vector<int>& map,
                  std::vector<std::pair<StripeLabel, int>>& src) {
    const auto& ss = side == Side::row ? a.row_stripes() : a.col_stripes();
    int g = 0;
    for (const auto& s : ss) {
      auto t = localize_label(s.label, p);
      for (int k = 0; k < s.dim; ++k, ++g) {
        if (!t) continue;
        int toff = used[*t]++;
        int tg = out.mat.stripe_base(side, out.mat.stripe_index(side, *t)) + toff;
        map[g] = tg;
        src[tg] = {s.label, k};
      }
    }
  };
  fill(Side::row, rmap, out.row_src);
  fill(Side::col, cmap, out.col_src);

  for (int r = 0; r < a.rows_total(); ++r) {
    if (rmap[r] < 0) continue;
    for (int c = 0; c < a.cols_total(); ++c) {
      if (cmap[c] < 0) continue;
      std::int64_t v = a.get(r, c);
      if (v == 0) continue;
      std::int64_t m = out.mat.cell_mod(rmap[r], cmap[c]);
      out.mat.set(rmap[r], cmap[c], normalize_mod(v, m));
    }
  }
  return out;
}

}  // namespace stripemat
