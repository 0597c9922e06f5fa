#include "stripemat/congruence.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "stripemat/catalog2.hpp"
#include "stripemat/chains3.hpp"
#include "stripemat/residue.hpp"

namespace stripemat {

namespace {

using LineKey = std::pair<StripeLabel, int>;

// 2- and 3-primary cell moduli of an integral cell ring.
std::int64_t part2(std::int64_t m) {
  if (m == 24) return 8;
  if (m == 12) return 4;
  if (m == 2 || m == 4 || m == 8) return m;
  return 1;
}
std::int64_t part3(std::int64_t m) {
  if (m == 24 || m == 12 || m == 3) return 3;
  return 1;
}

BlockMatrix with_frame(const BlockMatrix& m, std::vector<Stripe> rows,
                       std::vector<Stripe> cols) {
  BlockMatrix out = BlockMatrix::make(m.variant(), std::move(rows), std::move(cols));
  for (int r = 0; r < m.rows_total(); ++r)
    for (int c = 0; c < m.cols_total(); ++c) {
      std::int64_t v = m.get(r, c);
      if (v == 0) continue;
      auto [ri, ro] = m.locate(Side::row, r);
      auto [ci, co] = m.locate(Side::col, c);
      out.set_at(m.row_stripes()[ri].label, ro, m.col_stripes()[ci].label, co, v);
    }
  return out;
}

// Union of two frames, stripe by stripe, with the larger dimension.
std::vector<Stripe> frame_union(const std::vector<Stripe>& a, const std::vector<Stripe>& b) {
  std::map<StripeLabel, int> dim;
  for (const Stripe& s : a) dim[s.label] = std::max(dim[s.label], s.dim);
  for (const Stripe& s : b) dim[s.label] = std::max(dim[s.label], s.dim);
  std::vector<Stripe> out;
  for (auto& [l, d] : dim) out.push_back({l, d});
  return out;
}

}  // namespace

BlockMatrix merge(const LocalizedMatrix& a2, const LocalizedMatrix& a3) {
  if (a2.mat.variant() != Variant::local2)
    throw DomainError("merge: first record is not 2-local");
  if (a3.mat.variant() != Variant::local3)
    throw DomainError("merge: second record is not 3-local");

  // Collect the integral frame and the line maps from the provenance.
  std::map<StripeLabel, int> rdim, cdim;
  std::map<LineKey, int> r2, c2, r3, c3;
  auto gather = [](const std::vector<LineKey>& src, std::map<StripeLabel, int>& dim,
                   std::map<LineKey, int>& back, const char* what) {
    for (int i = 0; i < static_cast<int>(src.size()); ++i) {
      const LineKey& k = src[i];
      if (!back.emplace(k, i).second)
        throw DomainError(std::string("merge: ") + what + " names the line " +
                          label_token(k.first) + "[" + std::to_string(k.second) +
                          "] twice");
      dim[k.first] = std::max(dim[k.first], k.second + 1);
    }
  };
  gather(a2.row_src, rdim, r2, "2-local row record");
  gather(a2.col_src, cdim, c2, "2-local column record");
  gather(a3.row_src, rdim, r3, "3-local row record");
  gather(a3.col_src, cdim, c3, "3-local column record");

  // Every line of a stripe that survives at p must be present in that
  // record, so the two records agree on the frame.
  auto check_cover = [](const std::map<StripeLabel, int>& dim,
                        const std::map<LineKey, int>& back, int p, const char* what) {
    for (const auto& [label, d] : dim) {
      if (!localize_label(label, p)) continue;
      for (int off = 0; off < d; ++off)
        if (!back.count({label, off}))
          throw DomainError(std::string("merge: ") + what + " misses the line " +
                            label_token(label) + "[" + std::to_string(off) + "]");
    }
  };
  check_cover(rdim, r2, 2, "2-local row record");
  check_cover(cdim, c2, 2, "2-local column record");
  check_cover(rdim, r3, 3, "3-local row record");
  check_cover(cdim, c3, 3, "3-local column record");

  std::vector<Stripe> rows, cols;
  for (auto& [l, d] : rdim) rows.push_back({l, d});
  for (auto& [l, d] : cdim) cols.push_back({l, d});
  BlockMatrix out = BlockMatrix::make(Variant::integral, std::move(rows), std::move(cols));

  // Pull each local entry into its integral cell, then combine.
  auto pull = [&out](const LocalizedMatrix& rec, int p) {
    std::map<std::pair<int, int>, std::int64_t> vals;
    for (int r = 0; r < rec.mat.rows_total(); ++r)
      for (int c = 0; c < rec.mat.cols_total(); ++c) {
        std::int64_t v = rec.mat.get(r, c);
        if (v == 0) continue;
        const LineKey& rk = rec.row_src[r];
        const LineKey& ck = rec.col_src[c];
        int gr = out.line_of(Side::row, rk.first, rk.second);
        int gc = out.line_of(Side::col, ck.first, ck.second);
        std::int64_t m = out.cell_mod(gr, gc);
        std::int64_t mp = p == 2 ? part2(m) : part3(m);
        if (mp == 1)
          throw DomainError("merge: " + std::to_string(p) + "-local entry at " +
                            label_token(rk.first) + " x " + label_token(ck.first) +
                            " has no " + std::to_string(p) + "-primary part");
        vals[{gr, gc}] = normalize_mod(v, mp);
      }
    return vals;
  };
  auto v2 = pull(a2, 2);
  auto v3 = pull(a3, 3);

  std::set<std::pair<int, int>> cells;
  for (auto& [k, v] : v2) cells.insert(k);
  for (auto& [k, v] : v3) cells.insert(k);
  for (auto& [gr, gc] : cells) {
    std::int64_t m = out.cell_mod(gr, gc);
    std::int64_t u = v2.count({gr, gc}) ? v2[{gr, gc}] : 0;
    std::int64_t v = v3.count({gr, gc}) ? v3[{gr, gc}] : 0;
    std::int64_t w;
    if (m == 24 || m == 12) w = crt_combine(u, v, m);
    else if (m == 3) w = v;
    else w = u;
    out.set(gr, gc, w);
  }

  std::string why;
  if (!out.validate(&why)) throw DomainError("merge: inconsistent records: " + why);
  return out;
}

CongruenceResult congruent(const BlockMatrix& a, const BlockMatrix& b,
                           const OrbitOptions& opt) {
  if (a.variant() != Variant::integral || b.variant() != Variant::integral)
    throw DomainError("congruent: integral matrices expected");

  std::vector<Stripe> rows = frame_union(a.row_stripes(), b.row_stripes());
  std::vector<Stripe> cols = frame_union(a.col_stripes(), b.col_stripes());
  BlockMatrix pa = with_frame(a, rows, cols);
  BlockMatrix pb = with_frame(b, rows, cols);

  CongruenceResult res;
  OrbitEquivalence e2 = orbit_equivalent(localize(pa, 2).mat, localize(pb, 2).mat, opt);
  res.explored = e2.explored;
  if (e2.status != SearchStatus::ok) {
    res.status = e2.status;
    return res;
  }
  if (!e2.equivalent) return res;
  OrbitEquivalence e3 = orbit_equivalent(localize(pa, 3).mat, localize(pb, 3).mat, opt);
  res.explored += e3.explored;
  if (e3.status != SearchStatus::ok) {
    res.status = e3.status;
    return res;
  }
  res.congruent = e3.equivalent;
  return res;
}

namespace {

int val3(std::int64_t d) {
  int r = 0;
  while (d % 3 == 0) d /= 3, ++r;
  return r;
}

}  // namespace

ExtReduction diagonalize_integral_block(const BlockMatrix& a) {
  if (a.variant() == Variant::integral) return {a, {}, {}};
  if (a.variant() != Variant::integral_ext)
    throw DomainError("diagonalize_integral_block: integral matrix expected");

  BlockMatrix m = a;
  const StripeLabel r3 = row_sphere(3), c3 = col_sphere(3);
  const int nr = m.stripe_dim(Side::row, r3), nc = m.stripe_dim(Side::col, c3);
  const int rb = nr ? m.line_of(Side::row, r3, 0) : 0;
  const int cb = nc ? m.line_of(Side::col, c3, 0) : 0;

  auto bget = [&](int i, int j) { return m.get(rb + i, cb + j); };
  auto row_add = [&](int i, int j, std::int64_t k) {  // row i += k * row j
    for (int c = 0; c < m.cols_total(); ++c) m.add_at(rb + i, c, k * m.get(rb + j, c));
  };
  auto col_add = [&](int i, int j, std::int64_t k) {
    for (int r = 0; r < m.rows_total(); ++r) m.add_at(r, cb + i, k * m.get(r, cb + j));
  };
  auto row_swap = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < m.cols_total(); ++c) {
      std::int64_t u = m.get(rb + i, c), v = m.get(rb + j, c);
      m.set(rb + i, c, v);
      m.set(rb + j, c, u);
    }
  };
  auto col_swap = [&](int i, int j) {
    if (i == j) return;
    for (int r = 0; r < m.rows_total(); ++r) {
      std::int64_t u = m.get(r, cb + i), v = m.get(r, cb + j);
      m.set(r, cb + i, v);
      m.set(r, cb + j, u);
    }
  };
  auto row_negate = [&](int i) {
    for (int c = 0; c < m.cols_total(); ++c) m.set(rb + i, c, -m.get(rb + i, c));
  };

  // Diagonalize the integer block, side effects carried across the matrix.
  const int nd = std::min(nr, nc);
  for (int t = 0; t < nd; ++t) {
    while (true) {
      int pi = -1, pj = -1;
      std::int64_t best = 0;
      for (int i = t; i < nr; ++i)
        for (int j = t; j < nc; ++j) {
          std::int64_t v = std::llabs(bget(i, j));
          if (v != 0 && (pi < 0 || v < best)) best = v, pi = i, pj = j;
        }
      if (pi < 0) break;  // block clear from t on
      row_swap(t, pi);
      col_swap(t, pj);
      bool dirty = false;
      for (int i = t + 1; i < nr; ++i)
        if (std::int64_t v = bget(i, t); v != 0) {
          row_add(i, t, -(v / bget(t, t)));
          if (bget(i, t) != 0) dirty = true;
        }
      for (int j = t + 1; j < nc; ++j)
        if (std::int64_t v = bget(t, j); v != 0) {
          col_add(j, t, -(v / bget(t, t)));
          if (bget(t, j) != 0) dirty = true;
        }
      if (!dirty) break;
    }
    if (t < nr && t < nc && bget(t, t) == 0) break;
  }

  // Positive diagonal, sorted descending with zeros last.
  for (int t = 0; t < nd; ++t)
    if (bget(t, t) < 0) row_negate(t);
  for (int i = 0; i < nd; ++i)
    for (int j = i + 1; j < nd; ++j) {
      std::int64_t u = bget(i, i), v = bget(j, j);
      if (u == 0 ? v != 0 : (v != 0 && v > u)) {
        row_swap(i, j);
        col_swap(i, j);
      }
    }

  ExtReduction out;
  std::set<int> drop_rows, drop_cols;             // offsets within the stripes
  std::vector<std::pair<int, int>> decorated_raw;  // (original offset, r)
  for (int t = 0; t < nd; ++t) {
    std::int64_t d = bget(t, t);
    if (d == 0) continue;
    if (d % 2 == 0)
      throw DomainError(
          "diagonalize_integral_block: even invariant factor; the integer "
          "block must carry odd torsion");
    int r = val3(d);
    std::int64_t q = d;
    for (int k = 0; k < r; ++k) q /= 3;
    for (std::int64_t p = 5; q > 1; p += 2) {
      if (p * p > q) p = q;
      std::int64_t pe = 1;
      while (q % p == 0) q /= p, pe *= p;
      if (pe > 1) out.odd_moore.push_back("M_{" + std::to_string(pe) + "}^{n+3}");
    }
    // The diagonal entry is invertible against every 2-primary cell, so it
    // clears the rest of its row and the 2-primary parts of its column; when
    // it is also coprime to 3 the column clears outright.
    for (int c = 0; c < m.cols_total(); ++c)
      if (c != cb + t) m.set(rb + t, c, 0);
    for (int g = 0; g < m.rows_total(); ++g) {
      if (g == rb + t) continue;
      std::int64_t mc = m.cell_mod(g, cb + t);
      if (mc == 0 || mc == 1) continue;
      std::int64_t v = m.get(g, cb + t);
      if (v == 0) continue;
      if (r == 0) m.set(g, cb + t, 0);
      else if (mc == 24 || mc == 12) m.set(g, cb + t, crt_combine(0, crt_split(v, mc).second, mc));
      else if (mc != 3) m.set(g, cb + t, 0);
    }
    m.set(rb + t, cb + t, 0);
    drop_rows.insert(t);
    if (r == 0) drop_cols.insert(t);
    else decorated_raw.push_back({t, r});
  }

  // Rebuild on the reduced frame as an ordinary integral matrix.
  std::vector<Stripe> rows, cols;
  for (const Stripe& s : m.row_stripes()) {
    int d = s.dim - (s.label == r3 ? static_cast<int>(drop_rows.size()) : 0);
    if (d > 0) rows.push_back({s.label, d});
  }
  for (const Stripe& s : m.col_stripes()) {
    int d = s.dim - (s.label == c3 ? static_cast<int>(drop_cols.size()) : 0);
    if (d > 0) cols.push_back({s.label, d});
  }
  BlockMatrix red = BlockMatrix::make(Variant::integral, std::move(rows), std::move(cols));
  auto skip_count = [](const std::set<int>& dropped, int off) {
    int n = 0;
    for (int d : dropped) {
      if (d == off) return -1;
      if (d < off) ++n;
    }
    return n;
  };
  for (int r = 0; r < m.rows_total(); ++r)
    for (int c = 0; c < m.cols_total(); ++c) {
      std::int64_t v = m.get(r, c);
      if (v == 0) continue;
      auto [ri, ro] = m.locate(Side::row, r);
      auto [ci, co] = m.locate(Side::col, c);
      StripeLabel rl = m.row_stripes()[ri].label, cl = m.col_stripes()[ci].label;
      int dr = rl == r3 ? skip_count(drop_rows, ro) : 0;
      int dc = cl == c3 ? skip_count(drop_cols, co) : 0;
      if (dr < 0 || dc < 0)
        throw DomainError("diagonalize_integral_block: entry survives on a cancelled line");
      red.set_at(rl, ro - dr, cl, co - dc, v);
    }
  for (auto& [off, r] : decorated_raw)
    out.decorated.push_back({off - skip_count(drop_cols, off), r});
  std::sort(out.decorated.begin(), out.decorated.end());
  std::sort(out.odd_moore.begin(), out.odd_moore.end());
  out.mat = std::move(red);
  return out;
}

ConnectionGraph connection_graph(const std::vector<PlacedPart>& parts) {
  ConnectionGraph g;
  g.nodes = parts;
  std::map<std::tuple<int, StripeLabel, int>, std::vector<int>> owners[2];
  for (int n = 0; n < static_cast<int>(parts.size()); ++n) {
    const PlacedPart& p = parts[n];
    if (p.prime != 2 && p.prime != 3)
      throw DomainError("connection_graph: parts must be 2- or 3-local");
    for (auto& [l, off] : p.row_lines) owners[0][{p.prime, l, off}].push_back(n);
    for (auto& [l, off] : p.col_lines) owners[1][{p.prime, l, off}].push_back(n);
  }
  for (int s = 0; s < 2; ++s)
    for (auto& [key, v] : owners[s])
      if (v.size() > 1)
        throw DomainError("connection_graph: line " + label_token(std::get<1>(key)) +
                          "[" + std::to_string(std::get<2>(key)) + "] carried by two " +
                          std::to_string(std::get<0>(key)) + "-local parts");
  for (int s = 0; s < 2; ++s)
    for (auto& [key, v] : owners[s]) {
      auto [prime, label, off] = key;
      if (prime != 2) continue;
      auto it = owners[s].find({3, label, off});
      if (it == owners[s].end()) continue;
      for (int b : it->second)
        g.edges.push_back({v.front(), b, s == 0 ? Side::row : Side::col, label, off});
    }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.a, x.b, x.side, x.line, x.offset) <
           std::tie(y.a, y.b, y.side, y.line, y.offset);
  });
  return g;
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

namespace {

// Index of a line among the four spots where both localizations meet: the
// degree-n and degree-(n+1) attaching rows (0, 1) and the S+3 and S+4
// columns (2, 3). Moore stripes, decorated columns and zero slots belong to
// a single prime and return -1.
int scarce_lam(const StripeLabel& l) {
  switch (l.kind) {
    case GenKind::sphere:
      if (l.side == Side::row) return l.level <= 1 ? l.level : -1;
      return l.level == 3 ? 2 : 3;
    case GenKind::cone_eta_n2:
      return l.slot == 0 ? 0 : -1;
    case GenKind::cone_eta2_n3:
      return l.slot == 0 ? 0 : -1;
    case GenKind::cone_eta_n3:
      return l.slot == 1 ? 1 : -1;
    default:
      return -1;
  }
}

using Fp = std::array<int, 4>;

Fp frame_footprint(const BlockMatrix& m) {
  Fp fp{};
  for (const auto& st : m.row_stripes()) {
    int k = scarce_lam(st.label);
    if (k >= 0) fp[k] += st.dim;
  }
  for (const auto& st : m.col_stripes()) {
    int k = scarce_lam(st.label);
    if (k >= 0) fp[k] += st.dim;
  }
  return fp;
}

// Embeds a p-local entry into an integral cell ring: the other prime's
// residue is zero, so both localizations recover their own value.
std::int64_t embed_local(std::int64_t v, int prime, std::int64_t m) {
  if (m == 0) return v;
  if (m == 24 || m == 12)
    return prime == 2 ? crt_combine(v % part2(m), 0, m) : crt_combine(0, v % 3, m);
  return ((v % m) + m) % m;
}

std::int64_t pow3_int(int r) {
  std::int64_t q = 1;
  while (r-- > 0) q *= 3;
  return q;
}

const CatalogShape* shape_by_stem(const std::string& stem) {
  for (const auto& sh : catalog_shapes())
    if (sh.stem == stem) return &sh;
  return nullptr;
}

std::string moore_tag(std::int64_t q, int level) {
  std::string s = "M_{" + std::to_string(q) + "}^{n";
  if (level) s += "+" + std::to_string(level);
  return s + "}";
}

// ---- word shape analysis ----

struct WordInfo {
  Word w;
  bool zero = false;       // no unit entries, only generator closures
  bool has_dec = false;    // touches a decorated column
  int scarce = 0;          // letters on shared lines (decorated columns count)
  bool pure_moore = false; // no shared lines at all
  bool moore_single = false;
  std::string moore_name;
  int zero_lam = -1;       // single idle letter on a shared line
  std::string atom;        // key token for nonzero words
  int dec_exp = 0;         // exponent of the first decorated letter
};

WordInfo word_info(const Word& w) {
  WordInfo info;
  info.w = w;
  info.zero = true;
  for (bool t : w.tilde)
    if (!t) info.zero = false;
  Fp ends{}, ints{};
  for (std::size_t k = 0; k < w.letters.size(); ++k) {
    const ChainLetter& l = w.letters[k];
    int lam = -1;
    using F = ChainLetter::Family;
    switch (l.family) {
      case F::row_a0: lam = 0; break;
      case F::row_b0: lam = 1; break;
      case F::col_a0:
        lam = 2;
        if (l.dec > 0) {
          info.has_dec = true;
          if (!info.dec_exp) info.dec_exp = l.dec;
        }
        break;
      case F::col_b0: lam = 3; break;
      default: break;
    }
    if (lam < 0) continue;
    info.scarce++;
    (k == 0 || k + 1 == w.letters.size() ? ends : ints)[lam]++;
  }
  info.pure_moore = info.scarce == 0;
  if (info.zero) {
    if (w.letters.size() == 1) {
      const ChainLetter& l = w.letters.front();
      if (l.family == ChainLetter::Family::row_bt) {
        info.moore_single = true;
        info.moore_name = moore_tag(pow3_int(l.exp), 1);
      } else if (l.family == ChainLetter::Family::col_a0 && l.dec > 0) {
        info.moore_single = true;
        info.moore_name = moore_tag(pow3_int(l.dec), 3);
      } else if (info.scarce == 1) {
        for (int k = 0; k < 4; ++k)
          if (ends[k]) info.zero_lam = k;
      }
    } else if (w.letters.size() == 2 && info.pure_moore) {
      const ChainLetter& l = w.letters.front();
      info.moore_single = true;
      info.moore_name = moore_tag(pow3_int(l.exp), letter_is_row(l) ? 0 : 3);
    }
    return info;
  }
  std::string t;
  if (w.letters.size() == 2 && info.scarce == 2) {
    t = "c:";
    for (int k = 0; k < 4; ++k) t.append(ends[k], char('0' + k));
  } else {
    t = "m:";
    for (int k = 0; k < 4; ++k) t.append(ends[k], char('0' + k));
    t += '|';
    for (int k = 0; k < 4; ++k) t.append(ints[k], char('0' + k));
  }
  info.atom = t;
  return info;
}

std::string atoms_key(std::vector<std::string> atoms) {
  std::sort(atoms.begin(), atoms.end());
  std::string k;
  for (const auto& a : atoms) {
    k += a;
    k += ';';
  }
  return k;
}

// ---- the two-sided item table ----
//
// Keys are multisets of summand atoms: "S:<stem>" for a 2-local shape,
// "c:xy" for a single-entry connection between shared lines x < y, and
// "m:<ends>|<interior>" for a longer 3-local string, recording which shared
// lines its letters occupy. Idle letters, units and Moore content do not
// enter the key; the 3-part of a catalog parameter shows up as a "c:" atom.

struct TableCfg {
  int item = 0;
  // stem and a mask of parameter connections: 1 carries the S+3 side, 2 the
  // S+4 side
  std::vector<std::pair<std::string, int>> centers;
  std::vector<std::string> words;
};

std::vector<std::string> cfg_atoms(const TableCfg& c) {
  std::vector<std::string> atoms;
  for (const auto& [stem, mask] : c.centers) {
    atoms.push_back("S:" + stem);
    if (mask & 1) atoms.push_back("c:02");
    if (mask & 2) atoms.push_back("c:13");
  }
  for (const auto& w : c.words) atoms.push_back(w);
  return atoms;
}

// Replacement pieces when a parameter's unit part drops to zero while its
// 3-part survives; computed from the catalog matrix itself.
const std::vector<std::string>& degenerate_pieces(const std::string& stem, bool zv, bool zw) {
  static std::map<std::tuple<std::string, bool, bool>, std::vector<std::string>> cache;
  auto key = std::make_tuple(stem, zv, zw);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const CatalogShape* sh = shape_by_stem(stem);
  if (!sh) throw std::logic_error("degenerate_pieces: unknown stem " + stem);
  int idx = 0;
  const auto& shapes = catalog_shapes();
  while (&shapes[idx] != sh) ++idx;
  CatalogItem ci{idx, sh->v_kind == ParamKind::none ? 0 : (zv ? 0 : 1),
                 sh->w_kind == ParamKind::none ? 0 : (zw ? 0 : 1)};
  Decomposition d = decompose(catalog_matrix(ci), {});
  if (!d.complete)
    throw std::logic_error("degenerate_pieces: unresolved split for " + stem);
  std::vector<std::string> out;
  for (const auto& s : d.summands) {
    auto pci = catalog_parse(s.name);
    if (!pci) throw std::logic_error("degenerate_pieces: non-catalog piece " + s.name);
    const CatalogShape& psh = shapes[pci->shape];
    if (!psh.unit) out.push_back(psh.stem);
  }
  std::sort(out.begin(), out.end());
  return cache.emplace(key, std::move(out)).first->second;
}

class ListTable {
 public:
  static const ListTable& get() {
    static const ListTable t;
    return t;
  }

  std::optional<int> find(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::string, int> map_;

  ListTable() { build(); }

  void put_strict(const std::string& key, int item) {
    auto [it, fresh] = map_.try_emplace(key, item);
    if (!fresh && it->second != item)
      throw std::logic_error("item table conflict between " + std::to_string(it->second) +
                             " and " + std::to_string(item) + " at " + key);
  }

  void put_soft(const std::string& key, int item) { map_.try_emplace(key, item); }

  void build();
};

void ListTable::build() {
  // family membership read off the catalog: both parameters, one parameter
  // with or without the extra fixed cell, or a single off-diagonal cell
  std::vector<std::string> zvw, zsv, zv, zw, zpw;
  for (const auto& sh : catalog_shapes()) {
    if (sh.unit) continue;
    bool hv = sh.v_kind != ParamKind::none, hw = sh.w_kind != ParamKind::none;
    bool col3 = false, fixed_r1_at3 = false;
    for (const auto& c : sh.cells) {
      if (c.col_level == 3) col3 = true;
      if (c.param < 0 && c.col_level == 3 && c.row == row_sphere(1)) fixed_r1_at3 = true;
    }
    if (hv && hw)
      zvw.push_back(sh.stem);
    else if (hv)
      (fixed_r1_at3 ? zsv : zv).push_back(sh.stem);
    else if (hw)
      (col3 ? zw : zpw).push_back(sh.stem);
  }
  const std::string c4a = "Ceta^{n+4}", c4b = "Ceta2^{n+4}";
  const std::string c5a = "Ceta^{n+5}", c5b = "Ceta2^{n+5}";
  const std::vector<std::string> C4 = {c4a, c4b}, C5 = {c5a, c5b};

  auto mw = [](std::vector<int> ends, std::vector<int> ints = {}) {
    std::sort(ends.begin(), ends.end());
    std::sort(ints.begin(), ints.end());
    std::string t = "m:";
    for (int k : ends) t += char('0' + k);
    t += '|';
    for (int k : ints) t += char('0' + k);
    return t;
  };
  auto m1 = [&](int a) { return mw({a}); };
  auto m2 = [&](int a, int b) { return mw({a, b}); };

  std::vector<TableCfg> cfgs;
  auto add = [&](int item, std::vector<std::pair<std::string, int>> centers,
                 std::vector<std::string> words) {
    cfgs.push_back({item, std::move(centers), std::move(words)});
  };

  for (const auto& s : zvw) {
    for (int mv : {0, 1})
      for (int mword : {0, 2}) add(1, {{s, mv | mword}}, {});
    for (const auto& M : {m1(1), m2(0, 1), m1(3), m2(2, 3)}) add(2, {{s, 1}}, {M});
    add(3, {{s, 1}}, {m2(1, 3)});
    add(4, {{s, 1}}, {m1(1), m1(3)});
    add(4, {{s, 1}}, {m1(1), m2(2, 3)});
    add(4, {{s, 1}}, {m2(0, 1), m1(3)});
    add(4, {{s, 1}}, {m1(0), m1(2)});
    add(4, {{s, 1}}, {m1(0), m2(2, 3)});
    add(4, {{s, 1}}, {m2(0, 2), m1(2)});
    for (const auto& c4 : C4) {
      add(5, {{s, 1}, {c4, 0}}, {m1(1), m2(2, 3)});
      add(5, {{s, 1}, {c4, 0}}, {m2(2, 3)});
    }
    add(6, {{s, 1}, {c4b, 0}}, {m1(1), m2(2, 3), m1(1)});
    for (const auto& M : {m1(2), m2(0, 1), m1(0), m2(2, 3)}) add(7, {{s, 2}}, {M});
    add(8, {{s, 2}}, {m2(0, 2)});
    add(9, {{s, 2}}, {m1(0), m1(2)});
    add(9, {{s, 2}}, {m1(0), m2(2, 3)});
    add(9, {{s, 2}}, {m2(0, 2), m1(2)});
    add(10, {{s, 2}, {c4b, 0}}, {m1(2), m2(0, 1), m1(2)});
    add(10, {{s, 2}, {c4b, 0}}, {m1(2), m2(0, 1)});
    add(10, {{s, 2}, {c4b, 0}}, {m2(0, 1)});
    for (const auto& c5 : C5) {
      add(11, {{s, 2}, {c5, 0}}, {m1(0), m2(2, 3)});
      add(11, {{s, 2}, {c5, 0}}, {m2(2, 3)});
    }
    for (const auto& M : {m1(1), m1(3), m1(0), m1(2)}) add(12, {{s, 0}}, {M});
    for (const auto& M : {m2(2, 3), m2(1, 3), m2(0, 2), m2(0, 1)}) add(13, {{s, 0}}, {M});
    add(14, {{s, 0}}, {m1(2), m1(3)});
    add(14, {{s, 0}}, {m1(0), m1(2)});
    add(14, {{s, 0}}, {m1(0), m1(3)});
    add(14, {{s, 0}}, {m1(1), m1(2)});
    add(14, {{s, 0}}, {m1(1), m1(3)});
    add(14, {{s, 0}}, {m1(0), m1(1)});
    add(15, {{s, 0}}, {m2(0, 1), m1(2)});
    add(15, {{s, 0}}, {m2(0, 1), m2(0, 2)});
    add(15, {{s, 0}}, {m2(0, 1), m1(3)});
    add(15, {{s, 0}}, {m2(0, 1), m2(1, 3)});
    add(15, {{s, 0}}, {m2(0, 2), m1(1)});
    add(15, {{s, 0}}, {m2(1, 3), m1(0)});
    add(15, {{s, 0}}, {m2(2, 3), m1(1)});
    add(15, {{s, 0}}, {m2(2, 3), m2(1, 3)});
    add(15, {{s, 0}}, {m2(0, 2), m1(3)});
    add(16, {{s, 0}}, {m2(0, 1), m2(2, 3)});
    add(16, {{s, 0}}, {m2(0, 2), m2(1, 3)});
    add(17, {{s, 0}}, {m2(0, 1), m1(2), m1(3)});
    add(17, {{s, 0}}, {m2(0, 1), m1(2), m2(1, 3)});
    add(17, {{s, 0}}, {m2(0, 1), m2(0, 2), m1(3)});
    add(17, {{s, 0}}, {m2(2, 3), m1(0), m1(1)});
    add(17, {{s, 0}}, {m2(2, 3), m1(0), m2(1, 3)});
    add(17, {{s, 0}}, {m2(2, 3), m2(0, 2), m1(1)});
    add(17, {{s, 0}}, {m2(1, 3), m1(0), m1(2)});
    add(17, {{s, 0}}, {m2(0, 2), m1(1), m1(3)});
    add(18, {{s, 0}}, {m1(0), m1(1), m1(3)});
    add(18, {{s, 0}}, {m1(0), m1(1), m1(2)});
    add(18, {{s, 0}}, {m1(0), m1(3), m1(2)});
    add(18, {{s, 0}}, {m1(1), m1(3), m1(2)});
    add(19, {{s, 0}}, {m1(0), m1(1), m1(2), m1(3)});
    add(20, {{s, 0}, {c4b, 0}}, {m2(0, 1), m1(2), m2(1, 3), m1(2)});
    add(20, {{s, 0}, {c4b, 0}}, {m2(0, 1), m1(2), m2(1, 3)});
    add(20, {{s, 0}, {c4b, 0}}, {m2(0, 1), m2(1, 3)});
    for (const auto& c5 : C5) {
      add(21, {{s, 0}, {c5, 0}}, {m2(2, 3), m1(0), m2(1, 3)});
      add(21, {{s, 0}, {c5, 0}}, {m2(2, 3), m2(1, 3)});
    }
    add(22, {{s, 0}, {c4b, 0}}, {m2(2, 3), m1(1), m2(0, 2), m1(1)});
    for (const auto& c4 : C4) {
      add(23, {{s, 0}, {c4, 0}}, {m2(2, 3), m1(1), m2(0, 2)});
      add(23, {{s, 0}, {c4, 0}}, {m2(2, 3), m2(0, 2)});
    }
  }

  for (const auto& s : zsv) {
    for (int mv : {0, 1}) add(24, {{s, mv}}, {});
    for (const auto& M : {m1(1), m2(0, 1), m2(1, 3)}) add(25, {{s, 1}}, {M});
    for (const auto& c5 : C5) add(26, {{s, 1}, {c5, 0}}, {m2(1, 3)});
    for (const auto& M : {m1(1), m2(2, 3), m2(1, 3), m1(0), m1(2)}) add(27, {{s, 0}}, {M});
    for (const auto& M : {m2(0, 2), m2(0, 1)}) add(28, {{s, 0}}, {M});
    for (const auto& A : {m1(2), m2(2, 3)})
      for (const auto& B : {m2(1, 3), m1(1)}) add(29, {{s, 0}}, {A, B});
    for (const auto& B : {m1(1), m2(1, 3), m1(2), m2(2, 3)}) add(29, {{s, 0}}, {m1(0), B});
    add(30, {{s, 0}}, {m2(0, 1), m1(2)});
    add(30, {{s, 0}}, {m2(0, 1), m2(2, 3)});
    add(30, {{s, 0}}, {m2(0, 2), m1(1)});
    for (const auto& A : {m1(2), m2(2, 3)})
      for (const auto& B : {m1(1), m2(1, 3)}) add(31, {{s, 0}}, {A, m1(0), B});
    for (const auto& c5 : C5) {
      add(32, {{s, 0}, {c5, 0}}, {m1(2), m1(0), m2(1, 3)});
      add(32, {{s, 0}, {c5, 0}}, {m1(2), m2(1, 3)});
    }
    for (const auto& c5 : C5) {
      add(33, {{s, 0}, {c5, 0}}, {m2(2, 3), m2(0, 1)});
      add(34, {{s, 0}, {c5, 0}}, {m2(2, 3), m1(0), m1(1)});
    }
    for (const auto& t : zpw) {
      add(33, {{s, 0}, {t, 0}}, {m2(2, 3), m2(0, 1)});
      add(34, {{s, 0}, {t, 0}}, {m2(2, 3), m1(0), m1(1)});
      for (const auto& M : {m1(1), m2(0, 1)}) add(35, {{s, 0}, {t, 0}}, {M, m2(2, 3), m2(0, 1)});
      add(36, {{s, 0}, {t, 0}}, {m1(1), m2(2, 3), m1(0), m1(1)});
      add(36, {{s, 0}, {t, 0}}, {m1(1), m2(2, 3), m1(1)});
      for (const auto& M : {m1(0), m1(1)}) add(38, {{s, 0}, {t, 0}}, {m2(2, 3), M});
    }
    for (const auto& x : C5) {
      for (const auto& y : C5) add(37, {{s, 0}, {x, 0}, {y, 0}}, {m2(2, 3), m1(0), m2(1, 3)});
      for (const auto& y : C5) add(37, {{s, 0}, {x, 0}, {y, 0}}, {m2(2, 3), m2(1, 3)});
      add(37, {{s, 0}, {x, 0}}, {m1(0), m2(1, 3)});
      add(37, {{s, 0}, {x, 0}}, {m2(1, 3)});
      for (const auto& M : {m1(0), m1(1)}) add(38, {{s, 0}, {x, 0}}, {m2(2, 3), M});
    }
  }

  for (const auto& s : zw) {
    for (int mword : {0, 2}) add(39, {{s, mword}}, {});
    add(40, {{s, 2}}, {m1(2)});
    for (const auto& M : {m1(1), m2(0, 1), m1(2), m2(0, 2), m1(3)}) add(41, {{s, 0}}, {M});
    for (const auto& M : {m2(1, 3), m2(2, 3)}) add(42, {{s, 0}}, {M});
    for (const auto& A : {m1(1), m2(0, 1)})
      for (const auto& B : {m1(2), m2(0, 2), m1(3)}) add(43, {{s, 0}}, {A, B});
    for (const auto& B : {m1(2), m2(0, 2)}) add(43, {{s, 0}}, {m1(3), B});
    add(44, {{s, 0}}, {m1(1), m2(2, 3)});
    add(44, {{s, 0}}, {m1(2), m2(1, 3)});
    add(44, {{s, 0}}, {m2(0, 2), m2(1, 3)});
    for (const auto& A : {m1(1), m2(0, 1)})
      for (const auto& B : {m1(2), m2(0, 2)}) add(45, {{s, 0}}, {A, B, m1(3)});
    for (const auto& t : zv) {
      add(46, {{t, 0}, {s, 0}}, {m1(2), m2(0, 1), m1(2), m1(3)});
      add(46, {{t, 0}, {s, 0}}, {m2(0, 1), m1(2), m1(3)});
      add(46, {{t, 0}, {s, 0}}, {m1(2), m2(0, 1), m1(2)});
      add(46, {{t, 0}, {s, 0}}, {m2(0, 1), m1(3)});
      add(46, {{t, 0}, {s, 0}}, {m2(0, 1)});
      add(47, {{t, 0}, {s, 0}}, {m1(2), m2(0, 1), m2(2, 3)});
      add(47, {{t, 0}, {s, 0}}, {m2(0, 1), m2(2, 3)});
    }
  }

  for (const auto& s : zv) {
    for (int mv : {0, 1}) add(48, {{s, mv}}, {});
    for (const auto& M : {m1(0), m2(0, 1), m1(2), m2(2, 3)}) add(49, {{s, 0}}, {M});
    add(50, {{s, 0}}, {m2(0, 2)});
    for (const auto& A : {m1(0), m2(0, 1)})
      for (const auto& B : {m1(2), m2(2, 3)}) add(51, {{s, 0}}, {A, B});
    for (const auto& t : zpw) {
      add(52, {{s, 0}, {t, 0}}, {m1(0), m2(2, 3)});
      add(52, {{s, 0}, {t, 0}}, {m2(2, 3)});
      add(53, {{s, 0}, {t, 0}}, {m1(0), m2(2, 3), m1(1)});
      add(53, {{s, 0}, {t, 0}}, {m2(2, 3), m1(1)});
      add(54, {{s, 0}, {t, 0}}, {m2(0, 1), m2(2, 3)});
      add(55, {{s, 0}, {t, 0}}, {m1(2), m2(0, 1), m1(3)});
      add(55, {{s, 0}, {t, 0}}, {m2(0, 1), m1(3)});
      add(55, {{s, 0}, {t, 0}}, {m1(2), m2(0, 1)});
      add(59, {{s, 0}, {t, 0}}, {m2(0, 1)});
    }
    for (const auto& c5 : C5) {
      add(52, {{s, 0}, {c5, 0}}, {m1(0), m2(2, 3)});
      add(52, {{s, 0}, {c5, 0}}, {m2(2, 3)});
      add(57, {{s, 0}, {c5, 0}}, {m2(0, 1), m2(2, 3)});
      add(58, {{s, 0}, {c5, 0}, {c4b, 0}}, {m2(2, 3), m2(0, 1)});
      for (const auto& A : {m1(2), m2(2, 3)})
        add(61, {{s, 0}, {c4b, 0}, {c5, 0}}, {A, m2(0, 1), m2(2, 3)});
      for (const auto& c5x : C5)
        add(62, {{s, 0}, {c5, 0}, {c4b, 0}, {c5x, 0}}, {m2(2, 3), m2(0, 1), m2(2, 3)});
    }
    for (const auto& A : {m1(2), m2(2, 3)}) add(56, {{s, 0}, {c4b, 0}}, {A, m2(0, 1)});
    add(59, {{s, 0}, {c4b, 0}}, {m2(0, 1)});
    add(60, {{s, 0}, {c4b, 0}}, {m1(2), m2(0, 1), m1(2)});
    add(60, {{s, 0}, {c4b, 0}}, {m1(2), m2(0, 1), m2(2, 3)});
    add(60, {{s, 0}, {c4b, 0}}, {m2(2, 3), m2(0, 1), m2(2, 3)});
  }

  for (const auto& s : zpw) {
    for (int mword : {0, 2}) add(63, {{s, mword}}, {});
    for (const auto& M : {m1(1), m2(0, 1), m1(3), m2(2, 3)}) add(64, {{s, 0}}, {M});
    add(65, {{s, 0}}, {m2(1, 3)});
    for (const auto& A : {m1(1), m2(0, 1)})
      for (const auto& B : {m1(3), m2(2, 3)}) add(66, {{s, 0}}, {A, B});
    for (const auto& c4 : C4) {
      for (const auto& A : {m1(1), m2(0, 1)}) add(67, {{s, 0}, {c4, 0}}, {A, m2(2, 3)});
      add(67, {{s, 0}, {c4, 0}}, {m2(2, 3)});
    }
    for (const auto& A : {m1(1), m2(0, 1)})
      for (const auto& B : {m1(1), m2(0, 1)}) add(68, {{s, 0}, {c4b, 0}}, {A, m2(2, 3), B});
  }

  for (const auto& c : {c4a, c4b, c5a, c5b}) add(69, {{c, 0}}, {});
  add(70, {{c4b, 0}}, {m1(1)});
  add(70, {{c4b, 0}}, {m1(2)});
  add(70, {{c4a, 0}}, {m1(2)});
  for (const auto& c5 : C5) add(70, {{c5, 0}}, {m1(3)});
  add(71, {{c4b, 0}}, {m1(1), m1(2)});
  for (const auto& c5 : C5) {
    add(72, {{c4b, 0}, {c5, 0}}, {m1(1), m2(2, 3)});
    for (const auto& A : {m1(2), m2(0, 2)}) add(72, {{c4b, 0}, {c5, 0}}, {A, m2(1, 3)});
    for (const auto& c5x : C5) add(73, {{c5, 0}, {c4b, 0}, {c5x, 0}}, {m2(1, 3), m2(2, 3)});
    for (const auto& M : {m2(1, 3), m2(2, 3)}) add(74, {{c4b, 0}, {c5, 0}}, {M});
  }

  // explicit configurations land first and win every later collision
  std::vector<std::pair<int, std::vector<std::string>>> inserted;
  for (const auto& c : cfgs) {
    auto atoms = cfg_atoms(c);
    put_strict(atoms_key(atoms), c.item);
    inserted.push_back({c.item, std::move(atoms)});
  }

  // The three configurations whose words sit on the carrier lines of the
  // parameter connection: admissible moves clear that connection, so their
  // classes live at the cleared key.
  for (const auto& s : zvw) {
    for (auto W : {std::vector<std::string>{m1(0), m1(2)},
                   std::vector<std::string>{m1(0), m2(2, 3)},
                   std::vector<std::string>{m2(0, 2), m1(2)}}) {
      TableCfg c{4, {{s, 0}}, W};
      auto atoms = cfg_atoms(c);
      put_soft(atoms_key(atoms), 4);
      inserted.push_back({4, std::move(atoms)});
    }
  }

  // degenerate parameter variants: unit part zero, 3-part alive
  for (const auto& c : cfgs) {
    std::vector<std::vector<std::pair<bool, bool>>> choices(c.centers.size());
    bool any = false;
    for (std::size_t i = 0; i < c.centers.size(); ++i) {
      choices[i].push_back({false, false});
      int mask = c.centers[i].second;
      if (mask & 1) choices[i].push_back({true, false});
      if (mask & 2) choices[i].push_back({false, true});
      if (mask == 3) choices[i].push_back({true, true});
      any = any || mask != 0;
    }
    if (!any) continue;
    std::vector<std::size_t> pick(c.centers.size(), 0);
    while (true) {
      bool nontrivial = false;
      for (std::size_t i = 0; i < pick.size(); ++i)
        nontrivial = nontrivial || pick[i] != 0;
      if (nontrivial) {
        std::vector<std::string> atoms;
        for (std::size_t i = 0; i < c.centers.size(); ++i) {
          const auto& [stem, mask] = c.centers[i];
          auto [zv, zword] = choices[i][pick[i]];
          if (zv || zword)
            for (const auto& piece : degenerate_pieces(stem, zv, zword))
              atoms.push_back("S:" + piece);
          else
            atoms.push_back("S:" + stem);
          if (mask & 1) atoms.push_back("c:02");
          if (mask & 2) atoms.push_back("c:13");
        }
        for (const auto& w : c.words) atoms.push_back(w);
        put_soft(atoms_key(atoms), c.item);
        inserted.push_back({c.item, std::move(atoms)});
      }
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  }

  // one-ended strings may pick up a second end on a unit's line; extend each
  // subset of them by every choice of extra end
  auto snapshot = inserted;
  for (const auto& [item, atoms] : snapshot) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i].size() == 4 && atoms[i][0] == 'm' && atoms[i][3] == '|')
        open.push_back(i);
    if (open.empty()) continue;
    std::vector<int> pick(open.size(), -1);  // -1 keep, else new end
    while (true) {
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == 4) pick[i++] = -1;
      if (i == pick.size()) break;
      auto ext = atoms;
      for (std::size_t k = 0; k < open.size(); ++k) {
        if (pick[k] < 0) continue;
        char a = ext[open[k]][2], b = char('0' + pick[k]);
        if (b < a) std::swap(a, b);
        ext[open[k]] = std::string("m:") + a + b + "|";
      }
      put_soft(atoms_key(ext), item);
    }
  }
}

// ---- balanced grouping ----

struct GroupPiece {
  int prime = 2;
  Summand sm;
  Fp fp{};
  bool leftover = false;
};

Fp signed_sum(const std::vector<const GroupPiece*>& g) {
  Fp s{};
  for (const auto* p : g)
    for (int k = 0; k < 4; ++k) s[k] += p->prime == 2 ? p->fp[k] : -p->fp[k];
  return s;
}

// Splits the pieces into balanced groups: zero-footprint pieces stand alone,
// every other piece joins the smallest (then lexicographically first) set of
// later pieces cancelling its shared-line usage. Any choice among ties gives
// congruent classes, so the first hit is taken for determinism.
std::vector<std::vector<int>> balance_groups(const std::vector<GroupPiece>& ps, bool* resolved) {
  std::vector<std::vector<int>> groups;
  std::vector<int> nz;
  for (int i = 0; i < static_cast<int>(ps.size()); ++i) {
    if (ps[i].fp == Fp{})
      groups.push_back({i});
    else
      nz.push_back(i);
  }
  auto acc = [&](Fp& s, int idx) {
    for (int k = 0; k < 4; ++k) s[k] += ps[idx].prime == 2 ? ps[idx].fp[k] : -ps[idx].fp[k];
  };
  std::vector<char> used(nz.size(), 0);
  std::size_t budget = 2'000'000;
  *resolved = true;
  for (std::size_t i = 0; i < nz.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> pool;
    for (std::size_t j = i + 1; j < nz.size(); ++j)
      if (!used[j]) pool.push_back(j);
    std::vector<std::size_t> best;
    bool found = false;
    for (std::size_t k = 0; k <= pool.size() && !found && budget > 0; ++k) {
      std::vector<std::size_t> idx(k);
      std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t pos,
                                                              std::size_t from) -> bool {
        if (budget == 0) return false;
        if (pos == k) {
          --budget;
          Fp s{};
          acc(s, nz[i]);
          for (std::size_t q : idx) acc(s, nz[pool[q]]);
          if (s == Fp{}) {
            best = idx;
            return true;
          }
          return false;
        }
        for (std::size_t q = from; q + (k - pos) <= pool.size() + 1 && q < pool.size(); ++q) {
          idx[pos] = q;
          if (rec(pos + 1, q + 1)) return true;
          if (budget == 0) return false;
        }
        return false;
      };
      found = rec(0, 0);
    }
    if (!found) {
      std::vector<int> g;
      for (std::size_t j = i; j < nz.size(); ++j)
        if (!used[j]) {
          g.push_back(nz[j]);
          used[j] = 1;
        }
      groups.push_back(std::move(g));
      *resolved = false;
      break;
    }
    std::vector<int> g{nz[i]};
    used[i] = 1;
    for (std::size_t q : best) {
      g.push_back(nz[pool[q]]);
      used[pool[q]] = 1;
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

// ---- gluing a group back into one integral matrix ----

BlockMatrix glue_pieces(const std::vector<BlockMatrix>& two,
                        const std::vector<const CatalogShape*>& shape_of,
                        const std::vector<BlockMatrix>& three,
                        const std::vector<std::pair<int, int>>& fold) {
  using Line = std::pair<StripeLabel, int>;
  std::map<StripeLabel, int> dims;
  auto fresh = [&](const StripeLabel& l) {
    int o = dims[l];
    dims[l] = o + 1;
    return Line{l, o};
  };

  std::vector<std::vector<Line>> r2(two.size()), c2(two.size());
  std::array<std::vector<Line>, 4> queue;
  for (std::size_t i = 0; i < two.size(); ++i) {
    const BlockMatrix& m = two[i];
    for (int r = 0; r < m.rows_total(); ++r) {
      Line ln = fresh(m.line_label(Side::row, r));
      r2[i].push_back(ln);
      int k = scarce_lam(ln.first);
      if (k >= 0) queue[k].push_back(ln);
    }
    for (int c = 0; c < m.cols_total(); ++c) {
      Line ln = fresh(m.line_label(Side::col, c));
      c2[i].push_back(ln);
      int k = scarce_lam(ln.first);
      if (k >= 0) queue[k].push_back(ln);
    }
  }

  // folded connections occupy the parameter cell lines of their shapes
  std::vector<std::optional<std::pair<Line, Line>>> fold_lines(three.size());
  for (std::size_t j = 0; j < three.size(); ++j) {
    auto [ti, param] = fold[j];
    if (ti < 0) continue;
    const CatalogShape* sh = shape_of[ti];
    const CatalogShape::Cell* cell = nullptr;
    for (const auto& c : sh->cells)
      if (c.param == param) cell = &c;
    if (!cell) throw DomainError("glue: fold target has no matching parameter cell");
    const BlockMatrix& m = two[ti];
    Line rl = r2[ti][m.line_of(Side::row, cell->row, 0)];
    Line cl = c2[ti][m.line_of(Side::col, col_sphere(cell->col_level), 0)];
    for (int k : {0, 1, 2, 3}) {
      auto& q = queue[k];
      for (const Line& ln : {rl, cl}) {
        auto it = std::find(q.begin(), q.end(), ln);
        if (it != q.end()) q.erase(it);
      }
    }
    fold_lines[j] = {{rl, cl}};
  }

  std::array<std::size_t, 4> cursor{};
  std::vector<std::vector<Line>> r3(three.size()), c3(three.size());
  std::vector<std::pair<Line, int>> dec_raw;
  for (std::size_t j = 0; j < three.size(); ++j) {
    const BlockMatrix& m = three[j];
    for (int r = 0; r < m.rows_total(); ++r) {
      StripeLabel l = m.line_label(Side::row, r);
      int k = scarce_lam(l);
      if (k < 0) {
        r3[j].push_back(fresh(l));
      } else if (fold_lines[j]) {
        r3[j].push_back(fold_lines[j]->first);
      } else if (cursor[k] < queue[k].size()) {
        r3[j].push_back(queue[k][cursor[k]++]);
      } else {
        r3[j].push_back(fresh(row_sphere(k)));
      }
    }
    for (int c = 0; c < m.cols_total(); ++c) {
      StripeLabel l = m.line_label(Side::col, c);
      if (l.kind == GenKind::dec_col) {
        Line ln = fresh(col_sphere(3));
        c3[j].push_back(ln);
        dec_raw.push_back({ln, l.exp});
        continue;
      }
      int k = scarce_lam(l);
      if (k < 0) {
        c3[j].push_back(fresh(l));
      } else if (fold_lines[j]) {
        c3[j].push_back(fold_lines[j]->second);
      } else if (cursor[k] < queue[k].size()) {
        c3[j].push_back(queue[k][cursor[k]++]);
      } else {
        c3[j].push_back(fresh(col_sphere(k == 2 ? 3 : 4)));
      }
    }
  }

  int dec_base = 0;
  if (!dec_raw.empty()) {
    dec_base = dims[row_sphere(3)];
    dims[row_sphere(3)] += static_cast<int>(dec_raw.size());
  }

  std::vector<Stripe> rows, cols;
  for (const auto& [l, d] : dims) (l.side == Side::row ? rows : cols).push_back({l, d});
  BlockMatrix out = BlockMatrix::make(dec_raw.empty() ? Variant::integral : Variant::integral_ext,
                                      std::move(rows), std::move(cols));

  auto copy_entries = [&](const BlockMatrix& m, const std::vector<Line>& rmap,
                          const std::vector<Line>& cmap, int prime) {
    for (int r = 0; r < m.rows_total(); ++r)
      for (int c = 0; c < m.cols_total(); ++c) {
        std::int64_t v = m.get(r, c);
        if (v == 0) continue;
        int R = out.line_of(Side::row, rmap[r].first, rmap[r].second);
        int C = out.line_of(Side::col, cmap[c].first, cmap[c].second);
        out.add_at(R, C, embed_local(v, prime, out.cell_mod(R, C)));
      }
  };
  for (std::size_t i = 0; i < two.size(); ++i) copy_entries(two[i], r2[i], c2[i], 2);
  for (std::size_t j = 0; j < three.size(); ++j) copy_entries(three[j], r3[j], c3[j], 3);
  for (std::size_t k = 0; k < dec_raw.size(); ++k) {
    int R = out.line_of(Side::row, row_sphere(3), dec_base + static_cast<int>(k));
    int C = out.line_of(Side::col, dec_raw[k].first.first, dec_raw[k].first.second);
    out.add_at(R, C, pow3_int(dec_raw[k].second));
  }
  return out;
}

// Fold assignment shared by the gluer and by parameter rendering: each
// undecorated connection claims the first capable shape, in part order,
// whose matching parameter still lacks a 3-part.
std::vector<std::pair<int, int>> assign_folds(const std::vector<const CatalogShape*>& shape_of,
                                              const std::vector<const WordInfo*>& words) {
  std::vector<std::pair<int, int>> fold(words.size(), {-1, -1});
  std::vector<char> vtaken(shape_of.size(), 0), wtaken(shape_of.size(), 0);
  for (std::size_t j = 0; j < words.size(); ++j) {
    if (!words[j] || words[j]->zero || words[j]->has_dec) continue;
    int param = words[j]->atom == "c:02" ? 0 : words[j]->atom == "c:13" ? 1 : -1;
    if (param < 0) continue;
    for (std::size_t i = 0; i < shape_of.size(); ++i) {
      if (!shape_of[i]) continue;
      if (param == 0 && shape_of[i]->v_kind != ParamKind::none && !vtaken[i]) {
        vtaken[i] = 1;
        fold[j] = {static_cast<int>(i), 0};
        break;
      }
      if (param == 1 && shape_of[i]->w_kind != ParamKind::none && !wtaken[i]) {
        wtaken[i] = 1;
        fold[j] = {static_cast<int>(i), 1};
        break;
      }
    }
  }
  return fold;
}

BlockMatrix glue_from_names(const std::vector<std::string>& parts2,
                            const std::vector<std::string>& parts3) {
  std::vector<BlockMatrix> two, three;
  std::vector<const CatalogShape*> shape_of;
  for (const auto& n : parts2) {
    auto ci = catalog_parse(n);
    if (!ci) throw DomainError("glue: unknown catalog part " + n);
    two.push_back(catalog_matrix(*ci));
    shape_of.push_back(&catalog_shapes()[ci->shape]);
  }
  std::vector<WordInfo> infos;
  std::vector<bool> is_word;
  for (const auto& n : parts3) {
    try {
      Word w = Word::parse(n);
      infos.push_back(word_info(w));
      three.push_back(realize_string(w));
      is_word.push_back(true);
    } catch (const std::exception&) {
      BandWord b = BandWord::parse(n);
      infos.push_back({});
      three.push_back(realize_band(b));
      is_word.push_back(false);
    }
  }
  std::vector<const WordInfo*> wptrs;
  for (std::size_t j = 0; j < infos.size(); ++j)
    wptrs.push_back(is_word[j] ? &infos[j] : nullptr);
  return glue_pieces(two, shape_of, three, assign_folds(shape_of, wptrs));
}

// ---- naming one balanced group ----

std::int64_t merged_display(std::int64_t u, std::int64_t t, std::int64_t m) {
  std::int64_t v = crt_combine(u, t, m);
  if (v == 0) return 0;
  std::int64_t g = std::gcd(v, m);
  if (m == 12) return g;
  switch (g) {
    case 1: return 1;
    case 2: return 10;
    case 3: return 9;
    case 4: return 4;
    case 6: return 6;
    case 8: return 8;
    default: return 12;
  }
}

BlockMatrix realize_moore(const std::string& name) {
  auto open = name.find("M_{");
  auto close = name.find("}^{n", open);
  if (open != 0 || close == std::string::npos || name.back() != '}')
    throw DomainError("realize_class: bad torsion summand name " + name);
  std::int64_t q = std::stoll(name.substr(3, close - 3));
  std::string sup = name.substr(close + 4, name.size() - close - 5);
  int level = sup.empty() ? 0 : std::stoi(sup.substr(1));
  std::int64_t p3 = 1;
  int r = 0;
  while (p3 < q) p3 *= 3, ++r;
  if (p3 == q && q >= 3) {
    if (level == 0)
      return BlockMatrix::make(Variant::integral, {{row_moore_n(r, 0), 1}}, {});
    if (level == 1)
      return BlockMatrix::make(Variant::integral, {{row_moore_n1(r, 1), 1}}, {});
    if (level == 3)
      return BlockMatrix::make(Variant::integral, {}, {{col_moore_n3(r, 3), 1}});
    throw DomainError("realize_class: bad torsion summand name " + name);
  }
  BlockMatrix m = BlockMatrix::make(Variant::integral_ext, {{row_sphere(3), 1}},
                                    {{col_sphere(3), 1}});
  m.set_at(row_sphere(3), 0, col_sphere(3), 0, q);
  return m;
}

CongruenceClass name_group(const std::vector<const GroupPiece*>& g) {
  CongruenceClass c;
  c.item = 0;
  bool leftover = false, has_dec = false, stray = false;
  std::vector<std::pair<std::string, CatalogItem>> shapes;
  std::vector<std::string> units;
  std::vector<WordInfo> winfos;
  std::vector<std::string> bandnames;
  for (const auto* p : g) {
    (p->prime == 2 ? c.parts2 : c.parts3).push_back(p->sm.name);
    if (p->leftover) {
      leftover = true;
      continue;
    }
    if (p->prime == 2) {
      auto ci = catalog_parse(p->sm.name);
      if (!ci) {
        leftover = true;
        continue;
      }
      const CatalogShape& sh = catalog_shapes()[ci->shape];
      if (sh.unit)
        units.push_back(sh.stem);
      else
        shapes.push_back({sh.stem, *ci});
    } else if (p->sm.kind == SummandKind::band) {
      bandnames.push_back(p->sm.name);
    } else {
      WordInfo wi = word_info(Word::parse(p->sm.name));
      has_dec = has_dec || wi.has_dec;
      winfos.push_back(std::move(wi));
    }
  }
  std::sort(c.parts2.begin(), c.parts2.end());
  std::sort(c.parts3.begin(), c.parts3.end());

  auto unclassified = [&](const std::string& tag) {
    c.kind = ClassKind::unclassified;
    c.name = tag;
    return c;
  };

  if (leftover) return unclassified("unresolved");

  if (g.size() == 1) {
    if (!bandnames.empty()) {
      c.kind = ClassKind::local3_band;
      c.name = bandnames.front();
      c.matrix = glue_from_names(c.parts2, c.parts3);
      return c;
    }
    if (!units.empty()) {
      c.kind = ClassKind::elementary;
      c.name = units.front();
      c.matrix = glue_from_names(c.parts2, c.parts3);
      return c;
    }
    if (!winfos.empty()) {
      const WordInfo& wi = winfos.front();
      if (wi.moore_single) {
        c.kind = ClassKind::moore;
        c.name = wi.moore_name;
        c.matrix = realize_moore(c.name);
        return c;
      }
      if (wi.pure_moore && !wi.zero) {
        c.kind = ClassKind::local3_string;
        c.name = wi.w.print();
        c.matrix = glue_from_names(c.parts2, c.parts3);
        return c;
      }
    }
    return unclassified(winfos.empty() ? "unbalanced" : atoms_key({winfos.front().atom}));
  }

  if (signed_sum(g) != Fp{} || !bandnames.empty()) return unclassified("unbalanced");

  std::vector<std::string> atoms;
  const WordInfo* nonzero_word = nullptr;
  int nonzero_words = 0;
  const WordInfo* dec_conn = nullptr;
  for (const auto& wi : winfos) {
    if (wi.moore_single || (wi.pure_moore && !wi.zero)) stray = true;
    if (wi.zero) continue;
    atoms.push_back(wi.atom);
    nonzero_word = &wi;
    nonzero_words++;
    if (wi.atom.size() == 4 && wi.atom[0] == 'c' && wi.has_dec) dec_conn = &wi;
  }
  if (stray) return unclassified("unsplit torsion content");

  if (shapes.empty() && units.size() == 1 && nonzero_words == 1 && dec_conn &&
      dec_conn->atom == "c:02") {
    static const std::map<std::string, std::string> rigid = {
        {"S^n", "C_8^{n+4}"},
        {"Ceta^{n+2}", "(eta.4)_0^1"},
        {"Ceta2^{n+3}", "(eta2.4)_0^1"},
    };
    auto it = rigid.find(units.front());
    if (it != rigid.end()) {
      c.kind = ClassKind::liststarstar;
      c.name = it->second + "(r=" + std::to_string(dec_conn->dec_exp) + ")";
      c.matrix = glue_from_names(c.parts2, c.parts3);
      return c;
    }
  }

  for (const auto& [stem, ci] : shapes) atoms.push_back("S:" + stem);
  std::string key = atoms_key(atoms);

  if (atoms.empty()) {
    if (units.size() == 1) {
      c.kind = ClassKind::elementary;
      c.name = units.front();
      c.matrix = glue_from_names(c.parts2, c.parts3);
      return c;
    }
    return unclassified("unbalanced");
  }

  if (auto hit = ListTable::get().find(key)) {
    c.kind = has_dec ? ClassKind::liststarstar : ClassKind::liststar;
    c.item = *hit;
    c.name = "item" + std::to_string(*hit);
    c.matrix = glue_from_names(c.parts2, c.parts3);
    return c;
  }

  if (shapes.empty() && nonzero_words == 1) {
    c.kind = has_dec ? ClassKind::liststarstar : ClassKind::local3_string;
    c.name = nonzero_word->w.print();
    c.matrix = glue_from_names(c.parts2, c.parts3);
    return c;
  }

  return unclassified(key);
}

}  // namespace

Classification classify(const BlockMatrix& a, const DecomposeOptions& opt) {
  BlockMatrix m = a;
  std::vector<std::pair<int, int>> decorated;
  std::vector<std::string> odd;
  if (a.variant() == Variant::integral_ext) {
    ExtReduction er = diagonalize_integral_block(a);
    m = std::move(er.mat);
    decorated = std::move(er.decorated);
    odd = std::move(er.odd_moore);
  } else if (a.variant() != Variant::integral) {
    throw DomainError("classify: integral matrix required");
  }

  LocalizedMatrix L2 = localize(m, 2);
  LocalizedMatrix L3 = localize(m, 3);

  BlockMatrix m2 = L2.mat;
  BlockMatrix m3 = L3.mat;
  if (!decorated.empty()) {
    std::set<std::pair<StripeLabel, int>> marks;
    std::map<std::pair<StripeLabel, int>, int> exps;
    for (const auto& [off, r] : decorated) {
      marks.insert({col_sphere(3), off});
      exps[{col_sphere(3), off}] = r;
    }
    std::vector<int> keep_rows, keep_cols;
    for (int r = 0; r < L2.mat.rows_total(); ++r) keep_rows.push_back(r);
    for (int ccol = 0; ccol < L2.mat.cols_total(); ++ccol)
      if (!marks.count(L2.col_src[ccol])) keep_cols.push_back(ccol);
    m2 = L2.mat.submatrix(keep_rows, keep_cols);

    // decorated columns keep their own pinned stripes at 3
    int nc = L3.mat.cols_total();
    std::vector<StripeLabel> lab(nc);
    std::map<StripeLabel, int> dims;
    std::vector<int> off(nc);
    for (int j = 0; j < nc; ++j) {
      StripeLabel l = L3.mat.line_label(Side::col, j);
      auto it = exps.find(L3.col_src[j]);
      if (it != exps.end()) l = col_dec(it->second);
      lab[j] = l;
      off[j] = dims[l]++;
    }
    std::vector<Stripe> rows(L3.mat.row_stripes().begin(), L3.mat.row_stripes().end());
    std::vector<Stripe> cols;
    for (const auto& [l, d] : dims) cols.push_back({l, d});
    BlockMatrix rebuilt = BlockMatrix::make(Variant::local3, rows, cols);
    for (int r = 0; r < L3.mat.rows_total(); ++r)
      for (int j = 0; j < nc; ++j) {
        std::int64_t v = L3.mat.get(r, j);
        if (v == 0) continue;
        auto [ri, ro] = L3.mat.locate(Side::row, r);
        rebuilt.set_at(L3.mat.row_stripes()[ri].label, ro, lab[j], off[j], v);
      }
    m3 = rebuilt;
  }

  Decomposition d2 = decompose(m2, opt);
  Decomposition d3 = decompose(m3, opt);

  Classification out;
  out.status = d2.status == SearchStatus::ok && d3.status == SearchStatus::ok
                   ? SearchStatus::ok
                   : SearchStatus::budget_exceeded;

  std::vector<GroupPiece> ps;
  for (const auto& s : d2.summands) ps.push_back({2, s, frame_footprint(s.mat), false});
  for (const auto& s : d3.summands) ps.push_back({3, s, frame_footprint(s.mat), false});
  for (const auto& l : d2.leftovers)
    ps.push_back({2, {SummandKind::catalog, "p2 " + l.key(), l}, frame_footprint(l), true});
  for (const auto& l : d3.leftovers)
    ps.push_back({3, {SummandKind::catalog, "p3 " + l.key(), l}, frame_footprint(l), true});
  std::stable_sort(ps.begin(), ps.end(), [](const GroupPiece& a, const GroupPiece& b) {
    return std::tie(a.prime, a.sm.name) < std::tie(b.prime, b.sm.name);
  });

  bool resolved = true;
  auto groups = balance_groups(ps, &resolved);
  for (const auto& gi : groups) {
    std::vector<const GroupPiece*> g;
    for (int idx : gi) g.push_back(&ps[idx]);
    out.classes.push_back(name_group(g));
  }
  for (const auto& q : odd) {
    CongruenceClass c;
    c.kind = ClassKind::moore;
    c.name = q;
    c.matrix = realize_moore(q);
    out.classes.push_back(std::move(c));
  }

  std::sort(out.classes.begin(), out.classes.end(),
            [](const CongruenceClass& a, const CongruenceClass& b) {
              auto ka = std::make_tuple(static_cast<int>(a.kind), a.name, a.parts2, a.parts3);
              auto kb = std::make_tuple(static_cast<int>(b.kind), b.name, b.parts2, b.parts3);
              return ka < kb;
            });

  out.complete = resolved && d2.complete && d3.complete;
  for (const auto& cl : out.classes)
    if (cl.kind == ClassKind::unclassified) out.complete = false;
  return out;
}

CongruenceClass liststar_name(const std::vector<Summand>& parts2,
                              const std::vector<Summand>& parts3) {
  std::vector<GroupPiece> ps;
  for (const auto& s : parts2) {
    if (s.mat.variant() != Variant::local2)
      throw DomainError("liststar_name: parts2 must be 2-local summands");
    ps.push_back({2, s, frame_footprint(s.mat), false});
  }
  for (const auto& s : parts3) {
    if (s.mat.variant() != Variant::local3)
      throw DomainError("liststar_name: parts3 must be 3-local summands");
    ps.push_back({3, s, frame_footprint(s.mat), false});
  }
  std::vector<const GroupPiece*> g;
  for (const auto& p : ps) g.push_back(&p);
  return name_group(g);
}

BlockMatrix realize_class(const CongruenceClass& c) {
  switch (c.kind) {
    case ClassKind::moore:
      return realize_moore(c.name);
    case ClassKind::unclassified:
      throw DomainError("realize_class: class has no canonical representative");
    default:
      return glue_from_names(c.parts2, c.parts3);
  }
}

std::string class_parameters(const CongruenceClass& c) {
  if (c.kind == ClassKind::elementary || c.kind == ClassKind::moore) return "";
  if (c.kind == ClassKind::unclassified) {
    std::string s;
    for (const auto& n : c.parts2) s += (s.empty() ? "" : " + ") + n;
    for (const auto& n : c.parts3) s += (s.empty() ? "" : " + ") + n;
    return s;
  }
  std::vector<const CatalogShape*> shape_of;
  std::vector<CatalogItem> items;
  std::vector<std::string> unit_list;
  for (const auto& n : c.parts2) {
    auto ci = catalog_parse(n);
    if (!ci) continue;
    const CatalogShape& sh = catalog_shapes()[ci->shape];
    if (sh.unit) {
      unit_list.push_back(sh.stem);
      continue;
    }
    shape_of.push_back(&sh);
    items.push_back(*ci);
  }
  std::vector<WordInfo> infos;
  std::vector<std::string> others;
  for (const auto& n : c.parts3) {
    try {
      infos.push_back(word_info(Word::parse(n)));
    } catch (const std::exception&) {
      others.push_back("[" + n + "]");
    }
  }
  std::vector<const WordInfo*> wptrs;
  for (const auto& i : infos) wptrs.push_back(&i);
  auto fold = assign_folds(shape_of, wptrs);
  std::vector<int> vflag(shape_of.size(), 0), wflag(shape_of.size(), 0);
  for (std::size_t j = 0; j < fold.size(); ++j) {
    if (fold[j].first < 0) continue;
    (fold[j].second == 0 ? vflag : wflag)[fold[j].first] = 1;
  }
  std::vector<std::string> bits;
  for (std::size_t i = 0; i < shape_of.size(); ++i) {
    const CatalogShape& sh = *shape_of[i];
    std::string s = sh.stem;
    std::string params;
    if (sh.v_kind != ParamKind::none) {
      std::int64_t m = sh.v_kind == ParamKind::z8_full || sh.v_kind == ParamKind::z8_shifted ? 24 : 12;
      params += "v=" + std::to_string(merged_display(items[i].v, vflag[i], m));
    }
    if (sh.w_kind != ParamKind::none) {
      std::int64_t m = sh.w_kind == ParamKind::z8_full || sh.w_kind == ParamKind::z8_shifted ? 24 : 12;
      if (!params.empty()) params += ",";
      params += "w=" + std::to_string(merged_display(items[i].w, wflag[i], m));
    }
    if (!params.empty()) s += "{" + params + "}";
    bits.push_back(s);
  }
  for (const auto& u : unit_list) bits.push_back(u);
  bool name_shown = false;
  for (std::size_t j = 0; j < infos.size(); ++j) {
    if (fold[j].first >= 0) continue;       // absorbed into a parameter above
    if (infos[j].zero && infos[j].zero_lam >= 0) continue;  // idle backing letter
    std::string p = infos[j].w.print();
    if (!name_shown && p == c.name) {
      name_shown = true;  // string classes are named by this word already
      continue;
    }
    bits.push_back("[" + p + "]");
  }
  for (const auto& o : others) bits.push_back(o);
  std::string s;
  for (const auto& b : bits) s += (s.empty() ? "" : " + ") + b;
  return s;
}

}  // namespace stripemat
