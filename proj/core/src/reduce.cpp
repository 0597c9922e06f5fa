#include "stripemat/reduce.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>

#include "stripemat/catalog2.hpp"
#include "stripemat/chains3.hpp"

namespace stripemat {
namespace {

std::pair<int, std::string> potential(const BlockMatrix& m) {
  return {m.nonzero_count(), m.key()};
}

int stripe_of_label(const BlockMatrix& m, Side s, const StripeLabel& l) {
  const auto& stripes = s == Side::row ? m.row_stripes() : m.col_stripes();
  for (size_t i = 0; i < stripes.size(); ++i)
    if (stripes[i].label == l) return static_cast<int>(i);
  return -1;
}

std::int64_t max_cell_mod(const BlockMatrix& m) {
  std::int64_t mx = 2;
  for (int r = 0; r < m.rows_total(); ++r)
    for (int c = 0; c < m.cols_total(); ++c) mx = std::max(mx, m.cell_mod(r, c));
  return mx;
}

bool frame_equal(const BlockMatrix& a, const BlockMatrix& b) {
  return a.variant() == b.variant() && a.row_stripes() == b.row_stripes() &&
         a.col_stripes() == b.col_stripes();
}

// letter-bearing stripes at 3; the moore_n1 @2 slot is the only dead one
bool letter_stripe3(const StripeLabel& l) {
  return !(l.kind == GenKind::moore_n1 && l.slot == 2);
}

const std::vector<Word>& cached_words(int max_letters, int max_exp) {
  static std::map<std::pair<int, int>, std::vector<Word>> cache;
  auto [it, fresh] = cache.try_emplace({max_letters, max_exp});
  if (fresh) it->second = enumerate_words(max_letters, max_exp);
  return it->second;
}

const std::vector<BandWord>& cached_bands(int pairs, int exp, int deg, int z) {
  static std::map<std::tuple<int, int, int, int>, std::vector<BandWord>> cache;
  auto [it, fresh] = cache.try_emplace({pairs, exp, deg, z});
  if (fresh) it->second = enumerate_bands(pairs, exp, deg, z);
  return it->second;
}

}  // namespace

BlockMatrix sweep_reduce(const BlockMatrix& m, bool strict_units) {
  TransformContext ctx(m, strict_units);
  BlockMatrix cur = m;
  auto best = potential(cur);
  const std::int64_t kmax = max_cell_mod(m);

  auto lines_of = [&](Side s, const StripeLabel& l) {
    std::vector<int> out;
    int si = stripe_of_label(cur, s, l);
    if (si < 0) return out;
    const auto& stripes = s == Side::row ? cur.row_stripes() : cur.col_stripes();
    int base = cur.stripe_base(s, si);
    for (int d = 0; d < stripes[si].dim; ++d) out.push_back(base + d);
    return out;
  };

  auto try_step = [&](const Step& st) {
    BlockMatrix t = ctx.applied(cur, st);
    auto p = potential(t);
    if (p < best) {
      cur = std::move(t);
      best = std::move(p);
      return true;
    }
    return false;
  };

  bool improved = true;
  for (int pass = 0; improved && pass < 500; ++pass) {
    improved = false;
    for (Side side : {Side::row, Side::col}) {
      int total = side == Side::row ? cur.rows_total() : cur.cols_total();
      for (int i = 0; i < total; ++i) {
        if (!ctx.primary_line(side, i)) continue;
        for (int j = 0; j < total; ++j) {
          if (i == j || !ctx.primary_line(side, j)) continue;
          if (cur.locate(side, i).first != cur.locate(side, j).first) continue;
          for (std::int64_t k = 1; k < kmax; ++k)
            improved |= try_step({Step::Kind::add_within, side, i, j, k, -1});
        }
      }
      const auto& rules = ctx.rules(side);
      for (int r = 0; r < static_cast<int>(rules.size()); ++r) {
        for (int j : lines_of(side, rules[r].src))
          for (int i : lines_of(side, rules[r].tgt))
            for (std::int64_t k = 1; k < kmax; ++k)
              improved |= try_step({Step::Kind::add_cross, side, i, j, k, r});
      }
    }
  }
  return cur;
}

std::optional<Summand> identify_summand(const BlockMatrix& piece, const DecomposeOptions& opt) {
  OrbitOptions oracle = opt.oracle;
  auto equiv = [&](const BlockMatrix& cand) {
    auto r = orbit_equivalent(piece, cand, oracle);
    return r.status == SearchStatus::ok && r.equivalent;
  };
  if (piece.variant() == Variant::local2) {
    for (const auto& it : enumerate_catalog()) {
      BlockMatrix cand = catalog_matrix(it);
      if (!frame_equal(piece, cand)) continue;
      if (equiv(cand)) return Summand{SummandKind::catalog, catalog_name(it), piece};
    }
    return std::nullopt;
  }
  if (piece.variant() != Variant::local3) throw DomainError("identify_summand: 2- or 3-local only");

  int letters = 0, max_exp = 1, moore_pairs = 0, max_dim = 1;
  for (Side s : {Side::row, Side::col}) {
    for (const auto& st : s == Side::row ? piece.row_stripes() : piece.col_stripes()) {
      if (letter_stripe3(st.label)) letters += st.dim;
      max_exp = std::max(max_exp, static_cast<int>(st.label.exp));
      max_dim = std::max(max_dim, st.dim);
      if (st.label.kind == GenKind::moore_n && st.label.slot == 0) moore_pairs += st.dim;
    }
  }
  std::vector<int> dec_exps;
  for (const auto& st : piece.col_stripes())
    if (st.label.kind == GenKind::dec_col)
      for (int d = 0; d < st.dim; ++d) dec_exps.push_back(st.label.exp);
  std::sort(dec_exps.begin(), dec_exps.end());

  if (letters <= opt.max_word_letters && dec_exps.empty()) {
    for (const auto& w : cached_words(letters, max_exp)) {
      BlockMatrix cand = realize_string(w);
      if (!frame_equal(piece, cand)) continue;
      if (equiv(cand)) return Summand{SummandKind::string, w.print(), piece};
    }
  } else if (letters <= opt.max_word_letters) {
    // Distribute the pinned exponents over the f0 letters of each candidate
    // in every order; the piece fixes which column stripes are decorated.
    const size_t k = dec_exps.size();
    for (const auto& w : cached_words(letters, max_exp)) {
      std::vector<size_t> f0pos;
      for (size_t i = 0; i < w.letters.size(); ++i)
        if (w.letters[i].family == ChainLetter::Family::col_a0) f0pos.push_back(i);
      if (f0pos.size() < k) continue;
      std::vector<size_t> comb(k);
      for (size_t i = 0; i < k; ++i) comb[i] = i;
      while (true) {
        std::vector<int> perm = dec_exps;
        do {
          Word cw = w;
          for (size_t t = 0; t < k; ++t) cw.letters[f0pos[comb[t]]].dec = perm[t];
          BlockMatrix cand = realize_string(cw);
          if (frame_equal(piece, cand) && equiv(cand))
            return Summand{SummandKind::string, cw.canonical().print(), piece};
        } while (std::next_permutation(perm.begin(), perm.end()));
        int i = static_cast<int>(k) - 1;
        while (i >= 0 && comb[i] == f0pos.size() - k + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      }
    }
  }
  int pairs = std::min(opt.max_band_pairs, moore_pairs);
  int z_cap = std::min(opt.max_band_z, max_dim);
  int deg_cap = std::min(opt.max_poly_degree, max_dim);
  if (pairs > 0) {
    for (const auto& b : cached_bands(pairs, max_exp, deg_cap, z_cap)) {
      BlockMatrix cand = realize_band(b);
      if (!frame_equal(piece, cand)) continue;
      if (equiv(cand)) return Summand{SummandKind::band, b.print(), piece};
    }
  }
  return std::nullopt;
}

Decomposition decompose(const BlockMatrix& m, const DecomposeOptions& opt) {
  if (m.variant() != Variant::local2 && m.variant() != Variant::local3)
    throw DomainError("decompose: 2- or 3-local only");
  Decomposition out;
  std::vector<BlockMatrix> queue = split_components(m);
  while (!queue.empty()) {
    BlockMatrix piece = std::move(queue.back());
    queue.pop_back();
    if (opt.structured) {
      BlockMatrix reduced = sweep_reduce(piece);
      auto comps = split_components(reduced);
      if (comps.size() > 1) {
        for (auto& c : comps) queue.push_back(std::move(c));
        continue;
      }
      piece = std::move(comps.front());
    }
    if (piece.rows_total() > opt.oracle.max_lines || piece.cols_total() > opt.oracle.max_lines) {
      out.leftovers.push_back(std::move(piece));
      out.status = SearchStatus::budget_exceeded;
      continue;
    }
    auto dec = orbit_decompose(piece, opt.oracle);
    out.explored += dec.explored;
    if (dec.status != SearchStatus::ok) {
      out.leftovers.push_back(std::move(piece));
      out.status = SearchStatus::budget_exceeded;
      continue;
    }
    if (dec.summands.size() > 1) {
      for (auto& c : dec.summands) queue.push_back(std::move(c));
      continue;
    }
    if (auto s = identify_summand(piece, opt))
      out.summands.push_back(std::move(*s));
    else
      out.leftovers.push_back(std::move(piece));
  }
  out.complete = out.leftovers.empty();
  std::sort(out.summands.begin(), out.summands.end(), [](const Summand& a, const Summand& b) {
    return std::tie(a.kind, a.name) < std::tie(b.kind, b.name);
  });
  return out;
}

std::vector<std::string> summand_names(const Decomposition& d) {
  std::vector<std::string> out;
  out.reserve(d.summands.size());
  for (const auto& s : d.summands) out.push_back(s.name);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace stripemat
