#include "stripemat/transform.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <unordered_set>

#include "stripemat/residue.hpp"

namespace stripemat {

namespace {

// Global-line partner map for one side: line k of a stripe pairs with line k
// of the linked slot, -1 when the stripe stands alone.
std::vector<int> partner_lines(const BlockMatrix& m, Side side) {
  const auto& stripes = side == Side::row ? m.row_stripes() : m.col_stripes();
  std::vector<int> out(side == Side::row ? m.rows_total() : m.cols_total(), -1);
  for (size_t i = 0; i < stripes.size(); ++i) {
    auto p = slot_partner(stripes[i].label);
    if (!p) continue;
    int j = m.stripe_index(side, *p);
    if (j < 0) continue;
    int bi = m.stripe_base(side, static_cast<int>(i));
    int bj = m.stripe_base(side, j);
    for (int k = 0; k < stripes[i].dim; ++k) out[bi + k] = bj + k;
  }
  return out;
}

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Line components: rows and cols joined through nonzero entries and through
// linked-slot pairing. Returns the component id per line (rows first).
int line_components(const BlockMatrix& m, std::vector<int>& comp) {
  int rt = m.rows_total(), ct = m.cols_total();
  Dsu dsu(rt + ct);
  for (int r = 0; r < rt; ++r)
    for (int c = 0; c < ct; ++c)
      if (m.get(r, c) != 0) dsu.unite(r, rt + c);
  auto rp = partner_lines(m, Side::row);
  for (int r = 0; r < rt; ++r)
    if (rp[r] >= 0) dsu.unite(r, rp[r]);
  auto cp = partner_lines(m, Side::col);
  for (int c = 0; c < ct; ++c)
    if (cp[c] >= 0) dsu.unite(rt + c, rt + cp[c]);

  comp.assign(rt + ct, -1);
  int n = 0;
  for (int x = 0; x < rt + ct; ++x) {
    int r = dsu.find(x);
    if (comp[r] < 0) comp[r] = n++;
    comp[x] = comp[r];
  }
  return n;
}

}  // namespace

TransformContext::TransformContext(const BlockMatrix& shape, bool strict_units)
    : shape_(shape), strict_units_(strict_units) {
  auto live_labels = [&](Side side) {
    std::vector<StripeLabel> ls;
    const auto& ss = side == Side::row ? shape.row_stripes() : shape.col_stripes();
    for (const auto& s : ss)
      if (s.dim > 0) ls.push_back(s.label);
    return ls;
  };
  row_rules_ = addition_rules(shape.variant(), Side::row, live_labels(Side::row));
  col_rules_ = addition_rules(shape.variant(), Side::col, live_labels(Side::col));
  row_partner_ = partner_lines(shape, Side::row);
  col_partner_ = partner_lines(shape, Side::col);

  auto build_side = [&](Side side, std::vector<char>& primary,
                        std::vector<std::vector<std::int64_t>>& units,
                        std::vector<int>& stripe_of) {
    const auto& ss = side == Side::row ? shape.row_stripes() : shape.col_stripes();
    int total = side == Side::row ? shape.rows_total() : shape.cols_total();
    primary.assign(total, 1);
    units.resize(ss.size());
    stripe_of.assign(total, -1);
    for (size_t i = 0; i < ss.size(); ++i) {
      int base = shape.stripe_base(side, static_cast<int>(i));
      for (int k = 0; k < ss[i].dim; ++k) stripe_of[base + k] = static_cast<int>(i);

      auto p = slot_partner(ss[i].label);
      bool is_primary = !p || shape.stripe_index(side, *p) < 0 || ss[i].label < *p;
      if (!is_primary)
        for (int k = 0; k < ss[i].dim; ++k) primary[base + k] = 0;

      // Scaling a line must be invertible on every cell the generator copy
      // touches, across both linked slots.
      std::int64_t l = 1;
      bool has_int = false;
      auto absorb = [&](int stripe_idx) {
        int b = shape.stripe_base(side, stripe_idx);
        int d = (side == Side::row ? shape.row_stripes() : shape.col_stripes())[stripe_idx].dim;
        int other = side == Side::row ? shape.cols_total() : shape.rows_total();
        for (int k = 0; k < d; ++k)
          for (int o = 0; o < other; ++o) {
            std::int64_t m = side == Side::row ? shape.cell_mod(b + k, o) : shape.cell_mod(o, b + k);
            if (m == 0)
              has_int = true;
            else if (m > 1)
              l = std::lcm(l, m);
          }
      };
      absorb(static_cast<int>(i));
      if (p) {
        int pi = shape.stripe_index(side, *p);
        if (pi >= 0) absorb(pi);
      }
      units[i] = unit_scalars(l, has_int, strict_units_);
    }
  };
  build_side(Side::row, row_primary_, row_units_, row_stripe_of_);
  build_side(Side::col, col_primary_, col_units_, col_stripe_of_);
}

const std::vector<std::int64_t>& TransformContext::line_units(Side s, int line) const {
  int si = (s == Side::row ? row_stripe_of_ : col_stripe_of_)[line];
  return (s == Side::row ? row_units_ : col_units_)[si];
}

void TransformContext::add_cross_into(BlockMatrix& m, const AdditionRule& rule, Side side, int tgt,
                                      int src, std::int64_t k) const {
  if (side == Side::row) {
    for (int c = 0; c < m.cols_total(); ++c) {
      std::int64_t mt = m.cell_mod(tgt, c);
      if (mt == 1) continue;
      std::int64_t v = m.get(src, c);
      if (v == 0) continue;
      std::int64_t t = transfer_multiplier(rule.coeff, m.cell_mod(src, c), mt);
      if (t == 0) continue;
      m.add_at(tgt, c, k * t * v);
    }
  } else {
    for (int r = 0; r < m.rows_total(); ++r) {
      std::int64_t mt = m.cell_mod(r, tgt);
      if (mt == 1) continue;
      std::int64_t v = m.get(r, src);
      if (v == 0) continue;
      std::int64_t t = transfer_multiplier(rule.coeff, m.cell_mod(r, src), mt);
      if (t == 0) continue;
      m.add_at(r, tgt, k * t * v);
    }
  }
}

void TransformContext::apply(BlockMatrix& m, const Step& s) const {
  auto& raw = m.raw();
  int ct = m.cols_total();
  auto idx = [&](int r, int c) { return static_cast<size_t>(r) * ct + c; };

  auto swap_pair = [&](int i, int j) {
    if (s.side == Side::row) {
      for (int c = 0; c < ct; ++c) std::swap(raw[idx(i, c)], raw[idx(j, c)]);
    } else {
      for (int r = 0; r < m.rows_total(); ++r) std::swap(raw[idx(r, i)], raw[idx(r, j)]);
    }
  };
  auto scale_one = [&](int i, std::int64_t u) {
    if (s.side == Side::row) {
      for (int c = 0; c < ct; ++c)
        raw[idx(i, c)] = normalize_mod(raw[idx(i, c)] * u, m.cell_mod(i, c));
    } else {
      for (int r = 0; r < m.rows_total(); ++r)
        raw[idx(r, i)] = normalize_mod(raw[idx(r, i)] * u, m.cell_mod(r, i));
    }
  };
  auto add_one = [&](int i, int j, std::int64_t k) {
    if (s.side == Side::row) {
      for (int c = 0; c < ct; ++c)
        raw[idx(i, c)] = normalize_mod(raw[idx(i, c)] + k * raw[idx(j, c)], m.cell_mod(i, c));
    } else {
      for (int r = 0; r < m.rows_total(); ++r)
        raw[idx(r, i)] = normalize_mod(raw[idx(r, i)] + k * raw[idx(r, j)], m.cell_mod(r, i));
    }
  };

  switch (s.kind) {
    case Step::Kind::swap_lines: {
      swap_pair(s.i, s.j);
      int pi = partner_line(s.side, s.i), pj = partner_line(s.side, s.j);
      if (pi >= 0) swap_pair(pi, pj);
      break;
    }
    case Step::Kind::scale_line: {
      scale_one(s.i, s.k);
      int pi = partner_line(s.side, s.i);
      if (pi >= 0) scale_one(pi, s.k);
      break;
    }
    case Step::Kind::add_within: {
      add_one(s.i, s.j, s.k);
      int pi = partner_line(s.side, s.i), pj = partner_line(s.side, s.j);
      if (pi >= 0) add_one(pi, pj, s.k);
      break;
    }
    case Step::Kind::add_cross: {
      const auto& rule = rules(s.side).at(static_cast<size_t>(s.rule));
      add_cross_into(m, rule, s.side, s.i, s.j, s.k);
      break;
    }
  }
}

BlockMatrix TransformContext::applied(const BlockMatrix& m, const Step& s) const {
  BlockMatrix out = m;
  apply(out, s);
  return out;
}

std::vector<Step> TransformContext::generators() const {
  std::vector<Step> out;
  auto side_gens = [&](Side side) {
    const auto& ss = side == Side::row ? shape_.row_stripes() : shape_.col_stripes();
    const auto& units = side == Side::row ? row_units_ : col_units_;
    for (size_t si = 0; si < ss.size(); ++si) {
      int d = ss[si].dim;
      if (d == 0) continue;
      int base = shape_.stripe_base(side, static_cast<int>(si));
      if (!primary_line(side, base)) continue;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          out.push_back({Step::Kind::swap_lines, side, base + i, base + j, 1, -1});
      for (int i = 0; i < d; ++i)
        for (std::int64_t u : units[si])
          if (u != 1) out.push_back({Step::Kind::scale_line, side, base + i, 0, u, -1});
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (i != j) out.push_back({Step::Kind::add_within, side, base + i, base + j, 1, -1});
    }
    const auto& rs = rules(side);
    for (size_t ri = 0; ri < rs.size(); ++ri) {
      int ti = shape_.stripe_index(side, rs[ri].tgt);
      int si2 = shape_.stripe_index(side, rs[ri].src);
      if (ti < 0 || si2 < 0) continue;
      int tb = shape_.stripe_base(side, ti), sb = shape_.stripe_base(side, si2);
      int td = (side == Side::row ? shape_.row_stripes() : shape_.col_stripes())[ti].dim;
      int sd = (side == Side::row ? shape_.row_stripes() : shape_.col_stripes())[si2].dim;
      for (int i = 0; i < td; ++i)
        for (int j = 0; j < sd; ++j)
          out.push_back(
              {Step::Kind::add_cross, side, tb + i, sb + j, 1, static_cast<int>(ri)});
    }
  };
  side_gens(Side::row);
  side_gens(Side::col);
  return out;
}

BlockMatrix TransformContext::scramble(const BlockMatrix& m, int steps, std::uint64_t seed) const {
  auto gens = generators();
  BlockMatrix out = m;
  if (gens.empty() || steps <= 0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, gens.size() - 1);
  for (int s = 0; s < steps; ++s) apply(out, gens[pick(rng)]);
  return out;
}

namespace {

struct OrbitDriver {
  BlockMatrix base;
  TransformContext ctx;
  std::vector<Step> gens;
  BlockMatrix work, scratch;

  OrbitDriver(const BlockMatrix& a, const OrbitOptions& opt)
      : base(a.normalized()), ctx(base, opt.strict_units), gens(ctx.generators()), work(base),
        scratch(base) {}

  std::string pack(const BlockMatrix& m) const {
    const auto& raw = m.raw();
    std::string s(raw.size(), '\0');
    for (size_t i = 0; i < raw.size(); ++i) s[i] = static_cast<char>(raw[i]);
    return s;
  }
  void unpack(const std::string& s, BlockMatrix& m) const {
    auto& raw = m.raw();
    for (size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<unsigned char>(s[i]);
  }

  // Breadth-first closure under the generator set. on_state sees every
  // distinct state once (the start included) and may stop the search.
  template <typename OnState>
  SearchStatus run(std::size_t budget, std::size_t& explored, OnState&& on_state) {
    std::unordered_set<std::string> seen;
    std::deque<std::string> queue;
    std::string s0 = pack(base);
    seen.insert(s0);
    queue.push_back(s0);
    auto done = [&](SearchStatus st) {
      explored = seen.size();
      return st;
    };
    if (on_state(s0)) return done(SearchStatus::ok);
    while (!queue.empty()) {
      std::string s = std::move(queue.front());
      queue.pop_front();
      for (const Step& g : gens) {
        unpack(s, work);
        ctx.apply(work, g);
        std::string t = pack(work);
        if (seen.count(t)) continue;
        if (seen.size() >= budget) return done(SearchStatus::budget_exceeded);
        seen.insert(t);
        queue.push_back(t);
        if (on_state(t)) return done(SearchStatus::ok);
      }
    }
    return done(SearchStatus::ok);
  }
};

void check_searchable(const BlockMatrix& a, const OrbitOptions& opt) {
  if (a.rows_total() > opt.max_lines || a.cols_total() > opt.max_lines)
    throw DomainError("orbit search: matrix exceeds the line cap");
  for (int r = 0; r < a.rows_total(); ++r)
    for (int c = 0; c < a.cols_total(); ++c)
      if (a.cell_mod(r, c) == 0)
        throw DomainError("orbit search: integer cell has an unbounded orbit");
}

bool same_frame(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.variant() != b.variant()) return false;
  auto eq = [](const std::vector<Stripe>& x, const std::vector<Stripe>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!(x[i].label == y[i].label) || x[i].dim != y[i].dim) return false;
    return true;
  };
  return eq(a.row_stripes(), b.row_stripes()) && eq(a.col_stripes(), b.col_stripes());
}

}  // namespace

OrbitEquivalence orbit_equivalent(const BlockMatrix& a, const BlockMatrix& b,
                                  const OrbitOptions& opt) {
  BlockMatrix an = a.normalized(), bn = b.normalized();
  OrbitEquivalence res;
  if (!same_frame(an, bn)) return res;  // distinct frames never meet
  check_searchable(an, opt);
  OrbitDriver d(an, opt);
  std::string target = d.pack(bn);
  bool found = false;
  res.status = d.run(opt.max_states, res.explored, [&](const std::string& s) {
    if (s == target) found = true;
    return found;
  });
  res.equivalent = found;
  return res;
}

OrbitCanonical orbit_canonical(const BlockMatrix& a, const OrbitOptions& opt) {
  BlockMatrix an = a.normalized();
  check_searchable(an, opt);
  OrbitDriver d(an, opt);
  OrbitCanonical res;
  std::string best;
  bool have = false;
  res.status = d.run(opt.max_states, res.explored, [&](const std::string& s) {
    if (!have || s < best) {
      best = s;
      have = true;
    }
    return false;
  });
  res.canon = an;
  if (have) d.unpack(best, res.canon);
  return res;
}

OrbitSplit orbit_indecomposable(const BlockMatrix& a, const OrbitOptions& opt) {
  BlockMatrix an = a.normalized();
  check_searchable(an, opt);
  OrbitDriver d(an, opt);
  OrbitSplit res;
  int total_lines = an.rows_total() + an.cols_total();
  if (total_lines == 0) return res;  // empty matrix: nothing to split, not a summand
  res.status = d.run(opt.max_states, res.explored, [&](const std::string& s) {
    d.unpack(s, d.scratch);
    std::vector<int> comp;
    if (line_components(d.scratch, comp) > 1) {
      res.witness = d.scratch;
      return true;
    }
    return false;
  });
  res.indecomposable = res.status == SearchStatus::ok && !res.witness;
  return res;
}

OrbitDecomposition orbit_decompose(const BlockMatrix& a, const OrbitOptions& opt) {
  BlockMatrix an = a.normalized();
  check_searchable(an, opt);
  OrbitDecomposition res;
  if (an.rows_total() + an.cols_total() == 0) return res;
  OrbitDriver d(an, opt);
  int best_n = -1;
  std::string best;
  res.status = d.run(opt.max_states, res.explored, [&](const std::string& s) {
    d.unpack(s, d.scratch);
    std::vector<int> comp;
    int n = line_components(d.scratch, comp);
    if (n > best_n || (n == best_n && s < best)) {
      best_n = n;
      best = s;
    }
    return false;
  });
  d.unpack(best, d.scratch);
  res.summands = split_components(d.scratch);
  return res;
}

std::vector<BlockMatrix> split_components(const BlockMatrix& a) {
  BlockMatrix an = a.normalized();
  int rt = an.rows_total(), ct = an.cols_total();
  std::vector<int> comp;
  int n = line_components(an, comp);
  std::vector<BlockMatrix> parts;
  for (int k = 0; k < n; ++k) {
    std::vector<int> rows, cols;
    for (int r = 0; r < rt; ++r)
      if (comp[r] == k) rows.push_back(r);
    for (int c = 0; c < ct; ++c)
      if (comp[rt + c] == k) cols.push_back(c);
    parts.push_back(an.submatrix(rows, cols));
  }
  std::sort(parts.begin(), parts.end(),
            [](const BlockMatrix& x, const BlockMatrix& y) { return x.serialize() < y.serialize(); });
  return parts;
}

}  // namespace stripemat
