#include "stripemat/shape.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <numeric>
#include <set>
#include <stdexcept>

namespace stripemat {

namespace {

// Order key: spheres first, then cones in fixed order, then Moore stripes by
// degree, exponent, slot.
std::array<int, 4> order_key(const StripeLabel& l) {
  switch (l.kind) {
    case GenKind::sphere:       return {0, l.level, 0, 0};
    case GenKind::cone_eta_n2:  return {1, 0, 0, l.slot};
    case GenKind::cone_eta2_n3: return {1, 1, 0, l.slot};
    case GenKind::cone_eta_n3:  return {1, 2, 0, l.slot};
    case GenKind::moore_n:      return {2, 0, l.exp, l.slot};
    case GenKind::moore_n1:     return {3, 0, l.exp, l.slot};
    case GenKind::moore_n3:     return {2, 0, l.exp, l.slot};
    case GenKind::dec_col:      return {4, 0, l.exp, 0};
  }
  return {9, 0, 0, 0};
}

[[noreturn]] void bad_token(std::string_view tok) {
  throw std::invalid_argument("unknown label token: " + std::string(tok));
}

int parse_int_at(std::string_view s, size_t& pos) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
  if (ec != std::errc() || p == s.data() + pos) throw std::invalid_argument("expected integer in label");
  pos = static_cast<size_t>(p - s.data());
  return v;
}

}  // namespace

bool StripeLabel::operator<(const StripeLabel& o) const {
  if (side != o.side) return side < o.side;
  return order_key(*this) < order_key(o);
}

std::string label_token(const StripeLabel& l) {
  switch (l.kind) {
    case GenKind::sphere:       return "S+" + std::to_string(l.level);
    case GenKind::cone_eta_n2:  return "Ceta[n+2]@" + std::to_string(l.slot);
    case GenKind::cone_eta2_n3: return "Ceta2[n+3]@" + std::to_string(l.slot);
    case GenKind::cone_eta_n3:  return "Ceta[n+3]@" + std::to_string(l.slot);
    case GenKind::moore_n:      return "M3^" + std::to_string(l.exp) + "[n]@" + std::to_string(l.slot);
    case GenKind::moore_n1:     return "M3^" + std::to_string(l.exp) + "[n+1]@" + std::to_string(l.slot);
    case GenKind::moore_n3:     return "M3^" + std::to_string(l.exp) + "[n+3]@" + std::to_string(l.slot);
    case GenKind::dec_col:      return "S+3(" + std::to_string(l.exp) + ")";
  }
  return "?";
}

StripeLabel parse_label(std::string_view tok, Side side) {
  StripeLabel l;
  l.side = side;
  auto expect = [&](std::string_view prefix, size_t& pos) {
    if (tok.substr(pos, prefix.size()) != prefix) bad_token(tok);
    pos += prefix.size();
  };
  size_t pos = 0;
  if (tok.rfind("S+", 0) == 0) {
    pos = 2;
    l.kind = GenKind::sphere;
    l.level = static_cast<std::int16_t>(parse_int_at(tok, pos));
    if (pos < tok.size() && tok[pos] == '(') {
      ++pos;
      l.kind = GenKind::dec_col;
      l.exp = static_cast<std::int16_t>(parse_int_at(tok, pos));
      if (pos >= tok.size() || tok[pos] != ')') bad_token(tok);
      ++pos;
    }
  } else if (tok.rfind("Ceta2[n+3]@", 0) == 0) {
    pos = 11;
    l.kind = GenKind::cone_eta2_n3;
    l.slot = static_cast<std::int16_t>(parse_int_at(tok, pos));
  } else if (tok.rfind("Ceta[n+2]@", 0) == 0) {
    pos = 10;
    l.kind = GenKind::cone_eta_n2;
    l.slot = static_cast<std::int16_t>(parse_int_at(tok, pos));
  } else if (tok.rfind("Ceta[n+3]@", 0) == 0) {
    pos = 10;
    l.kind = GenKind::cone_eta_n3;
    l.slot = static_cast<std::int16_t>(parse_int_at(tok, pos));
  } else if (tok.rfind("M3^", 0) == 0) {
    pos = 3;
    l.exp = static_cast<std::int16_t>(parse_int_at(tok, pos));
    if (tok.substr(pos, 4) == "[n]@") {
      l.kind = GenKind::moore_n;
      pos += 4;
    } else if (tok.substr(pos, 6) == "[n+1]@") {
      l.kind = GenKind::moore_n1;
      pos += 6;
    } else if (tok.substr(pos, 6) == "[n+3]@") {
      l.kind = GenKind::moore_n3;
      pos += 6;
    } else {
      bad_token(tok);
    }
    l.slot = static_cast<std::int16_t>(parse_int_at(tok, pos));
  } else {
    bad_token(tok);
  }
  (void)expect;
  if (pos != tok.size()) bad_token(tok);

  // Structural checks independent of variant.
  auto ok = [&] {
    switch (l.kind) {
      case GenKind::sphere:
        return side == Side::row ? (l.level >= 0 && l.level <= 3) : (l.level == 3 || l.level == 4);
      case GenKind::cone_eta_n2:
        return side == Side::row && (l.slot == 0 || l.slot == 2);
      case GenKind::cone_eta2_n3:
        return side == Side::row && (l.slot == 0 || l.slot == 3);
      case GenKind::cone_eta_n3:
        return side == Side::row && (l.slot == 1 || l.slot == 3);
      case GenKind::moore_n:
        return side == Side::row && l.exp >= 1 && (l.slot == 0 || l.slot == 1);
      case GenKind::moore_n1:
        return side == Side::row && l.exp >= 1 && (l.slot == 1 || l.slot == 2);
      case GenKind::moore_n3:
        return side == Side::col && l.exp >= 1 && (l.slot == 3 || l.slot == 4);
      case GenKind::dec_col:
        return side == Side::col && l.level == 3 && l.exp >= 1;
    }
    return false;
  }();
  if (!ok) bad_token(tok);
  return l;
}

StripeLabel row_sphere(int level) {
  return StripeLabel{Side::row, GenKind::sphere, static_cast<std::int16_t>(level), 0, 0};
}
StripeLabel col_sphere(int level) {
  return StripeLabel{Side::col, GenKind::sphere, static_cast<std::int16_t>(level), 0, 0};
}
StripeLabel row_cone(GenKind kind, int slot) {
  return StripeLabel{Side::row, kind, 0, static_cast<std::int16_t>(slot), 0};
}
StripeLabel row_moore_n(int exp, int slot) {
  return StripeLabel{Side::row, GenKind::moore_n, 0, static_cast<std::int16_t>(slot),
                     static_cast<std::int16_t>(exp)};
}
StripeLabel row_moore_n1(int exp, int slot) {
  return StripeLabel{Side::row, GenKind::moore_n1, 0, static_cast<std::int16_t>(slot),
                     static_cast<std::int16_t>(exp)};
}
StripeLabel col_moore_n3(int exp, int slot) {
  return StripeLabel{Side::col, GenKind::moore_n3, 0, static_cast<std::int16_t>(slot),
                     static_cast<std::int16_t>(exp)};
}
StripeLabel col_dec(int exp) {
  return StripeLabel{Side::col, GenKind::dec_col, 3, 0, static_cast<std::int16_t>(exp)};
}

bool label_valid(const StripeLabel& l, Variant v) {
  switch (v) {
    case Variant::integral:
    case Variant::integral_ext:
      return l.kind != GenKind::dec_col;
    case Variant::local2:
      return l.kind == GenKind::sphere || l.kind == GenKind::cone_eta_n2 ||
             l.kind == GenKind::cone_eta2_n3 || l.kind == GenKind::cone_eta_n3;
    case Variant::local3:
      if (l.kind == GenKind::sphere)
        return l.side == Side::col || l.level <= 1;
      return l.kind == GenKind::moore_n || l.kind == GenKind::moore_n1 ||
             l.kind == GenKind::moore_n3 || l.kind == GenKind::dec_col;
  }
  return false;
}

bool zero_slot(const StripeLabel& l) {
  switch (l.kind) {
    case GenKind::cone_eta_n2:  return l.slot == 2;
    case GenKind::cone_eta2_n3: return l.slot == 3;
    case GenKind::cone_eta_n3:  return l.slot == 3;
    case GenKind::moore_n1:     return l.slot == 2;
    default:                    return false;
  }
}

std::optional<StripeLabel> slot_partner(const StripeLabel& l) {
  StripeLabel p = l;
  switch (l.kind) {
    case GenKind::cone_eta_n2:  p.slot = l.slot == 0 ? 2 : 0; return p;
    case GenKind::cone_eta2_n3: p.slot = l.slot == 0 ? 3 : 0; return p;
    case GenKind::cone_eta_n3:  p.slot = l.slot == 1 ? 3 : 1; return p;
    case GenKind::moore_n:      p.slot = l.slot == 0 ? 1 : 0; return p;
    case GenKind::moore_n1:     p.slot = l.slot == 1 ? 2 : 1; return p;
    case GenKind::moore_n3:     p.slot = l.slot == 3 ? 4 : 3; return p;
    default:                    return std::nullopt;
  }
}

namespace {

// Row profile: cell moduli against the four column families
// (S+3, S+4, M3[n+3]@3, M3[n+3]@4).
std::array<std::int64_t, 4> row_profile(const StripeLabel& r, Variant v) {
  const std::array<std::int64_t, 4> dead{1, 1, 1, 1};
  if (zero_slot(r)) return dead;
  const bool p2 = v == Variant::local2;
  const bool p3 = v == Variant::local3;
  switch (r.kind) {
    case GenKind::sphere:
      switch (r.level) {
        case 0: return p2 ? std::array<std::int64_t, 4>{8, 1, 1, 1}
                   : p3   ? std::array<std::int64_t, 4>{3, 1, 3, 1}
                          : std::array<std::int64_t, 4>{24, 1, 3, 1};
        case 1: return p2 ? std::array<std::int64_t, 4>{2, 8, 1, 1}
                   : p3   ? std::array<std::int64_t, 4>{1, 3, 1, 3}
                          : std::array<std::int64_t, 4>{2, 24, 1, 3};
        case 2: return p2 ? std::array<std::int64_t, 4>{2, 2, 1, 1}
                          : std::array<std::int64_t, 4>{2, 2, 1, 1};
        case 3: {
          std::array<std::int64_t, 4> prof{1, 2, 1, 1};
          if (v == Variant::integral_ext) prof[0] = 0;
          return prof;
        }
        default: return dead;
      }
    case GenKind::cone_eta_n2:
    case GenKind::cone_eta2_n3:
      return p2 ? std::array<std::int64_t, 4>{4, 1, 1, 1}
                : std::array<std::int64_t, 4>{12, 1, 3, 1};
    case GenKind::cone_eta_n3:
      return p2 ? std::array<std::int64_t, 4>{1, 4, 1, 1}
                : std::array<std::int64_t, 4>{1, 12, 1, 3};
    case GenKind::moore_n:
      return r.slot == 0 ? std::array<std::int64_t, 4>{3, 1, 3, 1}
                         : std::array<std::int64_t, 4>{1, 3, 1, 3};
    case GenKind::moore_n1:
      return std::array<std::int64_t, 4>{1, 3, 1, 3};
    default:
      return dead;
  }
}

int col_index(const StripeLabel& c) {
  if (c.kind == GenKind::sphere) return c.level == 3 ? 0 : 1;
  // Decorated columns couple to the same row families as M3[n+3]@3.
  if (c.kind == GenKind::dec_col) return 2;
  return c.slot == 3 ? 2 : 3;
}

}  // namespace

std::int64_t cell_modulus(const StripeLabel& row, const StripeLabel& col, Variant v) {
  if (row.side != Side::row || col.side != Side::col)
    throw std::invalid_argument("cell_modulus: need a row label and a col label");
  return row_profile(row, v)[col_index(col)];
}

namespace {

struct Presence {
  std::array<bool, 5> sphere{};  // by level (rows use 0..3, cols 3..4)
  bool cone_a = false;           // Ceta[n+2]@0
  bool cone_b = false;           // Ceta2[n+3]@0
  bool cone_c = false;           // Ceta[n+3]@1
  std::vector<int> moore_n, moore_n1, moore_n3, dec;  // sorted exponents
};

Presence scan(const std::vector<StripeLabel>& labels) {
  Presence p;
  for (const auto& l : labels) {
    if (zero_slot(l)) continue;
    switch (l.kind) {
      case GenKind::sphere: p.sphere[l.level] = true; break;
      case GenKind::cone_eta_n2: p.cone_a = true; break;
      case GenKind::cone_eta2_n3: p.cone_b = true; break;
      case GenKind::cone_eta_n3: p.cone_c = true; break;
      case GenKind::moore_n: if (l.slot == 0) p.moore_n.push_back(l.exp); break;
      case GenKind::moore_n1: if (l.slot == 1) p.moore_n1.push_back(l.exp); break;
      case GenKind::moore_n3: if (l.slot == 3) p.moore_n3.push_back(l.exp); break;
      case GenKind::dec_col: p.dec.push_back(l.exp); break;
    }
  }
  for (auto* v : {&p.moore_n, &p.moore_n1, &p.moore_n3, &p.dec}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return p;
}

}  // namespace

std::vector<AdditionRule> addition_rules(Variant v, Side side,
                                         const std::vector<StripeLabel>& labels) {
  Presence p = scan(labels);
  std::vector<AdditionRule> out;
  auto add = [&](StripeLabel s, StripeLabel t, int a) { out.push_back({s, t, a}); };

  const StripeLabel A0 = row_cone(GenKind::cone_eta_n2, 0);
  const StripeLabel B0 = row_cone(GenKind::cone_eta2_n3, 0);
  const StripeLabel C1 = row_cone(GenKind::cone_eta_n3, 1);

  if (side == Side::col) {
    // Column chains: S+3 feeds S+4; Moore columns at slot 3 grow with the
    // exponent and feed S+3; S+4 feeds every Moore column at slot 4, which
    // shrink with the exponent.
    const bool s3 = p.sphere[3], s4 = p.sphere[4];
    if (v == Variant::integral || v == Variant::integral_ext || v == Variant::local2) {
      if (s3 && s4) add(col_sphere(3), col_sphere(4), 1);
    }
    if (v != Variant::local2) {
      const auto& R = p.moore_n3;
      for (size_t i = 0; i < R.size(); ++i) {
        for (size_t j = i + 1; j < R.size(); ++j) {
          add(col_moore_n3(R[i], 3), col_moore_n3(R[j], 3), 1);
          add(col_moore_n3(R[j], 4), col_moore_n3(R[i], 4), 1);
        }
        if (s3) add(col_moore_n3(R[i], 3), col_sphere(3), 1);
        if (s4) add(col_sphere(4), col_moore_n3(R[i], 4), 1);
      }
      if (v == Variant::local3 && s3 && s4) {
        // The two column families touch disjoint row families at p = 3, so
        // the S+3 -> S+4 addition carries nothing and is omitted.
      }
      // Decorated columns are sinks: a plain column may be absorbed into a
      // decorated one, and a larger invariant factor into a smaller, but the
      // integer entry pinned to a decorated column can never leave it.
      const auto& D = p.dec;
      for (size_t i = 0; i < D.size(); ++i) {
        if (s3) add(col_sphere(3), col_dec(D[i]), 1);
        for (int r : R) add(col_moore_n3(r, 3), col_dec(D[i]), 1);
        for (size_t j = i + 1; j < D.size(); ++j)
          add(col_dec(D[j]), col_dec(D[i]), 1);
      }
    }
    return out;
  }

  if (v == Variant::local3) {
    const auto& S = p.moore_n;
    const auto& T = p.moore_n1;
    for (size_t i = 0; i < S.size(); ++i) {
      if (p.sphere[0]) add(row_sphere(0), row_moore_n(S[i], 0), 1);
      for (size_t j = i + 1; j < S.size(); ++j) {
        add(row_moore_n(S[j], 0), row_moore_n(S[i], 0), 1);
        add(row_moore_n(S[i], 1), row_moore_n(S[j], 1), 1);
      }
      if (p.sphere[1]) add(row_moore_n(S[i], 1), row_sphere(1), 1);
      for (int t : T) add(row_moore_n(S[i], 1), row_moore_n1(t, 1), 1);
    }
    for (size_t i = 0; i < T.size(); ++i) {
      if (p.sphere[1]) add(row_sphere(1), row_moore_n1(T[i], 1), 1);
      for (size_t j = i + 1; j < T.size(); ++j)
        add(row_moore_n1(T[j], 1), row_moore_n1(T[i], 1), 1);
    }
    return out;
  }

  // Integral and 2-local rows. Sphere chain: higher degree feeds lower.
  for (int hi = 3; hi >= 1; --hi)
    for (int lo = hi - 1; lo >= 0; --lo)
      if (p.sphere[hi] && p.sphere[lo]) add(row_sphere(hi), row_sphere(lo), 1);

  if (p.cone_a) {
    if (p.sphere[0]) { add(row_sphere(0), A0, 1); add(A0, row_sphere(0), 2); }
    if (p.sphere[2]) add(row_sphere(2), A0, 6);
    if (p.sphere[3]) add(row_sphere(3), A0, 1);
  }
  if (p.cone_b) {
    if (p.sphere[0]) { add(row_sphere(0), B0, 1); add(B0, row_sphere(0), 2); }
    if (p.sphere[1]) add(B0, row_sphere(1), 2);
    if (p.sphere[3]) add(row_sphere(3), B0, 1);
  }
  if (p.cone_a && p.cone_b) { add(B0, A0, 1); add(A0, B0, 2); }
  if (p.cone_c) {
    if (p.sphere[3]) add(row_sphere(3), C1, 6);
    if (p.sphere[1]) add(row_sphere(1), C1, 1);
  }

  if (v == Variant::integral || v == Variant::integral_ext) {
    const auto& S = p.moore_n;
    const auto& T = p.moore_n1;
    for (size_t i = 0; i < S.size(); ++i) {
      StripeLabel e = row_moore_n(S[i], 0), et = row_moore_n(S[i], 1);
      if (p.sphere[0]) add(row_sphere(0), e, 1);
      if (p.cone_a) add(A0, e, 1);
      if (p.cone_b) add(B0, e, 1);
      if (p.sphere[3]) add(row_sphere(3), e, 1);
      for (size_t j = i + 1; j < S.size(); ++j) {
        add(row_moore_n(S[j], 0), e, 1);
        add(et, row_moore_n(S[j], 1), 1);
      }
      if (p.sphere[1]) add(et, row_sphere(1), 1);
      if (p.cone_c) add(et, C1, 1);
      for (int t : T) add(et, row_moore_n1(t, 1), 1);
    }
    for (size_t i = 0; i < T.size(); ++i) {
      StripeLabel ep = row_moore_n1(T[i], 1);
      if (p.sphere[1]) add(row_sphere(1), ep, 1);
      if (p.cone_c) add(C1, ep, 1);
      for (size_t j = i + 1; j < T.size(); ++j) add(row_moore_n1(T[j], 1), ep, 1);
    }
  }
  return out;
}

std::vector<std::int64_t> unit_scalars(std::int64_t cell_lcm, bool has_integer_cell,
                                       bool strict_units) {
  if (has_integer_cell) return {1, -1};
  if (cell_lcm <= 1) return {1};
  if (strict_units) {
    if (cell_lcm == 2) return {1};
    return {1, cell_lcm - 1};
  }
  std::vector<std::int64_t> us;
  for (std::int64_t u = 1; u < cell_lcm; ++u)
    if (std::gcd(u, cell_lcm) == 1) us.push_back(u);
  return us;
}

std::optional<StripeLabel> localize_label(const StripeLabel& l, int p) {
  if (p == 2) {
    if (l.kind == GenKind::moore_n || l.kind == GenKind::moore_n1 ||
        l.kind == GenKind::moore_n3 || l.kind == GenKind::dec_col)
      return std::nullopt;
    return l;
  }
  if (p != 3) throw std::invalid_argument("localize_label: prime must be 2 or 3");
  switch (l.kind) {
    case GenKind::sphere:
      if (l.side == Side::col) return l;
      if (l.level == 0) return l;
      if (l.level == 1) return l;
      return std::nullopt;  // S+2, S+3 rows die at 3
    case GenKind::cone_eta_n2:
    case GenKind::cone_eta2_n3:
      return l.slot == 0 ? std::optional<StripeLabel>(row_sphere(0)) : std::nullopt;
    case GenKind::cone_eta_n3:
      return l.slot == 1 ? std::optional<StripeLabel>(row_sphere(1)) : std::nullopt;
    default:
      return l;  // Moore stripes survive unchanged
  }
}

Variant localized_variant(int p) {
  if (p == 2) return Variant::local2;
  if (p == 3) return Variant::local3;
  throw std::invalid_argument("localized_variant: prime must be 2 or 3");
}

}  // namespace stripemat
