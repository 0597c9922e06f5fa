#include "stripemat/catalog2.hpp"

#include <algorithm>
#include <stdexcept>

namespace stripemat {
namespace {

using Cell = CatalogShape::Cell;

std::vector<CatalogShape> build_shapes() {
  std::vector<CatalogShape> out;
  auto unit = [&](const std::string& stem, StripeLabel st) {
    CatalogShape s;
    s.stem = stem;
    s.unit = st;
    out.push_back(std::move(s));
  };
  auto shape = [&](const std::string& stem, ParamKind v, ParamKind w, std::vector<Cell> cells) {
    CatalogShape s;
    s.stem = stem;
    s.v_kind = v;
    s.w_kind = w;
    s.cells = std::move(cells);
    out.push_back(std::move(s));
  };
  const auto none = ParamKind::none;
  const auto z8f = ParamKind::z8_full;
  const auto z8s = ParamKind::z8_shifted;
  const auto z4f = ParamKind::z4_full;
  const auto z4s = ParamKind::z4_shifted;
  const StripeLabel r0 = row_sphere(0), r1 = row_sphere(1), r2 = row_sphere(2),
                    r3 = row_sphere(3);
  const StripeLabel ca = row_cone(GenKind::cone_eta_n2, 0);   // eta cone on the n-cell
  const StripeLabel cb = row_cone(GenKind::cone_eta2_n3, 0);  // eta^2 cone on the n-cell
  const StripeLabel cc = row_cone(GenKind::cone_eta_n3, 1);   // eta cone on the (n+1)-cell

  unit("S^n", r0);
  unit("S^{n+1}", r1);
  unit("S^{n+2}", r2);
  unit("S^{n+3}", r3);
  unit("S^{n+4}", col_sphere(3));
  unit("S^{n+5}", col_sphere(4));
  unit("Ceta^{n+2}", ca);
  unit("Ceta^{n+3}", cc);
  unit("Ceta2^{n+3}", cb);

  shape("Cv^{n+4}", z8f, none, {{r0, 3, 0}});
  shape("Cw^{n+5}", none, z8f, {{r1, 4, 1}});
  shape("Ceta^{n+4}", none, none, {{r2, 3, -1}});
  shape("Ceta^{n+5}", none, none, {{r3, 4, -1}});
  shape("Ceta2^{n+4}", none, none, {{r1, 3, -1}});
  shape("Ceta2^{n+5}", none, none, {{r2, 4, -1}});
  shape("(eta.v.eta)_0^1", z4s, none, {{r2, 3, -1}, {ca, 3, 0}});
  shape("(eta.w.eta)_1^1", none, z4s, {{r3, 4, -1}, {cc, 4, 1}});
  shape("(eta2.v.eta2)_0^1", z4f, none, {{r1, 3, -1}, {cb, 3, 0}});
  shape("(eta2.v.eta)_0^1", z4f, none, {{r2, 3, -1}, {cb, 3, 0}});
  shape("(eta.v.eta2)_0^1", z4f, none, {{r1, 3, -1}, {ca, 3, 0}});
  shape("(eta.w.eta2)_1^1", none, z4f, {{r2, 4, -1}, {cc, 4, 1}});
  shape("(v.eta2)_0^0", z8s, none, {{r0, 3, 0}, {r1, 3, -1}});
  shape("(w.eta2)_1^0", none, z8s, {{r1, 4, 1}, {r2, 4, -1}});
  shape("(v.eta)_0^0", z8s, none, {{r0, 3, 0}, {r2, 3, -1}});
  shape("(w.eta)_1^0", none, z8s, {{r1, 4, 1}, {r3, 4, -1}});
  shape("(eta.v)_0^1", z4f, none, {{ca, 3, 0}});
  shape("(eta2.w.eta2)_1^1", none, z8s, {{r1, 3, -1}, {r1, 4, 1}, {r2, 4, -1}});
  shape("(eta2.v)_0^1", z4f, none, {{cb, 3, 0}});
  shape("(eta.w)_1^1", none, z4f, {{cc, 4, 1}});
  shape("(v.eta2.w)_0^0", z8s, z8s, {{r0, 3, 0}, {r1, 3, -1}, {r1, 4, 1}});
  shape("(eta2.w.eta)_1^1", none, z8s, {{r1, 3, -1}, {r1, 4, 1}, {r3, 4, -1}});
  shape("(v.eta2.w.eta)_0^0", z8s, z8s, {{r0, 3, 0}, {r1, 3, -1}, {r1, 4, 1}, {r3, 4, -1}});
  shape("(v.eta2.w.eta2)_0^0", z8s, z8s, {{r0, 3, 0}, {r1, 3, -1}, {r1, 4, 1}, {r2, 4, -1}});
  shape("(eta.v.eta2.w)_0^0", z4f, z8s, {{ca, 3, 0}, {r1, 3, -1}, {r1, 4, 1}});
  shape("(eta2.v.eta2.w)_0^0", z4f, z8s, {{cb, 3, 0}, {r1, 3, -1}, {r1, 4, 1}});
  shape("(eta2.w)_1^1", none, z8s, {{r1, 3, -1}, {r1, 4, 1}});
  shape("(eta.v.eta2.w.eta)_0^0", z4f, z8s,
        {{ca, 3, 0}, {r1, 3, -1}, {r1, 4, 1}, {r3, 4, -1}});
  shape("(eta2.v.eta2.w.eta)_0^0", z4f, z8s,
        {{cb, 3, 0}, {r1, 3, -1}, {r1, 4, 1}, {r3, 4, -1}});
  shape("(eta.v.eta2.w.eta2)_0^0", z4f, z8s,
        {{ca, 3, 0}, {r1, 3, -1}, {r1, 4, 1}, {r2, 4, -1}});
  shape("(eta2.v.eta2.w.eta2)_0^0", z4f, z8s,
        {{cb, 3, 0}, {r1, 3, -1}, {r1, 4, 1}, {r2, 4, -1}});
  return out;
}

}  // namespace

const std::vector<std::int64_t>& param_values(ParamKind k) {
  static const std::vector<std::int64_t> none = {};
  static const std::vector<std::int64_t> z8f = {1, 2, 4};
  static const std::vector<std::int64_t> z8s = {1, 2};
  static const std::vector<std::int64_t> z4f = {1, 2};
  static const std::vector<std::int64_t> z4s = {1};
  switch (k) {
    case ParamKind::none:
      return none;
    case ParamKind::z8_full:
      return z8f;
    case ParamKind::z8_shifted:
      return z8s;
    case ParamKind::z4_full:
      return z4f;
    case ParamKind::z4_shifted:
      return z4s;
  }
  return none;
}

const std::vector<CatalogShape>& catalog_shapes() {
  static const std::vector<CatalogShape> shapes = build_shapes();
  return shapes;
}

std::string catalog_name(const CatalogItem& it) {
  const auto& sh = catalog_shapes().at(static_cast<size_t>(it.shape));
  std::string out = sh.stem;
  bool has_v = sh.v_kind != ParamKind::none, has_w = sh.w_kind != ParamKind::none;
  if (has_v || has_w) {
    out += "{";
    if (has_v) out += "v=" + std::to_string(it.v);
    if (has_v && has_w) out += ",";
    if (has_w) out += "w=" + std::to_string(it.w);
    out += "}";
  }
  return out;
}

std::optional<CatalogItem> catalog_parse(std::string_view name) {
  // stems themselves contain braces (S^{n+1}), so the parameter block is the
  // trailing {...} group and only when it reads as v=/w= assignments
  std::string stem(name);
  std::int64_t v = 0, w = 0;
  size_t brace = stem.rfind('{');
  if (brace != std::string::npos && stem.back() == '}') {
    std::string params = stem.substr(brace + 1, stem.size() - brace - 2);
    bool ok = !params.empty();
    std::int64_t pv = 0, pw = 0;
    size_t p = 0;
    while (ok && p < params.size()) {
      size_t c = params.find(',', p);
      std::string piece = params.substr(p, c == std::string::npos ? std::string::npos : c - p);
      size_t used = 0;
      try {
        if (piece.rfind("v=", 0) == 0)
          pv = std::stoll(piece.substr(2), &used), ok = used == piece.size() - 2;
        else if (piece.rfind("w=", 0) == 0)
          pw = std::stoll(piece.substr(2), &used), ok = used == piece.size() - 2;
        else
          ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
      if (c == std::string::npos) break;
      p = c + 1;
    }
    if (ok) {
      stem = stem.substr(0, brace);
      v = pv;
      w = pw;
    }
  }
  const auto& shapes = catalog_shapes();
  for (size_t i = 0; i < shapes.size(); ++i) {
    if (shapes[i].stem != stem) continue;
    CatalogItem it{static_cast<int>(i), v, w};
    const auto& vv = param_values(shapes[i].v_kind);
    const auto& ww = param_values(shapes[i].w_kind);
    if (shapes[i].v_kind == ParamKind::none ? v != 0
                                            : std::find(vv.begin(), vv.end(), v) == vv.end())
      return std::nullopt;
    if (shapes[i].w_kind == ParamKind::none ? w != 0
                                            : std::find(ww.begin(), ww.end(), w) == ww.end())
      return std::nullopt;
    return it;
  }
  return std::nullopt;
}

BlockMatrix catalog_matrix(const CatalogItem& it) {
  const auto& sh = catalog_shapes().at(static_cast<size_t>(it.shape));
  std::vector<Stripe> rows, cols;
  auto ensure = [](std::vector<Stripe>& v, const StripeLabel& l) {
    for (const auto& s : v)
      if (s.label == l) return;
    v.push_back({l, 1});
  };
  if (sh.unit) {
    if (sh.unit->side == Side::row)
      rows.push_back({*sh.unit, 1});
    else
      cols.push_back({*sh.unit, 1});
    return BlockMatrix::make(Variant::local2, rows, cols);
  }
  for (const auto& c : sh.cells) {
    ensure(rows, c.row);
    ensure(cols, col_sphere(c.col_level));
  }
  BlockMatrix m = BlockMatrix::make(Variant::local2, rows, cols);
  for (const auto& c : sh.cells) {
    std::int64_t value = c.param == 0 ? it.v : c.param == 1 ? it.w : 1;
    m.set_at(c.row, 0, col_sphere(c.col_level), 0, value);
  }
  return m;
}

std::vector<CatalogItem> enumerate_catalog() {
  std::vector<CatalogItem> out;
  const auto& shapes = catalog_shapes();
  for (size_t i = 0; i < shapes.size(); ++i) {
    const auto& vv = param_values(shapes[i].v_kind);
    const auto& ww = param_values(shapes[i].w_kind);
    auto vs = vv.empty() ? std::vector<std::int64_t>{0} : vv;
    auto ws = ww.empty() ? std::vector<std::int64_t>{0} : ww;
    for (auto v : vs)
      for (auto w : ws) out.push_back({static_cast<int>(i), v, w});
  }
  return out;
}

}  // namespace stripemat
