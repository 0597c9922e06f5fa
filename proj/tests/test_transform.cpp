#include <string>

#include "doctest.h"
#include "stripemat/transform.hpp"

using namespace stripemat;

namespace {

StripeLabel rl(const char* tok) { return parse_label(tok, Side::row); }
StripeLabel cl(const char* tok) { return parse_label(tok, Side::col); }

int find_rule(const std::vector<AdditionRule>& rules, const char* src, const char* tgt,
              Side side) {
  for (size_t i = 0; i < rules.size(); ++i)
    if (rules[i].src == parse_label(src, side) && rules[i].tgt == parse_label(tgt, side))
      return static_cast<int>(i);
  return -1;
}

// One mod-2 cell over S+3 and one mod-24 cell over S+4 in a single S+1 row.
BlockMatrix eta_frame(std::int64_t x, std::int64_t y) {
  auto m = BlockMatrix::make(Variant::integral, {{rl("S+1"), 1}},
                             {{cl("S+3"), 1}, {cl("S+4"), 1}});
  m.set_at(rl("S+1"), 0, cl("S+3"), 0, x);
  m.set_at(rl("S+1"), 0, cl("S+4"), 0, y);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("transform");

TEST_CASE("column addition writes twelve times the mod-2 entry") {
  auto m = eta_frame(1, 0);
  TransformContext ctx(m);
  int r = find_rule(ctx.rules(Side::col), "S+3", "S+4", Side::col);
  REQUIRE(r >= 0);
  Step s{Step::Kind::add_cross, Side::col, m.line_of(Side::col, cl("S+4"), 0),
         m.line_of(Side::col, cl("S+3"), 0), 1, r};
  ctx.apply(m, s);
  CHECK(m.get_at(rl("S+1"), 0, cl("S+4"), 0) == 12);
  ctx.apply(m, s);
  CHECK(m.get_at(rl("S+1"), 0, cl("S+4"), 0) == 0);
}

TEST_CASE("cross addition with printed coefficient two") {
  auto m = BlockMatrix::make(Variant::integral, {{rl("S+0"), 1}, {rl("Ceta[n+2]@0"), 1}},
                             {{cl("S+3"), 1}});
  m.set_at(rl("Ceta[n+2]@0"), 0, cl("S+3"), 0, 5);
  TransformContext ctx(m);
  int r = find_rule(ctx.rules(Side::row), "Ceta[n+2]@0", "S+0", Side::row);
  REQUIRE(r >= 0);
  Step s{Step::Kind::add_cross, Side::row, m.line_of(Side::row, rl("S+0"), 0),
         m.line_of(Side::row, rl("Ceta[n+2]@0"), 0), 1, r};
  ctx.apply(m, s);
  // A mod-12 value of 5 arrives in the mod-24 cell doubled.
  CHECK(m.get_at(rl("S+0"), 0, cl("S+3"), 0) == 10);
  CHECK(m.get_at(rl("Ceta[n+2]@0"), 0, cl("S+3"), 0) == 5);
}

TEST_CASE("within-stripe moves mirror onto the linked slot") {
  auto m = BlockMatrix::make(Variant::local3, {{rl("M3^1[n]@0"), 2}},
                             {{cl("M3^1[n+3]@3"), 2}});
  m.set_at(rl("M3^1[n]@0"), 0, cl("M3^1[n+3]@3"), 0, 1);
  m.set_at(rl("M3^1[n]@0"), 1, cl("M3^1[n+3]@3"), 1, 2);
  m.set_at(rl("M3^1[n]@1"), 0, cl("M3^1[n+3]@4"), 0, 1);
  TransformContext ctx(m);

  Step swap{Step::Kind::swap_lines, Side::row, m.line_of(Side::row, rl("M3^1[n]@0"), 0),
            m.line_of(Side::row, rl("M3^1[n]@0"), 1), 1, -1};
  auto swapped = ctx.applied(m, swap);
  CHECK(swapped.get_at(rl("M3^1[n]@0"), 1, cl("M3^1[n+3]@3"), 0) == 1);
  CHECK(swapped.get_at(rl("M3^1[n]@0"), 0, cl("M3^1[n+3]@3"), 1) == 2);
  // The slot-1 row moved with its partner.
  CHECK(swapped.get_at(rl("M3^1[n]@1"), 1, cl("M3^1[n+3]@4"), 0) == 1);
  CHECK(swapped.get_at(rl("M3^1[n]@1"), 0, cl("M3^1[n+3]@4"), 0) == 0);

  Step add{Step::Kind::add_within, Side::row, m.line_of(Side::row, rl("M3^1[n]@0"), 0),
           m.line_of(Side::row, rl("M3^1[n]@0"), 1), 1, -1};
  auto added = ctx.applied(swapped, add);
  // Slot 0: row0 += row1 picks up the 1; slot 1: row0 += row1 picks up the 1.
  CHECK(added.get_at(rl("M3^1[n]@0"), 0, cl("M3^1[n+3]@3"), 0) == 1);
  CHECK(added.get_at(rl("M3^1[n]@1"), 0, cl("M3^1[n+3]@4"), 0) == 1);
}

TEST_CASE("cross additions act on one stripe only") {
  auto m = BlockMatrix::make(Variant::integral, {{rl("S+0"), 1}, {rl("M3^1[n]@0"), 1}},
                             {{cl("S+3"), 1}});
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, 5);
  TransformContext ctx(m);
  int r = find_rule(ctx.rules(Side::row), "S+0", "M3^1[n]@0", Side::row);
  REQUIRE(r >= 0);
  Step s{Step::Kind::add_cross, Side::row, m.line_of(Side::row, rl("M3^1[n]@0"), 0),
         m.line_of(Side::row, rl("S+0"), 0), 1, r};
  ctx.apply(m, s);
  CHECK(m.get_at(rl("M3^1[n]@0"), 0, cl("S+3"), 0) == 2);  // 5 mod 3
  CHECK(m.get_at(rl("S+0"), 0, cl("S+3"), 0) == 5);
}

TEST_CASE("orbit identifies the twelve-fold shift") {
  auto res = orbit_equivalent(eta_frame(1, 0), eta_frame(1, 12));
  CHECK(res.status == SearchStatus::ok);
  CHECK(res.equivalent);
  CHECK_FALSE(orbit_equivalent(eta_frame(1, 0), eta_frame(1, 6)).equivalent);
  CHECK_FALSE(orbit_equivalent(eta_frame(1, 0), eta_frame(0, 12)).equivalent);

  auto canon = orbit_canonical(eta_frame(1, 12));
  CHECK(canon.status == SearchStatus::ok);
  CHECK(canon.explored == 2);
  CHECK(canon.canon == orbit_canonical(eta_frame(1, 0)).canon);
}

TEST_CASE("unit scaling folds coefficients by default but not strictly") {
  auto a = eta_frame(0, 1), b = eta_frame(0, 5), c = eta_frame(0, 2);
  CHECK(orbit_equivalent(a, b).equivalent);
  CHECK_FALSE(orbit_equivalent(a, c).equivalent);
  OrbitOptions strict;
  strict.strict_units = true;
  CHECK_FALSE(orbit_equivalent(a, b, strict).equivalent);
  CHECK(orbit_equivalent(a, eta_frame(0, 23), strict).equivalent);
}

TEST_CASE("scramble stays inside the orbit") {
  auto m = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}, {rl("S+1"), 1}},
                             {{cl("S+3"), 2}});
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, 1);
  m.set_at(rl("S+1"), 0, cl("S+3"), 1, 1);
  TransformContext ctx(m);
  auto res = orbit_equivalent(m, ctx.scramble(m, 17, 42));
  CHECK(res.status == SearchStatus::ok);
  CHECK(res.equivalent);
  CHECK(ctx.scramble(m, 17, 42) == ctx.scramble(m, 17, 42));  // seeded, reproducible
}

TEST_CASE("orbit split detection") {
  auto two = BlockMatrix::make(Variant::local2, {{rl("S+0"), 2}}, {{cl("S+3"), 2}});
  two.set_at(rl("S+0"), 0, cl("S+3"), 0, 1);
  two.set_at(rl("S+0"), 1, cl("S+3"), 1, 2);
  auto parts = split_components(two);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].rows_total() == 1);

  auto dec = orbit_decompose(two);
  CHECK(dec.status == SearchStatus::ok);
  REQUIRE(dec.summands.size() == 2);

  auto split = orbit_indecomposable(two);
  CHECK_FALSE(split.indecomposable);
  REQUIRE(split.witness.has_value());

  // A single entry with a spare column: the spare splits off as a free line.
  auto spare = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}}, {{cl("S+3"), 2}});
  spare.set_at(rl("S+0"), 0, cl("S+3"), 0, 1);
  spare.set_at(rl("S+0"), 0, cl("S+3"), 1, 1);
  CHECK_FALSE(orbit_indecomposable(spare).indecomposable);
  CHECK(orbit_decompose(spare).summands.size() == 2);

  auto one = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}}, {{cl("S+3"), 1}});
  one.set_at(rl("S+0"), 0, cl("S+3"), 0, 1);
  CHECK(orbit_indecomposable(one).indecomposable);
}

TEST_CASE("linked slots cannot be separated") {
  auto m = BlockMatrix::make(Variant::local3, {{rl("M3^1[n]@0"), 1}},
                             {{cl("M3^1[n+3]@3"), 1}});
  m.set_at(rl("M3^1[n]@0"), 0, cl("M3^1[n+3]@3"), 0, 1);
  // Slot-1 row and slot-4 column carry nothing, yet stay with their partners.
  auto parts = split_components(m);
  CHECK(parts.size() == 1);
  CHECK(orbit_indecomposable(m).indecomposable);
}

TEST_CASE("orbit search refusals and budget") {
  auto wide = BlockMatrix::make(Variant::local2, {{rl("S+0"), 9}}, {{cl("S+3"), 1}});
  CHECK_THROWS_AS(orbit_canonical(wide), DomainError);

  auto ext = BlockMatrix::make(Variant::integral_ext, {{rl("S+3"), 1}}, {{cl("S+3"), 1}});
  CHECK_THROWS_AS(orbit_canonical(ext), DomainError);

  OrbitOptions tiny;
  tiny.max_states = 3;
  auto res = orbit_canonical(eta_frame(0, 1), tiny);
  CHECK(res.status == SearchStatus::budget_exceeded);
}

TEST_SUITE_END();
