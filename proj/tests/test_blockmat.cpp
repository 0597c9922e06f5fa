#include <string>

#include "doctest.h"
#include "stripemat/blockmat.hpp"

using namespace stripemat;

namespace {

StripeLabel rl(const char* tok) { return parse_label(tok, Side::row); }
StripeLabel cl(const char* tok) { return parse_label(tok, Side::col); }

// Catch a ParseError and report its message and position for matching.
template <typename Fn>
std::string parse_failure(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.what();
  }
  return "(no error)";
}

}  // namespace

TEST_SUITE_BEGIN("blockmat");

TEST_CASE("construction sorts stripes and completes slot partners") {
  auto m = BlockMatrix::make(
      Variant::integral,
      {{rl("Ceta[n+2]@0"), 2}, {rl("S+1"), 1}, {rl("S+0"), 3}},
      {{cl("S+4"), 1}, {cl("S+3"), 2}});
  REQUIRE(m.row_stripes().size() == 4);
  CHECK(label_token(m.row_stripes()[0].label) == "S+0");
  CHECK(label_token(m.row_stripes()[1].label) == "S+1");
  CHECK(label_token(m.row_stripes()[2].label) == "Ceta[n+2]@0");
  CHECK(label_token(m.row_stripes()[3].label) == "Ceta[n+2]@2");
  CHECK(m.row_stripes()[3].dim == 2);
  CHECK(m.rows_total() == 8);
  CHECK(m.cols_total() == 3);
  CHECK(label_token(m.col_stripes()[0].label) == "S+3");
  std::string why;
  CHECK(m.validate(&why));
}

TEST_CASE("bad stripe sets rejected") {
  CHECK_THROWS_AS(BlockMatrix::make(Variant::integral, {{rl("S+0"), 1}, {rl("S+0"), 2}}, {}),
                  DomainError);
  CHECK_THROWS_AS(BlockMatrix::make(Variant::integral,
                                    {{rl("Ceta[n+2]@0"), 2}, {rl("Ceta[n+2]@2"), 1}}, {}),
                  DomainError);
  CHECK_THROWS_AS(BlockMatrix::make(Variant::local2, {{rl("M3^1[n]@0"), 1}}, {}), DomainError);
  CHECK_THROWS_AS(BlockMatrix::make(Variant::integral, {}, {{cl("S+3"), -1}}), DomainError);
}

TEST_CASE("cell moduli reachable through line coordinates") {
  auto m = BlockMatrix::make(
      Variant::integral,
      {{rl("S+0"), 1}, {rl("S+2"), 1}, {rl("Ceta[n+2]@0"), 1}, {rl("M3^1[n]@0"), 1}},
      {{cl("S+3"), 1}, {cl("M3^2[n+3]@3"), 1}});
  auto at = [&](const char* r, const char* c) {
    return m.cell_mod(m.line_of(Side::row, rl(r), 0), m.line_of(Side::col, cl(c), 0));
  };
  CHECK(at("S+0", "S+3") == 24);
  CHECK(at("S+0", "M3^2[n+3]@3") == 3);
  CHECK(at("S+2", "S+3") == 2);
  CHECK(at("S+2", "M3^2[n+3]@3") == 1);
  CHECK(at("Ceta[n+2]@0", "S+3") == 12);
  CHECK(at("Ceta[n+2]@2", "S+3") == 1);
  CHECK(at("M3^1[n]@0", "S+3") == 3);
  CHECK(at("M3^1[n]@1", "M3^2[n+3]@4") == 3);
}

TEST_CASE("set reduces values and guards zero cells") {
  auto m = BlockMatrix::make(Variant::integral, {{rl("S+0"), 1}, {rl("Ceta[n+2]@0"), 1}},
                             {{cl("S+3"), 1}});
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, 27);
  CHECK(m.get_at(rl("S+0"), 0, cl("S+3"), 0) == 3);
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, -1);
  CHECK(m.get_at(rl("S+0"), 0, cl("S+3"), 0) == 23);
  CHECK_THROWS_AS(m.set_at(rl("Ceta[n+2]@2"), 0, cl("S+3"), 0, 1), DomainError);
  m.set_at(rl("Ceta[n+2]@2"), 0, cl("S+3"), 0, 0);  // writing zero is fine

  int r = m.line_of(Side::row, rl("S+0"), 0), c = m.line_of(Side::col, cl("S+3"), 0);
  m.set(r, c, 20);
  m.add_at(r, c, 10);
  CHECK(m.get(r, c) == 6);
  CHECK(m.nonzero_count() == 1);
  CHECK_FALSE(m.is_zero());
}

TEST_CASE("direct sum concatenates matching stripes") {
  auto a = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}}, {{cl("S+3"), 1}});
  a.set_at(rl("S+0"), 0, cl("S+3"), 0, 5);
  auto b = BlockMatrix::make(Variant::local2, {{rl("S+0"), 2}}, {{cl("S+3"), 1}});
  b.set_at(rl("S+0"), 0, cl("S+3"), 0, 7);
  b.set_at(rl("S+0"), 1, cl("S+3"), 0, 1);
  auto s = BlockMatrix::direct_sum(a, b);
  CHECK(s.stripe_dim(Side::row, rl("S+0")) == 3);
  CHECK(s.stripe_dim(Side::col, cl("S+3")) == 2);
  CHECK(s.get_at(rl("S+0"), 0, cl("S+3"), 0) == 5);
  CHECK(s.get_at(rl("S+0"), 1, cl("S+3"), 1) == 7);
  CHECK(s.get_at(rl("S+0"), 2, cl("S+3"), 1) == 1);
  CHECK(s.get_at(rl("S+0"), 0, cl("S+3"), 1) == 0);
  CHECK(s.get_at(rl("S+0"), 1, cl("S+3"), 0) == 0);

  auto c = BlockMatrix::make(Variant::local3, {{rl("S+0"), 1}}, {});
  CHECK_THROWS_AS(BlockMatrix::direct_sum(a, c), DomainError);
}

TEST_CASE("submatrix keeps stripe labels and renumbers offsets") {
  auto m = BlockMatrix::make(Variant::local2, {{rl("S+0"), 3}}, {{cl("S+3"), 2}});
  m.set_at(rl("S+0"), 1, cl("S+3"), 1, 7);
  m.set_at(rl("S+0"), 2, cl("S+3"), 1, 1);
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, 5);
  auto sub = m.submatrix({m.line_of(Side::row, rl("S+0"), 1), m.line_of(Side::row, rl("S+0"), 2)},
                         {m.line_of(Side::col, cl("S+3"), 1)});
  CHECK(sub.rows_total() == 2);
  CHECK(sub.cols_total() == 1);
  CHECK(sub.get_at(rl("S+0"), 0, cl("S+3"), 0) == 7);
  CHECK(sub.get_at(rl("S+0"), 1, cl("S+3"), 0) == 1);
}

TEST_CASE("serialize and parse round trip") {
  auto m = BlockMatrix::make(
      Variant::integral,
      {{rl("S+0"), 1}, {rl("S+1"), 2}, {rl("M3^1[n]@0"), 1}, {rl("S+2"), 0}},
      {{cl("S+3"), 1}, {cl("S+4"), 1}, {cl("M3^1[n+3]@3"), 1}});
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, 17);
  m.set_at(rl("S+1"), 1, cl("S+4"), 0, 23);
  m.set_at(rl("M3^1[n]@0"), 0, cl("M3^1[n+3]@3"), 0, 2);

  std::string text = m.serialize();
  CHECK(text.find("row S+2") == std::string::npos);  // dim-0 stripes dropped
  auto back = BlockMatrix::parse(text);
  CHECK(back == m);
  CHECK(back.serialize() == text);

  // Comments and blank lines are tolerated.
  auto again = BlockMatrix::parse("# header\n\n" + text + "\n# trailer\n");
  CHECK(again == m);
}

TEST_CASE("parse accepts declaration-order entry coordinates") {
  // Stripes declared out of canonical order; entry indices follow the
  // declaration, not the sorted layout.
  auto m = BlockMatrix::parse(
      "variant local2\n"
      "row S+1 1\n"
      "row S+0 1\n"
      "col S+3 1\n"
      "col S+4 1\n"
      "entry 1 0 5\n"
      "entry 0 1 3\n");
  CHECK(m.get_at(rl("S+0"), 0, cl("S+3"), 0) == 5);
  CHECK(m.get_at(rl("S+1"), 0, cl("S+4"), 0) == 3);
}

TEST_CASE("parse reports positions with failures") {
  auto msg = parse_failure([] { BlockMatrix::parse("variant local2\nrow Bogus 1\n"); });
  CHECK(msg.find("unknown label token") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("col 5") != std::string::npos);

  msg = parse_failure([] {
    BlockMatrix::parse("variant local2\nrow S+2 1\ncol S+3 1\nentry 0 0 2\n");
  });
  CHECK(msg.find("entry out of ring") != std::string::npos);
  CHECK(msg.find("line 4") != std::string::npos);

  msg = parse_failure([] {
    BlockMatrix::parse("variant integral\nrow S+0 1\ncol S+4 1\nentry 0 0 1\n");
  });
  CHECK(msg.find("entry in Zero cell") != std::string::npos);

  msg = parse_failure([] {
    BlockMatrix::parse("variant integral\nrow Ceta[n+2]@0 1\nrow Ceta[n+2]@2 2\ncol S+3 1\n");
  });
  CHECK(msg.find("linked-stripe dim mismatch") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);

  msg = parse_failure([] {
    // A declared pair slot cannot be silently completed when reading a file.
    BlockMatrix::parse("variant integral\nrow Ceta[n+2]@0 1\ncol S+3 1\n");
  });
  CHECK(msg.find("linked-stripe dim mismatch") != std::string::npos);

  msg = parse_failure([] { BlockMatrix::parse("variant local2\nrow S+0 1\nrow S+0 2\n"); });
  CHECK(msg.find("duplicate stripe") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);

  msg = parse_failure([] { BlockMatrix::parse("variant nosuch\n"); });
  CHECK(msg.find("unknown variant") != std::string::npos);

  msg = parse_failure([] { BlockMatrix::parse("row S+0 1\n"); });
  CHECK(msg.find("variant line must come first") != std::string::npos);

  msg = parse_failure([] {
    BlockMatrix::parse("variant local2\nrow S+0 1\ncol S+3 1\nentry 1 0 1\n");
  });
  CHECK(msg.find("entry index out of range") != std::string::npos);

  msg = parse_failure([] {
    BlockMatrix::parse("variant local2\nrow S+0 1\ncol S+3 1\nentry 0 0 1\nentry 0 0 2\n");
  });
  CHECK(msg.find("duplicate entry") != std::string::npos);
  CHECK(msg.find("line 5") != std::string::npos);
}

TEST_CASE("localize at 2 keeps the sphere and cone stripes") {
  auto m = BlockMatrix::make(Variant::integral,
                             {{rl("S+0"), 1}, {rl("M3^1[n]@0"), 1}, {rl("Ceta[n+2]@0"), 1}},
                             {{cl("S+3"), 1}, {cl("M3^1[n+3]@3"), 1}});
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, 20);
  m.set_at(rl("S+0"), 0, cl("M3^1[n+3]@3"), 0, 2);
  m.set_at(rl("Ceta[n+2]@0"), 0, cl("S+3"), 0, 9);
  m.set_at(rl("M3^1[n]@0"), 0, cl("M3^1[n+3]@3"), 0, 1);

  auto loc = localize(m, 2);
  CHECK(loc.mat.variant() == Variant::local2);
  CHECK(loc.mat.stripe_dim(Side::row, rl("S+0")) == 1);
  CHECK(loc.mat.stripe_dim(Side::row, rl("Ceta[n+2]@0")) == 1);
  CHECK(loc.mat.stripe_index(Side::row, rl("M3^1[n]@0")) == -1);
  CHECK(loc.mat.stripe_index(Side::col, cl("M3^1[n+3]@3")) == -1);
  CHECK(loc.mat.get_at(rl("S+0"), 0, cl("S+3"), 0) == 4);  // 20 mod 8
  CHECK(loc.mat.get_at(rl("Ceta[n+2]@0"), 0, cl("S+3"), 0) == 1);  // 9 mod 4
  int line = loc.mat.line_of(Side::row, rl("S+0"), 0);
  CHECK(loc.row_src[line].first == rl("S+0"));
  CHECK(loc.row_src[line].second == 0);
}

TEST_CASE("localize at 3 merges cone rows behind the sphere rows") {
  auto m = BlockMatrix::make(
      Variant::integral,
      {{rl("S+0"), 1}, {rl("S+1"), 1}, {rl("S+2"), 1}, {rl("Ceta[n+2]@0"), 2},
       {rl("Ceta2[n+3]@0"), 1}, {rl("Ceta[n+3]@1"), 1}},
      {{cl("S+3"), 2}, {cl("S+4"), 1}});
  m.set_at(rl("S+0"), 0, cl("S+3"), 0, 10);          // 10 mod 3 = 1
  m.set_at(rl("Ceta[n+2]@0"), 1, cl("S+3"), 1, 5);   // 5 mod 3 = 2
  m.set_at(rl("Ceta2[n+3]@0"), 0, cl("S+3"), 0, 4);  // 4 mod 3 = 1
  m.set_at(rl("S+1"), 0, cl("S+4"), 0, 16);          // 16 mod 3 = 1
  m.set_at(rl("Ceta[n+3]@1"), 0, cl("S+4"), 0, 7);   // 7 mod 3 = 1
  m.set_at(rl("S+2"), 0, cl("S+3"), 0, 1);           // dies at 3

  auto loc = localize(m, 3);
  CHECK(loc.mat.variant() == Variant::local3);
  REQUIRE(loc.mat.stripe_dim(Side::row, rl("S+0")) == 4);  // S+0 + two cone A + cone B
  REQUIRE(loc.mat.stripe_dim(Side::row, rl("S+1")) == 2);
  CHECK(loc.mat.stripe_index(Side::row, rl("S+2")) == -1);

  // Provenance lists the source stripes in canonical order within the merge.
  int base0 = loc.mat.line_of(Side::row, rl("S+0"), 0);
  CHECK(loc.row_src[base0 + 0].first == rl("S+0"));
  CHECK(loc.row_src[base0 + 1].first == rl("Ceta[n+2]@0"));
  CHECK(loc.row_src[base0 + 1].second == 0);
  CHECK(loc.row_src[base0 + 2].first == rl("Ceta[n+2]@0"));
  CHECK(loc.row_src[base0 + 2].second == 1);
  CHECK(loc.row_src[base0 + 3].first == rl("Ceta2[n+3]@0"));
  int base1 = loc.mat.line_of(Side::row, rl("S+1"), 0);
  CHECK(loc.row_src[base1 + 0].first == rl("S+1"));
  CHECK(loc.row_src[base1 + 1].first == rl("Ceta[n+3]@1"));

  int c0 = loc.mat.line_of(Side::col, cl("S+3"), 0);
  int c1 = loc.mat.line_of(Side::col, cl("S+3"), 1);
  int c4 = loc.mat.line_of(Side::col, cl("S+4"), 0);
  CHECK(loc.mat.get(base0 + 0, c0) == 1);
  CHECK(loc.mat.get(base0 + 2, c1) == 2);
  CHECK(loc.mat.get(base0 + 3, c0) == 1);
  CHECK(loc.mat.get(base1 + 0, c4) == 1);
  CHECK(loc.mat.get(base1 + 1, c4) == 1);
  CHECK(loc.mat.nonzero_count() == 5);
}

TEST_CASE("localize guards") {
  auto l2 = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}}, {{cl("S+3"), 1}});
  CHECK_THROWS_AS(localize(l2, 2), DomainError);

  auto ext = BlockMatrix::make(Variant::integral_ext, {{rl("S+3"), 1}}, {{cl("S+3"), 1}});
  ext.set_at(rl("S+3"), 0, cl("S+3"), 0, 2);
  CHECK_THROWS_AS(localize(ext, 2), DomainError);
  ext.set_at(rl("S+3"), 0, cl("S+3"), 0, 0);
  auto loc = localize(ext, 2);  // empty integer block localizes fine
  CHECK(loc.mat.is_zero());
}

TEST_CASE("normalized comparison ignores empty stripes") {
  auto a = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}, {rl("S+1"), 0}}, {{cl("S+3"), 1}});
  auto b = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}}, {{cl("S+3"), 1}});
  a.set_at(rl("S+0"), 0, cl("S+3"), 0, 3);
  b.set_at(rl("S+0"), 0, cl("S+3"), 0, 3);
  CHECK(a == b);
  CHECK(a.normalized().row_stripes().size() == 1);
  b.set_at(rl("S+0"), 0, cl("S+3"), 0, 4);
  CHECK_FALSE(a == b);
}

TEST_CASE("pretty output includes line labels") {
  auto m = BlockMatrix::make(Variant::local2, {{rl("S+0"), 1}}, {{cl("S+3"), 2}});
  m.set_at(rl("S+0"), 0, cl("S+3"), 1, 7);
  auto text = m.pretty();
  CHECK(text.find("S+0[0]") != std::string::npos);
  CHECK(text.find("S+3[1]") != std::string::npos);
  CHECK(text.find('7') != std::string::npos);
}

TEST_SUITE_END();
