#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "stripemat/catalog2.hpp"
#include "stripemat/chains3.hpp"
#include "stripemat/reduce.hpp"

using namespace stripemat;

namespace {

BlockMatrix cat(const char* name) {
  auto it = catalog_parse(name);
  REQUIRE(it.has_value());
  return catalog_matrix(*it);
}

BlockMatrix sum_of(std::vector<BlockMatrix> parts) {
  BlockMatrix acc = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) acc = BlockMatrix::direct_sum(acc, parts[i]);
  return acc;
}

std::vector<std::string> names_of(const BlockMatrix& m) {
  auto d = decompose(m);
  REQUIRE(d.status == SearchStatus::ok);
  REQUIRE(d.complete);
  return summand_names(d);
}

}  // namespace

TEST_SUITE_BEGIN("reduce");

TEST_CASE("named pieces come back from plain direct sums at 3") {
  BlockMatrix d = sum_of({realize_string(Word::parse("e0 - f0")),
                          realize_string(Word::parse("e1 ~ et1")),
                          realize_string(Word::parse("f'0"))});
  CHECK(names_of(d) == std::vector<std::string>{"e0 - f0", "e1 ~ et1", "f'0"});

  BandWord b;
  b.e_exps = {1};
  b.f_exps = {1};
  b.pi = {1, 1};
  b.z = 1;
  BlockMatrix d2 = sum_of({realize_band(b), realize_string(Word::parse("e0"))});
  auto dec = decompose(d2);
  REQUIRE(dec.complete);
  REQUIRE(dec.summands.size() == 2);
  CHECK(dec.summands[0].kind == SummandKind::string);
  CHECK(dec.summands[0].name == "e0");
  CHECK(dec.summands[1].kind == SummandKind::band);
  CHECK(dec.summands[1].name == b.print());
}

TEST_CASE("named pieces come back from plain direct sums at 2") {
  BlockMatrix d =
      sum_of({cat("Cv^{n+4}{v=2}"), cat("Ceta^{n+2}"), cat("(eta2.v)_0^1{v=1}")});
  CHECK(names_of(d) ==
        std::vector<std::string>{"(eta2.v)_0^1{v=1}", "Ceta^{n+2}", "Cv^{n+4}{v=2}"});
}

TEST_CASE("recovery after scrambling at 3") {
  BlockMatrix d = sum_of({realize_string(Word::parse("e0 - f1 ~ ft1")),
                          realize_string(Word::parse("e'0 - f'0")),
                          realize_string(Word::parse("f1 ~ ft1"))});
  auto expect = names_of(d);
  TransformContext ctx(d);
  for (std::uint64_t seed : {11u, 23u, 47u}) {
    BlockMatrix s = ctx.scramble(d, 20, seed);
    CHECK(names_of(s) == expect);
  }
}

TEST_CASE("recovery after scrambling at 2") {
  BlockMatrix d = sum_of({cat("(v.eta2)_0^0{v=1}"), cat("Ceta2^{n+4}"), cat("S^{n+4}")});
  auto expect = names_of(d);
  TransformContext ctx(d);
  for (std::uint64_t seed : {5u, 19u}) {
    BlockMatrix s = ctx.scramble(d, 20, seed);
    CHECK(names_of(s) == expect);
  }
}

TEST_CASE("sweep stays in the orbit and sheds scramble noise") {
  BlockMatrix m = realize_string(Word::parse("e0 - f1 ~ ft1 - e'0"));
  TransformContext ctx(m);
  BlockMatrix s = ctx.scramble(m, 15, 7);
  BlockMatrix r = sweep_reduce(s);
  CHECK(r.nonzero_count() <= s.nonzero_count());
  auto eq = orbit_equivalent(r, m);
  REQUIRE(eq.status == SearchStatus::ok);
  CHECK(eq.equivalent);
}

TEST_CASE("identification names every catalog item") {
  for (const auto& it : enumerate_catalog()) {
    auto s = identify_summand(catalog_matrix(it));
    REQUIRE(s.has_value());
    CHECK(s->kind == SummandKind::catalog);
    CHECK(s->name == catalog_name(it));
  }
}

TEST_CASE("pieces beyond the engine caps are reported, not guessed") {
  BandWord big;
  big.e_exps = {1, 1, 1, 1, 2};
  big.f_exps = {1, 1, 1, 1, 1};
  big.pi = {1, 1};
  big.z = 1;
  REQUIRE(big.valid());
  BlockMatrix m = realize_band(big);
  REQUIRE(m.rows_total() > 8);
  auto d = decompose(m);
  CHECK(d.status == SearchStatus::budget_exceeded);
  CHECK(!d.complete);
  CHECK(d.summands.empty());
  REQUIRE(d.leftovers.size() == 1);
  CHECK(d.leftovers[0].rows_total() == m.rows_total());
}

TEST_CASE("decompose rejects non-local variants") {
  BlockMatrix z = BlockMatrix::make(Variant::integral, {{row_sphere(0), 1}}, {{col_sphere(3), 1}});
  CHECK_THROWS_AS(decompose(z), DomainError);
}

TEST_SUITE_END();
