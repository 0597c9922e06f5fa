#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stripemat/blockmat.hpp"
#include "stripemat/transform.hpp"

namespace stripemat {

enum class SummandKind { catalog, string, band };

// One indecomposable summand, carrying its printable name and the component
// it was recognized from.
struct Summand {
  SummandKind kind;
  std::string name;
  BlockMatrix mat;
};

struct DecomposeOptions {
  OrbitOptions oracle;        // caps for the exact orbit engine
  bool structured = true;     // run the descent pre-pass before the oracle
  int max_word_letters = 12;  // identification search bounds
  int max_band_pairs = 4;
  int max_band_z = 4;
  int max_poly_degree = 4;
};

struct Decomposition {
  SearchStatus status = SearchStatus::ok;
  bool complete = true;  // every component resolved to a named summand
  std::vector<Summand> summands;
  std::vector<BlockMatrix> leftovers;  // connected pieces left unresolved
  std::size_t explored = 0;
};

// Splits a 2- or 3-local matrix into named indecomposable summands: connected
// components first, then an entry-count descent over admissible moves, then
// the exhaustive orbit engine on anything within its caps. Pieces beyond the
// caps are returned as leftovers with complete=false. DomainError on other
// variants.
Decomposition decompose(const BlockMatrix& m, const DecomposeOptions& opt = {});

// Descent pre-pass: walks admissible moves that strictly reduce the nonzero
// entry count (entry values as a tiebreak), so the result is in the same
// orbit with no more entries than the input.
BlockMatrix sweep_reduce(const BlockMatrix& m, bool strict_units = false);

// Names one indecomposable piece by matching its stripe frame against
// realized candidates (catalog items at 2, strings and bands at 3) and
// testing orbit equivalence. nullopt when nothing within bounds matches.
std::optional<Summand> identify_summand(const BlockMatrix& piece,
                                        const DecomposeOptions& opt = {});

// Multiset-style equality helper for recovered summand names.
std::vector<std::string> summand_names(const Decomposition& d);

}  // namespace stripemat
