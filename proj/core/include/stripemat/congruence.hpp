#pragma once
// Stable classification of integral matrices. A class is determined by the
// pair of localized summand multisets at 2 and 3 together with the free rank
// in each dimension, so the layer below consists of four pieces:
//
//   merge      rebuilds the integral matrix from its two localizations,
//   congruent  tests stable equivalence (orbit equivalence after padding
//              both sides with zero lines and localizing),
//   diagonalize_integral_block
//              resolves the integer block of the extended variant into
//              torsion data the localizations can see,
//   classify   splits the pair into the finest family of subpairs whose
//              2- and 3-local footprints agree on the four scarce line
//              types, and names every part against the coupled-class list.
//
// Scarce lines are the degree-n and degree-(n+1) attaching rows and the two
// sphere columns: the only lines both localizations can occupy at once.
// Everything else (even-degree rows, Moore stripes) belongs to one prime
// and passes through classification as a singleton.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stripemat/blockmat.hpp"
#include "stripemat/reduce.hpp"
#include "stripemat/transform.hpp"

namespace stripemat {

// Rebuilds the integral matrix whose localizations are a2 and a3, using the
// line provenance both records carry. Entries recombine through the residue
// splitting of each integral cell ring. Throws DomainError when the two
// records disagree on the integral frame or claim entries the frame cannot
// hold.
BlockMatrix merge(const LocalizedMatrix& a2, const LocalizedMatrix& a3);

struct CongruenceResult {
  SearchStatus status = SearchStatus::ok;
  bool congruent = false;  // meaningful only when status == ok
  std::size_t explored = 0;
};

// Stable equivalence of integral matrices: pads both with zero lines to a
// common frame, then requires orbit equivalence of the localizations at 2
// and at 3. Strictly coarser than integral orbit equivalence.
CongruenceResult congruent(const BlockMatrix& a, const BlockMatrix& b,
                           const OrbitOptions& opt = {});

// Result of resolving the integer block of an extended-variant matrix. The
// block is diagonalized with side effects carried across the whole matrix;
// each diagonal entry d then reduces to torsion the localizations can see:
//   d = 0        row and column stay as ordinary zero lines;
//   d = +-1      row and column cancel outright;
//   3-part 3^r   the column survives with its 2-primary entries killed and
//                is recorded in `decorated` as (column offset, r);
//   odd part q coprime to 3
//                splits off one degree-(n+3) Moore class per prime power
//                of q, listed in `odd_moore`.
// An even diagonal entry contradicts the torsion hypothesis of the ambient
// problem and throws DomainError.
struct ExtReduction {
  BlockMatrix mat;  // integral variant, integer block resolved
  std::vector<std::pair<int, int>> decorated;  // (S+3 column offset, r)
  std::vector<std::string> odd_moore;          // e.g. "M_{5}^{n+3}"
};

ExtReduction diagonalize_integral_block(const BlockMatrix& a);

// One local piece placed on integral lines, and the graph joining pieces
// through the lines they share. A line may carry at most one piece per
// prime; edges connect pieces of different primes meeting on a line.
struct PlacedPart {
  int prime = 2;
  std::string name;
  std::vector<std::pair<StripeLabel, int>> row_lines, col_lines;
};

struct ConnectionGraph {
  struct Edge {
    int a = 0, b = 0;  // node indices
    Side side = Side::row;
    StripeLabel line;
    int offset = 0;
  };
  std::vector<PlacedPart> nodes;
  std::vector<Edge> edges;
};

ConnectionGraph connection_graph(const std::vector<PlacedPart>& parts);

enum class ClassKind {
  elementary,     // a sphere or one of the three attaching-row cones
  moore,          // a Moore class (3-primary or split off the integer block)
  local3_string,  // a string class, possibly with scarce ends
  local3_band,    // a band class
  liststar,       // a coupled class from the two-sided list, item 1..74
  liststarstar,   // a coupled class decorated by integer-block torsion
  unclassified,   // recognized as indecomposable but not matched; never
                  // silently misnamed
};

struct CongruenceClass {
  ClassKind kind = ClassKind::unclassified;
  std::string name;
  int item = 0;  // list index for kind == liststar / liststarstar
  std::vector<std::string> parts2, parts3;  // constituent local summands
  BlockMatrix matrix;  // canonical integral representative
};

struct Classification {
  SearchStatus status = SearchStatus::ok;
  bool complete = true;
  std::vector<CongruenceClass> classes;
};

// Full pipeline: resolve the integer block if present, split off connected
// components, localize and decompose each, take the finest footprint-matched
// partition of the summand pair, and name every part. Classes come back
// canonically sorted; scrambling the input by admissible moves does not
// change them.
Classification classify(const BlockMatrix& a, const DecomposeOptions& opt = {});

// Names the class of one footprint-matched summand pair. Exposed for tests;
// classify() drives it per part. Falls back to ClassKind::unclassified
// rather than guessing.
CongruenceClass liststar_name(const std::vector<Summand>& parts2,
                              const std::vector<Summand>& parts3);

// Canonical integral representative of a named class, as used for
// CongruenceClass::matrix. Throws DomainError for unclassified input.
BlockMatrix realize_class(const CongruenceClass& c);

// One-line parameter display for report output: shape stems with merged
// Z/24 or Z/12 parameter values, backing units, and unabsorbed strings.
std::string class_parameters(const CongruenceClass& c);

}  // namespace stripemat
