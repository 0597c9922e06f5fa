#pragma once
// Frozen expected values. Each constant was fixed before the corresponding
// library code was written: the CRT data agrees with the scan oracle in
// int_oracles.hpp, the transfer multipliers and value sets were derived by
// hand from the generator calculus and cross-checked against unit_orbit().
// Tests assert against these literals; regenerating them from library calls
// would defeat their purpose.

#include <array>
#include <cstdint>
#include <set>
#include <utility>

namespace frozen {

// Mod-24 pairing: x = 9a + 16b (mod 24) is the unique x with x = a (mod 8),
// x = b (mod 3). Spot table: (a, b, x).
inline constexpr std::array<std::array<int, 3>, 8> kCrt24{{
    {{0, 0, 0}},
    {{1, 0, 9}},
    {{0, 1, 16}},
    {{1, 1, 1}},
    {{5, 1, 13}},
    {{7, 2, 23}},
    {{4, 2, 20}},
    {{3, 1, 19}},
}};

// Mod-12 pairing: x = 9a + 4b (mod 12), x = a (mod 4), x = b (mod 3).
inline constexpr std::array<std::array<int, 3>, 6> kCrt12{{
    {{0, 0, 0}},
    {{1, 0, 9}},
    {{0, 1, 4}},
    {{1, 1, 1}},
    {{3, 2, 11}},
    {{2, 1, 10}},
}};

// Cross-stripe addition transfers: (printed coefficient, source modulus,
// target modulus, multiplier on integer representatives).
// The first row is the rule that adding a mod-2 line into a mod-24 line
// shifts the target by multiples of 12.
inline constexpr std::array<std::array<int, 4>, 14> kTransfers{{
    {{1, 2, 24, 12}},
    {{1, 2, 12, 6}},
    {{6, 2, 12, 6}},
    {{6, 2, 4, 2}},
    {{1, 24, 12, 1}},
    {{2, 12, 24, 2}},
    {{2, 12, 12, 2}},
    {{2, 12, 2, 0}},
    {{1, 3, 24, 8}},
    {{1, 3, 12, 4}},
    {{1, 2, 8, 4}},
    {{2, 4, 8, 2}},
    {{1, 8, 4, 1}},
    {{2, 3, 3, 2}},
}};

// Orbits of Z/24 under scalars coprime to 24 (canonical representative and
// orbit size). Representatives are exactly {0, 1, 2, 3, 4, 6, 8, 12}; the
// merged-class value list {1, 4, 6, 8, 9, 10, 12} below refines this by the
// mod-3 part.
inline const std::set<int> kZ24OrbitReps{0, 1, 2, 3, 4, 6, 8, 12};

// Attaching values mod 24 that occur as canonical class parameters on a
// degree-n sphere row: CRT products of 2-local valuation classes {1,2,4,0}
// with 3-part classes {0, nonzero}.
inline const std::set<int> kSphereRowValues{1, 4, 6, 8, 9, 10, 12};
// ... those with zero 3-part:
inline const std::set<int> kSphereRowValues3Zero{6, 9, 12};
// ... and with nonzero 3-part (8 = val-3 two-part with nonzero 3-part):
inline const std::set<int> kSphereRowValues3Nonzero{1, 4, 8, 10};

// Same for mod-12 cone rows.
inline const std::set<int> kConeRowValues{1, 2, 3, 4, 6};
inline const std::set<int> kConeRowValues3Zero{3, 6};
inline const std::set<int> kConeRowValues3Nonzero{1, 2, 4};

// Catalog parameter domains (2-local): valuation classes in Z/8 and Z/4.
inline const std::set<int> kParamZ8Full{1, 2, 4};
inline const std::set<int> kParamZ8Shifted{1, 2};  // companion eta/eta2 entry present
inline const std::set<int> kParamZ4Full{1, 2};
inline const std::set<int> kParamZ4Shifted{1};     // coefficient-6 companion present

// Number of item shapes in the 2-local catalog.
inline constexpr int kCatalogShapeCount = 31;

// decompose-recovery acceptance parameters.
inline constexpr int kRecoveryTrials = 100;
inline constexpr int kRecoveryMaxSummands = 3;
inline constexpr int kRecoveryScrambleSteps = 20;

// Orbit-oracle defaults.
inline constexpr std::uint64_t kOracleBudget = 10'000'000;
inline constexpr int kOracleMaxLines = 8;

}  // namespace frozen
