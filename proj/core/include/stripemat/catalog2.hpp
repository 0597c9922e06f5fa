#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stripemat/blockmat.hpp"

namespace stripemat {

// Parameter slots of the 2-local catalog. Values are representatives of the
// unit orbits that remain after the admissible shifts of the shape:
//   z8_full {1,2,4}, z8_shifted {1,2}, z4_full {1,2}, z4_shifted {1}.
enum class ParamKind { none, z8_full, z8_shifted, z4_full, z4_shifted };

const std::vector<std::int64_t>& param_values(ParamKind k);

// A shape of the 2-local catalog: either a bare generator (unit) or a fixed
// entry pattern with up to two parameter slots v and w.
struct CatalogShape {
  struct Cell {
    StripeLabel row;
    int col_level;  // 3 or 4, the sphere column
    int param;      // -1 fixed value 1, 0 the v slot, 1 the w slot
  };
  std::string stem;
  ParamKind v_kind = ParamKind::none;
  ParamKind w_kind = ParamKind::none;
  std::vector<Cell> cells;
  std::optional<StripeLabel> unit;  // set for bare generators
};

inline constexpr int kCatalogUnitCount = 9;
inline constexpr int kCatalogShapeCount = 31;  // entry-bearing shapes
inline constexpr int kCatalogItemCount = 85;   // shapes times parameter values

// All shapes, units first; size kCatalogUnitCount + kCatalogShapeCount.
const std::vector<CatalogShape>& catalog_shapes();

struct CatalogItem {
  int shape = -1;
  std::int64_t v = 0, w = 0;  // 0 when the slot is absent
  bool operator==(const CatalogItem&) const = default;
};

std::string catalog_name(const CatalogItem& it);
std::optional<CatalogItem> catalog_parse(std::string_view name);
BlockMatrix catalog_matrix(const CatalogItem& it);  // 2-local, all dims 1
std::vector<CatalogItem> enumerate_catalog();

}  // namespace stripemat
