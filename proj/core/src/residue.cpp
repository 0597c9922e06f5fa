#include "stripemat/residue.hpp"

#include <numeric>

namespace stripemat {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  return std::gcd(a, b);
}

std::pair<std::int64_t, std::int64_t> crt_split(std::int64_t v, std::int64_t m) {
  if (m == 24) return {normalize_mod(v, 8), normalize_mod(v, 3)};
  if (m == 12) return {normalize_mod(v, 4), normalize_mod(v, 3)};
  throw std::invalid_argument("crt_split: modulus must be 24 or 12");
}

std::int64_t crt_combine(std::int64_t a, std::int64_t b, std::int64_t m) {
  // 9 = 1 (mod 8) = 0 (mod 3), 16 = 0 (mod 8) = 1 (mod 3); likewise for 12
  // with 9 = 1 (mod 4) and 4 = 1 (mod 3).
  if (m == 24) return normalize_mod(9 * a + 16 * b, 24);
  if (m == 12) return normalize_mod(9 * a + 4 * b, 12);
  throw std::invalid_argument("crt_combine: modulus must be 24 or 12");
}

std::int64_t transfer_multiplier(std::int64_t a, std::int64_t m_src, std::int64_t m_tgt) {
  if (m_src == 1 || m_tgt == 1) return 0;
  if (m_tgt == 0) return 0;  // nothing maps into the integer cell from outside
  if (m_src == 0) return normalize_mod(a, m_tgt);
  std::int64_t g = gcd64(a * m_src, m_tgt);
  return normalize_mod(a * (m_tgt / g), m_tgt);
}

int valuation(std::int64_t v, int p) {
  if (v == 0) return kValInfinity;
  if (v < 0) v = -v;
  int r = 0;
  while (v % p == 0) {
    v /= p;
    ++r;
  }
  return r;
}

std::int64_t part_of_modulus(std::int64_t m, int p) {
  if (m == 0) return 0;
  std::int64_t part = 1;
  while (m % p == 0) {
    part *= p;
    m /= p;
  }
  return part;
}

std::string show_residue(const Residue& r) {
  return std::to_string(r.value) + " (mod " + std::to_string(r.modulus) + ")";
}

}  // namespace stripemat
