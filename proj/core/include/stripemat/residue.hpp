#pragma once
// Scalar arithmetic for block-matrix entries. Every cell of a block matrix
// lives in Z/m for m in {2, 3, 4, 8, 12, 24}, in the integers (m = 0), or in
// the zero ring (m = 1). Using the modulus itself as the ring tag keeps all
// case analysis in plain integer arithmetic: reduction mod 1 is identically
// zero, and mod 0 is the identity.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace stripemat {

// Reduce v into [0, m). m = 0 means no reduction (integers).
inline std::int64_t normalize_mod(std::int64_t v, std::int64_t m) {
  if (m == 0) return v;
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b);

// True when v acts invertibly on Z/m (for m = 0: v = +-1).
inline bool is_unit_mod(std::int64_t v, std::int64_t m) {
  if (m == 0) return v == 1 || v == -1;
  if (m == 1) return true;
  return gcd64(normalize_mod(v, m), m) == 1;
}

// A residue tagged with its modulus. Arithmetic between residues requires
// equal moduli; scaling by plain integers is always allowed.
struct Residue {
  std::int64_t value = 0;
  std::int64_t modulus = 1;

  static Residue make(std::int64_t v, std::int64_t m) {
    if (m < 0) throw std::invalid_argument("Residue: negative modulus");
    return Residue{normalize_mod(v, m), m};
  }
  bool is_zero() const { return value == 0; }
  bool is_unit() const { return is_unit_mod(value, modulus); }

  Residue operator+(const Residue& o) const { return combined(o, value + o.value); }
  Residue operator-(const Residue& o) const { return combined(o, value - o.value); }
  Residue operator*(const Residue& o) const { return combined(o, value * o.value); }
  Residue operator-() const { return Residue{normalize_mod(-value, modulus), modulus}; }
  Residue scaled(std::int64_t k) const { return Residue{normalize_mod(value * k, modulus), modulus}; }
  bool operator==(const Residue& o) const = default;

 private:
  Residue combined(const Residue& o, std::int64_t raw) const {
    if (modulus != o.modulus) throw std::invalid_argument("Residue: modulus mismatch");
    return Residue{normalize_mod(raw, modulus), modulus};
  }
};

// Splits a mod-24 value into (mod-8, mod-3) or a mod-12 value into
// (mod-4, mod-3). Only m = 24 and m = 12 are composite here.
std::pair<std::int64_t, std::int64_t> crt_split(std::int64_t v, std::int64_t m);

// Inverse pairing: 9a + 16b mod 24, or 9a + 4b mod 12.
std::int64_t crt_combine(std::int64_t a, std::int64_t b, std::int64_t m);

// Multiplier describing how a cross-stripe addition acts on entries: a line
// addition carrying printed coefficient a moves an integer representative x
// of a Z/m_src entry to t * x added into the Z/m_tgt entry, with
//   t = a * (m_tgt / gcd(a * m_src, m_tgt)) mod m_tgt.
// The multiplier is the index of the image subgroup: the transported class
// a*x must land in the subgroup of Z/m_tgt on which the composite is
// well-defined. For an integer source (m_src = 0) the action is plain
// multiplication by a. A zero ring on either side gives 0.
std::int64_t transfer_multiplier(std::int64_t a, std::int64_t m_src, std::int64_t m_tgt);

// p-adic valuation for p in {2, 3}; returns a large sentinel for v = 0.
int valuation(std::int64_t v, int p);
inline constexpr int kValInfinity = 64;

// The 2-part / 3-part of a modulus: 24 -> 8, 12 -> 4, 6 -> 2 etc.
std::int64_t part_of_modulus(std::int64_t m, int p);

std::string show_residue(const Residue& r);

}  // namespace stripemat
