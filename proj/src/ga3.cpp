#include "bellphase/ga3.hpp"

#include <bit>
#include <cmath>

namespace bellphase::ga3 {

namespace {

// Blades as bitmasks over the generators (bit 0 = e1, bit 1 = e2, bit 2 = e3),
// in canonical index order.
constexpr std::array<unsigned, kBladeCount> kMask = {0b000, 0b001, 0b010, 0b100,
                                                     0b011, 0b101, 0b110, 0b111};

constexpr std::array<std::size_t, kBladeCount> mask_to_index() {
  std::array<std::size_t, kBladeCount> inv{};
  for (std::size_t i = 0; i < kBladeCount; ++i) inv[kMask[i]] = i;
  return inv;
}

constexpr std::array<std::size_t, kBladeCount> kIndexOfMask = mask_to_index();

// Sign from reordering the concatenated generator strings of a and b into
// canonical order; each generator of b must hop over the higher generators of a.
constexpr int reorder_sign(unsigned a, unsigned b) {
  int swaps = 0;
  a >>= 1;
  while (a != 0) {
    swaps += std::popcount(a & b);
    a >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

using Table = std::array<std::array<TableEntry, kBladeCount>, kBladeCount>;

constexpr Table build_table() {
  Table t{};
  for (std::size_t i = 0; i < kBladeCount; ++i) {
    for (std::size_t j = 0; j < kBladeCount; ++j) {
      // Repeated generators contract to +1 (Euclidean metric).
      t[i][j] = {kIndexOfMask[kMask[i] ^ kMask[j]], reorder_sign(kMask[i], kMask[j])};
    }
  }
  return t;
}

constexpr Table kTable = build_table();

constexpr std::array<const char *, kBladeCount> kNames = {"1",   "e1",  "e2",  "e3",
                                                          "e12", "e13", "e23", "e123"};

}  // namespace

const char *blade_name(std::size_t blade) {
  return blade < kBladeCount ? kNames[blade] : "?";
}

bool Multivector::is_finite() const {
  for (double x : c) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Multivector operator+(const Multivector &a, const Multivector &b) {
  Multivector r;
  for (std::size_t i = 0; i < kBladeCount; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

Multivector operator-(const Multivector &a, const Multivector &b) {
  Multivector r;
  for (std::size_t i = 0; i < kBladeCount; ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}

Multivector operator-(const Multivector &a) {
  Multivector r;
  for (std::size_t i = 0; i < kBladeCount; ++i) r.c[i] = -a.c[i];
  return r;
}

Multivector operator*(double s, const Multivector &m) {
  Multivector r;
  for (std::size_t i = 0; i < kBladeCount; ++i) r.c[i] = s * m.c[i];
  return r;
}

double Bivector::norm() const { return std::sqrt(e12 * e12 + e13 * e13 + e23 * e23); }

Multivector Bivector::to_multivector() const {
  Multivector m;
  m.c[kE12] = e12;
  m.c[kE13] = e13;
  m.c[kE23] = e23;
  return m;
}

TableEntry blade_product(std::size_t a, std::size_t b) {
  if (a >= kBladeCount || b >= kBladeCount) throw InvalidOperand("blade index out of range");
  return kTable[a][b];
}

Multivector geometric_product(const Multivector &a, const Multivector &b) {
  if (!a.is_finite() || !b.is_finite()) {
    throw InvalidOperand("geometric_product: non-finite coefficient");
  }
  Multivector r;
  for (std::size_t i = 0; i < kBladeCount; ++i) {
    if (a.c[i] == 0.0) continue;
    for (std::size_t j = 0; j < kBladeCount; ++j) {
      const TableEntry &e = kTable[i][j];
      r.c[e.index] += e.sign * a.c[i] * b.c[j];
    }
  }
  return r;
}

Multivector pseudoscalar() { return Multivector::basis(kE123); }

Multivector rotor_exp(const Bivector &plane, double angle) {
  if (!std::isfinite(angle)) throw InvalidOperand("rotor_exp: non-finite angle");
  if (!std::isfinite(plane.e12) || !std::isfinite(plane.e13) || !std::isfinite(plane.e23)) {
    throw InvalidOperand("rotor_exp: non-finite plane");
  }
  const double n = plane.norm();
  if (n == 0.0) throw DegeneratePlane("rotor_exp: zero plane bivector");

  const double s = std::sin(angle) / n;
  Multivector r;
  r.c[kScalar] = std::cos(angle);
  r.c[kE12] = s * plane.e12;
  r.c[kE13] = s * plane.e13;
  r.c[kE23] = s * plane.e23;
  return r;
}

Multivector pseudoscalar_exp(double angle) {
  if (!std::isfinite(angle)) throw InvalidOperand("pseudoscalar_exp: non-finite angle");
  Multivector r;
  r.c[kScalar] = std::cos(angle);
  r.c[kE123] = std::sin(angle);
  return r;
}

double scalar_part(const Multivector &m) { return m.c[kScalar]; }

}  // namespace bellphase::ga3
