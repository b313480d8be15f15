#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace bellphase::ga3 {

class InvalidOperand : public std::invalid_argument {
public:
  explicit InvalidOperand(const std::string &what) : std::invalid_argument(what) {}
};

class DegeneratePlane : public std::invalid_argument {
public:
  explicit DegeneratePlane(const std::string &what) : std::invalid_argument(what) {}
};

// Canonical blade order of Cl(3,0). The coefficient array of a Multivector is
// indexed by this enum; every blade appears exactly once.
enum Blade : std::size_t {
  kScalar = 0,
  kE1 = 1,
  kE2 = 2,
  kE3 = 3,
  kE12 = 4,
  kE13 = 5,
  kE23 = 6,
  kE123 = 7,
};

inline constexpr std::size_t kBladeCount = 8;

// Name of a blade ("1", "e1", ..., "e123").
const char *blade_name(std::size_t blade);

struct Multivector {
  std::array<double, kBladeCount> c{};

  static constexpr Multivector scalar(double s) {
    Multivector m;
    m.c[kScalar] = s;
    return m;
  }

  static constexpr Multivector basis(std::size_t blade, double s = 1.0) {
    Multivector m;
    m.c[blade] = s;
    return m;
  }

  constexpr double operator[](std::size_t blade) const { return c[blade]; }
  constexpr double &operator[](std::size_t blade) { return c[blade]; }

  bool is_finite() const;

  friend constexpr bool operator==(const Multivector &, const Multivector &) = default;
};

Multivector operator+(const Multivector &a, const Multivector &b);
Multivector operator-(const Multivector &a, const Multivector &b);
Multivector operator-(const Multivector &a);
Multivector operator*(double s, const Multivector &m);

// Plane of rotation, over {e12, e13, e23}.
struct Bivector {
  double e12 = 0.0;
  double e13 = 0.0;
  double e23 = 0.0;

  double norm() const;
  Multivector to_multivector() const;

  friend constexpr bool operator==(const Bivector &, const Bivector &) = default;
};

/// Geometric product under the Cl(3,0) multiplication table.
/// Throws InvalidOperand if either operand has a NaN or infinite coefficient.
Multivector geometric_product(const Multivector &a, const Multivector &b);

inline Multivector operator*(const Multivector &a, const Multivector &b) {
  return geometric_product(a, b);
}

/// The unit pseudoscalar e1e2e3. Squares to -1 and commutes with every element.
Multivector pseudoscalar();

/// exp(B angle) for the unit bivector B along `plane`:
///   cos(angle) + sin(angle) B
/// Non-unit planes are normalised first. A zero plane throws DegeneratePlane.
Multivector rotor_exp(const Bivector &plane, double angle);

/// exp(I angle) with I the pseudoscalar: cos(angle) + sin(angle) e1e2e3.
/// This is the "complex phase" reading of a rotation exponent whose generator
/// is the trivector (e1e2)e3.
Multivector pseudoscalar_exp(double angle);

double scalar_part(const Multivector &m);

// Entry of the multiplication table: e_a e_b = sign * e_index.
struct TableEntry {
  std::size_t index;
  int sign;
};

/// Product of two basis blades, derived from the orthonormal Euclidean metric.
TableEntry blade_product(std::size_t a, std::size_t b);

}  // namespace bellphase::ga3
