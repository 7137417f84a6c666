#pragma once

#include <compare>
#include <string>

namespace rydion {

/// Exact half-integer, stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
  static constexpr HalfInt integer(int v) { return HalfInt(2 * v); }
  static constexpr HalfInt half(int numerator) { return HalfInt(numerator); }

  [[nodiscard]] constexpr int twice() const { return twice_; }
  [[nodiscard]] constexpr double value() const { return 0.5 * twice_; }
  [[nodiscard]] constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
  constexpr auto operator<=>(const HalfInt&) const = default;

  [[nodiscard]] std::string str() const;

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

/// True when j >= 0, |m| <= j and j - m is an integer.
constexpr bool valid_projection(HalfInt j, HalfInt m) {
  return j.twice() >= 0 && abs(m) <= j && (j.twice() - m.twice()) % 2 == 0;
}

/// True when j1, j2, j satisfy the triangle rule with integer j1 + j2 + j.
constexpr bool triangle(HalfInt j1, HalfInt j2, HalfInt j) {
  return (j1.twice() + j2.twice() + j.twice()) % 2 == 0 && j <= j1 + j2 &&
         abs(j1 - j2) <= j;
}

/// <j1 m1; j2 m2 | J M> in the Condon-Shortley convention (Racah formula).
/// Throws DomainError for an invalid (j, m) pair.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

}  // namespace rydion
