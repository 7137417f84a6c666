#include "rydion/angular.hpp"

#include <array>
#include <cmath>

#include "rydion/error.hpp"

namespace rydion {

std::string HalfInt::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

namespace {

constexpr int kMaxFactorial = 170;

const std::array<long double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<long double, kMaxFactorial + 1> t{};
    t[0] = 1.0L;
    for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

long double fact(int n) {
  if (n < 0 || n > kMaxFactorial) throw DomainError("clebsch_gordan: factorial argument out of range");
  return factorials()[n];
}

// (a + b) / 2 for doubled values; callers guarantee integrality.
int half_sum(int twice_a, int twice_b) { return (twice_a + twice_b) / 2; }

}  // namespace

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  if (!valid_projection(j1, m1) || !valid_projection(j2, m2) || !valid_projection(J, M)) {
    throw DomainError("clebsch_gordan: invalid (j, m) pair");
  }
  if (m1 + m2 != M || !triangle(j1, j2, J)) return 0.0;

  const int a = j1.twice(), b = j2.twice(), c = J.twice();
  const int ma = m1.twice(), mb = m2.twice(), mc = M.twice();

  const long double prefactor =
      (c + 1) * fact(half_sum(c + a, -b)) * fact(half_sum(c - a, b)) * fact(half_sum(a + b, -c)) /
      fact(half_sum(a + b, c) + 1);
  const long double norm = fact(half_sum(c, mc)) * fact(half_sum(c, -mc)) * fact(half_sum(a, -ma)) *
                           fact(half_sum(a, ma)) * fact(half_sum(b, -mb)) * fact(half_sum(b, mb));

  const int k_hi[] = {half_sum(a + b, -c), half_sum(a, -ma), half_sum(b, mb)};
  const int k_lo[] = {-half_sum(c - b, ma), -half_sum(c - a, -mb)};
  int kmin = 0;
  for (int v : k_lo) kmin = std::max(kmin, v);
  int kmax = k_hi[0];
  for (int v : k_hi) kmax = std::min(kmax, v);

  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double denom = fact(k) * fact(k_hi[0] - k) * fact(k_hi[1] - k) * fact(k_hi[2] - k) *
                              fact(half_sum(c - b, ma) + k) * fact(half_sum(c - a, -mb) + k);
    sum += ((k % 2) ? -1.0L : 1.0L) / denom;
  }
  return static_cast<double>(std::sqrt(prefactor * norm) * sum);
}

}  // namespace rydion
