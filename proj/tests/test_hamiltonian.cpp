#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rydion/error.hpp"
#include "rydion/floquet.hpp"
#include "rydion/hamiltonian.hpp"

using namespace rydion;
using cd = std::complex<double>;

namespace {

const HalfInt kHalf = HalfInt::half(1);

Matrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

// Roots of the characteristic polynomial of a 3x3 Hermitian matrix (trigonometric form of the cubic).
std::vector<double> cubic_eigenvalues(const Matrix& h) {
  const double tr = h.trace().real();
  const double tr2 = (h * h).trace().real();
  const double det = h.determinant().real();
  // lambda^3 - tr lambda^2 + c1 lambda - det = 0
  const double c1 = 0.5 * (tr * tr - tr2);
  const double shift = tr / 3.0;
  const double p = c1 - tr * tr / 3.0;
  const double q = -2.0 * tr * tr * tr / 27.0 + tr * c1 / 3.0 - det;
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double phi = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0)) / 3.0;
  std::vector<double> roots;
  for (int k = 0; k < 3; ++k) roots.push_back(shift + r * std::cos(phi - kTwoPi * k / 3.0));
  std::sort(roots.begin(), roots.end());
  return roots;
}

LevelBasis manifold_basis(int n, int L, HalfInt J, LevelRole role) {
  std::vector<ElectronicLevel> levels;
  for (int tm = -J.twice(); tm <= J.twice(); tm += 2) levels.push_back(ElectronicLevel::make(n, L, J, HalfInt::from_twice(tm), role));
  return LevelBasis(levels);
}

// One-period propagator of i dpsi/dt = H(t) psi by fixed-step RK4.
Matrix period_propagator(const Matrix& h0, const Matrix& v, double omega, int steps) {
  const double period = kTwoPi / omega;
  const double dt = period / steps;
  Matrix u = Matrix::Identity(h0.rows(), h0.cols());
  auto f = [&](double t, const Matrix& y) -> Matrix { return cd(0, -1) * (h0 + v * std::cos(omega * t)) * y; };
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    const Matrix k1 = f(t, u), k2 = f(t + dt / 2, u + dt / 2 * k1), k3 = f(t + dt / 2, u + dt / 2 * k2),
                 k4 = f(t + dt, u + dt * k3);
    u += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

double wrap(double x, double period) {
  double y = std::fmod(x, period);
  if (y < -period / 2) y += period;
  if (y > period / 2) y -= period;
  return y;
}

}  // namespace

TEST_CASE("Hermitian eigenvalues agree with the characteristic polynomial") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix h = random_hermitian(3, seed);
    const auto dec = diagonalize(h);
    const auto roots = cubic_eigenvalues(h);
    for (int k = 0; k < 3; ++k) CHECK(dec.values(k) == doctest::Approx(roots[k]).epsilon(1e-10));
    CHECK((h * dec.vectors - dec.vectors * dec.values.asDiagonal()).norm() < 1e-10);
    CHECK((dec.vectors.adjoint() * dec.vectors - Matrix::Identity(3, 3)).norm() < 1e-12);
  }
}

TEST_CASE("Eigenvector gauge: largest component real and positive") {
  const Matrix h = random_hermitian(6, 42);
  const auto dec = diagonalize(h);
  for (int k = 0; k < 6; ++k) {
    Eigen::Index i = 0;
    dec.vectors.col(k).cwiseAbs().maxCoeff(&i);
    CHECK(dec.vectors(i, k).real() > 0);
    CHECK(std::abs(dec.vectors(i, k).imag()) < 1e-14);
  }
  // The same matrix always gives the same vectors.
  CHECK((diagonalize(h).vectors - dec.vectors).norm() == 0.0);
}

TEST_CASE("Non-Hermitian input is a numerical error") {
  Matrix h = random_hermitian(4, 3);
  h(0, 1) += 0.5;
  CHECK(hermiticity_defect(h) > 1e-3);
  CHECK_THROWS_AS(diagonalize(h), NumericalError);
}

TEST_CASE("Quadrupole constants of the typical trap") {
  const HalfInt j = HalfInt::half(3);
  const double q1 = quadrupole_moment(24, HalfInt::integer(2), j, 1.0);
  const double es = quadrupole_static_shift(j, HalfInt::half(3), 6e5, q1);
  const double c = quadrupole_rf_coupling(j, HalfInt::half(-3), 3e8, q1);
  // Oracle: closed forms for J = 3/2.
  CHECK(es == doctest::Approx(-0.4 * 6e5 * q1 / kConstants.hbar));
  CHECK(c == doctest::Approx(2 * q1 * 3e8 / (5 * std::sqrt(3.0) * kConstants.hbar)));
  CHECK(quadrupole_rf_coupling(j, HalfInt::half(-1), 3e8, q1) == doctest::Approx(c));
  // Target: C / (|E_s| / hbar) = 288.7 +- 1%, and the absolute values within 10% of 2pi x 43 kHz and 2pi x 12 MHz.
  CHECK(std::abs(c / es) == doctest::Approx(288.7).epsilon(0.01));
  CHECK(std::abs(to_khz(es)) == doctest::Approx(43.0).epsilon(0.10));
  CHECK(std::abs(to_mhz(c)) == doctest::Approx(12.0).epsilon(0.10));
  // |mJ| = 1/2 and 3/2 shifts have equal size and opposite sign.
  CHECK(quadrupole_static_shift(j, HalfInt::half(1), 6e5, q1) == doctest::Approx(-es));
  CHECK(quadrupole_static_shift(j, HalfInt::half(-3), 6e5, q1) == doctest::Approx(es));
}

TEST_CASE("Quadrupole couplings follow rank-2 tensor algebra") {
  // Oracle: static: proportional to 3 m^2 - J (J + 1); RF dm = +2: to sqrt((J-m)(J-m-1)(J+m+1)(J+m+2)).
  const HalfInt j = HalfInt::half(5);
  const double jj = 2.5 * 3.5;
  const double ref_static = quadrupole_static_shift(j, j, 6e5, 1e-30);
  for (int tm : {-5, -3, -1, 1, 3, 5}) {
    const double m = 0.5 * tm;
    CHECK(quadrupole_static_shift(j, HalfInt::from_twice(tm), 6e5, 1e-30) / ref_static ==
          doctest::Approx((3 * m * m - jj) / (3 * 6.25 - jj)));
  }
  auto reduced = [](double J, double m) { return std::sqrt((J - m) * (J - m - 1) * (J + m + 1) * (J + m + 2)); };
  const double ref_rf = quadrupole_rf_coupling(j, HalfInt::half(-5), 3e8, 1e-30);
  for (int tm : {-3, -1, 1}) {
    CHECK(quadrupole_rf_coupling(j, HalfInt::from_twice(tm), 3e8, 1e-30) / ref_rf ==
          doctest::Approx(reduced(2.5, 0.5 * tm) / reduced(2.5, -2.5)));
  }
  CHECK(quadrupole_rf_coupling(j, HalfInt::half(3), 3e8, 1e-30) == 0.0);  // target outside the manifold
  CHECK(quadrupole_static_shift(kHalf, kHalf, 6e5, 1e-30) == 0.0);
  CHECK(quadrupole_rf_coupling(kHalf, -kHalf, 3e8, 1e-30) == 0.0);
}

TEST_CASE("Electron-trap Hamiltonian couples dmJ = +-2 at the RF frequency") {
  const TrapGeometry trap{3e8, 6e5, mhz(18.153)};
  const auto d = manifold_basis(24, 2, HalfInt::half(3), LevelRole::kRydberg);
  const double q = quadrupole_moment(24, HalfInt::integer(2), HalfInt::half(3));
  const auto op = electron_trap_hamiltonian(d, trap, [q](const ManifoldKey&) { return q; });
  REQUIRE(op.drive_parts.size() == 1);
  CHECK(op.drive_parts[0].frequency == trap.omega_rf);
  const Matrix& rf = op.drive_parts[0].matrix;
  CHECK(hermiticity_defect(rf) < 1e-14);
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b) {
      const int dm = std::abs(d[a].mJ.twice() - d[b].mJ.twice());
      if (dm != 4) CHECK(rf(a, b) == 0.0);
      if (a != b) CHECK(op.static_part(a, b) == 0.0);
    }
  // S states do not couple to the quadrupole field at all.
  const auto s = manifold_basis(25, 0, kHalf, LevelRole::kRydberg);
  const auto none = electron_trap_hamiltonian(s, trap, [](const ManifoldKey&) { return 1e-30; });
  CHECK(none.static_part.isZero(0.0));
  CHECK(none.drive_parts.empty());
  // A Rydberg D manifold without a quadrupole moment cannot be modelled.
  CHECK_THROWS_AS(electron_trap_hamiltonian(d, trap, [](const ManifoldKey&) { return std::nullopt; }), ConfigError);
}

TEST_CASE("Laser Hamiltonian: selection rules, Rabi normalization and rotating frame") {
  std::vector<ElectronicLevel> levels;
  for (int tm : {-3, -1, 1, 3}) levels.push_back(ElectronicLevel::make(4, 2, HalfInt::half(3), HalfInt::from_twice(tm), LevelRole::kInitial));
  for (int tm : {-1, 1}) levels.push_back(ElectronicLevel::make(6, 1, kHalf, HalfInt::from_twice(tm), LevelRole::kIntermediate));
  const LevelBasis basis(levels);
  LaserDrive drive{"243", {4, HalfInt::integer(2), HalfInt::half(3)}, {6, HalfInt::integer(1), kHalf}, mhz(1.0), mhz(160.0),
                   Polarization::sigma_plus(), +1, true};
  const auto op = laser_hamiltonian(basis, {drive});
  double largest = 0.0;
  for (std::size_t lo = 0; lo < 4; ++lo)
    for (std::size_t up = 4; up < 6; ++up) {
      const cd el = op.static_part(up, lo);
      const int dm = basis[up].mJ.twice() - basis[lo].mJ.twice();
      if (dm != 2) CHECK(el == 0.0);
      // Oracle: element = (Omega / 2) CG / CG_stretched.
      const double cg = dm == 2 ? clebsch_gordan(HalfInt::half(3), basis[lo].mJ, HalfInt::integer(1), HalfInt::integer(1), kHalf, basis[up].mJ) : 0.0;
      if (dm == 2) CHECK(el.real() == doctest::Approx(0.5 * mhz(1.0) * cg / std::sqrt(0.5)));
      largest = std::max(largest, std::abs(el));
    }
  CHECK(largest == doctest::Approx(0.5 * mhz(1.0)));
  CHECK(op.static_part(0, 0) == 0.0);
  CHECK(op.static_part(4, 4).real() == doctest::Approx(-mhz(160.0)));

  drive.polarization = Polarization::pi();
  CHECK_THROWS_AS(laser_hamiltonian(basis, {drive}), ConfigError);
  drive.axis_aligned = false;
  CHECK_NOTHROW(laser_hamiltonian(basis, {drive}));
  drive.upper = {6, HalfInt::integer(2), HalfInt::half(5)};  // D -> D is not a dipole transition
  CHECK_THROWS_AS(validate(drive), ConfigError);
}

TEST_CASE("Relative dipole weights are Clebsch-Gordan ratios") {
  const ManifoldKey p{6, HalfInt::integer(1), kHalf}, s{25, HalfInt{}, kHalf};
  // P1/2 -> S1/2: stretched |<1/2 -1/2; 1 1|1/2 1/2>| = sqrt(2/3), pi component sqrt(1/3).
  CHECK(std::abs(relative_dipole_weight(p, -kHalf, s, +1)) == doctest::Approx(1.0));
  CHECK(std::abs(relative_dipole_weight(p, kHalf, s, 0)) == doctest::Approx(std::sqrt(0.5)));
  CHECK(relative_dipole_weight(p, kHalf, s, +1) == 0.0);
}

TEST_CASE("Adiabatic elimination matches exact diagonalization of a three-level ladder") {
  const double delta = mhz(1000.0), oa = mhz(5.0), ob = mhz(30.0);
  const double light_shift = (oa * oa - ob * ob) / (4.0 * delta);
  for (double two_photon : {0.0, mhz(0.5), mhz(-2.0)}) {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = -delta;
    h(2, 2) = -two_photon - light_shift;  // near the light-shifted resonance
    h(0, 1) = h(1, 0) = oa / 2;
    h(1, 2) = h(2, 1) = ob / 2;
    const auto eff = adiabatic_eliminate(h, {1});
    REQUIRE(eff.kept == std::vector<std::size_t>{0, 2});
    CHECK(std::abs(eff.hamiltonian(0, 1)) == doctest::Approx(oa * ob / (4 * delta)).epsilon(5e-3));
    const auto exact = diagonalize(h).values;
    const auto approx = diagonalize(eff.hamiltonian).values;
    // The two upper exact eigenvalues belong to the kept pair; error is O(Omega^4 / Delta^3).
    CHECK(std::abs(exact(1) - approx(0)) < khz(5.0));
    CHECK(std::abs(exact(2) - approx(1)) < khz(5.0));
  }
  Matrix resonant = Matrix::Zero(3, 3);
  resonant(0, 1) = resonant(1, 0) = 1.0;
  CHECK_THROWS_AS(adiabatic_eliminate(resonant, {1}), NumericalError);
}

TEST_CASE("Floquet matrix layout") {
  Matrix h0 = Matrix::Zero(2, 2), v = Matrix::Zero(2, 2);
  h0(1, 1) = 3.0;
  v(0, 1) = v(1, 0) = 2.0;
  const auto f = floquet_hamiltonian(h0, v, 10.0, 2);
  CHECK(f.matrix.rows() == 10);
  const auto i = f.index_of(1, -2), j = f.index_of(0, -1);
  CHECK(f.matrix(i, i).real() == doctest::Approx(3.0 - 20.0));
  CHECK(f.matrix(i, j).real() == doctest::Approx(1.0));
  CHECK(f.matrix(f.index_of(0, 2), f.index_of(0, 2)).real() == doctest::Approx(20.0));
}

TEST_CASE("Floquet quasi-energies agree with the one-period propagator") {
  const double omega = mhz(18.0);
  Matrix h0 = Matrix::Zero(3, 3), v = Matrix::Zero(3, 3);
  h0(0, 0) = mhz(-2.0);
  h0(1, 1) = mhz(5.0);
  h0(2, 2) = mhz(1.0);
  h0(0, 2) = h0(2, 0) = mhz(0.7);
  v(0, 1) = v(1, 0) = mhz(8.0);
  v(1, 2) = v(2, 1) = mhz(3.0);
  const auto spectrum = floquet_main_lines(h0, v, omega, 8, {0, 1, 2}, 0.2);
  CHECK(spectrum.converged);
  REQUIRE(spectrum.lines.size() >= 3);

  const Matrix u = period_propagator(h0, v, omega, 4000);
  Eigen::ComplexEigenSolver<Matrix> es(u);
  std::vector<double> phases;
  const double period = kTwoPi / omega;
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(es.eigenvalues()(k)) == doctest::Approx(1.0).epsilon(1e-9));
    phases.push_back(-std::arg(es.eigenvalues()(k)) / period);
  }
  for (const auto& line : spectrum.lines) {
    double best = 1e300;
    for (double p : phases) best = std::min(best, std::abs(wrap(line.quasi_energy - p, omega)));
    CHECK(best < khz(1.0));
  }
}

TEST_CASE("Floquet truncation convergence is reported") {
  Matrix h0 = Matrix::Zero(2, 2), v = Matrix::Zero(2, 2);
  h0(1, 1) = mhz(4.0);
  v(0, 1) = v(1, 0) = mhz(40.0);
  CHECK_FALSE(floquet_main_lines(h0, v, mhz(10.0), 1, {0, 1}).converged);
  const auto good = floquet_main_lines(h0, v, mhz(10.0), 12, {0, 1});
  CHECK(good.converged);
  CHECK(good.convergence_shift < khz(10.0));
  // Without a drive the lines are the static eigenvalues.
  const auto bare = floquet_main_lines(h0, Matrix::Zero(2, 2), mhz(10.0), 2, {0, 1});
  REQUIRE(bare.lines.size() == 2);
  CHECK(bare.lines[0].quasi_energy == doctest::Approx(0.0));
  CHECK(bare.lines[1].quasi_energy == doctest::Approx(mhz(4.0)));
}
