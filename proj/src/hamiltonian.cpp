#include "rydion/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <set>

#include "rydion/error.hpp"

namespace rydion {

namespace {

constexpr double kHermitianTolerance = 1e-12;
const HalfInt kOne = HalfInt::integer(1);
const HalfInt kTwo = HalfInt::integer(2);

bool basis_order(const ElectronicLevel& a, const ElectronicLevel& b) {
  return std::tie(a.role, a.n, a.L, a.J, a.mJ) < std::tie(b.role, b.n, b.L, b.J, b.mJ);
}

}  // namespace

std::string ManifoldKey::label() const {
  ElectronicLevel level{n, L, HalfInt::half(1), J, J, LevelRole::kInitial};
  return level.manifold_label();
}

// --- LevelBasis -------------------------------------------------------------

LevelBasis::LevelBasis(std::vector<ElectronicLevel> levels) : levels_(std::move(levels)) {
  for (const auto& level : levels_) validate(level);
  std::sort(levels_.begin(), levels_.end(), basis_order);
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    const auto& a = levels_[i - 1];
    const auto& b = levels_[i];
    if (a.same_manifold(b) && a.mJ == b.mJ && a.role == b.role)
      throw ConfigError("basis: duplicate level " + b.label());
  }
  // The same sublevel may not appear under two roles either.
  std::set<std::tuple<int, HalfInt, HalfInt, HalfInt>> seen;
  for (const auto& l : levels_)
    if (!seen.emplace(l.n, l.L, l.J, l.mJ).second) throw ConfigError("basis: duplicate level " + l.label());
}

std::optional<std::size_t> LevelBasis::index_of(int n, HalfInt L, HalfInt J, HalfInt mJ) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& l = levels_[i];
    if (l.n == n && l.L == L && l.J == J && l.mJ == mJ) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> LevelBasis::indices_with_role(LevelRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].role == role) out.push_back(i);
  return out;
}

std::vector<std::size_t> LevelBasis::manifold_indices(const ManifoldKey& key) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (key.contains(levels_[i])) out.push_back(i);
  return out;
}

std::vector<ManifoldKey> LevelBasis::manifolds() const {
  std::vector<ManifoldKey> out;
  for (const auto& l : levels_) {
    const auto key = ManifoldKey::of(l);
    if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
  }
  return out;
}

// --- TimeDependentOperator --------------------------------------------------

TimeDependentOperator TimeDependentOperator::zero(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return {Matrix::Zero(n, n), {}};
}

Matrix TimeDependentOperator::at(double t) const {
  Matrix h = static_part;
  for (const auto& part : drive_parts) h += part.matrix * std::cos(part.frequency * t);
  return h;
}

bool TimeDependentOperator::is_static() const {
  return std::all_of(drive_parts.begin(), drive_parts.end(),
                     [](const DrivePart& p) { return p.matrix.isZero(0.0) || p.frequency == 0.0; });
}

double TimeDependentOperator::fastest_frequency() const {
  double fastest = 0.0;
  if (static_part.size() > 0) {
    // Row-sum norm bounds the spectral radius.
    fastest = static_part.cwiseAbs().rowwise().sum().maxCoeff();
  }
  for (const auto& part : drive_parts) {
    if (part.matrix.isZero(0.0)) continue;
    fastest = std::max(fastest, std::abs(part.frequency));
    fastest = std::max(fastest, part.matrix.cwiseAbs().rowwise().sum().maxCoeff());
  }
  return fastest;
}

TimeDependentOperator& TimeDependentOperator::operator+=(const TimeDependentOperator& other) {
  if (other.static_part.rows() != static_part.rows())
    throw std::logic_error("TimeDependentOperator: dimension mismatch");
  static_part += other.static_part;
  for (const auto& part : other.drive_parts) {
    auto it = std::find_if(drive_parts.begin(), drive_parts.end(),
                           [&](const DrivePart& p) { return p.frequency == part.frequency; });
    if (it != drive_parts.end())
      it->matrix += part.matrix;
    else
      drive_parts.push_back(part);
  }
  return *this;
}

TimeDependentOperator operator+(TimeDependentOperator a, const TimeDependentOperator& b) {
  a += b;
  return a;
}

// --- Polarization / drives --------------------------------------------------

Polarization Polarization::sigma_plus() { return {{0.0, 0.0, 1.0}}; }
Polarization Polarization::sigma_minus() { return {{1.0, 0.0, 0.0}}; }
Polarization Polarization::sigma_both() { return {{M_SQRT1_2, 0.0, M_SQRT1_2}}; }
Polarization Polarization::pi() { return {{0.0, 1.0, 0.0}}; }

double Polarization::norm() const {
  double s = 0.0;
  for (const auto& w : weights) s += std::norm(w);
  return std::sqrt(s);
}

void validate(const LaserDrive& drive) {
  const std::string who = "laser '" + drive.name + "': ";
  if (std::abs(drive.polarization.norm() - 1.0) > 1e-9) throw ConfigError(who + "polarization weights not normalized");
  if (drive.axis_aligned && std::abs(drive.polarization.weight(0)) > 0.0)
    throw ConfigError(who + "pi polarization cannot be driven by a beam along the quantization axis");
  if (drive.propagation_sign != 1 && drive.propagation_sign != -1)
    throw ConfigError(who + "propagation sign must be +1 or -1");
  if (drive.reference_rabi < 0) throw ConfigError(who + "Rabi frequency must be non-negative");
  const int dl = std::abs(drive.upper.L.twice() - drive.lower.L.twice());
  const int dj = std::abs(drive.upper.J.twice() - drive.lower.J.twice());
  if (dl != 2 || dj > 2) throw ConfigError(who + "not an electric-dipole transition (|dL| = 1, |dJ| <= 1)");
}

double relative_dipole_weight(const ManifoldKey& lower, HalfInt m_lower, const ManifoldKey& upper, int q) {
  const HalfInt hq = HalfInt::integer(q);
  const HalfInt m_upper = m_lower + hq;
  if (!valid_projection(upper.J, m_upper) || !valid_projection(lower.J, m_lower)) return 0.0;
  double stretched = 0.0;
  for (int tm = -lower.J.twice(); tm <= lower.J.twice(); tm += 2) {
    const HalfInt m = HalfInt::from_twice(tm);
    for (int qq = -1; qq <= 1; ++qq) {
      const HalfInt mu = m + HalfInt::integer(qq);
      if (!valid_projection(upper.J, mu)) continue;
      stretched = std::max(stretched, std::abs(clebsch_gordan(lower.J, m, kOne, HalfInt::integer(qq), upper.J, mu)));
    }
  }
  if (stretched == 0.0) return 0.0;
  return clebsch_gordan(lower.J, m_lower, kOne, hq, upper.J, m_upper) / stretched;
}

// --- Builders ---------------------------------------------------------------

double quadrupole_static_shift(HalfInt J, HalfInt mJ, double beta, double quadrupole, const PhysicalConstants& c) {
  if (J.twice() <= 1) return 0.0;
  const double ratio = clebsch_gordan(J, mJ, kTwo, HalfInt{}, J, mJ) / clebsch_gordan(J, J, kTwo, HalfInt{}, J, J);
  return -0.4 * beta * quadrupole * ratio / c.hbar;
}

double quadrupole_rf_coupling(HalfInt J, HalfInt mJ, double alpha, double quadrupole, const PhysicalConstants& c) {
  if (J.twice() <= 1) return 0.0;
  const HalfInt target = mJ + kTwo;
  if (!valid_projection(J, mJ) || !valid_projection(J, target)) return 0.0;
  // Wigner-Eckart ratio to the static term, calibrated so J = 3/2 gives C = 2 Q alpha / (5 sqrt 3 hbar).
  const double ratio = clebsch_gordan(J, mJ, kTwo, kTwo, J, target) / clebsch_gordan(J, J, kTwo, HalfInt{}, J, J);
  return 2.0 * quadrupole * alpha / (5.0 * std::sqrt(3.0) * c.hbar) * ratio / M_SQRT2;
}

TimeDependentOperator electron_trap_hamiltonian(const LevelBasis& basis, const TrapGeometry& trap,
                                                const QuadrupoleProvider& quadrupole, const PhysicalConstants& c) {
  auto op = TimeDependentOperator::zero(basis.size());
  Matrix rf = Matrix::Zero(op.static_part.rows(), op.static_part.cols());
  for (const auto& key : basis.manifolds()) {
    if (key.J.twice() <= 1) continue;  // no quadrupole coupling for J = 1/2
    const auto members = basis.manifold_indices(key);
    const bool rydberg = std::any_of(members.begin(), members.end(),
                                     [&](std::size_t i) { return basis[i].role == LevelRole::kRydberg; });
    const auto q = quadrupole ? quadrupole(key) : std::nullopt;
    if (!q) {
      if (rydberg) throw ConfigError("electron-trap coupling: no quadrupole moment for " + key.label());
      continue;
    }
    for (std::size_t i : members) {
      const auto& level = basis[i];
      op.static_part(i, i) += quadrupole_static_shift(level.J, level.mJ, trap.beta, *q, c);
      if (auto j = basis.index_of(key.n, key.L, key.J, level.mJ + kTwo)) {
        const double coupling = quadrupole_rf_coupling(level.J, level.mJ, trap.alpha, *q, c);
        rf(*j, i) += coupling;
        rf(i, *j) += coupling;
      }
    }
  }
  if (!rf.isZero(0.0)) op.drive_parts.push_back({rf, trap.omega_rf});
  return op;
}

TimeDependentOperator zeeman_hamiltonian(const LevelBasis& basis, double field_tesla, const PhysicalConstants& c) {
  auto op = TimeDependentOperator::zero(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].J.twice() == 0) continue;
    op.static_part(i, i) = zeeman_shift(basis[i], field_tesla, c);
  }
  return op;
}

TimeDependentOperator laser_hamiltonian(const LevelBasis& basis, const std::vector<LaserDrive>& drives) {
  auto op = TimeDependentOperator::zero(basis.size());

  // Frame offsets: roots (lower manifolds never reached by a drive) sit at zero.
  std::map<ManifoldKey, double> offset;
  std::set<ManifoldKey> uppers;
  for (const auto& d : drives) {
    validate(d);
    uppers.insert(d.upper);
  }
  for (const auto& d : drives)
    if (!uppers.count(d.lower)) offset.emplace(d.lower, 0.0);
  for (std::size_t pass = 0; pass <= drives.size(); ++pass) {
    for (const auto& d : drives) {
      auto lo = offset.find(d.lower);
      if (lo == offset.end()) continue;
      const double value = lo->second - d.detuning;
      auto [it, inserted] = offset.emplace(d.upper, value);
      if (!inserted && std::abs(it->second - value) > 1e-6 * std::max(1.0, std::abs(value)))
        throw ConfigError("laser '" + d.name + "': inconsistent rotating frame (closed laser loop)");
    }
  }
  for (const auto& d : drives)
    if (!offset.count(d.upper)) throw ConfigError("laser '" + d.name + "': manifold not reachable from a root");

  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (auto it = offset.find(ManifoldKey::of(basis[i])); it != offset.end()) op.static_part(i, i) += it->second;
  }

  for (const auto& d : drives) {
    bool connected = false;
    for (std::size_t lo : basis.manifold_indices(d.lower)) {
      for (int q = -1; q <= 1; ++q) {
        const auto w = d.polarization.weight(q);
        if (w == 0.0) continue;
        const HalfInt mu = basis[lo].mJ + HalfInt::integer(q);
        const auto up = basis.index_of(d.upper.n, d.upper.L, d.upper.J, mu);
        if (!up) continue;
        const double cg = relative_dipole_weight(d.lower, basis[lo].mJ, d.upper, q);
        if (cg == 0.0) continue;
        const std::complex<double> element = 0.5 * d.reference_rabi * w * cg;
        op.static_part(*up, lo) += element;
        op.static_part(lo, *up) += std::conj(element);
        connected = true;
      }
    }
    if (!connected) std::cerr << "warning: laser '" << d.name << "' couples no pair of sublevels in the basis\n";
  }
  return op;
}

TimeDependentOperator assemble(const LevelBasis& basis, const AssemblyInputs& inputs, const PhysicalConstants& c) {
  auto h = zeeman_hamiltonian(basis, inputs.field_tesla, c);
  h += electron_trap_hamiltonian(basis, inputs.trap, inputs.quadrupole, c);
  h += laser_hamiltonian(basis, inputs.drives);
  if (hermiticity_defect(h.static_part) > kHermitianTolerance)
    throw NumericalError("assemble: static part lost Hermiticity");
  for (const auto& p : h.drive_parts)
    if (hermiticity_defect(p.matrix) > kHermitianTolerance)
      throw NumericalError("assemble: drive part lost Hermiticity");
  return h;
}

// --- Adiabatic elimination --------------------------------------------------

EffectiveHamiltonian adiabatic_eliminate(const Matrix& h, const std::vector<std::size_t>& intermediate,
                                         const std::optional<RealVector>& reference_energies) {
  const auto n = static_cast<std::size_t>(h.rows());
  std::vector<bool> is_eliminated(n, false);
  for (auto e : intermediate) {
    if (e >= n) throw std::out_of_range("adiabatic_eliminate: index out of range");
    is_eliminated[e] = true;
  }
  EffectiveHamiltonian out;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_eliminated[i]) out.kept.push_back(i);

  auto energy = [&](std::size_t i) { return reference_energies ? (*reference_energies)(i) : h(i, i).real(); };

  const auto m = static_cast<Eigen::Index>(out.kept.size());
  out.hamiltonian.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) out.hamiltonian(a, b) = h(out.kept[a], out.kept[b]);

  for (auto e : intermediate) {
    const double he = h(e, e).real();
    double max_coupling = 0.0;
    for (auto i : out.kept) max_coupling = std::max(max_coupling, 2.0 * std::abs(h(i, e)));
    if (max_coupling == 0.0) continue;
    double closest = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < m; ++a) {
      if (h(out.kept[a], e) == 0.0) continue;
      const double denom_a = energy(out.kept[a]) - he;
      if (denom_a == 0.0)
        throw NumericalError("adiabatic_eliminate: zero detuning from intermediate level " + std::to_string(e));
      closest = std::min(closest, std::abs(denom_a));
    }
    if (closest < 3.0 * max_coupling)
      std::cerr << "warning: adiabatic_eliminate: detuning " << closest << " rad/s of intermediate level " << e
                << " is not large against coupling " << max_coupling << " rad/s\n";
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto hae = h(out.kept[a], e);
      if (hae == 0.0) continue;
      for (Eigen::Index b = 0; b < m; ++b) {
        const auto heb = h(e, out.kept[b]);
        if (heb == 0.0) continue;
        const double inv = 0.5 * (1.0 / (energy(out.kept[a]) - he) + 1.0 / (energy(out.kept[b]) - he));
        out.hamiltonian(a, b) += hae * heb * inv;
      }
    }
  }
  return out;
}

}  // namespace rydion
