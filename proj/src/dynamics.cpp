#include "rydion/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include <Eigen/SparseCore>

#include "rydion/error.hpp"

namespace rydion {

namespace {

using RealMatrix = Eigen::MatrixXd;

struct Triplet {
  Eigen::Index row;
  Eigen::Index col;
  std::complex<double> value;
};

struct SparseJump {
  std::vector<Triplet> entries;
  double rate;
};

struct JumpTerm {
  Eigen::Index target;
  Eigen::Index source;
  std::complex<double> coefficient;
};

/// Lindbladian prepared for repeated evaluation: effective non-Hermitian Hamiltonian
/// H - (i/2) sum rate L^dag L plus sparse jump terms.
class Generator {
 public:
  Generator(const TimeDependentOperator& h, std::span<const LindbladChannel> channels) : h_(h) {
    const auto n = static_cast<Eigen::Index>(h.dim());
    Matrix damping = Matrix::Zero(n, n);
    for (const auto& ch : channels) {
      if (ch.rate < 0) throw DomainError("lindblad: channel rate must be non-negative");
      if (ch.op.rows() != n || ch.op.cols() != n) throw DomainError("lindblad: channel dimension mismatch");
      if (ch.rate == 0.0) continue;
      SparseJump jump{{}, ch.rate};
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
          if (ch.op(r, c) != 0.0) jump.entries.push_back({r, c, ch.op(r, c)});
      jumps_.push_back(std::move(jump));
      damping += ch.rate * ch.op.adjoint() * ch.op;
    }
    static_nh_ = h.static_part - std::complex<double>(0.0, 0.5) * damping;
    for (const auto& jump : jumps_)
      for (const auto& p : jump.entries)
        for (const auto& q : jump.entries)
          jump_terms_.push_back(
              {p.row + q.row * n, p.col + q.col * n, jump.rate * p.value * std::conj(q.value)});
  }

  [[nodiscard]] Eigen::Index dim() const { return static_nh_.rows(); }

  Matrix effective_at(double t) const {
    Matrix m = static_nh_;
    for (const auto& part : h_.drive_parts) m += part.matrix * std::cos(part.frequency * t);
    return m;
  }

  /// Applies the generator to each n x n block of a horizontally stacked state.
  void apply(double t, const Matrix& y, Matrix& dy) const {
    const Eigen::Index n = dim();
    const Eigen::Index blocks = y.cols() / n;
    const Matrix heff = effective_at(t);
    const Matrix heff_adj = heff.adjoint();
    const std::complex<double> minus_i(0.0, -1.0);
    dy.noalias() = minus_i * (heff * y);
    for (Eigen::Index b = 0; b < blocks; ++b) {
      auto rho = y.middleCols(b * n, n);
      auto out = dy.middleCols(b * n, n);
      out.noalias() -= minus_i * (rho * heff_adj);
      for (const auto& jump : jumps_) {
        for (const auto& p : jump.entries)
          for (const auto& q : jump.entries)
            out(p.row, q.row) += jump.rate * p.value * rho(p.col, q.col) * std::conj(q.value);
      }
    }
  }

  /// Same as apply for blocks known to be Hermitian: then rho H^dag = (H rho)^dag, so one
  /// product over all blocks is enough.
  void apply_hermitian(double t, const Matrix& y, Matrix& dy) const {
    const Eigen::Index n = dim();
    const Eigen::Index blocks = y.cols() / n;
    // Selection rules leave the level Hamiltonian sparse, which keeps this product cheap.
    const Eigen::SparseMatrix<std::complex<double>> heff = effective_at(t).sparseView();
    dy.noalias() = heff * y;
    for (Eigen::Index b = 0; b < blocks; ++b) {
      const std::complex<double>* rho = y.data() + b * n * n;
      std::complex<double>* out = dy.data() + b * n * n;
      // out <- -i (A - A^dag), touching each pair once.
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
          const std::complex<double> d = out[i + j * n] - std::conj(out[j + i * n]);
          out[i + j * n] = {d.imag(), -d.real()};
          out[j + i * n] = {d.imag(), d.real()};
        }
        out[j + j * n] = {2.0 * out[j + j * n].imag(), 0.0};
      }
      for (const auto& term : jump_terms_) {
        const std::complex<double> r = rho[term.source];
        const std::complex<double> c = term.coefficient;
        out[term.target] += std::complex<double>(c.real() * r.real() - c.imag() * r.imag(),
                                                 c.real() * r.imag() + c.imag() * r.real());
      }
    }
  }

  std::string describe_fastest() const {
    double max_rate = 0.0;
    for (const auto& j : jumps_) max_rate = std::max(max_rate, j.rate);
    Eigen::Index level = 0;
    const double diag = static_nh_.diagonal().cwiseAbs().maxCoeff(&level);
    double drive = 0.0;
    for (const auto& p : h_.drive_parts) drive = std::max(drive, std::abs(p.frequency));
    return "largest diagonal term " + std::to_string(diag) + " rad/s at level " + std::to_string(level) +
           ", largest drive frequency " + std::to_string(drive) + " rad/s, largest channel rate " +
           std::to_string(max_rate) + " 1/s";
  }

 private:
  const TimeDependentOperator& h_;
  Matrix static_nh_;
  std::vector<SparseJump> jumps_;
  std::vector<JumpTerm> jump_terms_;  // column-major offsets within one block
};

double fastest_scale(const TimeDependentOperator& h, std::span<const LindbladChannel> channels) {
  double f = h.fastest_frequency();
  for (const auto& ch : channels) f = std::max(f, ch.rate * ch.op.cwiseAbs2().colwise().sum().maxCoeff());
  return f;
}

StepControl resolved_control(const StepControl& base, const TimeDependentOperator& h, const Generator& g) {
  StepControl control = base;
  // At least 20 samples per period of the fastest oscillation.
  const double fastest = h.fastest_frequency();
  if (fastest > 0) control.max_step = std::min(control.max_step, kTwoPi / fastest / 20.0);
  if (!control.stiffness_hint) control.stiffness_hint = [&g] { return g.describe_fastest(); };
  return control;
}

// Real coordinates of a Hermitian matrix: diagonal entries, then Re and Im of each upper entry.
RealVector hermitian_coordinates(const Eigen::Ref<const Matrix>& m) {
  const Eigen::Index n = m.rows();
  RealVector x(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) x(k++) = m(i, i).real();
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      x(k++) = m(i, j).real();
      x(k++) = m(i, j).imag();
    }
  return x;
}

Matrix from_hermitian_coordinates(const RealVector& x, Eigen::Index n) {
  Matrix m = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = x(k++);
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      m(i, j) = std::complex<double>(x(k), x(k + 1));
      m(j, i) = std::conj(m(i, j));
      k += 2;
    }
  return m;
}

/// Real n^2 x n^2 map acting on hermitian_coordinates, built by evolving the Hermitian basis
/// E_ii, E_ij + E_ji and i(E_ij - E_ji) side by side.
RealMatrix propagate_superoperator(const Generator& g, double span, const StepControl& control, std::size_t& steps) {
  const Eigen::Index n = g.dim();
  const Eigen::Index n2 = n * n;
  Matrix y = Matrix::Zero(n, n * n2);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < n; ++i, ++c) y(i, c * n + i) = 1.0;
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      y(i, c * n + j) = 1.0;
      y(j, c * n + i) = 1.0;
      ++c;
      y(i, c * n + j) = std::complex<double>(0.0, 1.0);
      y(j, c * n + i) = std::complex<double>(0.0, -1.0);
      ++c;
    }
  const auto report = integrate([&g](double t, const Matrix& s, Matrix& ds) { g.apply_hermitian(t, s, ds); }, y,
                                0.0, span, control);
  steps += report.accepted;
  RealMatrix map(n2, n2);
  for (Eigen::Index b = 0; b < n2; ++b) map.col(b) = hermitian_coordinates(y.middleCols(b * n, n));
  return map;
}

RealVector power_apply(RealMatrix m, std::uint64_t power, RealVector v) {
  while (power > 0) {
    if (power & 1U) v = m * v;
    power >>= 1U;
    if (power > 0) m = m * m;
  }
  return v;
}

}  // namespace

DensityDefects check_density_matrix(const DensityMatrix& rho) {
  DensityDefects d;
  d.trace_error = std::abs(rho.trace() - 1.0);
  d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const Matrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

DensityMatrix density_from_populations(const RealVector& populations) {
  if ((populations.array() < 0).any()) throw DomainError("initial populations must be non-negative");
  if (std::abs(populations.sum() - 1.0) > 1e-12) throw DomainError("initial populations must sum to 1");
  return populations.cast<std::complex<double>>().asDiagonal();
}

std::string_view to_string(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::kIntermediateDecay: return "intermediate_decay";
    case ChannelLabel::kRydbergDecay: return "rydberg_decay";
    case ChannelLabel::kRydbergDephasing: return "rydberg_dephasing";
    case ChannelLabel::kInitialStateDecay: return "initial_state_decay";
  }
  return "unknown";
}

Matrix lindblad_rhs(const DensityMatrix& rho, const TimeDependentOperator& h, double t,
                    std::span<const LindbladChannel> channels) {
  if (rho.rows() != static_cast<Eigen::Index>(h.dim()) || rho.cols() != rho.rows())
    throw DomainError("lindblad_rhs: dimension mismatch");
  Generator g(h, channels);
  Matrix out(rho.rows(), rho.cols());
  g.apply(t, rho, out);
  return out;
}

std::vector<LindbladChannel> decay_channels(const LevelBasis& basis, const std::vector<std::size_t>& from,
                                            const std::vector<std::size_t>& to, double rate, double branching,
                                            ChannelLabel label, bool dipole_weights) {
  std::vector<LindbladChannel> out;
  if (rate <= 0 || branching <= 0 || to.empty()) return out;
  const auto n = static_cast<Eigen::Index>(basis.size());
  for (auto u : from) {
    std::vector<double> weights(to.size(), 0.0);
    double total = 0.0;
    if (dipole_weights) {
      for (std::size_t k = 0; k < to.size(); ++k) {
        const auto& lo = basis[to[k]];
        const auto& up = basis[u];
        const HalfInt q = up.mJ - lo.mJ;
        if (abs(q) > HalfInt::integer(1) || !triangle(lo.J, HalfInt::integer(1), up.J)) continue;
        const double cg = clebsch_gordan(lo.J, lo.mJ, HalfInt::integer(1), q, up.J, up.mJ);
        weights[k] = cg * cg;
        total += weights[k];
      }
    }
    if (total == 0.0) {
      std::fill(weights.begin(), weights.end(), 1.0);
      total = static_cast<double>(to.size());
    }
    for (std::size_t k = 0; k < to.size(); ++k) {
      if (weights[k] == 0.0) continue;
      Matrix op = Matrix::Zero(n, n);
      op(static_cast<Eigen::Index>(to[k]), static_cast<Eigen::Index>(u)) = 1.0;
      out.push_back({std::move(op), rate * branching * weights[k] / total, label});
    }
  }
  return out;
}

LindbladChannel rydberg_dephasing_channel(const LevelBasis& basis, const std::vector<std::size_t>& rydberg,
                                          double delta_omega) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix projector = Matrix::Zero(n, n);
  for (auto i : rydberg) projector(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return {projector, delta_omega, ChannelLabel::kRydbergDephasing};
}

EvolveResult evolve(const MasterEquationProblem& problem, const EvolveOptions& options) {
  const auto n = static_cast<Eigen::Index>(problem.hamiltonian.dim());
  if (problem.initial.rows() != n || problem.initial.cols() != n) throw DomainError("evolve: initial state dimension mismatch");
  if (problem.duration < 0) throw DomainError("evolve: negative duration");

  EvolveResult result;
  result.rho = problem.initial;
  if (problem.duration == 0.0) return result;

  const Generator g(problem.hamiltonian, problem.channels);
  const StepControl control = resolved_control(options.control, problem.hamiltonian, g);
  const auto rhs = [&g](double t, const Matrix& s, Matrix& ds) { g.apply(t, s, ds); };

  // Stroboscopic slice: the common drive period, or a power-of-two fraction of the pulse.
  double slice = 0.0;
  std::uint64_t repeats = 0;
  const double fastest = fastest_scale(problem.hamiltonian, problem.channels);
  std::vector<double> freqs;
  for (const auto& p : problem.hamiltonian.drive_parts)
    if (!p.matrix.isZero(0.0) && p.frequency != 0.0) freqs.push_back(std::abs(p.frequency));
  const bool single_frequency =
      !freqs.empty() && std::all_of(freqs.begin(), freqs.end(), [&](double f) { return f == freqs.front(); });
  if (single_frequency) {
    slice = kTwoPi / freqs.front();
    repeats = static_cast<std::uint64_t>(std::floor(problem.duration / slice));
  } else if (freqs.empty() && fastest > 0) {
    repeats = 1;
    slice = problem.duration;
    while (slice * fastest > options.max_slice_phase && repeats < (std::uint64_t{1} << 40)) {
      slice *= 0.5;
      repeats *= 2;
    }
  }
  // The real superoperator only represents Hermitian states.
  const bool hermitian = (problem.initial - problem.initial.adjoint()).cwiseAbs().maxCoeff() <= 1e-12;
  const bool worthwhile = hermitian && repeats > static_cast<std::uint64_t>(n * n);

  if (options.allow_stroboscopic && worthwhile) {
    StepControl strobe = control;
    const RealMatrix period = propagate_superoperator(g, slice, strobe, result.steps);
    result.rho = from_hermitian_coordinates(power_apply(period, repeats, hermitian_coordinates(problem.initial)), n);
    const double remainder = problem.duration - static_cast<double>(repeats) * slice;
    if (remainder > 1e-12 * problem.duration) {
      // Drives are periodic in `slice`, so the remainder starts at phase zero.
      result.steps += integrate(rhs, result.rho, 0.0, remainder, control).accepted;
    }
    result.stroboscopic = true;
  } else {
    result.steps = integrate(rhs, result.rho, 0.0, problem.duration, control).accepted;
  }

  result.trace_drift = std::abs(result.rho.trace() - problem.initial.trace());
  if (result.trace_drift > 1e-9)
    std::cerr << "warning: evolve: trace drift " << result.trace_drift << " over " << problem.duration << " s\n";
  return result;
}

double detection_probability(const DensityMatrix& rho, const LevelBasis& basis, const DetectionModel& model) {
  if (model.rydberg_branching_to_ground < 0 || model.rydberg_branching_to_ground > 1)
    throw DomainError("detection: branching must lie in [0, 1]");
  const auto ground = basis.indices_with_role(LevelRole::kGround);
  const auto shelf = basis.indices_with_role(LevelRole::kShelf);
  const auto rydberg = basis.indices_with_role(LevelRole::kRydberg);
  if (ground.empty()) throw ConfigError("detection: basis has no ground accumulator level");
  if (model.scheme == DetectionScheme::kShelving4D32 && shelf.empty())
    throw ConfigError("detection: shelving scheme needs a shelf accumulator level");

  auto population = [&](const std::vector<std::size_t>& idx) {
    double p = 0.0;
    for (auto i : idx) p += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    return p;
  };
  const double p = population(ground) + model.rydberg_branching_to_ground * (population(shelf) + population(rydberg));
  return std::clamp(p, 0.0, 1.0);
}

ProjectionSample sample_projection_noise(double probability, int trials, std::uint64_t seed) {
  if (probability < 0 || probability > 1) throw DomainError("projection noise: probability outside [0, 1]");
  if (trials < 1) throw DomainError("projection noise: trials must be at least 1");
  std::mt19937_64 rng(seed);
  std::binomial_distribution<int> draw(trials, probability);
  const double estimate = static_cast<double>(draw(rng)) / trials;
  return {estimate, std::sqrt(estimate * (1.0 - estimate) / trials)};
}

}  // namespace rydion
