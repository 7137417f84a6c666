#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rydion/hamiltonian.hpp"
#include "rydion/integrator.hpp"

namespace rydion {

/// Density matrices are plain complex matrices; check_density_matrix reports how far one is
/// from the Hermitian, unit-trace, positive-semidefinite set.
using DensityMatrix = Matrix;

struct DensityDefects {
  double trace_error = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;

  [[nodiscard]] bool ok(double trace_tol = 1e-9, double herm_tol = 1e-10, double eig_tol = 1e-9) const {
    return trace_error <= trace_tol && hermiticity <= herm_tol && min_eigenvalue >= -eig_tol;
  }
};

DensityDefects check_density_matrix(const DensityMatrix& rho);

/// Diagonal density matrix from populations; throws DomainError unless they sum to 1.
DensityMatrix density_from_populations(const RealVector& populations);

enum class ChannelLabel { kIntermediateDecay, kRydbergDecay, kRydbergDephasing, kInitialStateDecay };

std::string_view to_string(ChannelLabel label);

/// Collapse operator and rate: contributes rate (L rho L^dag - {L^dag L, rho}/2).
struct LindbladChannel {
  Matrix op;
  double rate = 0.0;  // 1/s
  ChannelLabel label = ChannelLabel::kRydbergDecay;
};

/// dRho/dt = -i[H(t), rho] + sum_k rate_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2),
/// with H(t) evaluated exactly (no RWA on the drive parts).
Matrix lindblad_rhs(const DensityMatrix& rho, const TimeDependentOperator& h, double t,
                    std::span<const LindbladChannel> channels);

/// Spontaneous decay from every level in `from` to every level in `to`, split by dipole
/// Clebsch-Gordan weights |<J_to m_to; 1 q | J_from m_from>|^2 (normalized per upper sublevel)
/// when `dipole_weights` is set, uniformly otherwise. `branching` scales the total rate.
std::vector<LindbladChannel> decay_channels(const LevelBasis& basis, const std::vector<std::size_t>& from,
                                            const std::vector<std::size_t>& to, double rate, double branching,
                                            ChannelLabel label, bool dipole_weights);

/// Dephasing of the Rydberg manifold: collapse operator = projector onto `rydberg`, Lindblad rate
/// delta_omega. Coherences between a Rydberg and a non-Rydberg level then decay at delta_omega / 2,
/// so a pure-dephasing line has a Lorentzian FWHM of delta_omega.
LindbladChannel rydberg_dephasing_channel(const LevelBasis& basis, const std::vector<std::size_t>& rydberg,
                                          double delta_omega);

struct MasterEquationProblem {
  TimeDependentOperator hamiltonian;
  std::vector<LindbladChannel> channels;
  DensityMatrix initial;
  double duration = 0.0;  // s
};

struct EvolveOptions {
  StepControl control{};
  /// Use a one-period (or one-slice) superoperator raised to a power when cheaper than
  /// integrating the full pulse.
  bool allow_stroboscopic = true;
  /// Static generators are sliced so each slice spans at most this phase (rad) of the fastest frequency.
  double max_slice_phase = 60.0;
};

struct EvolveResult {
  DensityMatrix rho;
  double trace_drift = 0.0;
  std::size_t steps = 0;
  bool stroboscopic = false;
};

/// Integrates the master equation over problem.duration. Trace drift is reported and, when
/// above 1e-9, logged; it is never renormalized away.
EvolveResult evolve(const MasterEquationProblem& problem, const EvolveOptions& options = {});

enum class DetectionScheme { kShelving4D32, kDirect4D52 };

struct DetectionModel {
  DetectionScheme scheme = DetectionScheme::kShelving4D32;
  double rydberg_branching_to_ground = 0.95;
};

/// Probability of recording "Rydberg excited". Population in the ground accumulator counts fully;
/// population still in, or already decayed out of (shelf accumulator), the Rydberg manifold
/// counts with the Rydberg-to-ground branching ratio. The shelving scheme requires both a ground
/// and a shelf level, the direct scheme a ground level.
double detection_probability(const DensityMatrix& rho, const LevelBasis& basis, const DetectionModel& model);

struct ProjectionSample {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Binomial draw of `trials` projective measurements with a seeded generator.
ProjectionSample sample_projection_noise(double probability, int trials, std::uint64_t seed);

}  // namespace rydion
