#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rydion/dynamics.hpp"
#include "rydion/floquet.hpp"
#include "rydion/scan.hpp"
#include "rydion/scenario.hpp"

namespace rydion {

/// A scenario turned into operators: basis, Hamiltonian inputs, dissipation and initial state.
/// Spectra are taken against the two-photon detuning, the sum of all laser detunings along the
/// path to the Rydberg manifold; the scanned laser absorbs the change.
struct Experiment {
  Scenario scenario;
  LevelBasis basis;
  AssemblyInputs inputs;
  RealVector g_correction;  // extra diagonal Zeeman term from g-factor overrides, rad/s
  std::vector<LindbladChannel> channels;
  DensityMatrix initial;
  std::optional<std::size_t> scan_laser;  // index into inputs.drives
  double scan_offset = 0.0;               // sum of the other detunings on the scanned path
};

Experiment build_experiment(const Scenario& scenario);

/// Quadrupole provider from the levels' core charges.
QuadrupoleProvider quadrupole_provider(const Scenario& scenario);

/// Rotating-frame Hamiltonian with the scanned laser set so the two-photon detuning equals `detuning`.
TimeDependentOperator hamiltonian_at(const Experiment& experiment, double detuning);

/// Noiseless detection probability after the pulse at one two-photon detuning.
double excitation_probability(const Experiment& experiment, double detuning);

/// Full scan with projection noise as configured in the scenario's scan section.
Spectrum simulate_spectrum(const Experiment& experiment, int threads = 1,
                           std::optional<std::uint64_t> seed_override = std::nullopt);

struct FloquetComponent {
  std::size_t level = 0;  // basis index
  int k = 0;
  std::complex<double> amplitude;
};

struct FloquetResonance {
  double detuning = 0.0;  // two-photon detuning at which the line is resonant, rad/s
  double quasi_energy = 0.0;
  double bright_weight = 0.0;
  std::size_t bright_level = 0;    // dominant laser-coupled Rydberg level (basis index)
  std::size_t initial_partner = 0; // initial level it is excited from (basis index)
  std::vector<FloquetComponent> components;  // |amplitude| >= 0.05, by decreasing magnitude
};

struct FloquetAnalysis {
  std::vector<FloquetResonance> lines;  // ascending detuning
  double convergence_shift = 0.0;
  bool converged = false;
  int k_max = 0;
};

/// Floquet resonances of the Rydberg manifold: eliminate the intermediate level at two-photon
/// resonance (reference energies of Rydberg levels taken from their initial partners), restrict to
/// the Rydberg levels and diagonalize the truncated Floquet matrix. A line's detuning is its
/// quasi-energy minus the energy of the initial level feeding it, so zero is the bare two-photon
/// resonance.
FloquetAnalysis analyze_floquet(const Experiment& experiment, std::optional<int> k_max = std::nullopt);

}  // namespace rydion
