#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydion/dynamics.hpp"
#include "rydion/hamiltonian.hpp"
#include "rydion/lineshape.hpp"
#include "rydion/trap.hpp"

namespace rydion {

/// One fine-structure manifold of the model and the data attached to it.
struct LevelSpec {
  ManifoldKey manifold;
  LevelRole role = LevelRole::kInitial;
  std::vector<HalfInt> sublevels;        // empty: every mJ of the manifold
  std::optional<double> core_charge;     // enables the hydrogenic quadrupole moment
  std::optional<double> g_factor;        // overrides the Landé value
  std::optional<double> polarizability;  // atomic units
  int line = 0;
};

struct LaserSpec {
  LaserDrive drive;
  std::optional<double> wavelength;  // m
  int line = 0;
};

struct TrapSpec {
  TrapGeometry geometry;
  std::optional<SecularFrequencies> secular;  // set when the file gave secular frequencies
  double radial_asymmetry = 0.0;
  int line = 0;
};

struct DissipationSpec {
  double intermediate_linewidth = 0.0;            // rad/s
  double intermediate_branching_to_ground = 1.0;  // remainder returns to the initial manifold
  double rydberg_linewidth = 0.0;                 // rad/s, decays into the shelf accumulator
  double rydberg_dephasing = 0.0;                 // rad/s, Lindblad rate of the Rydberg projector
  double initial_decay_rate = 0.0;                // 1/s, into the ground accumulator
};

enum class IntermediateTreatment { kExplicit, kEliminated };

struct PulseSpec {
  double duration = 0.0;  // s
  /// (mJ, weight) over the initial manifold; empty means an equal mixture.
  std::vector<std::pair<HalfInt, double>> populations;
  IntermediateTreatment intermediate = IntermediateTreatment::kExplicit;
  double rtol = 1e-8;
  double atol = 1e-10;
};

struct ScanSection {
  std::string laser;  // name of the scanned laser
  double from = 0.0;  // two-photon detuning, rad/s
  double to = 0.0;
  int points = 0;
  int trials = 100;
  std::uint64_t seed = 0;
  int line = 0;
};

struct FloquetSection {
  int k_max = 3;
  double min_weight = 0.02;
};

struct LineshapeSection {
  LineshapeParams params;
  bool predict_delta_omega = false;  // derive per-mode dw from trap and polarizability
  double from = 0.0;
  double to = 0.0;
  int points = 0;
  bool fit = false;
};

struct Scenario {
  std::string name;
  std::string description;
  std::string source;        // path, or "<string>"
  std::uint64_t hash = 0;    // FNV-1a of the file bytes
  double mass = kConstants.ion_mass();
  std::vector<LevelSpec> levels;
  std::optional<TrapSpec> trap;
  double field = 0.0;  // T
  std::vector<LaserSpec> lasers;
  DissipationSpec dissipation;
  std::optional<PulseSpec> pulse;
  std::optional<ScanSection> scan;
  DetectionModel detection;
  FloquetSection floquet;
  std::optional<LineshapeSection> lineshape;
};

/// Parses and schema-checks a YAML scenario. Unknown keys, missing units and malformed values
/// raise ConfigError with "<source>:<line>:" context.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");

/// Parses manifold labels such as "24D3/2".
ManifoldKey parse_manifold(const std::string& label);
/// Parses "3/2", "+1/2", "-1", "2".
HalfInt parse_half_int(const std::string& text);

struct ValidationIssue {
  bool error = true;
  std::string message;
};

/// Physics sanity checks on a parsed scenario: trap stability, polarization rule, RWA and
/// elimination validity, accumulator levels for detection. Never throws for scenario content.
std::vector<ValidationIssue> check_scenario(const Scenario& scenario);

/// 64-bit FNV-1a digest, used to tag outputs with the scenario they came from.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace rydion
