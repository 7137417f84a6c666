#include "rydion/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "rydion/error.hpp"

namespace rydion {

namespace {

std::vector<ElectronicLevel> expand_levels(const LevelSpec& spec) {
  std::vector<HalfInt> ms = spec.sublevels;
  if (ms.empty())
    for (int t = -spec.manifold.J.twice(); t <= spec.manifold.J.twice(); t += 2) ms.push_back(HalfInt::from_twice(t));
  std::vector<ElectronicLevel> out;
  for (auto m : ms) out.push_back(ElectronicLevel::make(spec.manifold.n, spec.manifold.L.twice() / 2, spec.manifold.J, m, spec.role));
  return out;
}

std::vector<LindbladChannel> build_channels(const LevelBasis& basis, const Scenario& s) {
  const auto& d = s.dissipation;
  const auto initial = basis.indices_with_role(LevelRole::kInitial);
  const auto intermediate = basis.indices_with_role(LevelRole::kIntermediate);
  const auto rydberg = basis.indices_with_role(LevelRole::kRydberg);
  const auto ground = basis.indices_with_role(LevelRole::kGround);
  const auto shelf = basis.indices_with_role(LevelRole::kShelf);

  std::vector<LindbladChannel> out;
  auto append = [&out](std::vector<LindbladChannel> more) {
    for (auto& c : more) out.push_back(std::move(c));
  };
  const double to_ground = ground.empty() ? 0.0 : d.intermediate_branching_to_ground;
  append(decay_channels(basis, intermediate, ground, d.intermediate_linewidth, to_ground,
                        ChannelLabel::kIntermediateDecay, false));
  append(decay_channels(basis, intermediate, initial, d.intermediate_linewidth, 1.0 - to_ground,
                        ChannelLabel::kIntermediateDecay, true));
  if (!shelf.empty()) {
    // The shelf sink collects every Rydberg decay; the branching to the ground state is applied at detection.
    append(decay_channels(basis, rydberg, shelf, d.rydberg_linewidth, 1.0, ChannelLabel::kRydbergDecay, false));
  } else {
    const double b = s.detection.rydberg_branching_to_ground;
    append(decay_channels(basis, rydberg, ground, d.rydberg_linewidth, b, ChannelLabel::kRydbergDecay, false));
    append(decay_channels(basis, rydberg, initial, d.rydberg_linewidth, 1.0 - b, ChannelLabel::kRydbergDecay, false));
  }
  if (d.rydberg_dephasing > 0 && !rydberg.empty())
    out.push_back(rydberg_dephasing_channel(basis, rydberg, d.rydberg_dephasing));
  append(decay_channels(basis, initial, ground, d.initial_decay_rate, 1.0, ChannelLabel::kInitialStateDecay, false));
  return out;
}

DensityMatrix build_initial(const LevelBasis& basis, const Scenario& s) {
  RealVector pops = RealVector::Zero(static_cast<Eigen::Index>(basis.size()));
  const auto initial = basis.indices_with_role(LevelRole::kInitial);
  if (initial.empty()) throw ConfigError("no initial levels in the basis");
  if (!s.pulse || s.pulse->populations.empty()) {
    for (auto i : initial) pops(static_cast<Eigen::Index>(i)) = 1.0 / static_cast<double>(initial.size());
  } else {
    for (const auto& [m, w] : s.pulse->populations) {
      auto it = std::find_if(initial.begin(), initial.end(), [&](std::size_t i) { return basis[i].mJ == m; });
      if (it == initial.end()) throw ConfigError("pulse: initial population for mJ = " + m.str() + " not in the basis");
      pops(static_cast<Eigen::Index>(*it)) += w;
    }
  }
  return density_from_populations(pops);
}

struct EliminationReference {
  RealVector energies;
  std::map<std::size_t, std::size_t> partner;  // Rydberg level -> initial level
};

/// Reference energies for eliminating the intermediate levels: a Rydberg level is evaluated at the
/// energy of the initial level it is excited from, which is where its resonance lies.
EliminationReference elimination_reference(const Matrix& h, const LevelBasis& basis) {
  EliminationReference ref;
  ref.energies = h.diagonal().real();
  const auto initial = basis.indices_with_role(LevelRole::kInitial);
  const auto intermediate = basis.indices_with_role(LevelRole::kIntermediate);
  for (auto r : basis.indices_with_role(LevelRole::kRydberg)) {
    double best = 0.0;
    std::size_t partner = 0;
    for (auto i : initial) {
      std::complex<double> path = 0.0;
      for (auto e : intermediate)
        path += h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e)) *
                h(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(r));
      if (std::abs(path) > best) {
        best = std::abs(path);
        partner = i;
      }
    }
    if (best > 0) {
      ref.partner[r] = partner;
      ref.energies(static_cast<Eigen::Index>(r)) = ref.energies(static_cast<Eigen::Index>(partner));
    }
  }
  return ref;
}

Matrix restrict(const Matrix& m, const std::vector<std::size_t>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      out(a, b) = m(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
  return out;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

QuadrupoleProvider quadrupole_provider(const Scenario& scenario) {
  std::map<ManifoldKey, double> moments;
  for (const auto& l : scenario.levels) {
    if (l.manifold.J.twice() <= 1) continue;
    if (l.core_charge) {
      moments[l.manifold] = quadrupole_moment(l.manifold.n, l.manifold.L, l.manifold.J, *l.core_charge);
    } else if (l.role == LevelRole::kRydberg) {
      moments[l.manifold] = quadrupole_moment(l.manifold.n, l.manifold.L, l.manifold.J);
    }
  }
  return [moments](const ManifoldKey& key) -> std::optional<double> {
    if (auto it = moments.find(key); it != moments.end()) return it->second;
    return std::nullopt;
  };
}

Experiment build_experiment(const Scenario& scenario) {
  Experiment ex;
  ex.scenario = scenario;
  std::vector<ElectronicLevel> levels;
  for (const auto& spec : scenario.levels)
    for (auto& l : expand_levels(spec)) levels.push_back(l);
  ex.basis = LevelBasis(std::move(levels));

  if (scenario.trap) ex.inputs.trap = scenario.trap->geometry;
  ex.inputs.field_tesla = scenario.field;
  for (const auto& l : scenario.lasers) ex.inputs.drives.push_back(l.drive);
  ex.inputs.quadrupole = quadrupole_provider(scenario);

  const auto n = static_cast<Eigen::Index>(ex.basis.size());
  ex.g_correction = RealVector::Zero(n);
  for (const auto& spec : scenario.levels) {
    if (!spec.g_factor) continue;
    for (auto i : ex.basis.manifold_indices(spec.manifold)) {
      const auto& level = ex.basis[i];
      const double lande = level.J.twice() == 0 ? 0.0 : lande_g(level);
      ex.g_correction(static_cast<Eigen::Index>(i)) =
          (*spec.g_factor - lande) * level.mJ.value() * kConstants.mu_B * scenario.field / kConstants.hbar;
    }
  }

  if (!ex.basis.indices_with_role(LevelRole::kInitial).empty()) {
    ex.channels = build_channels(ex.basis, scenario);
    ex.initial = build_initial(ex.basis, scenario);
  }

  if (scenario.scan) {
    const auto& drives = ex.inputs.drives;
    auto it = std::find_if(drives.begin(), drives.end(), [&](const LaserDrive& d) { return d.name == scenario.scan->laser; });
    if (it == drives.end()) throw ConfigError("scan: no laser named '" + scenario.scan->laser + "'");
    ex.scan_laser = static_cast<std::size_t>(it - drives.begin());
    ManifoldKey lower = it->lower;
    for (std::size_t guard = 0; guard < drives.size(); ++guard) {
      auto prev = std::find_if(drives.begin(), drives.end(), [&](const LaserDrive& d) { return d.upper == lower; });
      if (prev == drives.end()) break;
      ex.scan_offset += prev->detuning;
      lower = prev->lower;
    }
  }
  return ex;
}

TimeDependentOperator hamiltonian_at(const Experiment& ex, double detuning) {
  AssemblyInputs inputs = ex.inputs;
  if (ex.scan_laser) inputs.drives[*ex.scan_laser].detuning = detuning - ex.scan_offset;
  auto h = assemble(ex.basis, inputs);
  h.static_part.diagonal() += ex.g_correction.cast<std::complex<double>>();
  return h;
}

double excitation_probability(const Experiment& ex, double detuning) {
  if (!ex.scenario.pulse) throw ConfigError("scenario has no pulse section");
  const auto& pulse = *ex.scenario.pulse;
  EvolveOptions options;
  options.control.rtol = pulse.rtol;
  options.control.atol = pulse.atol;

  auto h = hamiltonian_at(ex, detuning);
  if (pulse.intermediate == IntermediateTreatment::kExplicit) {
    const MasterEquationProblem problem{h, ex.channels, ex.initial, pulse.duration};
    return detection_probability(evolve(problem, options).rho, ex.basis, ex.scenario.detection);
  }

  // Reduced model: intermediate levels eliminated, their dissipation dropped.
  const auto intermediate = ex.basis.indices_with_role(LevelRole::kIntermediate);
  const auto ref = elimination_reference(h.static_part, ex.basis);
  const auto eff = adiabatic_eliminate(h.static_part, intermediate, ref.energies);
  std::vector<ElectronicLevel> kept_levels;
  for (auto i : eff.kept) kept_levels.push_back(ex.basis[i]);
  const LevelBasis reduced(kept_levels);
  TimeDependentOperator hr{eff.hamiltonian, {}};
  for (const auto& part : h.drive_parts) hr.drive_parts.push_back({restrict(part.matrix, eff.kept), part.frequency});
  const MasterEquationProblem problem{hr, build_channels(reduced, ex.scenario), restrict(ex.initial, eff.kept),
                                      pulse.duration};
  return detection_probability(evolve(problem, options).rho, reduced, ex.scenario.detection);
}

Spectrum simulate_spectrum(const Experiment& ex, int threads, std::optional<std::uint64_t> seed_override) {
  if (!ex.scenario.scan) throw ConfigError("scenario has no scan section");
  const auto& sc = *ex.scenario.scan;
  ScanSpec spec{linear_grid(sc.from, sc.to, sc.points), sc.trials, seed_override.value_or(sc.seed)};
  auto spectrum = scan(spec, [&ex](double d) { return excitation_probability(ex, d); }, threads);
  spectrum.metadata["scenario"] = ex.scenario.name;
  spectrum.metadata["scenario_hash"] = hex(ex.scenario.hash);
  spectrum.metadata["scanned_laser"] = sc.laser;
  spectrum.metadata["detuning_axis"] = "two-photon detuning, cyclic Hz (angular / 2pi)";
  spectrum.metadata["pulse_duration_s"] = std::to_string(ex.scenario.pulse->duration);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) spectrum.metadata["timestamp_unix"] = epoch;
  return spectrum;
}

FloquetAnalysis analyze_floquet(const Experiment& ex, std::optional<int> k_max_override) {
  if (!ex.scenario.trap) throw ConfigError("floquet: scenario needs a trap section");
  const int k_max = k_max_override.value_or(ex.scenario.floquet.k_max);
  const double omega = ex.scenario.trap->geometry.omega_rf;

  const auto h = hamiltonian_at(ex, 0.0);
  const auto ref = elimination_reference(h.static_part, ex.basis);
  const auto eff = adiabatic_eliminate(h.static_part, ex.basis.indices_with_role(LevelRole::kIntermediate), ref.energies);

  // Positions (within eff.kept) of Rydberg and initial levels.
  std::vector<std::size_t> ryd_pos, ryd_levels;
  std::map<std::size_t, std::size_t> kept_pos;
  for (std::size_t a = 0; a < eff.kept.size(); ++a) {
    kept_pos[eff.kept[a]] = a;
    if (ex.basis[eff.kept[a]].role == LevelRole::kRydberg) {
      ryd_pos.push_back(a);
      ryd_levels.push_back(eff.kept[a]);
    }
  }
  if (ryd_levels.empty()) throw ConfigError("floquet: no Rydberg levels in the basis");

  const Matrix static_r = restrict(eff.hamiltonian, ryd_pos);
  Matrix drive_r = Matrix::Zero(static_r.rows(), static_r.cols());
  for (const auto& part : h.drive_parts)
    if (part.frequency == omega) drive_r += restrict(part.matrix, ryd_levels);

  std::vector<std::size_t> bright;  // positions within the Rydberg block
  for (std::size_t r = 0; r < ryd_levels.size(); ++r)
    if (ref.partner.count(ryd_levels[r])) bright.push_back(r);
  if (bright.empty()) throw ConfigError("floquet: no Rydberg level is coupled to an initial level");

  const auto spectrum = floquet_main_lines(static_r, drive_r, omega, k_max, bright, ex.scenario.floquet.min_weight);

  FloquetAnalysis out;
  out.k_max = k_max;
  out.convergence_shift = spectrum.convergence_shift;
  out.converged = spectrum.converged;
  for (const auto& line : spectrum.lines) {
    FloquetResonance res;
    res.quasi_energy = line.quasi_energy;
    res.bright_weight = line.bright_weight;
    double best = -1.0;
    for (auto b : bright) {
      const double w = std::norm(line.state(static_cast<Eigen::Index>(spectrum.floquet.index_of(b, 0))));
      if (w > best) {
        best = w;
        res.bright_level = ryd_levels[b];
      }
    }
    res.initial_partner = ref.partner.at(res.bright_level);
    const auto p = static_cast<Eigen::Index>(kept_pos.at(res.initial_partner));
    res.detuning = line.quasi_energy - eff.hamiltonian(p, p).real();
    for (std::size_t s = 0; s < spectrum.floquet.states.size(); ++s) {
      const auto amp = line.state(static_cast<Eigen::Index>(s));
      if (std::abs(amp) >= 0.05)
        res.components.push_back({ryd_levels[spectrum.floquet.states[s].level], spectrum.floquet.states[s].k, amp});
    }
    std::sort(res.components.begin(), res.components.end(),
              [](const FloquetComponent& a, const FloquetComponent& b) { return std::abs(a.amplitude) > std::abs(b.amplitude); });
    out.lines.push_back(std::move(res));
  }
  std::sort(out.lines.begin(), out.lines.end(),
            [](const FloquetResonance& a, const FloquetResonance& b) { return a.detuning < b.detuning; });
  return out;
}

}  // namespace rydion
