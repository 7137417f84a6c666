// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
// Slow criteria (the master-equation scans) run on the shipped scenarios exactly as the CLI would.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rydion/experiment.hpp"
#include "rydion/lineshape.hpp"
#include "rydion/output.hpp"
#include "rydion/peaks.hpp"
#include "rydion/trap.hpp"
#include "rydion/units.hpp"

using namespace rydion;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = RYDION_SCENARIO_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string path_of(const std::string& name) { return (kScenarios / (name + ".yaml")).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Spectra computed for the structure checks, reused by the determinism check.
std::map<std::string, Spectrum> g_spectra;

// 1. Floquet resonances of the 24D3/2 scenario against the quoted eigenfrequencies and eigenvectors.
void floquet_lines(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream cli_out, cli_err;
  const fs::path out_dir = fs::temp_directory_path() / "rydion_acceptance_floquet";
  const int code = cli::run({"floquet-eigen", path_of("d24_sigma_minus_plus"), "--format", "json", "--out",
                             out_dir.string()},
                            cli_out, cli_err);
  const double runtime = seconds_since(t0);
  o.require(code == cli::kExitOk, "floquet-eigen exit code " + std::to_string(code));
  o.require(runtime < 1.0, "runtime " + fixed(runtime, 3) + " s");

  const auto experiment = build_experiment(load_scenario(path_of("d24_sigma_minus_plus")));
  const auto analysis = analyze_floquet(experiment);
  o.require(analysis.lines.size() == 4, std::to_string(analysis.lines.size()) + " lines");
  if (analysis.lines.size() != 4) return;

  // Targets in MHz with components (|mJ| doubled, k, magnitude); lines A..D in ascending order.
  struct Target {
    double mhz;
    std::vector<std::tuple<int, int, double>> components;
  };
  const std::vector<Target> targets = {{5.8, {{1, 0, 0.72}, {3, 1, 0.69}}},
                                       {9.2, {{3, 0, 0.21}, {1, 1, 0.98}}},
                                       {14.1, {{1, 0, 0.69}, {3, 1, 0.72}}},
                                       {29.0, {{3, 0, 0.97}, {1, 1, 0.22}}}};
  // Zero reference: the light-shift-dominated line D is pinned to its quoted value.
  const double anchor = targets[3].mhz - to_mhz(analysis.lines[3].detuning);
  double worst_abs = 0, worst_anchored = 0, worst_component = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double line = to_mhz(analysis.lines[i].detuning);
    worst_abs = std::max(worst_abs, std::abs(line - targets[i].mhz));
    worst_anchored = std::max(worst_anchored, std::abs(line + anchor - targets[i].mhz));
    for (const auto& [twice_abs_m, k, magnitude] : targets[i].components) {
      double found = 0.0;
      for (const auto& c : analysis.lines[i].components)
        if (std::abs(experiment.basis[c.level].mJ.twice()) == twice_abs_m && c.k == k)
          found = std::max(found, std::abs(c.amplitude));
      worst_component = std::max(worst_component, std::abs(found - magnitude));
    }
    o.detail << fixed(line, 3) << (i < 3 ? "/" : " MHz; ");
  }
  o.require(worst_anchored <= 0.5, "anchored deviation " + fixed(worst_anchored, 3) + " MHz");
  o.require(worst_component <= 0.03, "component deviation " + fixed(worst_component, 3));
  o.detail << "max |dev| absolute " << fixed(worst_abs, 3) << " MHz, anchored on D " << fixed(worst_anchored, 3)
           << " MHz, components " << fixed(worst_component, 3) << ", converged " << analysis.converged
           << ", CLI runtime " << fixed(runtime * 1e3, 1) << " ms";
}

// 2. Electron-trap coupling constants at the typical gradients.
void trap_coupling(Outcome& o) {
  const auto scenario = load_scenario(path_of("trap_typical"));
  const auto& geometry = scenario.trap->geometry;
  const auto provider = quadrupole_provider(scenario);
  const auto key = scenario.levels.at(0).manifold;
  const auto q = provider(key);
  o.require(q.has_value(), "quadrupole moment available");
  if (!q) return;
  const double static_shift = std::abs(quadrupole_static_shift(key.J, HalfInt::half(1), geometry.beta, *q));
  const double coupling = std::abs(quadrupole_rf_coupling(key.J, HalfInt::half(-1), geometry.alpha, *q));
  const double ratio = coupling / static_shift;
  o.require(std::abs(ratio / 288.7 - 1) <= 0.01, "ratio");
  o.require(std::abs(to_khz(static_shift) / 43 - 1) <= 0.10, "static shift");
  o.require(std::abs(to_mhz(coupling) / 12 - 1) <= 0.10, "RF coupling");
  o.detail << "C/|Es| = " << fixed(ratio, 2) << ", |Es| = 2pi x " << fixed(to_khz(static_shift), 2)
           << " kHz, C = 2pi x " << fixed(to_mhz(coupling), 3) << " MHz (core charge 1)";
}

// 3. Axial and radial secular frequencies.
void secular(Outcome& o) {
  const auto scenario = load_scenario(path_of("trap_typical"));
  const auto f = secular_frequencies(scenario.trap->geometry, scenario.mass);
  const double axial = to_khz(f.omega_axial), radial = to_khz(f.omega_radial_1);
  o.require(std::abs(axial / 258 - 1) <= 0.02 && std::abs(axial / 254 - 1) <= 0.02, "axial");
  o.require(radial >= 600 && radial <= 760, "radial band");
  o.detail << "axial 2pi x " << fixed(axial, 1) << " kHz, radial 2pi x " << fixed(radial, 1) << " kHz";
}

// 4. Lamb-Dicke parameter of the counter-propagating two-photon excitation.
void lamb_dicke_parameter(Outcome& o) {
  const double eta = lamb_dicke(243e-9, 309e-9, BeamGeometry::kCounterPropagating, 88 * kConstants.amu, khz(872));
  o.require(std::abs(eta - 0.044) <= 0.001, "eta");
  o.detail << "eta = " << fixed(eta, 5);
}

// 5. Radial frequency change in the 42S Rydberg state with the inferred RF gradient.
void modified_frequency(Outcome& o) {
  const auto scenario = load_scenario(path_of("thermal_42s_predicted"));
  const auto& trap = *scenario.trap;
  double polarizability = 0;
  for (const auto& level : scenario.levels)
    if (level.polarizability) polarizability = *level.polarizability;
  o.require(std::abs(polarizability - 17.6e9) < 1, "polarizability 17.6e9 au in scenario");
  const auto inferred = infer_gradients(*trap.secular, trap.geometry.omega_rf, scenario.mass);
  for (double omega0 : {trap.secular->omega_radial_1, trap.secular->omega_radial_2}) {
    const double dw = to_khz(modified_radial_frequency(omega0, inferred.geometry, polarizability, scenario.mass).delta_omega);
    o.require(std::abs(dw + 20) <= 4, "delta omega");
    o.detail << "dw = 2pi x " << fixed(dw, 2) << " kHz; ";
  }
  o.detail << "inferred alpha = " << std::setprecision(5) << inferred.geometry.alpha << " V/m^2";
}

// Two-photon resonances from the adiabatically eliminated Hamiltonian: Zeeman splitting plus the
// light shifts of both ends, one per laser-coupled (populated initial, Rydberg) pair.
std::vector<double> predicted_resonances(const Experiment& ex) {
  const auto intermediate = ex.basis.indices_with_role(LevelRole::kIntermediate);
  std::vector<double> out;
  for (std::size_t i : ex.basis.indices_with_role(LevelRole::kInitial)) {
    if (ex.initial(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() <= 0) continue;
    for (std::size_t r : ex.basis.indices_with_role(LevelRole::kRydberg)) {
      double detuning = 0.0;
      bool coupled = false;
      for (int iteration = 0; iteration < 3; ++iteration) {
        const auto eff = adiabatic_eliminate(hamiltonian_at(ex, detuning).static_part, intermediate);
        const auto pos = [&](std::size_t idx) {
          return static_cast<Eigen::Index>(std::find(eff.kept.begin(), eff.kept.end(), idx) - eff.kept.begin());
        };
        const auto& h = eff.hamiltonian;
        coupled = std::abs(h(pos(i), pos(r))) > kTwoPi * 100.0;
        // The scanned detuning enters the Rydberg diagonal with slope -1.
        detuning += h(pos(r), pos(r)).real() - h(pos(i), pos(i)).real();
      }
      if (coupled) out.push_back(detuning);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Peaks of the noiseless model curve whose prominence is at least 2% of its maximum. A lower cutoff
// only adds peaks that must then be matched, so it tightens the structure checks. The weaker 24D
// lines sit near 4-7% of the dominant one.
std::vector<Peak> main_peaks(const Spectrum& s) {
  const auto model = s.model_probabilities();
  const double top = *std::max_element(model.begin(), model.end());
  return find_peaks(s.detunings(), model, 0.02 * top);
}

// 6. 25S spectra: peak count per polarization configuration, centers, insensitivity to alpha.
void s_state_spectra(Outcome& o) {
  const std::vector<std::pair<std::string, std::size_t>> configs = {
      {"s25_sigma_pm_pm", 4}, {"s25_sigma_pm_minus", 2}, {"s25_sigma_plus_plus", 1}};
  double slowest = 0.0, worst_invariance = 0.0;
  for (const auto& [name, expected] : configs) {
    const auto scenario = load_scenario(path_of(name));
    const auto experiment = build_experiment(scenario);
    const auto t0 = std::chrono::steady_clock::now();
    const auto spectrum = simulate_spectrum(experiment);
    slowest = std::max(slowest, seconds_since(t0));
    g_spectra[name] = spectrum;

    const auto peaks = main_peaks(spectrum);
    const auto predicted = predicted_resonances(experiment);
    o.require(peaks.size() == expected, name + ": " + std::to_string(peaks.size()) + " peaks");
    o.require(predicted.size() == expected, name + ": " + std::to_string(predicted.size()) + " predicted lines");
    o.detail << name << " peaks";
    for (std::size_t k = 0; k < peaks.size(); ++k) {
      o.detail << " " << fixed(to_mhz(peaks[k].center), 2);
      if (k < predicted.size()) {
        const double miss = std::abs(peaks[k].center - predicted[k]);
        o.detail << "(pred " << fixed(to_mhz(predicted[k]), 2) << ")";
        o.require(miss <= 0.5 * peaks[k].fwhm, name + " center within half width");
      }
    }
    o.detail << " MHz; ";

    // Re-evaluate each peak region with alpha scaled by 0.5 and 1.5 and compare refined centers.
    auto refined_centers = [&](double alpha_scale) {
      auto varied = scenario;
      varied.trap->geometry.alpha *= alpha_scale;
      const auto ex = build_experiment(varied);
      std::vector<double> centers;
      for (const auto& p : peaks) {
        const auto grid = linear_grid(p.center - mhz(0.6), p.center + mhz(0.6), 7);
        std::vector<double> values;
        for (double d : grid) values.push_back(excitation_probability(ex, d));
        const auto local = find_peaks(grid, values, 1e-6);
        centers.push_back(local.empty() ? 1e30 : local.front().center);
      }
      return centers;
    };
    const auto base = refined_centers(1.0);
    for (double scale : {0.5, 1.5}) {
      const auto varied = refined_centers(scale);
      for (std::size_t k = 0; k < base.size(); ++k) worst_invariance = std::max(worst_invariance, std::abs(varied[k] - base[k]));
    }
  }
  o.require(worst_invariance < khz(10), "alpha invariance");
  o.require(slowest < 300, "scan runtime");
  o.detail << "max center shift under alpha +-50%: " << fixed(to_khz(worst_invariance), 3)
           << " kHz; slowest 200-point scan " << fixed(slowest, 1) << " s";
}

// 7. 24D spectrum: main peaks of the master-equation scan against the Floquet resonances.
void d_state_spectrum(Outcome& o) {
  const auto experiment = build_experiment(load_scenario(path_of("d24_sigma_minus_plus")));
  const auto analysis = analyze_floquet(experiment);
  const auto t0 = std::chrono::steady_clock::now();
  const auto spectrum = simulate_spectrum(experiment);
  const double runtime = seconds_since(t0);
  const auto peaks = main_peaks(spectrum);
  o.require(!peaks.empty(), "no peaks");
  std::vector<bool> seen(analysis.lines.size(), false);
  for (const auto& p : peaks) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < analysis.lines.size(); ++k)
      if (std::abs(analysis.lines[k].detuning - p.center) < std::abs(analysis.lines[best].detuning - p.center)) best = k;
    const double miss = std::abs(analysis.lines[best].detuning - p.center);
    const bool ok = miss <= 0.5 * p.fwhm;
    o.require(ok, "peak at " + fixed(to_mhz(p.center), 2) + " MHz unmatched");
    if (ok) seen[best] = true;
    o.detail << fixed(to_mhz(p.center), 2) << "->" << fixed(to_mhz(analysis.lines[best].detuning), 2) << " ";
  }
  // Sideband evidence: an observed line whose dominant component sits in a k != 0 Floquet block.
  bool sideband = false;
  for (std::size_t k = 0; k < analysis.lines.size(); ++k)
    if (seen[k] && !analysis.lines[k].components.empty() && analysis.lines[k].components.front().k != 0) sideband = true;
  o.require(sideband, "no observed line dominated by a k != 0 sideband component");
  o.detail << "MHz; unobserved Floquet lines:";
  for (std::size_t k = 0; k < analysis.lines.size(); ++k)
    if (!seen[k]) o.detail << " " << fixed(to_mhz(analysis.lines[k].detuning), 2);
  o.detail << " MHz; scan " << fixed(runtime, 1) << " s";
}

// 8. Thermal lineshape of the Doppler-cooled 42S line.
void thermal_line(Outcome& o) {
  const auto scenario = load_scenario(path_of("thermal_42s_doppler"));
  const auto p = scenario.lineshape->params;
  const auto grid = linear_grid(mhz(-6), mhz(3), 9001);
  const double fwhm = to_mhz(sampled_fwhm(grid, thermal_lineshape(p, grid)));
  const double centroid = component_centroid(p) - p.carrier;
  const double expected_centroid = p.mean_phonons_x * p.delta_omega_x + p.mean_phonons_y * p.delta_omega_y;
  auto cold = p;
  cold.mean_phonons_x = cold.mean_phonons_y = 0;
  const double cold_fwhm = to_khz(sampled_fwhm(grid, thermal_lineshape(cold, grid)));

  const auto data_grid = linear_grid(scenario.lineshape->from, scenario.lineshape->to, scenario.lineshape->points);
  const auto data = thermal_lineshape(p, data_grid);
  const auto fit = fit_delta_omega(data_grid, data, p.mean_phonons_x, p.mean_phonons_y, p.base_fwhm);
  const double fit_error = std::abs(fit.delta_omega / p.delta_omega_x - 1);

  o.require(std::abs(fwhm - 1.4) <= 0.15, "FWHM");
  o.require(centroid < 0 && std::abs(centroid / expected_centroid - 1) < 0.01, "centroid");
  o.require(std::abs(cold_fwhm - 300) <= 5, "n=0 FWHM");
  o.require(fit_error < 0.05, "fit round trip");
  o.detail << "FWHM 2pi x " << fixed(fwhm, 4) << " MHz, centroid 2pi x " << fixed(to_khz(centroid), 1)
           << " kHz (sum n dw = " << fixed(to_khz(expected_centroid), 1) << "), n=0 FWHM 2pi x " << fixed(cold_fwhm, 2)
           << " kHz, fitted dw 2pi x " << fixed(to_khz(fit.delta_omega), 3) << " kHz";
}

// 9. Master-equation integrity: trace, purity, Rabi and optical-Bloch checks.
void integrity(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  EvolveOptions tight;
  tight.control.rtol = 1e-10;
  tight.control.atol = 1e-12;
  auto unit = [](int n, int r, int c) {
    Matrix m = Matrix::Zero(n, n);
    m(r, c) = 1.0;
    return m;
  };
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  auto hermitian = [&](int n, double scale) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
    return Matrix(0.5 * scale * (a + a.adjoint()));
  };

  // Trace drift with drive and dissipation, per unit (1/s-scaled) evolution time of one decay time.
  auto h = TimeDependentOperator::zero(4);
  h.static_part = hermitian(4, mhz(1));
  h.drive_parts.push_back({hermitian(4, mhz(2)), mhz(5)});
  const std::vector<LindbladChannel> channels = {{unit(4, 0, 3), 1e6, ChannelLabel::kRydbergDecay},
                                                 {unit(4, 2, 2), 3e5, ChannelLabel::kRydbergDephasing}};
  double drift = 0;
  for (bool strobe : {true, false}) {
    auto opt = tight;
    opt.allow_stroboscopic = strobe;
    drift = std::max(drift, evolve({h, channels, unit(4, 0, 0), 1e-6}, opt).trace_drift);
  }

  // Purity without dissipation.
  Vector psi = Vector::Random(4).normalized();
  const auto pure = evolve({h, {}, psi * psi.adjoint(), 20e-6}, tight);
  const double purity_error = std::abs((pure.rho * pure.rho).trace().real() - 1.0);

  // Resonant Rabi oscillation.
  const double rabi = mhz(1);
  auto two = TimeDependentOperator::zero(2);
  two.static_part(0, 1) = two.static_part(1, 0) = 0.5 * rabi;
  double rabi_error = 0;
  for (double t : {0.1e-6, 0.37e-6, 1.9e-6}) {
    const auto r = evolve({two, {}, unit(2, 0, 0), t}, tight);
    rabi_error = std::max(rabi_error, std::abs(r.rho(1, 1).real() - std::pow(std::sin(0.5 * rabi * t), 2)));
  }

  // Optical-Bloch steady state.
  const double omega = mhz(0.8), delta = mhz(0.5), gamma = mhz(1.0);
  two.static_part(0, 1) = two.static_part(1, 0) = 0.5 * omega;
  two.static_part(1, 1) = -delta;
  const std::vector<LindbladChannel> decay = {{unit(2, 0, 1), gamma, ChannelLabel::kIntermediateDecay}};
  const auto ss = evolve({two, decay, unit(2, 0, 0), 60 * kTwoPi / gamma}, tight);
  const double bloch = 0.25 * omega * omega / (delta * delta + 0.5 * omega * omega + 0.25 * gamma * gamma);
  const double bloch_error = std::abs(ss.rho(1, 1).real() - bloch);
  const double runtime = seconds_since(t0);

  o.require(drift < 1e-9, "trace drift");
  o.require(purity_error < 1e-8, "purity");
  o.require(rabi_error < 1e-6, "Rabi");
  o.require(bloch_error < 1e-6, "optical Bloch");
  o.require(runtime < 30, "runtime");
  o.detail << std::scientific << std::setprecision(2) << "trace drift " << drift << ", purity error " << purity_error
           << ", Rabi error " << rabi_error << ", Bloch error " << bloch_error << std::defaultfloat << ", "
           << fixed(runtime, 2) << " s";
}

// 10. Determinism: CLI output of reference scenarios is byte-identical across runs.
void determinism(Outcome& o) {
  const fs::path root = fs::temp_directory_path() / "rydion_acceptance_det";
  fs::remove_all(root);
  auto cli_run = [&](const std::vector<std::string>& args, const fs::path& dir) {
    std::ostringstream out, err;
    auto full = args;
    full.insert(full.end(), {"--format", "both", "--out", dir.string()});
    return cli::run(full, out, err);
  };
  std::size_t compared = 0;
  for (const std::string sub : {"lineshape", "floquet-eigen"}) {
    for (const std::string name : {"thermal_42s_doppler", "thermal_42s_predicted", "d24_sigma_minus_plus"}) {
      if ((sub == "lineshape") == (name == "d24_sigma_minus_plus")) continue;
      const auto a = root / (sub + "_a"), b = root / (sub + "_b");
      o.require(cli_run({sub, path_of(name)}, a) == 0 && cli_run({sub, path_of(name)}, b) == 0, sub + " " + name);
      for (const auto& entry : fs::directory_iterator(a)) {
        o.require(slurp(entry.path()) == slurp(b / entry.path().filename()), entry.path().filename().string());
        ++compared;
      }
    }
  }
  // The master-equation scan of the (+/+) scenario: CLI output against the in-process run of criterion 6.
  const std::string name = "s25_sigma_plus_plus";
  if (g_spectra.count(name)) {
    const auto dir = root / "simulate";
    o.require(cli_run({"simulate-spectrum", path_of(name)}, dir) == 0, "simulate-spectrum");
    std::ostringstream csv;
    write_csv(g_spectra[name], csv);
    o.require(slurp(dir / (name + ".csv")) == csv.str(), name + ".csv");
    o.require(slurp(dir / (name + ".json")) == spectrum_json(g_spectra[name]).dump(2) + "\n", name + ".json");
    compared += 2;
  } else {
    o.require(false, "criterion 6 spectrum unavailable");
  }
  o.detail << compared << " output files compared byte for byte";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"Floquet eigenfrequencies and eigenvectors", floquet_lines},
      {"trap coupling constants", trap_coupling},
      {"secular frequencies", secular},
      {"Lamb-Dicke parameter", lamb_dicke_parameter},
      {"Rydberg-state trap frequency shift", modified_frequency},
      {"25S spectra structure", s_state_spectra},
      {"24D spectra structure", d_state_spectrum},
      {"thermal lineshape", thermal_line},
      {"master-equation integrity", integrity},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
