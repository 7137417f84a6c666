#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>

#include "rydion/error.hpp"
#include "rydion/experiment.hpp"
#include "rydion/lineshape.hpp"
#include "rydion/output.hpp"
#include "rydion/peaks.hpp"
#include "rydion/scenario.hpp"
#include "rydion/trap.hpp"

namespace rydion::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct CommonOptions {
  std::string out_dir = ".";
  std::string format = "both";
  bool plot = false;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<int> k_max;

  [[nodiscard]] bool csv() const { return format == "csv" || format == "both"; }
  [[nodiscard]] bool json() const { return format == "json" || format == "both"; }
};

std::string mhz_str(double omega, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << to_mhz(omega);
  return s.str();
}

std::string khz_str(double omega, int precision = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << to_khz(omega);
  return s.str();
}

void write_file(const fs::path& path, const std::string& content, std::ostream& out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
  out << "wrote " << path.string() << '\n';
}

void emit_spectrum(const Spectrum& spectrum, const std::string& stem, const std::string& title,
                   const CommonOptions& opt, std::ostream& out) {
  const fs::path dir(opt.out_dir);
  if (opt.csv()) {
    std::ostringstream s;
    write_csv(spectrum, s);
    write_file(dir / (stem + ".csv"), s.str(), out);
  }
  if (opt.json()) write_file(dir / (stem + ".json"), spectrum_json(spectrum).dump(2) + "\n", out);
  if (opt.plot) {
    std::ostringstream s;
    write_spectrum_svg(spectrum, title, s);
    write_file(dir / (stem + ".svg"), s.str(), out);
  }
}

int resolved_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_simulate(const std::string& path, const CommonOptions& opt, std::ostream& out) {
  const auto scenario = load_scenario(path);
  for (const auto& issue : check_scenario(scenario))
    if (issue.error) throw ConfigError(path + ": " + issue.message);
  const auto experiment = build_experiment(scenario);
  const auto spectrum = simulate_spectrum(experiment, resolved_threads(opt.threads), opt.seed);

  const auto peaks = find_peaks(spectrum.detunings(), spectrum.model_probabilities(), 0.02);
  out << "scenario " << scenario.name << ": " << spectrum.points.size() << " points, " << peaks.size()
      << " peak(s) in the noiseless model\n";
  for (const auto& p : peaks)
    out << "  peak at " << mhz_str(p.center, 3) << " MHz, height " << format_number(p.height, 4) << ", FWHM "
        << mhz_str(p.fwhm, 3) << " MHz\n";
  emit_spectrum(spectrum, scenario.name, scenario.name + " excitation spectrum", opt, out);
  return kExitOk;
}

int cmd_floquet(const std::string& path, const CommonOptions& opt, std::ostream& out) {
  const auto scenario = load_scenario(path);
  const auto experiment = build_experiment(scenario);
  const auto analysis = analyze_floquet(experiment, opt.k_max);

  out << "Floquet resonances of " << scenario.name << " (k_max = " << analysis.k_max
      << ", detuning from the bare two-photon resonance, MHz = angular / 2pi)\n";
  out << std::setw(14) << "detuning_MHz" << std::setw(10) << "bright" << "  components |mJ, k> (amplitude)\n";
  for (const auto& line : analysis.lines) {
    out << std::setw(14) << mhz_str(line.detuning, 3) << std::setw(10) << format_number(line.bright_weight, 3) << "  ";
    for (const auto& c : line.components) {
      out << std::showpos << std::fixed << std::setprecision(3) << std::abs(c.amplitude) << std::noshowpos
          << "|" << experiment.basis[c.level].mJ.str() << "," << (c.k >= 0 ? "+" : "") << c.k << "> ";
    }
    out << std::defaultfloat << '\n';
  }
  out << "convergence shift vs k_max - 1: " << khz_str(analysis.convergence_shift, 3) << " kHz ("
      << (analysis.converged ? "converged" : "NOT converged") << ")\n";

  if (opt.json()) {
    ordered_json j;
    j["metadata"] = {{"scenario", scenario.name}, {"k_max", analysis.k_max},
                     {"convergence_shift_hz", std::stod(format_number(analysis.convergence_shift / kTwoPi))},
                     {"converged", analysis.converged},
                     {"zero_reference", "bare two-photon resonance of the initial partner level"}};
    auto lines = ordered_json::array();
    for (const auto& line : analysis.lines) {
      ordered_json l;
      l["detuning_mhz"] = std::stod(format_number(to_mhz(line.detuning)));
      l["bright_weight"] = std::stod(format_number(line.bright_weight));
      l["bright_level"] = experiment.basis[line.bright_level].label();
      l["initial_partner"] = experiment.basis[line.initial_partner].label();
      auto comps = ordered_json::array();
      for (const auto& c : line.components)
        comps.push_back({{"level", experiment.basis[c.level].label()}, {"mJ", experiment.basis[c.level].mJ.str()},
                         {"k", c.k}, {"re", std::stod(format_number(c.amplitude.real()))},
                         {"im", std::stod(format_number(c.amplitude.imag()))}});
      l["components"] = comps;
      lines.push_back(l);
    }
    j["lines"] = lines;
    write_file(fs::path(opt.out_dir) / (scenario.name + "_floquet.json"), j.dump(2) + "\n", out);
  }
  return analysis.converged ? kExitOk : kExitNumerical;
}

LineshapeParams resolve_lineshape(const Scenario& scenario, std::ostream& out) {
  auto params = scenario.lineshape->params;
  if (!scenario.lineshape->predict_delta_omega) return params;
  const auto& sec = *scenario.trap->secular;
  const auto pol = std::find_if(scenario.levels.begin(), scenario.levels.end(),
                                [](const LevelSpec& l) { return l.polarizability.has_value(); });
  const auto& trap = scenario.trap->geometry;
  params.delta_omega_x = modified_radial_frequency(sec.omega_radial_1, trap, *pol->polarizability, scenario.mass).delta_omega;
  params.delta_omega_y = modified_radial_frequency(sec.omega_radial_2, trap, *pol->polarizability, scenario.mass).delta_omega;
  out << "predicted dw: x " << khz_str(params.delta_omega_x) << " kHz, y " << khz_str(params.delta_omega_y)
      << " kHz (2pi)\n";
  return params;
}

int cmd_lineshape(const std::string& path, const CommonOptions& opt, std::ostream& out) {
  const auto scenario = load_scenario(path);
  for (const auto& issue : check_scenario(scenario))
    if (issue.error) throw ConfigError(path + ": " + issue.message);
  if (!scenario.lineshape) throw ConfigError(path + ": no lineshape section");
  const auto& section = *scenario.lineshape;
  const auto params = resolve_lineshape(scenario, out);
  const auto grid = linear_grid(section.from, section.to, section.points);
  const auto values = thermal_lineshape(params, grid);

  Spectrum spectrum;
  for (std::size_t i = 0; i < grid.size(); ++i) spectrum.points.push_back({grid[i], values[i], 0.0, values[i]});
  spectrum.metadata["scenario"] = scenario.name;
  spectrum.metadata["model"] = "thermal lineshape (noiseless)";

  const double fwhm = sampled_fwhm(grid, values);
  out << "FWHM " << mhz_str(fwhm, 4) << " MHz, component centroid " << khz_str(component_centroid(params) - params.carrier)
      << " kHz from carrier (2pi)\n";
  spectrum.metadata["fwhm_hz"] = format_number(fwhm / kTwoPi);
  if (section.fit) {
    const auto fit = fit_delta_omega(grid, values, params.mean_phonons_x, params.mean_phonons_y, params.base_fwhm);
    out << "fit: dw " << khz_str(fit.delta_omega) << " kHz, carrier " << khz_str(fit.carrier) << " kHz, amplitude "
        << format_number(fit.amplitude, 6) << ", residual " << format_number(fit.residual, 3) << '\n';
    spectrum.metadata["fit_delta_omega_hz"] = format_number(fit.delta_omega / kTwoPi);
    spectrum.metadata["fit_carrier_hz"] = format_number(fit.carrier / kTwoPi);
  }
  emit_spectrum(spectrum, scenario.name, scenario.name + " thermal lineshape", opt, out);
  return kExitOk;
}

struct TrapCalcInputs {
  std::string scenario;
  double alpha = -1, beta = -1, rf_mhz = 18.153, mass_amu = kConstants.ion_mass_amu;
  double axial_khz = -1, radial1_khz = -1, radial2_khz = -1;
  double lambda1_nm = -1, lambda2_nm = -1, mode_khz = -1;
  double polarizability = 0.0;
  std::string level;
  double core_charge = 1.0;
};

int cmd_trap_calc(const TrapCalcInputs& in, const CommonOptions& opt, std::ostream& out) {
  double mass = in.mass_amu * kConstants.amu;
  TrapGeometry trap;
  std::optional<SecularFrequencies> measured;
  double polarizability = in.polarizability;
  std::optional<std::pair<double, double>> wavelengths;
  std::vector<std::pair<ManifoldKey, double>> quadrupole_levels;  // manifold, core charge
  if (!in.level.empty()) quadrupole_levels.emplace_back(parse_manifold(in.level), in.core_charge);
  if (in.lambda1_nm > 0 && in.lambda2_nm > 0) wavelengths = {in.lambda1_nm * 1e-9, in.lambda2_nm * 1e-9};

  if (!in.scenario.empty()) {
    const auto s = load_scenario(in.scenario);
    if (!s.trap) throw ConfigError(in.scenario + ": no trap section");
    mass = s.mass;
    trap = s.trap->geometry;
    measured = s.trap->secular;
    for (const auto& l : s.levels) {
      if (l.polarizability && polarizability == 0.0) polarizability = *l.polarizability;
      if (l.role == LevelRole::kRydberg && l.manifold.J.twice() > 1)
        quadrupole_levels.emplace_back(l.manifold, l.core_charge.value_or(1.0));
    }
    std::vector<double> lambdas;
    for (const auto& l : s.lasers)
      if (l.wavelength) lambdas.push_back(*l.wavelength);
    if (!wavelengths && lambdas.size() >= 2) wavelengths = {lambdas[0], lambdas[1]};
  } else if (in.axial_khz > 0 && in.radial1_khz > 0) {
    measured = SecularFrequencies{khz(in.axial_khz), khz(in.radial1_khz), khz(in.radial2_khz > 0 ? in.radial2_khz : in.radial1_khz)};
    trap = infer_gradients(*measured, mhz(in.rf_mhz), mass).geometry;
  } else {
    if (in.beta <= 0) throw ConfigError("trap-calc: give a scenario, --beta [--alpha], or --axial/--radial1");
    trap = {std::max(in.alpha, 0.0), in.beta, mhz(in.rf_mhz)};
  }

  ordered_json j;
  j["inputs"] = {{"alpha_V_per_m2", trap.alpha}, {"beta_V_per_m2", trap.beta},
                 {"rf_frequency_mhz", to_mhz(trap.omega_rf)}, {"mass_amu", mass / kConstants.amu}};
  out << "alpha = " << format_number(trap.alpha, 5) << " V/m^2, beta = " << format_number(trap.beta, 5)
      << " V/m^2, Omega = 2pi x " << mhz_str(trap.omega_rf, 3) << " MHz, mass = " << format_number(mass / kConstants.amu, 5)
      << " amu\n";
  const auto mp = mathieu_parameters(trap, mass);
  out << "Mathieu q = " << format_number(mp.q, 5) << ", a = " << format_number(mp.a, 5) << '\n';
  j["mathieu"] = {{"q", mp.q}, {"a", mp.a}};

  const double axial = axial_frequency(trap.beta, mass);
  out << "axial frequency = 2pi x " << khz_str(axial, 1) << " kHz\n";
  j["axial_khz"] = to_khz(axial);
  std::optional<double> radial;
  if (trap.alpha > 0) {
    radial = secular_frequencies(trap, mass).omega_radial_1;
    out << "radial frequency = 2pi x " << khz_str(*radial, 1) << " kHz (lowest order, both radial axes)\n";
    j["radial_khz"] = to_khz(*radial);
  } else {
    out << "radial frequency: none (alpha = 0 gives no radial confinement)\n";
  }
  if (measured) j["radial_asymmetry_khz"] = to_khz(measured->omega_radial_2 - measured->omega_radial_1);

  if (wavelengths) {
    const double mode = in.mode_khz > 0 ? khz(in.mode_khz) : (measured ? measured->omega_axial : axial);
    const double eta = lamb_dicke(wavelengths->first, wavelengths->second, BeamGeometry::kCounterPropagating, mass, mode);
    out << "Lamb-Dicke parameter (counter-propagating, mode 2pi x " << khz_str(mode, 1) << " kHz) = "
        << format_number(eta, 4) << '\n';
    j["lamb_dicke"] = eta;
  }
  if (polarizability != 0.0) {
    std::vector<double> modes;
    if (measured) {
      modes = {measured->omega_radial_1, measured->omega_radial_2};
    } else if (radial) {
      modes = {*radial};
    }
    auto shifts = ordered_json::array();
    for (double w0 : modes) {
      const auto mod = modified_radial_frequency(w0, trap, polarizability, mass);
      out << "radial mode 2pi x " << khz_str(w0, 1) << " kHz: dw = 2pi x " << khz_str(mod.delta_omega) << " kHz\n";
      shifts.push_back({{"omega0_khz", to_khz(w0)}, {"delta_omega_khz", to_khz(mod.delta_omega)}});
    }
    j["polarizability_au"] = polarizability;
    j["modified_radial"] = shifts;
  }
  auto couplings = ordered_json::array();
  for (const auto& [key, ze] : quadrupole_levels) {
    if (key.J.twice() <= 1) {
      out << key.label() << ": J = 1/2 has no quadrupole moment\n";
      continue;
    }
    const double q = quadrupole_moment(key.n, key.L, key.J, ze);
    const double q_au = q / (kConstants.e * kConstants.a0 * kConstants.a0);
    const double shift = quadrupole_static_shift(key.J, HalfInt::half(1), trap.beta, q);
    const double coupling = quadrupole_rf_coupling(key.J, HalfInt::half(-3), trap.alpha, q);
    out << key.label() << " (core charge " << format_number(ze, 3) << "): Q = " << format_number(q_au, 6)
        << " e a0^2, static shift |E_s|/hbar = 2pi x " << khz_str(std::abs(shift)) << " kHz, RF coupling C = 2pi x "
        << mhz_str(std::abs(coupling), 3) << " MHz";
    if (shift != 0.0) out << ", C/|E_s| = " << format_number(std::abs(coupling / shift), 5);
    out << '\n';
    couplings.push_back({{"level", key.label()},
                         {"core_charge", ze},
                         {"quadrupole_e_a0sq", q_au},
                         {"static_shift_khz", to_khz(std::abs(shift))},
                         {"rf_coupling_mhz", to_mhz(std::abs(coupling))}});
  }
  if (!couplings.empty()) j["quadrupole"] = couplings;
  if (opt.format == "json") out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_constants(const CommonOptions& opt, std::ostream& out) {
  const auto& c = kConstants;
  ordered_json j = {{"e_C", c.e},
                    {"a0_m", c.a0},
                    {"hbar_Js", c.hbar},
                    {"mu_B_J_per_T", c.mu_B},
                    {"amu_kg", c.amu},
                    {"hartree_J", c.hartree},
                    {"ion_mass_amu", c.ion_mass_amu},
                    {"polarizability_au_C2m2_per_J", c.polarizability_au()}};
  if (opt.format == "json") {
    out << j.dump(2) << '\n';
  } else {
    out << "CODATA 2018 constants (SI)\n";
    for (const auto& [k, v] : j.items()) out << "  " << std::left << std::setw(32) << k << format_number(v.get<double>(), 12) << '\n';
  }
  return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const auto scenario = load_scenario(path);  // schema errors throw with file/line context
  const auto issues = check_scenario(scenario);
  bool failed = false;
  for (const auto& issue : issues) {
    out << (issue.error ? "error: " : "warning: ") << issue.message << '\n';
    failed = failed || issue.error;
  }
  if (!failed) out << path << ": valid\n";
  return failed ? kExitValidation : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rydberg-ion spectroscopy simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonOptions opt;
  std::uint64_t seed = 0;
  int k_max = 0;
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_flag("--plot", opt.plot, "Write an SVG plot per spectrum");
  auto* seed_opt = app.add_option("--seed", seed, "Base seed for projection noise (overrides the scenario)");
  app.add_option("--threads", opt.threads, "Worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
  auto* kmax_opt = app.add_option("--kmax", k_max, "Floquet truncation |k| <= kmax")->check(CLI::Range(1, 50));

  std::string scenario;
  auto* sim = app.add_subcommand("simulate-spectrum", "Scan the master-equation model and write the spectrum");
  sim->add_option("scenario", scenario, "Scenario file")->required();
  auto* flo = app.add_subcommand("floquet-eigen", "Floquet resonances of the Rydberg manifold");
  flo->add_option("scenario", scenario, "Scenario file")->required();
  auto* lin = app.add_subcommand("lineshape", "Thermal lineshape model and optional dw fit");
  lin->add_option("scenario", scenario, "Scenario file")->required();
  auto* val = app.add_subcommand("validate", "Schema and physics checks of a scenario");
  val->add_option("scenario", scenario, "Scenario file")->required();
  auto* con = app.add_subcommand("constants", "Print the physical constants table");

  TrapCalcInputs tc;
  auto* trap = app.add_subcommand("trap-calc", "Secular frequencies, Lamb-Dicke parameter and Rydberg trap shift");
  trap->add_option("scenario", tc.scenario, "Scenario file with a trap section");
  trap->add_option("--alpha", tc.alpha, "RF field gradient (V/m^2)");
  trap->add_option("--beta", tc.beta, "Static field gradient (V/m^2)");
  trap->add_option("--rf", tc.rf_mhz, "RF drive frequency Omega / 2pi (MHz)");
  trap->add_option("--mass", tc.mass_amu, "Ion mass (amu)");
  trap->add_option("--axial", tc.axial_khz, "Measured axial frequency / 2pi (kHz)");
  trap->add_option("--radial1", tc.radial1_khz, "Measured radial frequency 1 / 2pi (kHz)");
  trap->add_option("--radial2", tc.radial2_khz, "Measured radial frequency 2 / 2pi (kHz)");
  trap->add_option("--lambda1", tc.lambda1_nm, "First excitation wavelength (nm)");
  trap->add_option("--lambda2", tc.lambda2_nm, "Second excitation wavelength (nm)");
  trap->add_option("--mode", tc.mode_khz, "Mode frequency / 2pi for the Lamb-Dicke parameter (kHz)");
  trap->add_option("--polarizability", tc.polarizability, "Rydberg polarizability (atomic units)");
  trap->add_option("--level", tc.level, "Rydberg manifold for the quadrupole couplings, e.g. 24D3/2");
  trap->add_option("--core-charge", tc.core_charge, "Core charge used in the hydrogenic quadrupole estimate");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  if (seed_opt->count()) opt.seed = seed;
  if (kmax_opt->count()) opt.k_max = k_max;

  try {
    if (*sim) return cmd_simulate(scenario, opt, out);
    if (*flo) return cmd_floquet(scenario, opt, out);
    if (*lin) return cmd_lineshape(scenario, opt, out);
    if (*val) return cmd_validate(scenario, out);
    if (*con) return cmd_constants(opt, out);
    if (*trap) return cmd_trap_calc(tc, opt, out);
  } catch (const ConfigError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace rydion::cli
