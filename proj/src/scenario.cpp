#include "rydion/scenario.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rydion/error.hpp"
#include "rydion/units.hpp"

namespace rydion {

namespace {

/// Wraps a YAML node with enough context to report "<source>:<line>: <path>: message".
class Field {
 public:
  Field(YAML::Node node, std::string path, const std::string* source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {}

  [[noreturn]] void fail(const std::string& message) const {
    const int line = node_.Mark().line >= 0 ? node_.Mark().line + 1 : 0;
    throw ConfigError(*source_ + ":" + std::to_string(line) + ": " + path_ + ": " + message);
  }

  [[nodiscard]] int line() const { return node_.Mark().line + 1; }
  [[nodiscard]] const std::string& path() const { return path_; }
  [[nodiscard]] const YAML::Node& node() const { return node_; }
  [[nodiscard]] const std::string& source() const { return *source_; }

  void require_map(std::initializer_list<std::string_view> allowed) const {
    if (!node_.IsMap()) fail("expected a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        Field(kv.first, path_ + "." + key, source_).fail("unknown key");
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return node_.IsMap() && node_[key]; }

  [[nodiscard]] Field at(const std::string& key) const {
    if (!has(key)) fail("missing required key '" + key + "'");
    return {node_[key], path_ + "." + key, source_};
  }

  [[nodiscard]] std::optional<Field> maybe(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return Field(node_[key], path_ + "." + key, source_);
  }

  [[nodiscard]] std::vector<Field> items() const {
    if (!node_.IsSequence()) fail("expected a list");
    std::vector<Field> out;
    for (std::size_t i = 0; i < node_.size(); ++i)
      out.emplace_back(node_[i], path_ + "[" + std::to_string(i) + "]", source_);
    return out;
  }

  [[nodiscard]] std::string text() const {
    if (!node_.IsScalar()) fail("expected a scalar");
    return node_.Scalar();
  }

  [[nodiscard]] double quantity(Dimension d) const {
    try {
      return parse_quantity(text(), d);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  [[nodiscard]] long long integer() const {
    try {
      std::size_t used = 0;
      const auto s = text();
      const long long v = std::stoll(s, &used);
      if (used != s.size()) fail("expected an integer, got '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected an integer, got '" + text() + "'");
    }
  }

  [[nodiscard]] bool boolean() const {
    const auto s = text();
    if (s == "true" || s == "yes") return true;
    if (s == "false" || s == "no") return false;
    fail("expected true or false, got '" + s + "'");
  }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string* source_;
};

double probability(const Field& f) {
  const double p = f.quantity(Dimension::kDimensionless);
  if (p < 0 || p > 1) f.fail("must lie in [0, 1]");
  return p;
}

double positive(const Field& f, Dimension d) {
  const double v = f.quantity(d);
  if (!(v > 0)) f.fail("must be positive");
  return v;
}

double non_negative(const Field& f, Dimension d) {
  const double v = f.quantity(d);
  if (v < 0) f.fail("must be non-negative");
  return v;
}

ManifoldKey manifold_field(const Field& f) {
  try {
    return parse_manifold(f.text());
  } catch (const ConfigError& e) {
    f.fail(e.what());
  }
}

HalfInt half_int_field(const Field& f) {
  try {
    return parse_half_int(f.text());
  } catch (const ConfigError& e) {
    f.fail(e.what());
  }
}

LevelSpec parse_level(const Field& f) {
  f.require_map({"manifold", "role", "sublevels", "core_charge", "g_factor", "polarizability"});
  LevelSpec level;
  level.line = f.line();
  level.manifold = manifold_field(f.at("manifold"));
  const auto role_text = f.at("role").text();
  const auto role = parse_level_role(role_text);
  if (!role) f.at("role").fail("unknown role '" + role_text + "' (initial, intermediate, rydberg, ground, shelf)");
  level.role = *role;
  if (auto s = f.maybe("sublevels")) {
    for (const auto& item : s->items()) {
      const HalfInt m = half_int_field(item);
      if (!valid_projection(level.manifold.J, m)) item.fail("mJ = " + m.str() + " not allowed for J = " + level.manifold.J.str());
      level.sublevels.push_back(m);
    }
    if (level.sublevels.empty()) s->fail("needs at least one sublevel");
  }
  if (auto c = f.maybe("core_charge")) level.core_charge = positive(*c, Dimension::kDimensionless);
  if (auto g = f.maybe("g_factor")) level.g_factor = g->quantity(Dimension::kDimensionless);
  if (auto p = f.maybe("polarizability")) level.polarizability = p->quantity(Dimension::kPolarizability);
  if (level.role == LevelRole::kRydberg && level.manifold.n < 20) f.fail("Rydberg levels need n >= 20");
  return level;
}

Polarization parse_polarization(const Field& f) {
  if (f.node().IsMap()) {
    f.require_map({"minus", "pi", "plus"});
    Polarization p;
    p.weights = {0.0, 0.0, 0.0};
    if (auto m = f.maybe("minus")) p.weights[0] = m->quantity(Dimension::kDimensionless);
    if (auto m = f.maybe("pi")) p.weights[1] = m->quantity(Dimension::kDimensionless);
    if (auto m = f.maybe("plus")) p.weights[2] = m->quantity(Dimension::kDimensionless);
    return p;
  }
  const auto s = f.text();
  if (s == "sigma+") return Polarization::sigma_plus();
  if (s == "sigma-") return Polarization::sigma_minus();
  if (s == "sigma+-") return Polarization::sigma_both();
  if (s == "pi") return Polarization::pi();
  f.fail("unknown polarization '" + s + "' (sigma+, sigma-, sigma+-, pi, or {minus, pi, plus} weights)");
}

LaserSpec parse_laser(const Field& f) {
  f.require_map({"name", "lower", "upper", "wavelength", "rabi", "detuning", "polarization", "propagation"});
  LaserSpec laser;
  laser.line = f.line();
  auto& d = laser.drive;
  d.name = f.at("name").text();
  d.lower = manifold_field(f.at("lower"));
  d.upper = manifold_field(f.at("upper"));
  d.reference_rabi = non_negative(f.at("rabi"), Dimension::kAngularFrequency);
  d.detuning = f.has("detuning") ? f.at("detuning").quantity(Dimension::kAngularFrequency) : 0.0;
  d.polarization = parse_polarization(f.at("polarization"));
  if (auto w = f.maybe("wavelength")) laser.wavelength = positive(*w, Dimension::kLength);
  const auto propagation = f.has("propagation") ? f.at("propagation").text() : std::string("+z");
  if (propagation == "+z") {
    d.propagation_sign = 1;
  } else if (propagation == "-z") {
    d.propagation_sign = -1;
  } else if (propagation == "transverse") {
    d.axis_aligned = false;
  } else {
    f.at("propagation").fail("expected +z, -z or transverse");
  }
  try {
    validate(d);
  } catch (const ConfigError& e) {
    f.fail(e.what());
  }
  return laser;
}

TrapSpec parse_trap(const Field& f, double mass) {
  f.require_map({"rf_frequency", "secular", "gradients"});
  TrapSpec trap;
  trap.line = f.line();
  const double omega_rf = positive(f.at("rf_frequency"), Dimension::kAngularFrequency);
  if (f.has("secular") == f.has("gradients")) f.fail("give exactly one of 'secular' or 'gradients'");
  try {
    if (auto s = f.maybe("secular")) {
      s->require_map({"axial", "radial_1", "radial_2"});
      SecularFrequencies sec{positive(s->at("axial"), Dimension::kAngularFrequency),
                             positive(s->at("radial_1"), Dimension::kAngularFrequency),
                             positive(s->at("radial_2"), Dimension::kAngularFrequency)};
      const auto inferred = infer_gradients(sec, omega_rf, mass);
      trap.geometry = inferred.geometry;
      trap.radial_asymmetry = inferred.radial_asymmetry;
      trap.secular = sec;
    } else {
      const auto g = f.at("gradients");
      g.require_map({"alpha", "beta"});
      trap.geometry = {non_negative(g.at("alpha"), Dimension::kFieldGradient),
                       positive(g.at("beta"), Dimension::kFieldGradient), omega_rf};
    }
  } catch (const NumericalError& e) {
    f.fail(e.what());
  } catch (const DomainError& e) {
    f.fail(e.what());
  }
  return trap;
}

DissipationSpec parse_dissipation(const Field& f) {
  f.require_map({"intermediate_linewidth", "intermediate_branching_to_ground", "rydberg_linewidth",
                 "rydberg_dephasing", "initial_lifetime"});
  DissipationSpec d;
  if (auto x = f.maybe("intermediate_linewidth")) d.intermediate_linewidth = non_negative(*x, Dimension::kAngularFrequency);
  if (auto x = f.maybe("intermediate_branching_to_ground")) d.intermediate_branching_to_ground = probability(*x);
  if (auto x = f.maybe("rydberg_linewidth")) d.rydberg_linewidth = non_negative(*x, Dimension::kAngularFrequency);
  if (auto x = f.maybe("rydberg_dephasing")) d.rydberg_dephasing = non_negative(*x, Dimension::kAngularFrequency);
  if (auto x = f.maybe("initial_lifetime")) d.initial_decay_rate = 1.0 / positive(*x, Dimension::kTime);
  return d;
}

PulseSpec parse_pulse(const Field& f) {
  f.require_map({"duration", "initial", "intermediate", "rtol", "atol"});
  PulseSpec p;
  p.duration = positive(f.at("duration"), Dimension::kTime);
  if (auto init = f.maybe("initial")) {
    if (init->node().IsScalar()) {
      if (init->text() != "equal") init->fail("expected 'equal' or a map from mJ to population");
    } else {
      if (!init->node().IsMap()) init->fail("expected 'equal' or a map from mJ to population");
      double total = 0.0;
      for (const auto& kv : init->node()) {
        const Field value(kv.second, init->path() + "." + kv.first.Scalar(), &init->source());
        const HalfInt m = half_int_field(Field(kv.first, value.path(), &init->source()));
        const double w = value.quantity(Dimension::kDimensionless);
        if (w < 0) value.fail("populations must be non-negative");
        total += w;
        p.populations.emplace_back(m, w);
      }
      if (std::abs(total - 1.0) > 1e-9) init->fail("populations must sum to 1");
    }
  }
  if (auto x = f.maybe("intermediate")) {
    const auto s = x->text();
    if (s == "explicit") {
      p.intermediate = IntermediateTreatment::kExplicit;
    } else if (s == "eliminated") {
      p.intermediate = IntermediateTreatment::kEliminated;
    } else {
      x->fail("expected 'explicit' or 'eliminated'");
    }
  }
  if (auto x = f.maybe("rtol")) p.rtol = positive(*x, Dimension::kDimensionless);
  if (auto x = f.maybe("atol")) p.atol = positive(*x, Dimension::kDimensionless);
  return p;
}

ScanSection parse_scan(const Field& f) {
  f.require_map({"laser", "from", "to", "points", "trials", "seed"});
  ScanSection s;
  s.line = f.line();
  s.laser = f.at("laser").text();
  s.from = f.at("from").quantity(Dimension::kAngularFrequency);
  s.to = f.at("to").quantity(Dimension::kAngularFrequency);
  const auto points = f.at("points").integer();
  if (points < 5) f.at("points").fail("need at least 5 points");
  s.points = static_cast<int>(points);
  if (!(s.to > s.from)) f.fail("'to' must exceed 'from'");
  if (auto t = f.maybe("trials")) {
    const auto trials = t->integer();
    if (trials < 1) t->fail("trials must be a positive integer");
    s.trials = static_cast<int>(trials);
  }
  if (auto seed = f.maybe("seed")) {
    const auto v = seed->integer();
    if (v < 0) seed->fail("seed must be non-negative");
    s.seed = static_cast<std::uint64_t>(v);
  }
  return s;
}

DetectionModel parse_detection(const Field& f) {
  f.require_map({"scheme", "rydberg_branching_to_ground"});
  DetectionModel d;
  if (auto s = f.maybe("scheme")) {
    const auto t = s->text();
    if (t == "shelving_4D32") {
      d.scheme = DetectionScheme::kShelving4D32;
    } else if (t == "direct_4D52") {
      d.scheme = DetectionScheme::kDirect4D52;
    } else {
      s->fail("expected shelving_4D32 or direct_4D52");
    }
  }
  if (auto b = f.maybe("rydberg_branching_to_ground")) d.rydberg_branching_to_ground = probability(*b);
  return d;
}

FloquetSection parse_floquet(const Field& f) {
  f.require_map({"k_max", "min_weight"});
  FloquetSection s;
  if (auto k = f.maybe("k_max")) {
    const auto v = k->integer();
    if (v < 1 || v > 50) k->fail("k_max must lie in [1, 50]");
    s.k_max = static_cast<int>(v);
  }
  if (auto w = f.maybe("min_weight")) s.min_weight = probability(*w);
  return s;
}

LineshapeSection parse_lineshape(const Field& f) {
  f.require_map({"carrier", "base_fwhm", "mean_phonons", "delta_omega", "amplitude", "from", "to", "points", "fit"});
  LineshapeSection s;
  auto& p = s.params;
  if (auto c = f.maybe("carrier")) p.carrier = c->quantity(Dimension::kAngularFrequency);
  p.base_fwhm = positive(f.at("base_fwhm"), Dimension::kAngularFrequency);
  const auto phonons = f.at("mean_phonons").items();
  if (phonons.size() != 2) f.at("mean_phonons").fail("expected two values [n_x, n_y]");
  p.mean_phonons_x = non_negative(phonons[0], Dimension::kDimensionless);
  p.mean_phonons_y = non_negative(phonons[1], Dimension::kDimensionless);
  const auto dw = f.at("delta_omega");
  if (dw.node().IsScalar() && dw.text() == "predict") {
    s.predict_delta_omega = true;
  } else if (dw.node().IsSequence()) {
    const auto pair = dw.items();
    if (pair.size() != 2) dw.fail("expected one value, two values [x, y] or 'predict'");
    p.delta_omega_x = pair[0].quantity(Dimension::kAngularFrequency);
    p.delta_omega_y = pair[1].quantity(Dimension::kAngularFrequency);
  } else {
    p.delta_omega_x = p.delta_omega_y = dw.quantity(Dimension::kAngularFrequency);
  }
  if (auto a = f.maybe("amplitude")) p.amplitude = positive(*a, Dimension::kDimensionless);
  s.from = f.at("from").quantity(Dimension::kAngularFrequency);
  s.to = f.at("to").quantity(Dimension::kAngularFrequency);
  const auto points = f.at("points").integer();
  if (points < 5) f.at("points").fail("need at least 5 points");
  s.points = static_cast<int>(points);
  if (!(s.to > s.from)) f.fail("'to' must exceed 'from'");
  if (auto x = f.maybe("fit")) s.fit = x->boolean();
  return s;
}

Scenario parse_root(const YAML::Node& root, const std::string& source) {
  const Field f(root, "scenario", &source);
  f.require_map({"name", "description", "ion", "levels", "trap", "field", "lasers", "dissipation", "pulse", "scan",
                 "detection", "floquet", "lineshape"});
  Scenario s;
  s.source = source;
  s.name = f.at("name").text();
  if (auto d = f.maybe("description")) s.description = d->text();
  if (auto ion = f.maybe("ion")) {
    ion->require_map({"mass"});
    if (auto m = ion->maybe("mass")) s.mass = positive(*m, Dimension::kMass);
  }
  if (auto levels = f.maybe("levels")) {
    std::set<ManifoldKey> seen;
    for (const auto& item : levels->items()) {
      auto level = parse_level(item);
      if (!seen.insert(level.manifold).second) item.fail("manifold " + level.manifold.label() + " listed twice");
      s.levels.push_back(std::move(level));
    }
  }
  if (auto t = f.maybe("trap")) s.trap = parse_trap(*t, s.mass);
  if (auto b = f.maybe("field")) {
    b->require_map({"magnetic"});
    s.field = non_negative(b->at("magnetic"), Dimension::kMagneticField);
  }
  if (auto lasers = f.maybe("lasers")) {
    for (const auto& item : lasers->items()) {
      auto laser = parse_laser(item);
      for (const auto& other : s.lasers)
        if (other.drive.name == laser.drive.name) item.fail("duplicate laser name '" + laser.drive.name + "'");
      s.lasers.push_back(std::move(laser));
    }
  }
  if (auto d = f.maybe("dissipation")) s.dissipation = parse_dissipation(*d);
  if (auto p = f.maybe("pulse")) s.pulse = parse_pulse(*p);
  if (auto sc = f.maybe("scan")) {
    s.scan = parse_scan(*sc);
    const bool known = std::any_of(s.lasers.begin(), s.lasers.end(),
                                   [&](const LaserSpec& l) { return l.drive.name == s.scan->laser; });
    if (!known) sc->at("laser").fail("no laser named '" + s.scan->laser + "'");
  }
  if (auto d = f.maybe("detection")) s.detection = parse_detection(*d);
  if (auto fl = f.maybe("floquet")) s.floquet = parse_floquet(*fl);
  if (auto ls = f.maybe("lineshape")) s.lineshape = parse_lineshape(*ls);

  for (const auto& laser : s.lasers) {
    for (const auto& key : {laser.drive.lower, laser.drive.upper}) {
      const bool present = std::any_of(s.levels.begin(), s.levels.end(),
                                       [&](const LevelSpec& l) { return l.manifold == key; });
      if (!present)
        throw ConfigError(source + ":" + std::to_string(laser.line) + ": laser '" + laser.drive.name +
                          "' refers to manifold " + key.label() + " missing from levels");
    }
  }
  return s;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

HalfInt parse_half_int(const std::string& text) {
  static const std::regex pattern(R"(^\s*([+-]?)(\d+)(/2)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw ConfigError("cannot parse angular momentum '" + text + "'");
  const int magnitude = std::stoi(m[2].str());
  const int sign = m[1].str() == "-" ? -1 : 1;
  if (m[3].matched) {
    if (magnitude % 2 == 0) throw ConfigError("'" + text + "' is not a half-odd value; write it as an integer");
    return HalfInt::from_twice(sign * magnitude);
  }
  return HalfInt::integer(sign * magnitude);
}

ManifoldKey parse_manifold(const std::string& label) {
  static const std::regex pattern(R"(^\s*(\d+)([SPDFGH])(\d+(?:/2)?)\s*$)");
  std::smatch m;
  if (!std::regex_match(label, m, pattern))
    throw ConfigError("cannot parse manifold '" + label + "' (expected e.g. 24D3/2)");
  static const std::string letters = "SPDFGH";
  ManifoldKey key;
  key.n = std::stoi(m[1].str());
  key.L = HalfInt::integer(static_cast<int>(letters.find(m[2].str()[0])));
  key.J = parse_half_int(m[3].str());
  if (key.n < 1 || key.L.twice() / 2 >= key.n) throw ConfigError("manifold '" + label + "': need 0 <= L < n");
  if (!triangle(key.L, HalfInt::half(1), key.J)) throw ConfigError("manifold '" + label + "': J incompatible with L and S = 1/2");
  return key;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": YAML syntax error: " + e.msg);
  }
  Scenario s = parse_root(root, source);
  s.hash = fnv1a(text);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

std::vector<ValidationIssue> check_scenario(const Scenario& s) {
  std::vector<ValidationIssue> issues;
  auto error = [&](std::string m) { issues.push_back({true, std::move(m)}); };
  auto warn = [&](std::string m) { issues.push_back({false, std::move(m)}); };

  auto count_role = [&](LevelRole role) {
    return std::count_if(s.levels.begin(), s.levels.end(), [&](const LevelSpec& l) { return l.role == role; });
  };

  if (s.trap) {
    try {
      const auto q = mathieu_parameters(s.trap->geometry, s.mass).q;
      secular_frequencies(s.trap->geometry, s.mass);
      if (q > 0.4) warn("Mathieu q = " + std::to_string(q) + " > 0.4: lowest-order secular frequencies degrade");
    } catch (const std::exception& e) {
      error(std::string("trap: ") + e.what());
    }
  }

  for (const auto& laser : s.lasers) {
    try {
      validate(laser.drive);
    } catch (const ConfigError& e) {
      error(std::string(e.what()) + " (beams along the field axis cannot drive pi transitions)");
    }
  }

  // Far-detuned intermediate: the two-photon picture and the elimination need |detuning| >> Rabi.
  for (const auto& laser : s.lasers) {
    const bool to_intermediate = std::any_of(s.levels.begin(), s.levels.end(), [&](const LevelSpec& l) {
      return l.manifold == laser.drive.upper && l.role == LevelRole::kIntermediate;
    });
    if (!to_intermediate) continue;
    double strongest = laser.drive.reference_rabi;
    for (const auto& other : s.lasers)
      if (other.drive.lower == laser.drive.upper) strongest = std::max(strongest, other.drive.reference_rabi);
    if (std::abs(laser.drive.detuning) < 3.0 * strongest)
      warn("laser '" + laser.drive.name + "': intermediate detuning is not large against the Rabi frequencies; "
           "adiabatic elimination and the rotating-wave picture may be inaccurate");
  }

  if (s.pulse || s.scan) {
    if (count_role(LevelRole::kInitial) == 0) error("levels: no initial manifold");
    if (count_role(LevelRole::kRydberg) == 0) error("levels: no Rydberg manifold");
    if (count_role(LevelRole::kGround) == 0) error("detection: needs a level with role 'ground' as accumulator");
    if (s.detection.scheme == DetectionScheme::kShelving4D32 && count_role(LevelRole::kShelf) == 0)
      error("detection: shelving scheme needs a level with role 'shelf' as accumulator");
    if (!s.pulse) error("pulse: section required for spectrum simulation");
    if (s.scan && s.scan->trials < 1) error("scan: trials must be positive");
  }
  for (const auto& l : s.levels) {
    if (l.role == LevelRole::kRydberg && l.manifold.J.twice() > 1 && !l.core_charge)
      warn("level " + l.manifold.label() + ": no core_charge given, quadrupole moment uses Ze = 1");
  }
  if (s.lineshape && s.lineshape->predict_delta_omega) {
    const bool has_pol = std::any_of(s.levels.begin(), s.levels.end(),
                                     [](const LevelSpec& l) { return l.polarizability.has_value(); });
    if (!s.trap || !s.trap->secular) error("lineshape: 'predict' needs a trap given by secular frequencies");
    if (!has_pol) error("lineshape: 'predict' needs a level with a polarizability");
  }
  return issues;
}

}  // namespace rydion
