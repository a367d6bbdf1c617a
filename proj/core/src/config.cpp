// Strict INI-style parser for run configurations. Every failure names the
// offending key (and line) so batch runs fail loudly instead of silently
// dropping a misspelled setting.
#include "zcrit/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "zcrit/charge.hpp"

namespace zcrit {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

std::string key_context(const std::string& key, const std::string& label) {
  return "key '" + key + "' in [" + label + "]";
}

long long parse_integer(int line, const std::string& key,
                        const std::string& label, const std::string& value) {
  std::size_t used = 0;
  long long parsed = 0;
  try {
    parsed = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    fail(line, "value '" + value + "' for " + key_context(key, label) +
                   " is not an integer");
  return parsed;
}

double parse_real(int line, const std::string& key, const std::string& label,
                  const std::string& value) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    fail(line, "value '" + value + "' for " + key_context(key, label) +
                   " is not a number");
  return parsed;
}

std::uint64_t parse_seed(int line, const std::string& key,
                         const std::string& label, const std::string& value) {
  std::size_t used = 0;
  unsigned long long parsed = 0;
  try {
    parsed = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.front() == '-')
    fail(line, "value '" + value + "' for " + key_context(key, label) +
                   " is not a non-negative integer");
  return parsed;
}

[[noreturn]] void unknown_key(int line, const std::string& key,
                              const std::string& label,
                              const std::string& known) {
  fail(line, "unknown " + key_context(key, label) + "; known keys: " + known);
}

}  // namespace

const GeometrySection* RunConfig::find_geometry(const std::string& name) const {
  for (const auto& g : geometries)
    if (g.name == name) return &g;
  return nullptr;
}

const ChargeSection* RunConfig::find_charge(const std::string& name) const {
  for (const auto& c : charges)
    if (c.name == name) return &c;
  return nullptr;
}

double RunConfig::tolerance_for(const std::string& identity,
                                double fallback) const {
  if (global_tolerance_set) return global_tolerance;
  auto it = tolerance_overrides.find(lower(identity));
  return it == tolerance_overrides.end() ? fallback : it->second;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"all", "manifold", "bundle",
                                                 "family"};
  return names;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  enum class Kind { None, Run, Tolerance, Geometry, Charge, Bundle, Family };
  Kind kind = Kind::None;
  std::string label;  // normalized header text for messages
  int section_line = 0;
  std::set<std::string> seen_keys;
  std::set<std::string> seen_sections;
  GeometrySection geometry;
  ChargeSection charge;
  BundleSection bundle;
  FamilySection family;

  auto finish_section = [&]() {
    switch (kind) {
      case Kind::Geometry:
        if (geometry.model.empty())
          fail(section_line,
               "section [" + label + "] is missing required key 'model'");
        config.geometries.push_back(geometry);
        break;
      case Kind::Charge:
        if (charge.builtin.empty())
          fail(section_line,
               "section [" + label + "] is missing required key 'builtin'");
        config.charges.push_back(charge);
        break;
      case Kind::Bundle:
        if (bundle.geometry.empty())
          fail(section_line,
               "section [" + label + "] is missing required key 'geometry'");
        if (bundle.charge.empty())
          fail(section_line,
               "section [" + label + "] is missing required key 'charge'");
        config.bundles.push_back(bundle);
        break;
      case Kind::Family:
        if (family.charge.empty())
          fail(section_line,
               "section [" + label + "] is missing required key 'charge'");
        config.families.push_back(family);
        break;
      default:
        break;
    }
    kind = Kind::None;
    seen_keys.clear();
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        fail(line_no, "unterminated section header '" + line + "'");
      finish_section();
      std::string inner = trim(line.substr(1, line.size() - 2));
      std::size_t space = inner.find_first_of(" \t");
      std::string kind_word =
          lower(space == std::string::npos ? inner : inner.substr(0, space));
      std::string name =
          space == std::string::npos ? "" : trim(inner.substr(space));
      section_line = line_no;
      label = name.empty() ? kind_word : kind_word + " " + name;
      if (!seen_sections.insert(label).second)
        fail(line_no, "duplicate section [" + label + "]");

      if (kind_word == "run" || kind_word == "tolerance") {
        if (!name.empty())
          fail(line_no, "section [" + kind_word + "] takes no name");
        kind = kind_word == "run" ? Kind::Run : Kind::Tolerance;
      } else if (kind_word == "geometry" || kind_word == "charge" ||
                 kind_word == "bundle" || kind_word == "family") {
        if (name.empty())
          fail(line_no, "section [" + kind_word + "] needs a name, e.g. [" +
                            kind_word + " main]");
        if (kind_word == "geometry") {
          geometry = GeometrySection{};
          geometry.name = name;
          kind = Kind::Geometry;
        } else if (kind_word == "charge") {
          charge = ChargeSection{};
          charge.name = name;
          kind = Kind::Charge;
        } else if (kind_word == "bundle") {
          bundle = BundleSection{};
          bundle.name = name;
          kind = Kind::Bundle;
        } else {
          family = FamilySection{};
          family.name = name;
          kind = Kind::Family;
        }
      } else {
        fail(line_no, "unknown section kind '" + kind_word +
                          "'; known: run, tolerance, geometry, charge, "
                          "bundle, family");
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(line_no, "expected 'key = value', got '" + line + "'");
    std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key before '='");
    if (value.empty())
      fail(line_no, "key '" + key + "' in [" + label + "] has an empty value");
    if (kind == Kind::None)
      fail(line_no, "key '" + key + "' appears outside any section");
    if (!seen_keys.insert(key).second)
      fail(line_no, "duplicate key '" + key + "' in [" + label + "]");

    switch (kind) {
      case Kind::Run:
        if (key == "suite") {
          config.suite = lower(value);
        } else if (key == "seed") {
          config.seed = parse_seed(line_no, key, label, value);
          config.seed_set = true;
        } else if (key == "out") {
          config.output_dir = value;
        } else if (key == "samples") {
          config.samples =
              static_cast<int>(parse_integer(line_no, key, label, value));
        } else {
          unknown_key(line_no, key, label, "suite, seed, out, samples");
        }
        break;
      case Kind::Tolerance: {
        double tol = parse_real(line_no, key, label, value);
        if (!(tol > 0.0))
          fail(line_no,
               "tolerance override '" + key + "' must be positive");
        config.tolerance_overrides[key] = tol;
        break;
      }
      case Kind::Geometry:
        if (key == "model") {
          geometry.model = lower(value);
        } else if (key == "dimension") {
          geometry.dimension =
              static_cast<int>(parse_integer(line_no, key, label, value));
        } else if (key == "grid") {
          geometry.grid =
              static_cast<int>(parse_integer(line_no, key, label, value));
        } else if (key == "amplitude") {
          geometry.amplitude = parse_real(line_no, key, label, value);
        } else {
          unknown_key(line_no, key, label,
                      "model, dimension, grid, amplitude");
        }
        break;
      case Kind::Charge:
        if (key == "builtin") {
          charge.builtin = lower(value);
        } else {
          unknown_key(line_no, key, label, "builtin");
        }
        break;
      case Kind::Bundle:
        if (key == "geometry") {
          bundle.geometry = value;
        } else if (key == "charge") {
          bundle.charge = value;
        } else if (key == "rank") {
          bundle.rank =
              static_cast<int>(parse_integer(line_no, key, label, value));
        } else if (key == "degree") {
          bundle.degree = parse_integer(line_no, key, label, value);
        } else {
          unknown_key(line_no, key, label, "geometry, charge, rank, degree");
        }
        break;
      case Kind::Family:
        if (key == "charge") {
          family.charge = value;
        } else if (key == "nodes") {
          family.nodes =
              static_cast<int>(parse_integer(line_no, key, label, value));
        } else if (key == "amplitude") {
          family.amplitude = parse_real(line_no, key, label, value);
        } else if (key == "t-min") {
          family.t_min = parse_real(line_no, key, label, value);
        } else if (key == "t-max") {
          family.t_max = parse_real(line_no, key, label, value);
        } else {
          unknown_key(line_no, key, label,
                      "charge, nodes, amplitude, t-min, t-max");
        }
        break;
      default:
        break;
    }
  }
  finish_section();
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read configuration file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

namespace {

[[noreturn]] void section_error(const std::string& label,
                                const std::string& message) {
  throw ConfigError("[" + label + "] " + message);
}

// Kind of a builtin charge name, via the real registry so the two stay in
// sync; unknown names surface as ConfigError naming the section.
ChargeKind builtin_kind(const std::string& label, const std::string& builtin) {
  try {
    return builtin_charge(builtin, 1).kind;
  } catch (const NameError&) {
    std::string known;
    for (const auto& name : builtin_charges()) {
      if (!known.empty()) known += ", ";
      known += name;
    }
    throw ConfigError("[" + label + "] key 'builtin': '" + builtin +
                      "' is not a builtin charge; known: " + known);
  }
}

}  // namespace

void validate_config(const RunConfig& config) {
  bool suite_known = false;
  for (const auto& name : suite_names()) suite_known |= (name == config.suite);
  if (!suite_known)
    throw ConfigError("key 'suite': '" + config.suite +
                      "' is not one of all, manifold, bundle, family");
  if (!config.seed_set)
    throw ConfigError(
        "key 'seed' is mandatory: randomized checks need an explicit seed");
  if (config.samples < 1)
    throw ConfigError("key 'samples' must be at least 1");
  if (config.output_dir.empty())
    throw ConfigError("key 'out' must name a directory");
  if (config.global_tolerance_set && !(config.global_tolerance > 0.0))
    throw ConfigError("key 'tol' must be positive");
  for (const auto& [identity, tol] : config.tolerance_overrides) {
    if (!(tol > 0.0))
      throw ConfigError("tolerance override '" + identity +
                        "' must be positive");
  }

  for (const auto& g : config.geometries) {
    const std::string label = "geometry " + g.name;
    if (g.model == "torus") {
      if (g.dimension != 1 && g.dimension != 2)
        section_error(label, "key 'dimension' must be 1 or 2");
      if (g.grid < 4)
        section_error(label, "key 'grid' must be at least 4 points per axis");
    } else if (g.model == "sphere") {
      if (g.dimension != 1)
        section_error(label, "key 'dimension' must be 1 for the sphere");
      if (g.grid < 8 || g.grid % 2 != 0)
        section_error(label,
                      "key 'grid' is the profile order: even and at least 8");
    } else {
      section_error(label,
                    "key 'model': '" + g.model + "' is not torus or sphere");
    }
    if (g.amplitude < 0.0)
      section_error(label, "key 'amplitude' must be non-negative");
  }

  for (const auto& c : config.charges)
    builtin_kind("charge " + c.name, c.builtin);

  for (const auto& b : config.bundles) {
    const std::string label = "bundle " + b.name;
    const GeometrySection* geom = config.find_geometry(b.geometry);
    if (geom == nullptr)
      section_error(label, "key 'geometry' references unknown geometry '" +
                               b.geometry + "'");
    if (geom->model != "torus")
      section_error(label, "key 'geometry': bundles need a torus geometry");
    const ChargeSection* charge = config.find_charge(b.charge);
    if (charge == nullptr)
      section_error(label,
                    "key 'charge' references unknown charge '" + b.charge + "'");
    if (builtin_kind(label, charge->builtin) != ChargeKind::Bundle)
      section_error(label, "key 'charge': '" + b.charge +
                               "' is not a bundle charge (use hym or dhym)");
    if (b.rank != 1 && b.rank != 2)
      section_error(label, "key 'rank' must be 1 or 2");
  }

  for (const auto& f : config.families) {
    const std::string label = "family " + f.name;
    const ChargeSection* charge = config.find_charge(f.charge);
    if (charge == nullptr)
      section_error(label,
                    "key 'charge' references unknown charge '" + f.charge + "'");
    if (builtin_kind(label, charge->builtin) != ChargeKind::Manifold)
      section_error(label, "key 'charge': '" + f.charge +
                               "' is not a manifold charge (use csck or exp)");
    if (f.nodes < 8 || f.nodes % 2 != 0)
      section_error(label,
                    "key 'nodes' is the profile order: even and at least 8");
    if (f.amplitude < 0.0)
      section_error(label, "key 'amplitude' must be non-negative");
    if (!(0.0 < f.t_min && f.t_min < f.t_max))
      section_error(label, "keys 't-min'/'t-max' need 0 < t-min < t-max");
  }
}

std::string default_config_text() {
  return R"(# Default verification run: every suite at desk scale, two seeded samples
# per randomized check. Override suite/seed/output from the command line.

[run]
suite = all
seed = 7
out = reports
samples = 2

[geometry t2]
model = torus
dimension = 1
grid = 32
amplitude = 2e-3

[geometry t4]
model = torus
dimension = 2
grid = 16
amplitude = 5e-4

[geometry t4-coarse]
model = torus
dimension = 2
grid = 10
amplitude = 2e-4

[geometry sphere]
model = sphere
grid = 64
amplitude = 0.05

[charge csck]
builtin = csck

[charge exp]
builtin = exp

[charge hym]
builtin = hym

[charge dhym]
builtin = dhym

[bundle line-t2]
geometry = t2
rank = 1
degree = 2
charge = hym

[bundle pair-t2]
geometry = t2
rank = 2
degree = 3
charge = hym

[bundle line-t4]
geometry = t4-coarse
rank = 1
degree = 1
charge = dhym

[family disc]
charge = csck
nodes = 48
amplitude = 0.05
t-min = 0.2
t-max = 1.0
)";
}

}  // namespace zcrit
