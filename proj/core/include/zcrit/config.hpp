// Plain-text run configuration for the batch front end. INI-style sections
// mirror the library layers: [geometry] builds a torus or sphere backend,
// [charge] names a builtin central charge, [bundle] attaches a rank/degree
// model to a torus geometry, [family] sets up the disc-over-sphere fibration,
// [run] holds suite/seed/output and [tolerance] overrides per-check gates.
// Parsing is strict: unknown sections or keys, malformed values, duplicate or
// dangling names and missing mandatory entries all throw ConfigError with a
// message naming the offending key.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zcrit/errors.hpp"

namespace zcrit {

// [geometry <name>]: a torus grid (model = torus, complex dimension 1 or 2)
// or the sphere profile backend (model = sphere, grid = polynomial order).
// amplitude scales the seeded random potential used by randomized checks;
// zero means the flat or round reference metric.
struct GeometrySection {
  std::string name;
  std::string model;
  int dimension = 1;
  int grid = 32;
  double amplitude = 0.0;
};

// [charge <name>]: one of the builtin central charges (csck, exp, hym, dhym),
// instantiated at the dimension of whichever geometry it meets.
struct ChargeSection {
  std::string name;
  std::string builtin;
};

// [bundle <name>]: a rank/degree bundle over a referenced torus geometry,
// checked against a referenced bundle-kind charge.
struct BundleSection {
  std::string name;
  std::string geometry;
  std::string charge;
  int rank = 1;
  long long degree = 0;
};

// [family <name>]: the rotation-invariant disc-over-sphere family; nodes is
// the fibre profile order, amplitude scales the seeded invariant potential
// supported on [t_min, t_max] in the squared disc coordinate.
struct FamilySection {
  std::string name;
  std::string charge;
  int nodes = 48;
  double amplitude = 0.05;
  double t_min = 0.2;
  double t_max = 1.0;
};

struct RunConfig {
  std::string suite = "all";
  bool seed_set = false;
  std::uint64_t seed = 0;
  std::string output_dir = "reports";
  int samples = 3;  // seeded variants per randomized check
  // --tol flag: a single gate applied to every check, overriding both the
  // defaults and the [tolerance] section.
  bool global_tolerance_set = false;
  double global_tolerance = 0.0;
  std::map<std::string, double> tolerance_overrides;
  std::vector<GeometrySection> geometries;
  std::vector<ChargeSection> charges;
  std::vector<BundleSection> bundles;
  std::vector<FamilySection> families;

  const GeometrySection* find_geometry(const std::string& name) const;
  const ChargeSection* find_charge(const std::string& name) const;
  // Override from [tolerance] when present, else the check's default.
  double tolerance_for(const std::string& identity, double fallback) const;
};

// Parse without cross-validation (flag overrides may land afterwards).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Full validation: suite name, mandatory seed, value ranges, builtin names,
// and resolvability of every bundle/family reference.
void validate_config(const RunConfig& config);

// The shipped default configuration (same content as configs/default.cfg).
std::string default_config_text();

// Known suite names: all, manifold, bundle, family.
const std::vector<std::string>& suite_names();

}  // namespace zcrit
