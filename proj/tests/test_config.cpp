// Config parser oracles: grammar and defaults, lowercasing, reference
// resolution, every rejection path naming the offending key, and agreement
// between the shipped default file and the embedded default text.
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "zcrit/config.hpp"
#include "zcrit/errors.hpp"

namespace {

using zcrit::ConfigError;
using zcrit::parse_config_text;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parses sections, defaults, lowercasing and overrides") {
  const std::string text = R"(
# leading comment
[run]
suite = Manifold
seed = 42
out = artifacts
samples = 4

[geometry t2]
model = torus
dimension = 1
grid = 48
amplitude = 1e-3

[geometry round]
model = sphere
grid = 32

[charge main]
builtin = CSCK

[bundle line]   # forward reference to [charge slope] below
geometry = t2
charge = slope
rank = 2
degree = -3

[charge slope]
builtin = hym

[family disc]
charge = main
nodes = 32
amplitude = 0.02
t-min = 0.3
t-max = 0.9

[tolerance]
curvature-moment-map.round = 1e-5
)";
  auto config = parse_config_text(text);
  CHECK(config.suite == "manifold");
  CHECK(config.seed_set);
  CHECK(config.seed == 42);
  CHECK(config.output_dir == "artifacts");
  CHECK(config.samples == 4);

  REQUIRE(config.geometries.size() == 2);
  CHECK(config.geometries[0].name == "t2");
  CHECK(config.geometries[0].model == "torus");
  CHECK(config.geometries[0].dimension == 1);
  CHECK(config.geometries[0].grid == 48);
  CHECK(config.geometries[0].amplitude == doctest::Approx(1e-3));
  CHECK(config.geometries[1].name == "round");
  CHECK(config.geometries[1].model == "sphere");
  CHECK(config.geometries[1].grid == 32);
  CHECK(config.geometries[1].amplitude == doctest::Approx(0.0));

  REQUIRE(config.charges.size() == 2);
  CHECK(config.charges[0].name == "main");
  CHECK(config.charges[0].builtin == "csck");  // lowercased
  CHECK(config.charges[1].builtin == "hym");

  REQUIRE(config.bundles.size() == 1);
  CHECK(config.bundles[0].name == "line");
  CHECK(config.bundles[0].geometry == "t2");
  CHECK(config.bundles[0].charge == "slope");
  CHECK(config.bundles[0].rank == 2);
  CHECK(config.bundles[0].degree == -3);

  REQUIRE(config.families.size() == 1);
  CHECK(config.families[0].charge == "main");
  CHECK(config.families[0].nodes == 32);
  CHECK(config.families[0].t_min == doctest::Approx(0.3));
  CHECK(config.families[0].t_max == doctest::Approx(0.9));

  CHECK(config.tolerance_for("curvature-moment-map.round", 1e-6) ==
        doctest::Approx(1e-5));
  CHECK(config.tolerance_for("unlisted-check", 1e-6) == doctest::Approx(1e-6));

  CHECK(config.find_geometry("t2") != nullptr);
  CHECK(config.find_geometry("missing") == nullptr);
  CHECK(config.find_charge("slope") != nullptr);

  CHECK_NOTHROW(zcrit::validate_config(config));
}

TEST_CASE("global tolerance flag wins over section overrides") {
  auto config = parse_config_text(
      "[run]\nseed = 1\n[tolerance]\nsome-check = 1e-5\n");
  CHECK(config.tolerance_for("some-check", 1e-8) == doctest::Approx(1e-5));
  config.global_tolerance_set = true;
  config.global_tolerance = 1e-2;
  CHECK(config.tolerance_for("some-check", 1e-8) == doctest::Approx(1e-2));
  CHECK(config.tolerance_for("other-check", 1e-8) == doctest::Approx(1e-2));
}

TEST_CASE("parser rejections name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config_text("[blob x]\n"),
                       doctest::Contains("unknown section kind 'blob'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[geometry]\n"),
                       doctest::Contains("needs a name"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run main]\n"),
                       doctest::Contains("takes no name"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run\nseed = 1\n"),
                       doctest::Contains("unterminated section header"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[geometry a]\nmodel = torus\n[geometry a]\nmodel = "
                        "torus\n"),
      doctest::Contains("duplicate section [geometry a]"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("stray = 1\n"),
                       doctest::Contains("outside any section"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nflavor = hot\n"),
                       doctest::Contains("unknown key 'flavor'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nseed = -3\n"),
                       doctest::Contains("'seed'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nseed = 7\nseed = 8\n"),
                       doctest::Contains("duplicate key 'seed'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[geometry g]\nmodel = torus\ngrid = twenty\n"),
      doctest::Contains("'grid'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[geometry g]\nmodel = torus\namplitude = big\n"),
      doctest::Contains("'amplitude'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[geometry g]\ngrid = 16\n"),
                       doctest::Contains("missing required key 'model'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[bundle b]\ncharge = c\n"),
                       doctest::Contains("missing required key 'geometry'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[family f]\nnodes = 32\n"),
                       doctest::Contains("missing required key 'charge'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nnonsense\n"),
                       doctest::Contains("expected 'key = value'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nsuite =\n"),
                       doctest::Contains("empty value"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[tolerance]\nsome-check = -1e-6\n"),
                       doctest::Contains("must be positive"), ConfigError);
}

TEST_CASE("validation catches semantic errors and dangling references") {
  auto with_run = [](const std::string& body) {
    return "[run]\nseed = 1\n" + body;
  };
  auto validated = [&](const std::string& body) {
    zcrit::validate_config(parse_config_text(with_run(body)));
  };

  CHECK_THROWS_WITH_AS(
      zcrit::validate_config(parse_config_text("[run]\nsuite = all\n")),
      doctest::Contains("'seed' is mandatory"), ConfigError);
  CHECK_THROWS_WITH_AS(
      zcrit::validate_config(
          parse_config_text("[run]\nseed = 1\nsuite = everything\n")),
      doctest::Contains("'suite'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      zcrit::validate_config(parse_config_text("[run]\nseed = 1\nsamples = 0\n")),
      doctest::Contains("'samples'"), ConfigError);

  CHECK_THROWS_WITH_AS(validated("[geometry g]\nmodel = plane\n"),
                       doctest::Contains("not torus or sphere"), ConfigError);
  CHECK_THROWS_WITH_AS(validated("[geometry g]\nmodel = torus\ndimension = 3\n"),
                       doctest::Contains("'dimension'"), ConfigError);
  CHECK_THROWS_WITH_AS(validated("[geometry g]\nmodel = sphere\ngrid = 31\n"),
                       doctest::Contains("profile order"), ConfigError);
  CHECK_THROWS_WITH_AS(
      validated("[geometry g]\nmodel = torus\namplitude = -0.1\n"),
      doctest::Contains("'amplitude'"), ConfigError);

  CHECK_THROWS_WITH_AS(validated("[charge c]\nbuiltin = blub\n"),
                       doctest::Contains("not a builtin charge"), ConfigError);

  const std::string base =
      "[geometry t2]\nmodel = torus\n[charge m]\nbuiltin = csck\n[charge "
      "b]\nbuiltin = hym\n";
  CHECK_THROWS_WITH_AS(
      validated(base + "[bundle x]\ngeometry = nope\ncharge = b\n"),
      doctest::Contains("unknown geometry 'nope'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      validated(base + "[bundle x]\ngeometry = t2\ncharge = nope\n"),
      doctest::Contains("unknown charge 'nope'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      validated(base + "[bundle x]\ngeometry = t2\ncharge = m\n"),
      doctest::Contains("not a bundle charge"), ConfigError);
  CHECK_THROWS_WITH_AS(
      validated(base + "[bundle x]\ngeometry = t2\ncharge = b\nrank = 3\n"),
      doctest::Contains("'rank'"), ConfigError);
  CHECK_THROWS_WITH_AS(validated(base + "[family f]\ncharge = b\n"),
                       doctest::Contains("not a manifold charge"), ConfigError);
  CHECK_THROWS_WITH_AS(
      validated(base + "[family f]\ncharge = m\nt-min = 0\n"),
      doctest::Contains("t-min"), ConfigError);
  CHECK_THROWS_WITH_AS(
      validated(base + "[family f]\ncharge = m\nnodes = 30\nt-min = 0.9\nt-max "
                       "= 0.3\n"),
      doctest::Contains("t-min"), ConfigError);
}

TEST_CASE("shipped default configuration matches the embedded text") {
  const std::string embedded = zcrit::default_config_text();
  auto config = parse_config_text(embedded);
  CHECK_NOTHROW(zcrit::validate_config(config));
  CHECK(config.suite == "all");
  CHECK(config.seed == 7);
  CHECK(!config.geometries.empty());
  CHECK(!config.bundles.empty());
  CHECK(!config.families.empty());

  const std::string shipped =
      read_file(std::string(ZCRIT_SOURCE_DIR) + "/configs/default.cfg");
  CHECK(shipped == embedded);
}

TEST_CASE("file loading reports unreadable paths") {
  CHECK_THROWS_WITH_AS(zcrit::parse_config_file("/nonexistent/path.cfg"),
                       doctest::Contains("cannot read configuration file"),
                       ConfigError);
}

}  // TEST_SUITE
