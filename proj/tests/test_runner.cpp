// Runner oracles: deterministic plan order and byte-identical reports, CSV
// dump shapes, summary rendering, JSON round trips, suite gating errors, and
// error context from failing checks.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "zcrit/config.hpp"
#include "zcrit/errors.hpp"
#include "zcrit/runner.hpp"
#include "zcrit/tensorfield.hpp"

namespace {

namespace fs = std::filesystem;

using zcrit::ConfigError;
using zcrit::RunConfig;
using zcrit::SuiteResult;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

// Desk-scale configuration exercising every suite quickly.
RunConfig small_config() {
  RunConfig config;
  config.suite = "all";
  config.seed_set = true;
  config.seed = 11;
  config.samples = 1;
  config.output_dir = (fs::temp_directory_path() / "zcrit-runner-test").string();

  zcrit::GeometrySection t2;
  t2.name = "t2";
  t2.model = "torus";
  t2.dimension = 1;
  t2.grid = 16;
  t2.amplitude = 2e-3;
  config.geometries.push_back(t2);

  zcrit::GeometrySection sphere;
  sphere.name = "round";
  sphere.model = "sphere";
  sphere.grid = 32;
  sphere.amplitude = 0.05;
  config.geometries.push_back(sphere);

  zcrit::ChargeSection csck;
  csck.name = "csck";
  csck.builtin = "csck";
  config.charges.push_back(csck);

  zcrit::ChargeSection hym;
  hym.name = "slope";
  hym.builtin = "hym";
  config.charges.push_back(hym);

  zcrit::BundleSection line;
  line.name = "line";
  line.geometry = "t2";
  line.charge = "slope";
  line.rank = 1;
  line.degree = 1;
  config.bundles.push_back(line);

  zcrit::FamilySection disc;
  disc.name = "disc";
  disc.charge = "csck";
  disc.nodes = 32;
  disc.amplitude = 0.03;
  disc.t_min = 0.2;
  disc.t_max = 1.0;
  config.families.push_back(disc);

  return config;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("all-suite run passes, keeps plan order, and is byte-deterministic") {
  const RunConfig config = small_config();
  const SuiteResult first = zcrit::run_suite(config, "all");

  REQUIRE(!first.reports.empty());
  CHECK(first.all_pass());
  for (const auto& report : first.reports) {
    CAPTURE(report.identity);
    CHECK(report.pass);
  }

  // Plan order: manifold checks first, the analytic pairing inside the
  // bundle block, the family check last.
  CHECK(first.reports.front().identity == "torus-charge-topological.t2.csck");
  CHECK(first.reports.back().identity == "family-moment-derivative.disc");
  bool saw_analytic = false;
  for (const auto& report : first.reports)
    saw_analytic |= (report.identity == "bundle-pairing-analytic");
  CHECK(saw_analytic);

  const std::string json_a = zcrit::reports_to_json(first);
  const SuiteResult second = zcrit::run_suite(config, "all");
  const std::string json_b = zcrit::reports_to_json(second);
  CHECK(json_a == json_b);  // identical config and seed, identical bytes

  RunConfig reseeded = config;
  reseeded.seed = 12;
  const std::string json_c =
      zcrit::reports_to_json(zcrit::run_suite(reseeded, "all"));
  CHECK(json_a != json_c);  // the seed genuinely feeds the checks

  // Round trip through the parser reproduces the serialization.
  const SuiteResult parsed = zcrit::reports_from_json(json_a);
  CHECK(zcrit::reports_to_json(parsed) == json_a);
  CHECK(parsed.suite == "all");
  CHECK(parsed.seed == 11);

  const std::string table = zcrit::summary_table(first);
  for (const auto& report : first.reports)
    CHECK(table.find(report.identity) != std::string::npos);
  CHECK(table.find("FAIL") == std::string::npos);
  CHECK(table.find(std::to_string(first.reports.size()) + "/" +
                   std::to_string(first.reports.size()) +
                   " checks passed") != std::string::npos);
}

TEST_CASE("tolerance overrides steer individual pass flags") {
  RunConfig config = small_config();
  config.tolerance_overrides["torus-charge-flat-critical.t2.csck"] = 1e-30;
  const SuiteResult result = zcrit::run_suite(config, "manifold");
  bool saw_forced_failure = false;
  for (const auto& report : result.reports) {
    if (report.identity == "torus-charge-flat-critical.t2.csck") {
      saw_forced_failure = true;
      CHECK(!report.pass);
      CHECK(report.tolerance == doctest::Approx(1e-30));
    } else {
      CHECK(report.pass);
    }
  }
  CHECK(saw_forced_failure);
  CHECK(!result.all_pass());
  CHECK(zcrit::summary_table(result).find("FAIL") != std::string::npos);
}

TEST_CASE("missing sections are named when a suite needs them") {
  RunConfig config = small_config();
  config.geometries.erase(config.geometries.begin() + 1);  // drop the sphere
  CHECK_THROWS_WITH_AS(zcrit::run_suite(config, "manifold"),
                       doctest::Contains("model = sphere"), ConfigError);

  RunConfig no_bundle = small_config();
  no_bundle.bundles.clear();
  CHECK_THROWS_WITH_AS(zcrit::run_suite(no_bundle, "bundle"),
                       doctest::Contains("[bundle] section"), ConfigError);

  RunConfig no_family = small_config();
  no_family.families.clear();
  CHECK_THROWS_WITH_AS(zcrit::run_suite(no_family, "family"),
                       doctest::Contains("[family] section"), ConfigError);

  CHECK_THROWS_WITH_AS(zcrit::run_suite(small_config(), "everything"),
                       doctest::Contains("suite 'everything'"), ConfigError);

  RunConfig unseeded = small_config();
  unseeded.seed_set = false;
  CHECK_THROWS_WITH_AS(zcrit::run_suite(unseeded, "family"),
                       doctest::Contains("'seed' is mandatory"), ConfigError);
}

TEST_CASE("module errors surface with the check id prepended") {
  RunConfig config = small_config();
  config.geometries[0].amplitude = 0.5;  // degenerate metric on the torus
  CHECK_THROWS_WITH_AS(zcrit::run_suite(config, "manifold"),
                       doctest::Contains("torus-charge-topological.t2"),
                       zcrit::NotPositive);
}

TEST_CASE("report json parsing rejects foreign content") {
  CHECK_THROWS_WITH_AS(zcrit::reports_from_json("{"),
                       doctest::Contains("not valid JSON"), ConfigError);
  CHECK_THROWS_WITH_AS(zcrit::reports_from_json("[1, 2]"),
                       doctest::Contains("schema"), ConfigError);
  CHECK_THROWS_WITH_AS(
      zcrit::reports_from_json("{\"schema\": \"other-v9\", \"reports\": []}"),
      doctest::Contains("does not match"), ConfigError);
}

TEST_CASE("plot data dumps have one row per grid point plus a header") {
  const fs::path dir = fs::temp_directory_path() / "zcrit-plot-test";
  fs::create_directories(dir);

  zcrit::TorusGrid grid(1, 64);
  zcrit::TensorField scalar =
      zcrit::function_form(grid, grid.constant_field(zcrit::Cx(1.5, -0.5)));
  const std::string field_path = (dir / "field.csv").string();
  zcrit::emit_plot_data(scalar, field_path);
  const std::string field_csv = read_file(field_path);
  CHECK(line_count(field_csv) == 64 * 64 + 1);  // 4096 rows and a header
  CHECK(field_csv.rfind("x1,y1,re_f,im_f\n", 0) == 0);

  zcrit::TensorField one_form(grid);
  one_form.add_component(1u, 0u, grid.constant_field(zcrit::Cx(0.0, 1.0)));
  const std::string form_path = (dir / "form.csv").string();
  zcrit::emit_plot_data(one_form, form_path);
  CHECK(read_file(form_path).rfind("x1,y1,re_dz1,im_dz1\n", 0) == 0);

  zcrit::TensorField empty(grid);
  const std::string empty_path = (dir / "empty.csv").string();
  zcrit::emit_plot_data(empty, empty_path);
  CHECK(line_count(read_file(empty_path)) == 1);  // header only

  const zcrit::ProfileGrid profile_grid(32);
  zcrit::RealProfile values(profile_grid.count(), 2.0);
  const std::string profile_path = (dir / "profile.csv").string();
  zcrit::emit_plot_data(profile_grid, values, profile_path);
  const std::string profile_csv = read_file(profile_path);
  CHECK(line_count(profile_csv) == profile_grid.count() + 1);
  CHECK(profile_csv.rfind("x,value\n", 0) == 0);

  zcrit::RealProfile wrong_size(5, 1.0);
  CHECK_THROWS_AS(zcrit::emit_plot_data(profile_grid, wrong_size,
                                        (dir / "bad.csv").string()),
                  ConfigError);

  std::vector<zcrit::FlowSample> trace(3);
  trace[1].iteration = 1;
  trace[1].residual_sup = 0.5;
  const std::string trace_path = (dir / "trace.csv").string();
  zcrit::write_flow_trace(trace, trace_path);
  const std::string trace_csv = read_file(trace_path);
  CHECK(line_count(trace_csv) == 4);
  CHECK(trace_csv.rfind("iteration,residual_sup,trace_drift\n", 0) == 0);

  fs::remove_all(dir);
}

TEST_CASE("artifact writing produces deterministic reports and sidecar files") {
  RunConfig config = small_config();
  config.output_dir =
      (fs::temp_directory_path() / "zcrit-artifact-test").string();
  fs::remove_all(config.output_dir);

  const SuiteResult result = zcrit::run_suite(config, "family");
  const auto written = zcrit::write_artifacts(config, result);
  for (const auto& path : written) {
    CAPTURE(path);
    CHECK(fs::exists(path));
  }

  const std::string reports = read_file(config.output_dir + "/reports.json");
  CHECK(reports.find("\"schema\": \"zcrit-report-v1\"") != std::string::npos);
  CHECK(reports.find("timestamp") == std::string::npos);

  const std::string metadata =
      read_file(config.output_dir + "/run-metadata.json");
  CHECK(metadata.find("timestamp_utc") != std::string::npos);

  const std::string summary_csv = read_file(config.output_dir + "/summary.csv");
  CHECK(line_count(summary_csv) == result.reports.size() + 1);

  CHECK(fs::exists(config.output_dir + "/family-disc-scalar.csv"));

  // A fresh run with the same config and seed reproduces the bytes.
  const SuiteResult again = zcrit::run_suite(config, "family");
  zcrit::write_artifacts(config, again);
  CHECK(read_file(config.output_dir + "/reports.json") == reports);

  fs::remove_all(config.output_dir);
}

TEST_CASE("derived seeds separate checks and samples") {
  const std::uint64_t a = zcrit::derive_seed(7, "check-a", 0);
  const std::uint64_t b = zcrit::derive_seed(7, "check-b", 0);
  const std::uint64_t c = zcrit::derive_seed(7, "check-a", 1);
  const std::uint64_t d = zcrit::derive_seed(8, "check-a", 0);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(a != d);
  CHECK(zcrit::derive_seed(7, "check-a", 0) == a);
}

}  // TEST_SUITE
