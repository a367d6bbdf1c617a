// Suite runner and artifact writer behind the batch front end: expands a
// RunConfig into a deterministic plan of verification checks, executes
// independent checks concurrently, and serializes the results as versioned
// JSON reports, CSV tables, CSV field dumps and a human summary. Timestamps
// never enter reports.json, so identical config and seed give byte-identical
// report files.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zcrit/bundle.hpp"
#include "zcrit/config.hpp"
#include "zcrit/cp1.hpp"
#include "zcrit/report.hpp"
#include "zcrit/tensorfield.hpp"

namespace zcrit {

inline constexpr const char* kReportSchemaVersion = "zcrit-report-v1";

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<VerificationReport> reports;
  bool all_pass() const;
};

// Run every check of the named suite; "all" concatenates manifold, bundle
// and family. Reports come back in plan order regardless of scheduling.
// Throws ConfigError when the configuration lacks a section the suite needs;
// module errors propagate with the check id prepended.
SuiteResult run_suite(const RunConfig& config, const std::string& suite_name);

// Deterministic JSON: versioned schema, plan-ordered reports, sorted
// metadata keys, no timestamps.
std::string reports_to_json(const SuiteResult& result);
SuiteResult reports_from_json(const std::string& text);

// Fixed-width human table, one row per report plus a tally line.
std::string summary_table(const SuiteResult& result);

// Write reports.json, summary.txt, summary.csv, field dumps, and
// run-metadata.json (which carries the wall-clock timestamp) under
// config.output_dir. Returns the list of written paths.
std::vector<std::string> write_artifacts(const RunConfig& config,
                                         const SuiteResult& result);

// CSV field dump: one row per grid point in row-major order, real coordinate
// columns first, then re/im columns for each stored component. A field with
// no components produces a header-only file.
void emit_plot_data(const TensorField& field, const std::string& path);
// Profile variant: node coordinate and value columns, one row per node.
void emit_plot_data(const ProfileGrid& grid, const RealProfile& profile,
                    const std::string& path);

// Convergence trace of a flow solve: iteration, residual sup-norm, drift of
// the density trace integral from the topological charge.
void write_flow_trace(const std::vector<FlowSample>& trace,
                      const std::string& path);

// Seeded band-limited real potential driving the randomized torus checks;
// the coefficient stream depends only on the seed, not the grid size.
Field seeded_torus_potential(const TorusGrid& grid, std::uint64_t seed,
                             double amplitude);

// Stable per-check seed derivation: mixes the run seed with the check id and
// sample index through FNV-1a and splitmix so streams never collide.
std::uint64_t derive_seed(std::uint64_t base, const std::string& id,
                          std::uint64_t sample);

}  // namespace zcrit
