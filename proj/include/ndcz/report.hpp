#pragma once

// Pipeline orchestration shared by the CLI and the acceptance suite: runs
// lattice -> filtration -> norms -> operators -> sparse -> matrix stages on
// one measure and writes the artifact files. Reports keep ASSERTED
// invariants (identities with pinned tolerances) separate from MEASURED
// constants (the unspecified-constant inequalities).

#include <cstdint>
#include <string>

#include "json.hpp"
#include "ndcz/lattice.hpp"
#include "ndcz/measure.hpp"

namespace ndcz {

struct RunConfig {
  std::string measure;  // file path or bundled:<name>
  double growth_degree = 0.0;  // 0: from file / generator
  std::string mode = "test";   // "test" or "paper"
  double alpha = 4.0;
  int ell = 2;
  double A = 0.0;  // 0: derived
  std::string kernel = "auto";  // auto: cauchy on d=1, riesz:0 otherwise
  uint64_t seed = 1;
  std::size_t corpus_fields = 100;
  double lambda_osc = 0.45;
  std::string out_dir = ".";

  LatticeParams lattice_params(int dim) const;
  std::string kernel_name(const PointMeasure& mu) const;
};

/// Resolves bundled:<name> or loads from disk.
PointMeasure open_measure(const std::string& spec, double growth_degree);

/// Runs the full pipeline, writes lattice.json, filtration.json, norms.json,
/// czd.json, sparse_report.json, a2_sweep.csv, matrix_endpoint.json and
/// summary.json under cfg.out_dir. Returns 0 when every asserted invariant
/// holds, 1 otherwise. Artifacts are byte-identical for identical
/// (config, seed) regardless of the output directory or thread count.
int run_report_all(const RunConfig& cfg);

/// Shortest round-trip decimal form of a double (the JSON serialization),
/// used for CSV artifacts so reruns are byte-identical.
std::string fmt_double(double v);

}  // namespace ndcz
