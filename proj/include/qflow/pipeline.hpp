// The experiment pipeline: staged artifact production (gap scan, transported
// states, boundary decomposition with overlap and rank checks, spectra and
// entropies, entropy bounds), rerunnable stage by stage against cached
// artifacts keyed by the config hash.

#pragma once

#include <string>
#include <vector>

#include "qflow/bound.hpp"
#include "qflow/config.hpp"
#include "qflow/csv.hpp"

namespace qflow {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

// One named check; `value` is the measured extreme, compared against `limit`
// from below (margins) or above (defects) depending on the check.
struct AssertionResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
};

struct DecomposeArtifacts {
  Table errors;    // R, s, e_meas, err_vw, err_wboundary, unitarity_defect, ...
  Table overlaps;  // s, R, overlap, f_a, eps, and the derived margins
  Table support;   // s, R, factor, defect
};

struct EntropyArtifacts {
  Table profile;  // radius, f_a (initial-state tail decay)
  Table entropy;  // s, entropy, schmidt_rank
  std::vector<Table> spectra;  // per s-grid point: alpha, weight
};

struct BoundArtifacts {
  std::vector<BoundReport> bounds;  // one per s-grid point
  std::vector<bool> feasible;       // false when no radius meets the 1/2 cut
};

// Stage entry points, one per CLI subcommand. Each checks the output
// directory's manifest against the config hash (StaleCacheError on mismatch),
// reads its upstream artifacts (DependencyError when a required stage has not
// run), writes its own tables, and marks itself complete in the manifest.
Table stage_gap_scan(const ExperimentConfig& config);
Table stage_flow(const ExperimentConfig& config);
DecomposeArtifacts stage_decompose(const ExperimentConfig& config);
EntropyArtifacts stage_entropy(const ExperimentConfig& config);
BoundArtifacts stage_bound(const ExperimentConfig& config);

struct RunRecord {
  std::string config_hash;
  std::vector<StageTiming> timings;
  Table gaps;
  Table flow;
  DecomposeArtifacts decompose;
  EntropyArtifacts entropy;
  BoundArtifacts bound;
  std::vector<AssertionResult> assertions;

  bool all_pass() const;
};

// The full stage chain in order, with per-stage timing and the assertion
// table derived from the artifacts.
RunRecord run_pipeline(const ExperimentConfig& config);

// Artifact file names inside the output directory.
std::string state_file_name(int s_index);
std::string spectrum_file_name(int s_index);

}  // namespace qflow
