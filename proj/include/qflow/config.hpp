// Experiment configuration: plain-text typed key/value sections, structural
// validation, canonical serialization, and the content hash that keys cached
// artifacts.

#pragma once

#include <string>
#include <vector>

#include "qflow/lattice.hpp"
#include "qflow/model.hpp"

namespace qflow {

// Assertion tolerances, overridable from the [tolerances] config section.
// Margins are signed (measured - required), so their limits are lower bounds;
// defects are magnitudes, so their limits are upper bounds.
struct Tolerances {
  double unitarity = 1e-8;        // max flow / factor unitarity defect
  double overlap_margin = -1e-9;  // min P - (1 - f_A - 2 eps)
  double tail_margin = -1e-10;    // min leading-weight sum - P
  double entropy_slack = -1e-9;   // min bound - measured entropy
  double support_defect = 1e-8;   // max factor support-test defect
};

struct ExperimentConfig {
  // [model]
  std::string family = "tfim";
  ModelParams model;
  // [lattice]
  int extent_x = 0;
  int extent_y = 1;
  // [cut]
  std::vector<int> a_sites;
  // [flow]
  int steps = 200;
  std::string filter = "spectral";
  double filter_gamma = 0.0;  // <= 0: the path's declared gap floor
  std::vector<double> s_grid;
  std::vector<int> r_list;
  int workers = 1;
  // [output]
  std::string out_dir;
  Tolerances tolerances;
};

// Parses the section/key = value text. Unknown keys, duplicate keys, and
// malformed numbers are domain errors; list values are whitespace-separated.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Every field as a sorted "section.key = value" line, floats at 12
// significant digits. Independent of the ordering in the source text.
std::string canonical_text(const ExperimentConfig& config);

// FNV-1a (64-bit) over the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

Lattice build_lattice(const ExperimentConfig& config);
Cut build_cut(const ExperimentConfig& config, const Lattice& lattice);
HamiltonianPath build_path(const ExperimentConfig& config);

// Structural checks beyond parsing: referenced sites inside the lattice,
// s-grid within [0,1] and strictly increasing, R-list positive increasing,
// grid values landing on step boundaries, and the dense-dimension cap.
void validate_config(const ExperimentConfig& config);

}  // namespace qflow
