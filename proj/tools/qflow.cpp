// Experiment driver: one config file per experiment, one subcommand per
// pipeline stage, artifacts cached in the config's output directory.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "qflow/config.hpp"
#include "qflow/errors.hpp"
#include "qflow/pipeline.hpp"

namespace {

using namespace qflow;

void print_assertions(const RunRecord& record) {
  for (const StageTiming& timing : record.timings)
    std::printf("stage %-15s %10.3f s\n", timing.stage.c_str(),
                timing.seconds);
  for (const AssertionResult& a : record.assertions)
    std::printf("[%s] %-20s value=%s limit=%s\n", a.pass ? "PASS" : "FAIL",
                a.name.c_str(), format_sig(a.value).c_str(),
                format_sig(a.limit).c_str());
  std::printf("result: %s\n", record.all_pass() ? "PASS" : "FAIL");
}

int dispatch(const std::string& command, const ExperimentConfig& config) {
  if (command == "validate-config") {
    validate_config(config);
    const Lattice lattice = build_lattice(config);
    const Cut cut = build_cut(config, lattice);
    const PathValidation check = validate_path(build_path(config));
    if (!check.ok)
      throw DomainError("path constants do not dominate the measured norms");
    std::printf("config OK: family=%s sites=%d |dA|=%d hash=%s\n",
                config.family.c_str(), lattice.n_sites(), cut.boundary_size(),
                config_hash(config).c_str());
    return 0;
  }
  if (command == "gap-scan") {
    const Table gaps = stage_gap_scan(config);
    double min_gap = gaps.rows.empty() ? 0.0 : gaps.at(0, "gap");
    for (std::size_t i = 1; i < gaps.rows.size(); ++i)
      min_gap = std::min(min_gap, gaps.at(i, "gap"));
    std::printf("gap-scan: %zu points, min gap %s\n", gaps.rows.size(),
                format_sig(min_gap).c_str());
    return 0;
  }
  if (command == "flow") {
    const Table flow = stage_flow(config);
    double max_defect = 0.0;
    for (std::size_t i = 0; i < flow.rows.size(); ++i)
      max_defect = std::max(max_defect, flow.at(i, "unitarity_defect"));
    std::printf("flow: %zu states, max unitarity defect %s\n",
                flow.rows.size(), format_sig(max_defect).c_str());
    return 0;
  }
  if (command == "decompose-scan") {
    const DecomposeArtifacts artifacts = stage_decompose(config);
    std::printf("decompose-scan: %zu error rows, %zu overlap rows\n",
                artifacts.errors.rows.size(),
                artifacts.overlaps.rows.size());
    return 0;
  }
  if (command == "entropy-report") {
    const EntropyArtifacts artifacts = stage_entropy(config);
    for (std::size_t i = 0; i < artifacts.entropy.rows.size(); ++i)
      std::printf("s=%s  S=%s\n",
                  format_sig(artifacts.entropy.at(i, "s")).c_str(),
                  format_sig(artifacts.entropy.at(i, "entropy")).c_str());
    return 0;
  }
  if (command == "bound-report") {
    const BoundArtifacts artifacts = stage_bound(config);
    for (std::size_t k = 0; k < artifacts.bounds.size(); ++k) {
      const BoundReport& report = artifacts.bounds[k];
      if (artifacts.feasible[k])
        std::printf("s-point %zu: R0=%d bound=%s S=%s margin=%s\n", k,
                    report.r0, format_sig(report.bound).c_str(),
                    format_sig(report.measured_entropy).c_str(),
                    format_sig(report.margin).c_str());
      else
        std::printf("s-point %zu: no feasible R0 (bound vacuous), S=%s\n", k,
                    format_sig(report.measured_entropy).c_str());
    }
    return 0;
  }
  // "run"
  const RunRecord record = run_pipeline(config);
  print_assertions(record);
  return record.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  // Keep BLAS single-threaded: the pipeline parallelizes over grid points
  // itself, and nested BLAS pools cost more than they pay at these sizes.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"quasi-adiabatic continuation experiment driver"};
  app.fallthrough(true);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int workers_override = 0;
  app.add_option("--config", config_path, "experiment config file")
      ->required();
  app.add_option("--out", out_override, "override the output directory");
  app.add_option("--workers", workers_override,
                 "override the worker count for parallel stages");

  for (const char* name :
       {"run", "validate-config", "gap-scan", "flow", "decompose-scan",
        "entropy-report", "bound-report"})
    app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config = qflow::load_config(config_path);
    if (!out_override.empty()) config.out_dir = out_override;
    if (workers_override > 0) config.workers = workers_override;
    return dispatch(app.get_subcommands().front()->get_name(), config);
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 2;
  }
}
