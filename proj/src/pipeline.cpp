#include "qflow/pipeline.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"
#include "qflow/errors.hpp"
#include "qflow/filter.hpp"
#include "qflow/flow.hpp"
#include "qflow/schmidt.hpp"
#include "qflow/space.hpp"

namespace qflow {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Complex = std::complex<double>;

constexpr double kGridTol = 1e-9;

// ---------------------------------------------------------------------------
// Manifest: the config hash that keys every cached artifact, plus the set of
// completed stages.
// ---------------------------------------------------------------------------

fs::path manifest_path(const ExperimentConfig& config) {
  return fs::path(config.out_dir) / "manifest.json";
}

json open_manifest(const ExperimentConfig& config) {
  fs::create_directories(config.out_dir);
  const std::string hash = config_hash(config);
  const fs::path path = manifest_path(config);
  json manifest;
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      in >> manifest;
    } catch (const std::exception&) {
      throw DomainError("manifest '" + path.string() + "' is not valid JSON");
    }
    const std::string cached = manifest.value("config_hash", "");
    if (cached != hash)
      throw StaleCacheError("artifacts in '" + config.out_dir +
                            "' were produced by config " + cached +
                            "; the current config hashes to " + hash);
    if (!manifest.contains("stages")) manifest["stages"] = json::object();
    return manifest;
  }
  manifest = json{{"config_hash", hash}, {"stages", json::object()}};
  std::ofstream(path) << manifest.dump(2) << "\n";
  return manifest;
}

void mark_stage(const ExperimentConfig& config, const std::string& stage) {
  json manifest = open_manifest(config);
  manifest["stages"][stage] = true;
  std::ofstream(manifest_path(config)) << manifest.dump(2) << "\n";
}

void require_stage(const ExperimentConfig& config, const std::string& stage) {
  const json manifest = open_manifest(config);
  if (!manifest["stages"].value(stage, false))
    throw DependencyError("stage '" + stage + "' has no artifacts in '" +
                          config.out_dir + "'; run '" + stage + "' first");
}

// ---------------------------------------------------------------------------
// Bounded worker pool. Tasks write only to their own index; errors are
// rethrown in index order so diagnostics stay deterministic.
// ---------------------------------------------------------------------------

void parallel_for(int n_tasks, int workers,
                  const std::function<void(int)>& task) {
  if (n_tasks <= 0) return;
  const int n_threads = std::max(1, std::min(workers, n_tasks));
  if (n_threads == 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n_tasks);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n_tasks) return;
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& thread : pool) thread.join();
  for (auto& error : errors)
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Shared per-stage setup
// ---------------------------------------------------------------------------

struct Setup {
  Lattice lattice;
  Cut cut;
  HamiltonianPath path;
  int local_dim;
  long dim;
};

Setup make_setup(const ExperimentConfig& config) {
  validate_config(config);
  Lattice lattice = build_lattice(config);
  Cut cut = build_cut(config, lattice);
  HamiltonianPath path = build_path(config);
  const int local_dim = path.local_dim();
  const long dim = path.dim();
  return Setup{std::move(lattice), std::move(cut), std::move(path), local_dim,
               dim};
}

VectorXcd initial_ground_state(const HamiltonianPath& path) {
  return diagonalize(path.assemble(0.0), 0.0).ground_state();
}

int grid_index(const std::vector<double>& grid, double s) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] - s) < kGridTol) return static_cast<int>(i);
  throw StructuralError("snapshot s = " + format_sig(s) +
                        " is not on the configured s-grid");
}

void apply_local(const LocalOperator& op, int n_sites, VectorXcd& psi) {
  const SubsetIndex idx(op.support().sites(), n_sites, op.local_dim());
  MatrixXcd out;
  apply_local_left(op.matrix(), idx, MatrixXcd(psi), out);
  psi = out.col(0);
}

VectorXcd read_state(const ExperimentConfig& config, int s_index, long dim) {
  const fs::path path = fs::path(config.out_dir) / state_file_name(s_index);
  const Table table = read_table(path.string());
  if (static_cast<long>(table.rows.size()) != dim)
    throw DomainError("state table '" + path.string() + "' has " +
                      std::to_string(table.rows.size()) + " rows; expected " +
                      std::to_string(dim));
  const int re = table.column_index("re"), im = table.column_index("im");
  VectorXcd psi(dim);
  for (long a = 0; a < dim; ++a)
    psi(a) = Complex(table.rows[a][re], table.rows[a][im]);
  return psi;
}

std::string artifact(const ExperimentConfig& config, const std::string& name) {
  return (fs::path(config.out_dir) / name).string();
}

}  // namespace

std::string state_file_name(int s_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%03d.csv", s_index);
  return buf;
}

std::string spectrum_file_name(int s_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "spectrum_%03d.csv", s_index);
  return buf;
}

// ---------------------------------------------------------------------------
// gap-scan
// ---------------------------------------------------------------------------

Table stage_gap_scan(const ExperimentConfig& config) {
  const Setup setup = make_setup(config);
  open_manifest(config);

  const GapScan scan = gap_along_path(setup.path, config.s_grid);
  Table gaps({"s", "gap"}, {ColumnKind::real, ColumnKind::real});
  for (std::size_t i = 0; i < scan.s_values.size(); ++i)
    gaps.append({scan.s_values[i], scan.gaps[i]});

  write_table(artifact(config, "gaps.csv"), gaps);
  mark_stage(config, "gap-scan");
  return gaps;
}

// ---------------------------------------------------------------------------
// flow: transport the initial ground state along the s-grid, persisting each
// snapshot state together with its unitarity defect and the fidelity against
// the re-diagonalized ground state.
// ---------------------------------------------------------------------------

Table stage_flow(const ExperimentConfig& config) {
  const Setup setup = make_setup(config);
  open_manifest(config);

  const HamiltonianPath& path = setup.path;
  const FilterFunction filter(config.filter_gamma > 0 ? config.filter_gamma
                                                      : path.gamma_floor());
  const VectorXcd psi0 = initial_ground_state(path);

  Table flow({"s", "unitarity_defect", "ground_fidelity"},
             {ColumnKind::real, ColumnKind::real, ColumnKind::real});
  MatrixXcd u = MatrixXcd::Identity(setup.dim, setup.dim);
  double s_prev = 0.0;
  for (std::size_t k = 0; k < config.s_grid.size(); ++k) {
    const double s_k = config.s_grid[k];
    if (s_k > s_prev) {
      const int seg_steps =
          static_cast<int>(std::llround((s_k - s_prev) * config.steps));
      const double base = s_prev;
      const auto gen = [&path, &filter, base](double t) {
        const double s = base + t;
        const auto spectral = diagonalize(path.assemble(s), s);
        return filtered_generator(spectral, path.derivative_full(s), filter);
      };
      const FlowResult segment = integrate_flow(gen, s_k - s_prev, seg_steps);
      u = segment.unitary * u;
      s_prev = s_k;
    }
    const VectorXcd psi = u * psi0;
    const double defect =
        (u.adjoint() * u - MatrixXcd::Identity(setup.dim, setup.dim)).norm();
    const auto spectral = diagonalize(path.assemble(s_k), s_k);
    const double fidelity =
        std::norm(spectral.ground_state().dot(psi));

    Table state({"alpha", "re", "im"},
                {ColumnKind::integer, ColumnKind::real, ColumnKind::real});
    for (long a = 0; a < setup.dim; ++a)
      state.append({static_cast<double>(a), psi(a).real(), psi(a).imag()});
    write_table(artifact(config, state_file_name(static_cast<int>(k))), state);
    flow.append({s_k, defect, fidelity});
  }

  write_table(artifact(config, "flow.csv"), flow);
  mark_stage(config, "flow");
  return flow;
}

// ---------------------------------------------------------------------------
// decompose-scan: one engine pass over the s-grid. At every snapshot the
// factor reports drive the overlap construction: the truncated initial state
// is pushed through boundary, then A-complement, then A factors, compared
// against the transported state, and checked against the tail and rank
// bounds. Factor support is certified by random commutator probes.
// ---------------------------------------------------------------------------

DecomposeArtifacts stage_decompose(const ExperimentConfig& config) {
  const Setup setup = make_setup(config);
  open_manifest(config);
  require_stage(config, "flow");

  const int n_sites = setup.lattice.n_sites();
  const int bsize = setup.cut.boundary_size();
  const long long dim_bound =
      std::min(ipow(setup.local_dim, setup.cut.a().size()),
               ipow(setup.local_dim, n_sites - setup.cut.a().size()));

  std::vector<VectorXcd> states;
  for (std::size_t k = 0; k < config.s_grid.size(); ++k)
    states.push_back(read_state(config, static_cast<int>(k), setup.dim));

  const VectorXcd psi0 = initial_ground_state(setup.path);
  const DecayProfile fa =
      decay_profile(schmidt(psi0, setup.cut, setup.local_dim),
                    config.r_list.back());
  std::vector<TruncatedState> truncs;
  std::vector<int> rank_before;
  for (int r : config.r_list) {
    truncs.push_back(truncate(psi0, setup.cut, r, setup.local_dim));
    rank_before.push_back(
        schmidt(truncs.back().state, setup.cut, setup.local_dim).rank());
  }

  DecomposeArtifacts out;
  out.errors = Table({"R", "s", "e_meas", "err_vw", "err_wboundary",
                      "unitarity_defect", "collar_whole"},
                     {ColumnKind::integer, ColumnKind::real, ColumnKind::real,
                      ColumnKind::real, ColumnKind::real, ColumnKind::real,
                      ColumnKind::integer});
  out.overlaps = Table(
      {"s", "R", "overlap", "f_a", "eps", "lower_bound", "overlap_margin",
       "tail_cap", "tail_sum", "tail_margin", "rank_before", "rank_after",
       "rank_cap"},
      {ColumnKind::real, ColumnKind::integer, ColumnKind::real,
       ColumnKind::real, ColumnKind::real, ColumnKind::real, ColumnKind::real,
       ColumnKind::integer, ColumnKind::real, ColumnKind::real,
       ColumnKind::integer, ColumnKind::integer, ColumnKind::integer});
  out.support = Table({"s", "R", "factor", "defect"},
                      {ColumnKind::real, ColumnKind::integer,
                       ColumnKind::integer, ColumnKind::real});

  FlowConfig flow_config;
  flow_config.steps = config.steps;
  flow_config.filter_gamma = config.filter_gamma;
  flow_config.snapshot_observer =
      [&](double s, const std::vector<DecompositionReport>& reports) {
        const int k = grid_index(config.s_grid, s);
        const VectorXcd& psi_s = states[k];
        const SchmidtSpectrum spec_s = schmidt(psi_s, setup.cut, setup.local_dim);

        std::vector<std::vector<double>> overlap_rows(reports.size());
        std::vector<std::array<double, 3>> defects(reports.size());
        parallel_for(
            static_cast<int>(reports.size()), config.workers, [&](int ri) {
              const DecompositionReport& report = reports[ri];
              const int r = report.errors.R;

              VectorXcd phi = truncs[ri].state;
              apply_local(report.boundary, n_sites, phi);
              apply_local(report.u_ac, n_sites, phi);
              apply_local(report.u_a, n_sites, phi);
              const double p = overlap_probability(psi_s, phi);

              const double f = fa.f(r);
              const double eps = report.errors.e_meas;
              const double lower = 1.0 - f - 2.0 * eps;

              const long long tail_cap = saturating_power(
                  setup.local_dim, 5 * r * bsize,
                  static_cast<long long>(spec_s.weights.size()));
              const TailCheck tail = tail_constraint_check(spec_s, p, tail_cap);

              const int rank_after = schmidt_rank_after_boundary(
                  truncs[ri].state, setup.cut, report.boundary, r,
                  setup.lattice, setup.local_dim);
              const long long rank_cap = std::min<long long>(
                  rank_before[ri] * saturating_power(setup.local_dim,
                                                     4 * r * bsize, dim_bound),
                  dim_bound);

              overlap_rows[ri] = {s,
                                  static_cast<double>(r),
                                  p,
                                  f,
                                  eps,
                                  lower,
                                  p - lower,
                                  static_cast<double>(tail_cap),
                                  tail.partial_sum,
                                  tail.margin,
                                  static_cast<double>(rank_before[ri]),
                                  static_cast<double>(rank_after),
                                  static_cast<double>(rank_cap)};

              const LocalOperator* factors[3] = {&report.u_a, &report.u_ac,
                                                 &report.boundary};
              for (int f_idx = 0; f_idx < 3; ++f_idx) {
                const unsigned long long seed =
                    config.model.seed * 1000003ULL +
                    static_cast<unsigned long long>(k) * 1009ULL +
                    static_cast<unsigned long long>(ri) * 31ULL +
                    static_cast<unsigned long long>(f_idx);
                defects[ri][f_idx] = support_defect(
                    embed(*factors[f_idx], setup.lattice),
                    factors[f_idx]->support(), setup.lattice, setup.local_dim,
                    20, seed);
              }
            });
        for (std::size_t ri = 0; ri < reports.size(); ++ri) {
          out.overlaps.append(overlap_rows[ri]);
          for (int f_idx = 0; f_idx < 3; ++f_idx)
            out.support.append({s, static_cast<double>(reports[ri].errors.R),
                                static_cast<double>(f_idx),
                                defects[ri][f_idx]});
        }
      };

  const DecompositionScan scan = decomposition_scan(
      setup.path, setup.cut, config.r_list, config.s_grid, flow_config);
  for (const DecompositionErrors& row : scan.rows)
    out.errors.append({static_cast<double>(row.R), row.s, row.e_meas,
                       row.err_vw, row.err_wboundary, row.unitarity_defect,
                       row.collar_is_whole_lattice ? 1.0 : 0.0});

  write_table(artifact(config, "decompose.csv"), out.errors);
  write_table(artifact(config, "overlaps.csv"), out.overlaps);
  write_table(artifact(config, "support.csv"), out.support);
  mark_stage(config, "decompose-scan");
  return out;
}

// ---------------------------------------------------------------------------
// entropy-report: Schmidt spectra and entanglement entropies of the
// transported states, plus the initial state's tail-decay profile.
// ---------------------------------------------------------------------------

EntropyArtifacts stage_entropy(const ExperimentConfig& config) {
  const Setup setup = make_setup(config);
  open_manifest(config);
  require_stage(config, "flow");

  EntropyArtifacts out;
  const VectorXcd psi0 = initial_ground_state(setup.path);
  const DecayProfile fa =
      decay_profile(schmidt(psi0, setup.cut, setup.local_dim),
                    config.r_list.back());
  out.profile =
      Table({"radius", "f_a"}, {ColumnKind::integer, ColumnKind::real});
  for (int r = 0; r <= fa.max_radius(); ++r)
    out.profile.append({static_cast<double>(r), fa.f(r)});

  const int n_points = static_cast<int>(config.s_grid.size());
  out.spectra.resize(n_points);
  std::vector<std::array<double, 2>> rows(n_points);
  parallel_for(n_points, config.workers, [&](int k) {
    const VectorXcd psi = read_state(config, k, setup.dim);
    const SchmidtSpectrum spec = schmidt(psi, setup.cut, setup.local_dim);
    Table spectrum({"alpha", "weight"},
                   {ColumnKind::integer, ColumnKind::real});
    for (std::size_t a = 0; a < spec.weights.size(); ++a)
      spectrum.append({static_cast<double>(a + 1), spec.weights[a]});
    write_table(artifact(config, spectrum_file_name(k)), spectrum);
    out.spectra[k] = std::move(spectrum);
    rows[k] = {entropy(spec), static_cast<double>(spec.rank())};
  });

  out.entropy = Table({"s", "entropy", "schmidt_rank"},
                      {ColumnKind::real, ColumnKind::real, ColumnKind::integer});
  for (int k = 0; k < n_points; ++k)
    out.entropy.append({config.s_grid[k], rows[k][0], rows[k][1]});

  write_table(artifact(config, "profile.csv"), out.profile);
  write_table(artifact(config, "entropy.csv"), out.entropy);
  mark_stage(config, "entropy-report");
  return out;
}

// ---------------------------------------------------------------------------
// bound-report: feed the measured decay profile and per-s decomposition
// errors into the entropy bound, compare against the measured entropies, and
// serialize the per-s reports.
// ---------------------------------------------------------------------------

BoundArtifacts stage_bound(const ExperimentConfig& config) {
  const Setup setup = make_setup(config);
  open_manifest(config);
  require_stage(config, "decompose-scan");
  require_stage(config, "entropy-report");

  const Table profile = read_table(artifact(config, "profile.csv"));
  DecayProfile fa;
  fa.local_dim = setup.local_dim;
  fa.boundary_size = setup.cut.boundary_size();
  {
    const int radius = profile.column_index("radius");
    const int f_col = profile.column_index("f_a");
    for (std::size_t i = 0; i < profile.rows.size(); ++i) {
      if (std::llround(profile.rows[i][radius]) != static_cast<long long>(i))
        throw DomainError("profile table is not contiguous from radius 0");
      fa.values.push_back(profile.rows[i][f_col]);
    }
  }

  // Only a contiguous R = 1,2,... prefix of the measured radii can feed the
  // bound's R0 grid; radii past a gap in the R-list stay unused.
  std::size_t prefix = 0;
  while (prefix < config.r_list.size() &&
         config.r_list[prefix] == static_cast<int>(prefix) + 1)
    ++prefix;

  const Table decompose = read_table(artifact(config, "decompose.csv"));
  const int n_points = static_cast<int>(config.s_grid.size());
  std::vector<std::vector<double>> eps(
      n_points, std::vector<double>(prefix + 1,
                                    std::numeric_limits<double>::quiet_NaN()));
  for (int k = 0; k < n_points; ++k) eps[k][0] = 0.0;
  {
    const int r_col = decompose.column_index("R");
    const int s_col = decompose.column_index("s");
    const int e_col = decompose.column_index("e_meas");
    for (const auto& row : decompose.rows) {
      const int r = static_cast<int>(std::llround(row[r_col]));
      if (r < 1 || r > static_cast<int>(prefix)) continue;
      eps[grid_index(config.s_grid, row[s_col])][r] = row[e_col];
    }
  }
  for (const auto& eps_row : eps)
    for (double value : eps_row)
      if (std::isnan(value))
        throw DomainError("decompose table is missing rows for the R-list");

  const Table entropies = read_table(artifact(config, "entropy.csv"));
  if (static_cast<int>(entropies.rows.size()) != n_points)
    throw DomainError("entropy table does not cover the s-grid");

  BoundArtifacts out;
  json per_s = json::array();
  for (int k = 0; k < n_points; ++k) {
    const double s = config.s_grid[k];
    const double measured = entropies.at(k, "entropy");
    BoundReport report;
    bool feasible = true;
    try {
      report = theorem_bound(fa, eps[k], setup.cut.boundary_size());
    } catch (const NoFeasibleR0Error&) {
      feasible = false;
      report.boundary_size = setup.cut.boundary_size();
      report.bound = std::numeric_limits<double>::quiet_NaN();
    }
    report.measured_entropy = measured;
    report.margin = report.bound - measured;
    per_s.push_back({{"s", s},
                     {"feasible", feasible},
                     {"R0", report.r0},
                     {"c1", report.c1},
                     {"h1", report.h1},
                     {"bound", report.bound},
                     {"measured_entropy", report.measured_entropy},
                     {"margin", report.margin},
                     {"folded_mass", report.folded_mass},
                     {"maximizer_entropy", report.maximizer_entropy},
                     {"combined_f", report.combined_f}});
    out.bounds.push_back(std::move(report));
    out.feasible.push_back(feasible);
  }

  const BoundReport& last = out.bounds.back();
  const json report_json = {{"config_hash", config_hash(config)},
                            {"boundary_size", setup.cut.boundary_size()},
                            {"R0", last.r0},
                            {"c1", last.c1},
                            {"h1", last.h1},
                            {"bound", last.bound},
                            {"measured_entropy", last.measured_entropy},
                            {"margin", last.margin},
                            {"per_s", per_s}};
  std::ofstream json_out(artifact(config, "bound_report.json"));
  if (!json_out)
    throw DomainError("cannot write '" +
                      artifact(config, "bound_report.json") + "'");
  json_out << report_json.dump(2) << "\n";

  mark_stage(config, "bound-report");
  return out;
}

// ---------------------------------------------------------------------------
// The full chain
// ---------------------------------------------------------------------------

bool RunRecord::all_pass() const {
  for (const AssertionResult& a : assertions)
    if (!a.pass) return false;
  return true;
}

RunRecord run_pipeline(const ExperimentConfig& config) {
  RunRecord record;
  record.config_hash = config_hash(config);

  const auto timed = [&record](const std::string& stage, auto&& body) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    record.timings.push_back({stage, elapsed.count()});
  };
  timed("gap-scan", [&] { record.gaps = stage_gap_scan(config); });
  timed("flow", [&] { record.flow = stage_flow(config); });
  timed("decompose-scan", [&] { record.decompose = stage_decompose(config); });
  timed("entropy-report", [&] { record.entropy = stage_entropy(config); });
  timed("bound-report", [&] { record.bound = stage_bound(config); });

  const HamiltonianPath path = build_path(config);
  const Tolerances& tol = config.tolerances;
  auto add = [&record](const std::string& name, double value, double limit,
                       bool pass) {
    record.assertions.push_back({name, pass, value, limit});
  };

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < record.gaps.rows.size(); ++i)
    min_gap = std::min(min_gap, record.gaps.at(i, "gap"));
  add("gap_above_floor", min_gap, path.gamma_floor(),
      min_gap >= path.gamma_floor());

  double max_defect = 0.0;
  for (std::size_t i = 0; i < record.flow.rows.size(); ++i)
    max_defect = std::max(max_defect, record.flow.at(i, "unitarity_defect"));
  for (std::size_t i = 0; i < record.decompose.errors.rows.size(); ++i)
    max_defect = std::max(
        max_defect, record.decompose.errors.at(i, "unitarity_defect"));
  add("unitarity", max_defect, tol.unitarity, max_defect <= tol.unitarity);

  double min_overlap_margin = std::numeric_limits<double>::infinity();
  double min_tail_margin = std::numeric_limits<double>::infinity();
  double max_rank_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < record.decompose.overlaps.rows.size(); ++i) {
    min_overlap_margin = std::min(min_overlap_margin,
                                  record.decompose.overlaps.at(i, "overlap_margin"));
    min_tail_margin = std::min(min_tail_margin,
                               record.decompose.overlaps.at(i, "tail_margin"));
    max_rank_excess = std::max(
        max_rank_excess, record.decompose.overlaps.at(i, "rank_after") -
                             record.decompose.overlaps.at(i, "rank_cap"));
  }
  add("overlap_lower_bound", min_overlap_margin, tol.overlap_margin,
      min_overlap_margin >= tol.overlap_margin);
  add("tail_constraint", min_tail_margin, tol.tail_margin,
      min_tail_margin >= tol.tail_margin);
  add("rank_bound", max_rank_excess, 0.0, max_rank_excess <= 0.0);

  double max_support = 0.0;
  for (std::size_t i = 0; i < record.decompose.support.rows.size(); ++i)
    max_support = std::max(max_support, record.decompose.support.at(i, "defect"));
  add("support", max_support, tol.support_defect,
      max_support <= tol.support_defect);

  double min_slack = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < record.bound.bounds.size(); ++k) {
    if (!record.bound.feasible[k]) continue;
    const double slack = record.bound.bounds[k].margin;
    if (std::isnan(min_slack) || slack < min_slack) min_slack = slack;
  }
  add("entropy_dominance", min_slack, tol.entropy_slack,
      std::isnan(min_slack) || min_slack >= tol.entropy_slack);

  return record;
}

}  // namespace qflow
