// Flow integration: the full transport unitary, the region-restricted flows,
// and the three-factor boundary decomposition with measured errors.

#pragma once

#include <functional>
#include <vector>

#include "qflow/filter.hpp"
#include "qflow/lattice.hpp"
#include "qflow/model.hpp"

namespace qflow {

// ---------------------------------------------------------------------------
// Generic midpoint-exponential integrator
// ---------------------------------------------------------------------------

struct FlowResult {
  MatrixXcd unitary;
  std::vector<double> s_grid;            // step boundaries, 0..s_end
  std::vector<double> unitarity_defects;  // ||U^dag U - 1||_F after each step
  int generator_evaluations = 0;
};

// Integrates dU/ds = i * gen(s) * U from U(0) = 1 by midpoint exponentials:
// U <- exp(i*h*gen(s + h/2)) * U. Every generator sample must be Hermitian.
FlowResult integrate_flow(const std::function<MatrixXcd(double)>& gen,
                          double s_end, int steps);

// ---------------------------------------------------------------------------
// Boundary decomposition of the transport unitary
// ---------------------------------------------------------------------------

// One (R, s) row of the decomposition error table.
struct DecompositionErrors {
  int R = 0;
  double s = 0.0;
  double e_meas = 0.0;          // ||U_A (x) U_Ac * B_R - U_s||
  double err_vw = 0.0;          // ||V_s(A) - W_s(A)||
  double err_wboundary = 0.0;   // ||W_s(A) - W_s(collar(2R))||
  double unitarity_defect = 0.0;
  bool collar_is_whole_lattice = false;
};

struct DecompositionReport {
  DecompositionErrors errors;
  LocalOperator u_a;        // unitary on A
  LocalOperator u_ac;       // unitary on A^c
  LocalOperator boundary;   // B_R on collar(2R): adjoint of the W flow there
};

struct FlowConfig {
  int steps = 200;
  double filter_gamma = 0.0;  // <= 0: use the path's declared gap floor
  // Invoked at every snapshot with that snapshot's factor reports, one per R
  // in r_list order. The report vector is only valid during the call.
  std::function<void(double s, const std::vector<DecompositionReport>&)>
      snapshot_observer;
};

// Full scan: one pass integrates the transport flow once and every
// R-dependent coupling flow alongside it, emitting rows at the requested
// snapshot values of s (each must be a multiple of the step size).
struct DecompositionScan {
  std::vector<DecompositionErrors> rows;  // ordered by (s, R)
  std::vector<DecompositionReport> final_reports;  // one per R, at s_end
};

DecompositionScan decomposition_scan(const HamiltonianPath& path,
                                     const Cut& cut,
                                     const std::vector<int>& r_list,
                                     const std::vector<double>& s_snapshots,
                                     const FlowConfig& config);

// Single-point convenience wrapper around decomposition_scan.
DecompositionReport decompose_flow(const HamiltonianPath& path, const Cut& cut,
                                   int R, double s, const FlowConfig& config);

// Error table over R at fixed s, with a fitted log-error decay slope
// (descriptive statistic; 0 when fewer than two positive errors).
struct ErrorScan {
  std::vector<DecompositionErrors> rows;
  double log_slope = 0.0;  // d log(e_meas) / dR from least squares
};

ErrorScan error_scan(const HamiltonianPath& path, const Cut& cut,
                     const std::vector<int>& r_list, double s,
                     const FlowConfig& config);

// ---------------------------------------------------------------------------
// Region kernels (the skew generators the decomposition flows integrate)
// ---------------------------------------------------------------------------

// Snapshot of every kernel at one s, built by the same reduction path the
// scan engine steps with. k_* are i*D (anti-Hermitian). Local kernels live on
// their region's subspace; k_collar2_local entries are empty matrices when
// the 2R collar covers the whole lattice.
struct RegionKernels {
  MatrixXcd k_full;
  MatrixXcd k_a_local;
  MatrixXcd k_ac_local;
  std::vector<MatrixXcd> k_boundary_full;   // crossing pieces within collar(R)
  std::vector<MatrixXcd> k_collar2_local;   // all pieces within collar(2R)
};

RegionKernels region_kernels(const HamiltonianPath& path, const Cut& cut,
                             const std::vector<int>& r_list, double s,
                             const FilterFunction& filter);

// ---------------------------------------------------------------------------
// Support certification
// ---------------------------------------------------------------------------

// Max Frobenius norm of [M, P] over `probes` random single-site unitaries P
// embedded on the complement of `support`. Zero (to roundoff) exactly when M
// acts trivially outside `support`.
double support_defect(const MatrixXcd& m, const Region& support,
                      const Lattice& lattice, int local_dim, int probes,
                      unsigned long long seed);

}  // namespace qflow
