// Gapped Hamiltonian families H(s) = H0 + sum_u V_u(s) built from local
// terms on a lattice of N-level sites, plus exact diagonalization, gap
// tracking along the path, and Heisenberg-picture evolution.
//
// All shipped families are linear ramps V_u(s) = s * P_u, each P_u anchored
// at a site u with support inside the ball b_u(r0).

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qflow/lattice.hpp"
#include "qflow/space.hpp"

namespace qflow {

// ---------------------------------------------------------------------------
// LocalOperator
// ---------------------------------------------------------------------------

// A matrix acting on the sites of `support` (dimension local_dim^|support|),
// extendable to the full lattice space by tensoring with identity.
class LocalOperator {
 public:
  LocalOperator(Region support, MatrixXcd matrix, int local_dim,
                bool hermitian = true);

  const Region& support() const { return support_; }
  const MatrixXcd& matrix() const { return matrix_; }
  int local_dim() const { return local_dim_; }
  bool hermitian() const { return hermitian_; }
  double norm() const;

 private:
  Region support_;
  MatrixXcd matrix_;
  int local_dim_;
  bool hermitian_;
};

// op on its support, identity on the complement. The real variant requires
// the matrix to be exactly real and is used by the real fast paths.
MatrixXcd embed(const LocalOperator& op, const Lattice& lattice);
MatrixXd embed_real(const LocalOperator& op, const Lattice& lattice);

// ---------------------------------------------------------------------------
// HamiltonianPath
// ---------------------------------------------------------------------------

// One parameterized term V_u(s) = s * P anchored at site `anchor`.
struct RampTerm {
  int anchor;
  LocalOperator op;  // P: the s-derivative of this term
};

class HamiltonianPath {
 public:
  HamiltonianPath(Lattice lattice, int local_dim, std::string family,
                  std::vector<LocalOperator> static_terms,
                  std::vector<RampTerm> ramp_terms, int r0, double J1,
                  double J2, double gamma_floor);

  const Lattice& lattice() const { return lattice_; }
  int local_dim() const { return local_dim_; }
  long dim() const { return ipow(local_dim_, lattice_.n_sites()); }
  const std::string& family() const { return family_; }
  const std::vector<LocalOperator>& static_terms() const { return static_; }
  const std::vector<RampTerm>& ramp_terms() const { return ramp_; }
  int r0() const { return r0_; }
  double J1() const { return J1_; }
  double J2() const { return J2_; }
  double gamma_floor() const { return gamma_floor_; }

  // True when every term matrix is exactly real, enabling real-symmetric
  // eigensolves and real orthogonal flows.
  bool is_real() const { return is_real_; }

  MatrixXcd assemble(double s) const;
  MatrixXd assemble_real(double s) const;  // throws unless is_real()

  // d/ds of each V_u at s, as local operators (constant for linear ramps).
  std::vector<LocalOperator> derivative_terms(double s) const;
  // Sum of the embedded derivative terms.
  MatrixXcd derivative_full(double s) const;

 private:
  Lattice lattice_;
  int local_dim_;
  std::string family_;
  std::vector<LocalOperator> static_;
  std::vector<RampTerm> ramp_;
  int r0_;
  double J1_, J2_, gamma_floor_;
  bool is_real_;
};

// Shipped families. `gamma_floor` <= 0 selects a per-family default.
struct ModelParams {
  double lambda = 0.5;  // coupling strength (tfim)
  double eps = 0.1;     // perturbation strength (field_ramp, random_local)
  std::uint64_t seed = 1;
  double gamma_floor = 0.0;
};

HamiltonianPath make_tfim_path(const Lattice& lattice, const ModelParams& p);
HamiltonianPath make_field_ramp_path(const Lattice& lattice,
                                     const ModelParams& p);
HamiltonianPath make_random_local_path(const Lattice& lattice,
                                       const ModelParams& p);
// Dispatch by family name ("tfim", "field_ramp", "random_local").
HamiltonianPath make_named_path(const std::string& family,
                                const Lattice& lattice, const ModelParams& p);

// Single-qubit Pauli matrices ('x', 'y', 'z', 'i').
MatrixXcd pauli(char which);

// ---------------------------------------------------------------------------
// Spectral data
// ---------------------------------------------------------------------------

template <class Scalar>
struct SpectralDataT {
  VectorXd eigenvalues;  // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;
  bool degenerate = false;

  double ground_energy() const { return eigenvalues(0); }
  double gap() const { return eigenvalues(1) - eigenvalues(0); }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ground_state() const {
    return eigenvectors.col(0);
  }
};

using SpectralData = SpectralDataT<std::complex<double>>;
using SpectralDataReal = SpectralDataT<double>;

// Full diagonalization. Throws GapClosedError (tagged with `s_label`) when
// the ground state is degenerate: E1 - E0 < 1e-8 * ||H||.
SpectralData diagonalize(const MatrixXcd& H, double s_label = -1.0);
SpectralDataReal diagonalize_real(const MatrixXd& H, double s_label = -1.0);

struct GapScan {
  std::vector<double> s_values;
  std::vector<double> gaps;
  double min_gap = 0.0;
  double argmin_s = 0.0;
  bool above_floor = false;
};

// Diagonalize along the s-grid and track the minimum gap against the path's
// declared floor. Throws GapClosedError at a degenerate point.
GapScan gap_along_path(const HamiltonianPath& path,
                       const std::vector<double>& s_grid);

// Heisenberg evolution e^{iHt} O e^{-iHt} via eigenbasis conjugation.
MatrixXcd heisenberg(const SpectralData& spectral, const MatrixXcd& O,
                     double t);

// ---------------------------------------------------------------------------
// Model validation
// ---------------------------------------------------------------------------

struct PathValidation {
  double max_static_norm = 0.0;    // max_u ||Q_u||, must be <= J1
  double max_ramp_norm = 0.0;      // max_{u,s} ||V_u(s)||, must be <= J1
  double max_derivative_norm = 0.0;  // max_{u,s} ||dV_u(s)||, must be <= J2
  double ramp_at_zero = 0.0;       // max_u ||V_u(0)||, must be ~0
  bool ok = false;
};

// Samples term norms on a uniform s-grid (21 points) and checks the declared
// constants dominate the measured ones.
PathValidation validate_path(const HamiltonianPath& path, int grid_points = 21);

}  // namespace qflow
