// Schmidt machinery across a cut: spectra and entanglement entropy, rank-
// limited truncations with their kept weight, empirical tail-decay profiles,
// state overlaps, tail-constraint checks, and the Schmidt-rank effect of
// boundary-supported unitaries.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/lattice.hpp"
#include "qflow/model.hpp"
#include "qflow/space.hpp"

namespace qflow {

// base^exponent saturated at `cap`. Rank thresholds grow past the full
// Schmidt rank within a few steps at chain sizes, where the associated
// bounds become vacuous; saturation keeps them well-defined.
long long saturating_power(int base, int exponent, long long cap);

// ---------------------------------------------------------------------------
// SchmidtSpectrum
// ---------------------------------------------------------------------------

// Schmidt spectrum of a pure state across a cut. `weights` holds the squared
// Schmidt coefficients in decreasing order, renormalized to sum to one. The
// columns of the vector matrices are the matching orthonormal factors in
// subset-major encoding, so
//   psi(f) = sum_k sqrt(weights[k]) * left_vectors(a, k) * right_vectors(c, k)
// where (a, c) are the A / A-complement codes of the full index f. The vector
// matrices may be empty for hand-built spectra.
struct SchmidtSpectrum {
  std::vector<double> weights;
  Eigen::MatrixXcd left_vectors;
  Eigen::MatrixXcd right_vectors;
  std::vector<int> region_a;  // cut identity: sites of A, ascending
  int local_dim = 0;
  int boundary_size = 0;  // crossing edges of the cut

  // Count of weights above `floor` (squared-coefficient scale).
  int rank(double floor = 1e-20) const;
};

// Spectrum across cut.a() : cut.a_complement() via SVD of the matricized
// state. The state must be normalized to 1e-8.
SchmidtSpectrum schmidt(const Eigen::VectorXcd& state, const Cut& cut,
                        int local_dim);

// -sum_k p_k ln p_k in nats, with 0 ln 0 := 0. Entries must be nonnegative.
double shannon_entropy(const std::vector<double>& p);

// Von Neumann entanglement entropy of the spectrum, in nats.
double entropy(const SchmidtSpectrum& spectrum);

// ---------------------------------------------------------------------------
// DecayProfile
// ---------------------------------------------------------------------------

// Tabulated tail mass f(R) beyond the rank threshold N^(R * boundary_size)
// for R = 0..r_max. f(0) is pinned to 1 by convention; the table is
// non-increasing and reaches 0 once the threshold saturates the full rank.
struct DecayProfile {
  std::vector<double> values;
  int local_dim = 0;
  int boundary_size = 0;

  int max_radius() const { return static_cast<int>(values.size()) - 1; }
  double f(int r) const;
};

DecayProfile decay_profile(const SchmidtSpectrum& spectrum, int r_max);

// ---------------------------------------------------------------------------
// Truncation and overlaps
// ---------------------------------------------------------------------------

// Rank-limited approximation of a state: the top N^(R * boundary_size)
// Schmidt terms, renormalized. `kept_weight` is the Schmidt mass c_R of the
// kept terms, so the overlap with the input state is sqrt(c_R), real and
// non-negative because both states share one set of Schmidt vectors.
struct TruncatedState {
  Eigen::VectorXcd state;
  double kept_weight;
  long long rank_kept;
};

TruncatedState truncate(const Eigen::VectorXcd& state, const Cut& cut, int R,
                        int local_dim);

// Squared inner-product magnitude |<exact|approx>|^2.
double overlap_probability(const Eigen::VectorXcd& exact,
                           const Eigen::VectorXcd& approx);

// Result of checking that the leading `rank_cap` weights carry at least the
// overlap probability: partial_sum >= overlap - 1e-10.
struct TailCheck {
  bool holds;
  double margin;  // partial_sum - overlap
  double partial_sum;
};

TailCheck tail_constraint_check(const SchmidtSpectrum& spectrum,
                                double overlap, long long rank_cap);

// ---------------------------------------------------------------------------
// Boundary-unitary rank amplification
// ---------------------------------------------------------------------------

// Schmidt rank (singular values > 1e-10) of boundary_unitary applied to the
// state, across the cut. The unitary must be supported inside the width-2R
// boundary collar (otherwise StructuralError); R must be >= 1. The result is
// checked against input_rank * N^(4 R * boundary_size), saturated at the
// bipartition dimension bound.
int schmidt_rank_after_boundary(const Eigen::VectorXcd& state, const Cut& cut,
                                const LocalOperator& boundary_unitary, int R,
                                const Lattice& lattice, int local_dim);

}  // namespace qflow
