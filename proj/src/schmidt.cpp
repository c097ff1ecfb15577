#include "qflow/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace qflow {

namespace {

// Matricization of the state across the cut, with the norm and dimension
// gates shared by every Schmidt-side entry point.
MatrixXcd cut_matrix(const VectorXcd& state, const Cut& cut, int local_dim,
                     SubsetIndex& idx) {
  const int n_total = cut.a().size() + cut.a_complement().size();
  idx = SubsetIndex(cut.a().sites(), n_total, local_dim);
  if (state.size() != idx.dim_full())
    throw DomainError("schmidt: state dimension does not match the cut");
  if (std::abs(state.norm() - 1.0) > 1e-8)
    throw DomainError("schmidt: state is not normalized");
  return matricize(state, idx);
}

int count_above(const VectorXd& singular_values, double floor) {
  int rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i)
    if (singular_values(i) > floor) ++rank;
  return rank;
}

}  // namespace

long long saturating_power(int base, int exponent, long long cap) {
  if (base < 1) throw DomainError("saturating_power: base must be positive");
  if (exponent < 0)
    throw DomainError("saturating_power: exponent must be nonnegative");
  if (cap < 1) throw DomainError("saturating_power: cap must be positive");
  long long value = 1;
  for (int i = 0; i < exponent; ++i) {
    if (value > cap / base) return cap;
    value *= base;
    if (value >= cap) return cap;
  }
  return value;
}

int SchmidtSpectrum::rank(double floor) const {
  int count = 0;
  for (double w : weights)
    if (w > floor) ++count;
  return count;
}

SchmidtSpectrum schmidt(const VectorXcd& state, const Cut& cut,
                        int local_dim) {
  SubsetIndex idx;
  const MatrixXcd m = cut_matrix(state, cut, local_dim, idx);
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd sv = svd.singularValues();

  SchmidtSpectrum spectrum;
  spectrum.weights.resize(sv.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    spectrum.weights[i] = sv(i) * sv(i);
    total += spectrum.weights[i];
  }
  for (double& w : spectrum.weights) w /= total;
  spectrum.left_vectors = svd.matrixU();
  // psi = sum_k s_k U(:,k) (x) conj(V(:,k)), so the right factors are the
  // conjugated columns of V.
  spectrum.right_vectors = svd.matrixV().conjugate();
  spectrum.region_a = cut.a().sites();
  spectrum.local_dim = local_dim;
  spectrum.boundary_size = cut.boundary_size();
  return spectrum;
}

double shannon_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x < 0.0) throw DomainError("shannon_entropy: negative probability");
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double entropy(const SchmidtSpectrum& spectrum) {
  return shannon_entropy(spectrum.weights);
}

double DecayProfile::f(int r) const {
  if (r < 0 || r > max_radius())
    throw DomainError("decay profile does not cover this radius");
  return values[r];
}

DecayProfile decay_profile(const SchmidtSpectrum& spectrum, int r_max) {
  if (r_max < 0) throw DomainError("decay_profile: r_max must be nonnegative");
  if (spectrum.weights.empty())
    throw DomainError("decay_profile: empty spectrum");
  if (spectrum.local_dim < 2 || spectrum.boundary_size < 1)
    throw DomainError("decay_profile: spectrum lacks cut metadata");

  DecayProfile profile;
  profile.local_dim = spectrum.local_dim;
  profile.boundary_size = spectrum.boundary_size;
  profile.values.assign(r_max + 1, 0.0);
  profile.values[0] = 1.0;
  const long long count = static_cast<long long>(spectrum.weights.size());
  for (int r = 1; r <= r_max; ++r) {
    const long long threshold = saturating_power(
        spectrum.local_dim, r * spectrum.boundary_size, count);
    // accumulate from the smallest weights up
    double tail = 0.0;
    for (long long k = count - 1; k >= threshold; --k)
      tail += spectrum.weights[k];
    profile.values[r] = tail;
  }
  return profile;
}

TruncatedState truncate(const VectorXcd& state, const Cut& cut, int R,
                        int local_dim) {
  if (R < 0) throw DomainError("truncate: R must be nonnegative");
  SubsetIndex idx;
  const MatrixXcd m = cut_matrix(state, cut, local_dim, idx);
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd sv = svd.singularValues();

  const long long count = sv.size();
  const long long keep =
      saturating_power(local_dim, R * cut.boundary_size(), count);
  const double kept_weight = sv.head(keep).squaredNorm() / sv.squaredNorm();

  const MatrixXcd clipped = svd.matrixU().leftCols(keep) *
                            sv.head(keep).asDiagonal() *
                            svd.matrixV().leftCols(keep).adjoint();
  VectorXcd out = unmatricize(clipped, idx);
  out /= out.norm();
  return {std::move(out), kept_weight, keep};
}

double overlap_probability(const VectorXcd& exact, const VectorXcd& approx) {
  if (exact.size() != approx.size())
    throw DomainError("overlap_probability: state dimensions differ");
  return std::norm(exact.dot(approx));
}

TailCheck tail_constraint_check(const SchmidtSpectrum& spectrum,
                                double overlap, long long rank_cap) {
  if (rank_cap < 0)
    throw DomainError("tail_constraint_check: rank cap must be nonnegative");
  const long long count = static_cast<long long>(spectrum.weights.size());
  double partial = 0.0;
  for (long long k = 0; k < std::min(rank_cap, count); ++k)
    partial += spectrum.weights[k];
  const double margin = partial - overlap;
  return {margin >= -1e-10, margin, partial};
}

int schmidt_rank_after_boundary(const VectorXcd& state, const Cut& cut,
                                const LocalOperator& boundary_unitary, int R,
                                const Lattice& lattice, int local_dim) {
  if (R < 1)
    throw DomainError("schmidt_rank_after_boundary: R must be at least 1");
  const Region collar = boundary_collar(lattice, cut, 2 * R);
  if (!collar.contains_all(boundary_unitary.support()))
    throw StructuralError(
        "schmidt_rank_after_boundary: unitary acts outside the width-2R "
        "boundary collar");

  SubsetIndex cut_idx;
  const MatrixXcd m_in = cut_matrix(state, cut, local_dim, cut_idx);
  const int rank_in =
      count_above(Eigen::JacobiSVD<MatrixXcd>(m_in).singularValues(), 1e-10);

  const SubsetIndex op_idx(boundary_unitary.support().sites(),
                           lattice.n_sites(), local_dim);
  const MatrixXcd column = state;
  MatrixXcd acted;
  apply_local_left(boundary_unitary.matrix(), op_idx, column, acted);
  const VectorXcd out = acted.col(0);
  const int rank_out = count_above(
      Eigen::JacobiSVD<MatrixXcd>(matricize(out, cut_idx)).singularValues(),
      1e-10);

  const long long dim_bound = std::min(cut_idx.dim_s(), cut_idx.dim_c());
  const long long factor =
      saturating_power(local_dim, 4 * R * cut.boundary_size(), dim_bound);
  const long long bound =
      std::min(static_cast<long long>(rank_in) * factor, dim_bound);
  if (rank_out > bound)
    throw StructuralError(
        "schmidt_rank_after_boundary: rank amplification bound violated");
  return rank_out;
}

}  // namespace qflow
