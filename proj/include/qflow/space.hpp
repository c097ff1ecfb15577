// Tensor-product index bookkeeping for operators and states on a lattice of
// qudits: embedding local operators, partial traces, conditional expectations,
// and bipartite matricization of state vectors.
//
// Basis convention: site i carries digit weight N^i, so the full basis index of
// a digit string (d_0, d_1, ..., d_{n-1}) is sum_i d_i N^i.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/lattice.hpp"

namespace qflow {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// ---------------------------------------------------------------------------
// SubsetIndex: digit tables for a site subset S and its complement C
// ---------------------------------------------------------------------------

class SubsetIndex {
 public:
  SubsetIndex() = default;

  SubsetIndex(const std::vector<int>& subset_sites, int n_total, int local_dim)
      : sites_(subset_sites), n_total_(n_total), N_(local_dim) {
    dim_full_ = ipow(N_, n_total_);
    dim_s_ = ipow(N_, static_cast<int>(sites_.size()));
    dim_c_ = dim_full_ / dim_s_;
    std::vector<char> in_s(n_total_, 0);
    for (int s : sites_) {
      if (s < 0 || s >= n_total_) throw StructuralError("subset site outside lattice");
      if (in_s[s]) throw StructuralError("duplicate site in subset");
      in_s[s] = 1;
    }
    s_of_full_.resize(dim_full_);
    c_of_full_.resize(dim_full_);
    full_of_sc_.resize(dim_full_);
    // weight of each site's digit inside its group, in ascending site order
    std::vector<long> w(n_total_);
    long ws = 1, wc = 1;
    for (int site = 0; site < n_total_; ++site) {
      if (in_s[site]) {
        w[site] = ws;
        ws *= N_;
      } else {
        w[site] = wc;
        wc *= N_;
      }
    }
    for (long f = 0; f < dim_full_; ++f) {
      long rest = f, sc = 0, cc = 0;
      for (int site = 0; site < n_total_; ++site) {
        const long digit = rest % N_;
        rest /= N_;
        if (in_s[site])
          sc += digit * w[site];
        else
          cc += digit * w[site];
      }
      s_of_full_[f] = sc;
      c_of_full_[f] = cc;
      full_of_sc_[sc * dim_c_ + cc] = f;
    }
  }

  const std::vector<int>& sites() const { return sites_; }
  long dim_full() const { return dim_full_; }
  long dim_s() const { return dim_s_; }
  long dim_c() const { return dim_c_; }
  long full_index(long s_code, long c_code) const { return full_of_sc_[s_code * dim_c_ + c_code]; }
  long s_code(long full) const { return s_of_full_[full]; }
  long c_code(long full) const { return c_of_full_[full]; }

  // True when the full index factorizes as f = hi * N^(hi_site) + s * N^(lo_site) + lo,
  // i.e. the subset occupies a contiguous digit range.
  bool contiguous() const {
    for (std::size_t i = 1; i < sites_.size(); ++i)
      if (sites_[i] != sites_[i - 1] + 1) return false;
    return true;
  }

 private:
  std::vector<int> sites_;
  int n_total_ = 0;
  long N_ = 2;
  long dim_full_ = 1, dim_s_ = 1, dim_c_ = 1;
  std::vector<long> s_of_full_, c_of_full_, full_of_sc_;
};

// ---------------------------------------------------------------------------
// Operator embedding and reduction
// ---------------------------------------------------------------------------

// M acting on the subset, identity on the complement.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> embed_operator(
    const Eigen::MatrixBase<Derived>& M, const SubsetIndex& idx) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (M.rows() != idx.dim_s() || M.cols() != idx.dim_s())
    throw StructuralError("embed_operator: matrix dimension does not match subset dimension");
  Mat full = Mat::Zero(idx.dim_full(), idx.dim_full());
  for (long a = 0; a < idx.dim_s(); ++a)
    for (long b = 0; b < idx.dim_s(); ++b) {
      const auto v = M(a, b);
      if (v == typename Derived::Scalar(0)) continue;
      for (long c = 0; c < idx.dim_c(); ++c) full(idx.full_index(a, c), idx.full_index(b, c)) = v;
    }
  return full;
}

// Partial trace of a full-space operator onto the subset.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> partial_trace(
    const Eigen::MatrixBase<Derived>& full, const SubsetIndex& idx) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (full.rows() != idx.dim_full() || full.cols() != idx.dim_full())
    throw StructuralError("partial_trace: operator dimension does not match lattice dimension");
  Mat out = Mat::Zero(idx.dim_s(), idx.dim_s());
  for (long a = 0; a < idx.dim_s(); ++a)
    for (long b = 0; b < idx.dim_s(); ++b) {
      typename Derived::Scalar acc(0);
      for (long c = 0; c < idx.dim_c(); ++c) acc += full(idx.full_index(a, c), idx.full_index(b, c));
      out(a, b) = acc;
    }
  return out;
}

// Norm-non-increasing projection onto operators supported on the subset:
// (partial trace / complement dimension) tensored with identity.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> conditional_expectation(
    const Eigen::MatrixBase<Derived>& full, const SubsetIndex& idx) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat reduced = partial_trace(full, idx) / static_cast<double>(idx.dim_c());
  return embed_operator(reduced, idx);
}

// (M_S tensor I_C) * X without forming the embedded operator. Gathers the
// rows of X into subset-major order so the transform is a single product.
template <class Scalar>
void apply_local_left(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M,
                      const SubsetIndex& idx,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const long ds = idx.dim_s(), dc = idx.dim_c(), dim = idx.dim_full();
  if (M.rows() != ds || M.cols() != ds || X.rows() != dim)
    throw StructuralError("apply_local_left: dimension mismatch");
  const long cols = X.cols();
  Mat gathered(ds, dc * cols);
  for (long j = 0; j < cols; ++j)
    for (long c = 0; c < dc; ++c)
      for (long s = 0; s < ds; ++s) gathered(s, j * dc + c) = X(idx.full_index(s, c), j);
  Mat transformed = M * gathered;
  out.resize(dim, cols);
  for (long j = 0; j < cols; ++j)
    for (long c = 0; c < dc; ++c)
      for (long s = 0; s < ds; ++s) out(idx.full_index(s, c), j) = transformed(s, j * dc + c);
}

// Full-space product (M_A tensor M_C) where A and C partition the lattice.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> tensor_pair(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M_subset,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M_complement,
    const SubsetIndex& idx) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (M_subset.rows() != idx.dim_s() || M_complement.rows() != idx.dim_c())
    throw StructuralError("tensor_pair: factor dimensions do not match the bipartition");
  Mat full(idx.dim_full(), idx.dim_full());
  for (long a = 0; a < idx.dim_s(); ++a)
    for (long c = 0; c < idx.dim_c(); ++c) {
      const long row = idx.full_index(a, c);
      for (long b = 0; b < idx.dim_s(); ++b)
        for (long d = 0; d < idx.dim_c(); ++d)
          full(row, idx.full_index(b, d)) = M_subset(a, b) * M_complement(c, d);
    }
  return full;
}

// State vector reshaped to a (subset dim) x (complement dim) matrix.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matricize(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& state, const SubsetIndex& idx) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (state.size() != idx.dim_full())
    throw StructuralError("matricize: state dimension does not match lattice dimension");
  Mat M(idx.dim_s(), idx.dim_c());
  for (long f = 0; f < idx.dim_full(); ++f) M(idx.s_code(f), idx.c_code(f)) = state(f);
  return M;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> unmatricize(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M, const SubsetIndex& idx) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> state(idx.dim_full());
  for (long f = 0; f < idx.dim_full(); ++f) state(f) = M(idx.s_code(f), idx.c_code(f));
  return state;
}

}  // namespace qflow
