#include "qflow/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qflow/errors.hpp"

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a,
             const int* lda, double* w, double* work, const int* lwork,
             int* iwork, const int* liwork, int* info);
void zheevd_(const char* jobz, const char* uplo, const int* n,
             std::complex<double>* a, const int* lda, double* w,
             std::complex<double>* work, const int* lwork, double* rwork,
             const int* lrwork, int* iwork, const int* liwork, int* info);
}

namespace qflow {

namespace {

// Divide-and-conquer solvers beat Eigen's tridiagonal QR by ~4x at the
// dimensions the flow integrator lives at; below this size the call
// overhead dominates and Eigen is simpler.
constexpr int kLapackMinDim = 16;

[[noreturn]] void throw_lapack(const char* routine, int info) {
  throw Error(std::string(routine) + " failed with info=" +
              std::to_string(info));
}

}  // namespace

void eigh(const MatrixXd& H, VectorXd& eigenvalues, MatrixXd& eigenvectors) {
  if (H.rows() != H.cols()) throw DomainError("eigh: matrix must be square");
  const int n = static_cast<int>(H.rows());
  if (n < kLapackMinDim) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(H);
    eigenvalues = solver.eigenvalues();
    eigenvectors = solver.eigenvectors();
    return;
  }
  eigenvectors = H;
  eigenvalues.resize(n);
  int info = 0;
  int lwork = -1, liwork = -1;
  double work_query = 0;
  int iwork_query = 0;
  dsyevd_("V", "L", &n, eigenvectors.data(), &n, eigenvalues.data(),
          &work_query, &lwork, &iwork_query, &liwork, &info);
  if (info != 0) throw_lapack("dsyevd workspace query", info);
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<size_t>(lwork));
  std::vector<int> iwork(static_cast<size_t>(liwork));
  dsyevd_("V", "L", &n, eigenvectors.data(), &n, eigenvalues.data(),
          work.data(), &lwork, iwork.data(), &liwork, &info);
  if (info != 0) throw_lapack("dsyevd", info);
}

void eigh(const MatrixXcd& H, VectorXd& eigenvalues, MatrixXcd& eigenvectors) {
  if (H.rows() != H.cols()) throw DomainError("eigh: matrix must be square");
  const int n = static_cast<int>(H.rows());
  if (n < kLapackMinDim) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(H);
    eigenvalues = solver.eigenvalues();
    eigenvectors = solver.eigenvectors();
    return;
  }
  eigenvectors = H;
  eigenvalues.resize(n);
  int info = 0;
  int lwork = -1, lrwork = -1, liwork = -1;
  std::complex<double> work_query = 0;
  double rwork_query = 0;
  int iwork_query = 0;
  zheevd_("V", "L", &n, eigenvectors.data(), &n, eigenvalues.data(),
          &work_query, &lwork, &rwork_query, &lrwork, &iwork_query, &liwork,
          &info);
  if (info != 0) throw_lapack("zheevd workspace query", info);
  lwork = static_cast<int>(work_query.real());
  lrwork = static_cast<int>(rwork_query);
  liwork = iwork_query;
  std::vector<std::complex<double>> work(static_cast<size_t>(lwork));
  std::vector<double> rwork(static_cast<size_t>(lrwork));
  std::vector<int> iwork(static_cast<size_t>(liwork));
  zheevd_("V", "L", &n, eigenvectors.data(), &n, eigenvalues.data(),
          work.data(), &lwork, rwork.data(), &lrwork, iwork.data(), &liwork,
          &info);
  if (info != 0) throw_lapack("zheevd", info);
}

namespace {

template <typename Mat>
double gram_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  // The Gram matrix is Hermitian PSD; its top eigenvalue is the squared
  // spectral norm. Cheaper and more deterministic than an SVD at our sizes.
  Mat gram;
  if (M.rows() <= M.cols()) {
    gram.noalias() = M * M.adjoint();
  } else {
    gram.noalias() = M.adjoint() * M;
  }
  VectorXd evals;
  Mat evecs;
  eigh(gram, evals, evecs);
  const double top = evals(evals.size() - 1);
  return std::sqrt(std::max(top, 0.0));
}

}  // namespace

double operator_norm(const MatrixXd& M) { return gram_norm(M); }
double operator_norm(const MatrixXcd& M) { return gram_norm(M); }

VectorXd singular_values(const MatrixXd& M) {
  Eigen::BDCSVD<MatrixXd> svd(M);
  return svd.singularValues();
}

VectorXd singular_values(const MatrixXcd& M) {
  Eigen::BDCSVD<MatrixXcd> svd(M);
  return svd.singularValues();
}

namespace {

// Paterson-Stockmeyer evaluation of the truncated exponential series.
// Degrees and norm cutoffs are chosen so the series remainder
// e^t - T_m(t), |t| <= theta, stays below ~3e-14:
//   deg 6  for theta <= 0.015   (3 multiplies)
//   deg 9  for theta <= 0.20    (4 multiplies)
//   deg 13 for theta <= 0.60    (6 multiplies)
// The Frobenius norm upper-bounds the spectral norm, so using it as the
// gate is safe for the normal matrices this is called on.
template <typename Mat>
Mat expm_taylor(const Mat& X, int degree) {
  static const double kInvFact[] = {
      1.0,
      1.0,
      1.0 / 2,
      1.0 / 6,
      1.0 / 24,
      1.0 / 120,
      1.0 / 720,
      1.0 / 5040,
      1.0 / 40320,
      1.0 / 362880,
      1.0 / 3628800,
      1.0 / 39916800,
      1.0 / 479001600,
      1.0 / 6227020800.0,
  };
  const auto n = X.rows();
  const Mat I = Mat::Identity(n, n);
  Mat X2, X3;
  X2.noalias() = X * X;
  X3.noalias() = X2 * X;
  if (degree == 6) {
    Mat B1 = kInvFact[3] * I + kInvFact[4] * X + kInvFact[5] * X2 +
             kInvFact[6] * X3;
    Mat T = I + X + kInvFact[2] * X2;
    T.noalias() += X3 * B1;
    return T;
  }
  if (degree == 9) {
    Mat B2 = kInvFact[6] * I + kInvFact[7] * X + kInvFact[8] * X2 +
             kInvFact[9] * X3;
    Mat B1 = kInvFact[3] * I + kInvFact[4] * X + kInvFact[5] * X2;
    B1.noalias() += X3 * B2;
    Mat T = I + X + kInvFact[2] * X2;
    T.noalias() += X3 * B1;
    return T;
  }
  // degree 13
  Mat X4;
  X4.noalias() = X2 * X2;
  Mat B3 = kInvFact[12] * I + kInvFact[13] * X;
  Mat B2 = kInvFact[8] * I + kInvFact[9] * X + kInvFact[10] * X2 +
           kInvFact[11] * X3;
  B2.noalias() += X4 * B3;
  Mat B1 = kInvFact[4] * I + kInvFact[5] * X + kInvFact[6] * X2 +
           kInvFact[7] * X3;
  B1.noalias() += X4 * B2;
  Mat T = I + X + kInvFact[2] * X2 + kInvFact[3] * X3;
  T.noalias() += X4 * B1;
  return T;
}

template <typename Mat>
Mat expm_dispatch(const Mat& X) {
  if (X.rows() != X.cols())
    throw DomainError("expm_normal: matrix must be square");
  const double theta = X.norm();
  if (theta <= 0.015) return expm_taylor(X, 6);
  if (theta <= 0.20) return expm_taylor(X, 9);
  if (theta <= 0.60) return expm_taylor(X, 13);
  return X.exp();
}

}  // namespace

MatrixXd expm_normal(const MatrixXd& X) { return expm_dispatch(X); }
MatrixXcd expm_normal(const MatrixXcd& X) { return expm_dispatch(X); }

}  // namespace qflow
