#include "qflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qflow/errors.hpp"
#include "qflow/linalg.hpp"

namespace qflow {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr long kDimCap = 4096;
constexpr double kDegenerateRel = 1e-8;

using Complex = std::complex<double>;

}  // namespace

// ---------------------------------------------------------------------------
// LocalOperator
// ---------------------------------------------------------------------------

LocalOperator::LocalOperator(Region support, MatrixXcd matrix, int local_dim,
                             bool hermitian)
    : support_(std::move(support)),
      matrix_(std::move(matrix)),
      local_dim_(local_dim),
      hermitian_(hermitian) {
  if (local_dim_ < 2 || local_dim_ > 3)
    throw StructuralError("local dimension must be 2 or 3");
  if (support_.empty()) throw StructuralError("local operator needs a nonempty support");
  const long want = ipow(local_dim_, support_.size());
  if (matrix_.rows() != want || matrix_.cols() != want)
    throw StructuralError("local operator matrix dimension does not match its support");
  if (hermitian_ && operator_norm(MatrixXcd(matrix_ - matrix_.adjoint())) > kHermitianTol)
    throw StructuralError("operator declared hermitian is not");
}

double LocalOperator::norm() const { return operator_norm(matrix_); }

MatrixXcd embed(const LocalOperator& op, const Lattice& lattice) {
  SubsetIndex idx(op.support().sites(), lattice.n_sites(), op.local_dim());
  return embed_operator(op.matrix(), idx);
}

MatrixXd embed_real(const LocalOperator& op, const Lattice& lattice) {
  if (op.matrix().imag().cwiseAbs().maxCoeff() != 0.0)
    throw StructuralError("embed_real on an operator with imaginary entries");
  SubsetIndex idx(op.support().sites(), lattice.n_sites(), op.local_dim());
  return embed_operator(MatrixXd(op.matrix().real()), idx);
}

// ---------------------------------------------------------------------------
// HamiltonianPath
// ---------------------------------------------------------------------------

HamiltonianPath::HamiltonianPath(Lattice lattice, int local_dim,
                                 std::string family,
                                 std::vector<LocalOperator> static_terms,
                                 std::vector<RampTerm> ramp_terms, int r0,
                                 double J1, double J2, double gamma_floor)
    : lattice_(lattice),
      local_dim_(local_dim),
      family_(std::move(family)),
      static_(std::move(static_terms)),
      ramp_(std::move(ramp_terms)),
      r0_(r0),
      J1_(J1),
      J2_(J2),
      gamma_floor_(gamma_floor) {
  if (r0_ < 0) throw StructuralError("interaction radius r0 must be >= 0");
  if (J1_ <= 0 || J2_ < 0)
    throw StructuralError("J1 must be positive and J2 nonnegative");
  if (gamma_floor_ <= 0) throw StructuralError("declared gap floor must be positive");

  auto check_local = [&](const LocalOperator& op, int anchor) {
    if (op.local_dim() != local_dim_)
      throw StructuralError("term local dimension differs from the path's");
    if (anchor >= 0) {
      if (!ball(lattice_, anchor, r0_).contains_all(op.support()))
        throw StructuralError("term support exceeds the radius-r0 ball of its anchor");
      return;
    }
    // Static terms carry no anchor; require some site whose r0-ball covers them.
    for (int u = 0; u < lattice_.n_sites(); ++u)
      if (ball(lattice_, u, r0_).contains_all(op.support())) return;
    throw StructuralError("static term support fits in no radius-r0 ball");
  };
  for (const auto& q : static_) check_local(q, -1);
  for (const auto& [anchor, op] : ramp_) {
    if (!lattice_.contains(anchor)) throw StructuralError("ramp anchor outside lattice");
    check_local(op, anchor);
  }

  is_real_ = true;
  for (const auto& q : static_)
    if (q.matrix().imag().cwiseAbs().maxCoeff() != 0.0) is_real_ = false;
  for (const auto& [anchor, op] : ramp_)
    if (op.matrix().imag().cwiseAbs().maxCoeff() != 0.0) is_real_ = false;
}

MatrixXcd HamiltonianPath::assemble(double s) const {
  if (s < 0.0 || s > 1.0) throw DomainError("path parameter s must lie in [0,1]");
  MatrixXcd H = MatrixXcd::Zero(dim(), dim());
  for (const auto& q : static_) H += embed(q, lattice_);
  if (s != 0.0)
    for (const auto& [anchor, op] : ramp_) H += s * embed(op, lattice_);
  return H;
}

MatrixXd HamiltonianPath::assemble_real(double s) const {
  if (!is_real_) throw StructuralError("assemble_real on a path with complex terms");
  if (s < 0.0 || s > 1.0) throw DomainError("path parameter s must lie in [0,1]");
  MatrixXd H = MatrixXd::Zero(dim(), dim());
  for (const auto& q : static_) H += embed_real(q, lattice_);
  if (s != 0.0)
    for (const auto& [anchor, op] : ramp_) H += s * embed_real(op, lattice_);
  return H;
}

std::vector<LocalOperator> HamiltonianPath::derivative_terms(double s) const {
  if (s < 0.0 || s > 1.0) throw DomainError("path parameter s must lie in [0,1]");
  std::vector<LocalOperator> out;
  out.reserve(ramp_.size());
  for (const auto& [anchor, op] : ramp_) out.push_back(op);
  return out;
}

MatrixXcd HamiltonianPath::derivative_full(double s) const {
  MatrixXcd dH = MatrixXcd::Zero(dim(), dim());
  for (const auto& op : derivative_terms(s)) dH += embed(op, lattice_);
  return dH;
}

// ---------------------------------------------------------------------------
// Shipped families
// ---------------------------------------------------------------------------

MatrixXcd pauli(char which) {
  MatrixXcd m(2, 2);
  switch (which) {
    case 'i': m << 1, 0, 0, 1; break;
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    default: throw DomainError("unknown Pauli label");
  }
  return m;
}

namespace {

std::vector<LocalOperator> transverse_field_terms(const Lattice& lattice) {
  std::vector<LocalOperator> terms;
  for (int u = 0; u < lattice.n_sites(); ++u)
    terms.emplace_back(Region({u}, lattice), MatrixXcd(-pauli('x')), 2);
  return terms;
}

}  // namespace

HamiltonianPath make_tfim_path(const Lattice& lattice, const ModelParams& p) {
  if (p.lambda <= 0) throw StructuralError("tfim coupling must be positive");
  MatrixXcd zz = MatrixXcd::Zero(4, 4);
  zz.diagonal() << 1, -1, -1, 1;
  std::vector<RampTerm> ramp;
  for (auto [u, v] : lattice.edges())
    ramp.push_back({u, LocalOperator(Region({u, v}, lattice),
                                     MatrixXcd(-p.lambda * zz), 2)});
  const double floor = p.gamma_floor > 0 ? p.gamma_floor : 0.9;
  return HamiltonianPath(lattice, 2, "tfim", transverse_field_terms(lattice),
                         std::move(ramp), 1, std::max(1.0, p.lambda), p.lambda,
                         floor);
}

HamiltonianPath make_field_ramp_path(const Lattice& lattice,
                                     const ModelParams& p) {
  if (p.eps < 0)
    throw StructuralError("perturbation strength must be nonnegative");
  std::vector<RampTerm> ramp;
  for (int u = 0; u < lattice.n_sites(); ++u)
    ramp.push_back({u, LocalOperator(Region({u}, lattice),
                                     MatrixXcd(p.eps * pauli('z')), 2)});
  const double floor = p.gamma_floor > 0 ? p.gamma_floor : 1.9;
  return HamiltonianPath(lattice, 2, "field_ramp",
                         transverse_field_terms(lattice), std::move(ramp), 0,
                         std::max(1.0, p.eps), p.eps, floor);
}

HamiltonianPath make_random_local_path(const Lattice& lattice,
                                       const ModelParams& p) {
  if (p.eps < 0)
    throw StructuralError("perturbation strength must be nonnegative");
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<RampTerm> ramp;
  for (auto [u, v] : lattice.edges()) {
    MatrixXcd a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
    MatrixXcd h = 0.5 * (a + a.adjoint());
    h /= operator_norm(h);
    ramp.push_back(
        {u, LocalOperator(Region({u, v}, lattice), MatrixXcd(p.eps * h), 2)});
  }
  const double floor = p.gamma_floor > 0 ? p.gamma_floor : 0.5;
  return HamiltonianPath(lattice, 2, "random_local",
                         transverse_field_terms(lattice), std::move(ramp), 1,
                         std::max(1.0, p.eps), p.eps, floor);
}

HamiltonianPath make_named_path(const std::string& family,
                                const Lattice& lattice, const ModelParams& p) {
  if (family == "tfim") return make_tfim_path(lattice, p);
  if (family == "field_ramp") return make_field_ramp_path(lattice, p);
  if (family == "random_local") return make_random_local_path(lattice, p);
  throw StructuralError("unknown model family: " + family);
}

// ---------------------------------------------------------------------------
// Spectral data
// ---------------------------------------------------------------------------

namespace {

template <class Mat>
auto diagonalize_impl(const Mat& H, double s_label) {
  using Scalar = typename Mat::Scalar;
  if (H.rows() != H.cols()) throw DomainError("diagonalize: matrix must be square");
  if (H.rows() < 2) throw DomainError("diagonalize: dimension must be at least 2");
  if (H.rows() > kDimCap) throw DomainError("diagonalize: dimension exceeds the cap");
  SpectralDataT<Scalar> out;
  eigh(H, out.eigenvalues, out.eigenvectors);
  const double hnorm = std::max(std::abs(out.eigenvalues(0)),
                                std::abs(out.eigenvalues(out.eigenvalues.size() - 1)));
  out.degenerate = out.gap() <= kDegenerateRel * hnorm;
  if (out.degenerate)
    throw GapClosedError(s_label, "degenerate ground state (gap " +
                                      std::to_string(out.gap()) + ")");
  return out;
}

}  // namespace

SpectralData diagonalize(const MatrixXcd& H, double s_label) {
  return diagonalize_impl(H, s_label);
}

SpectralDataReal diagonalize_real(const MatrixXd& H, double s_label) {
  return diagonalize_impl(H, s_label);
}

GapScan gap_along_path(const HamiltonianPath& path,
                       const std::vector<double>& s_grid) {
  if (s_grid.empty()) throw DomainError("gap scan needs a nonempty s-grid");
  GapScan scan;
  scan.min_gap = std::numeric_limits<double>::infinity();
  for (double s : s_grid) {
    double gap;
    if (path.is_real()) {
      gap = diagonalize_real(path.assemble_real(s), s).gap();
    } else {
      gap = diagonalize(path.assemble(s), s).gap();
    }
    scan.s_values.push_back(s);
    scan.gaps.push_back(gap);
    if (gap < scan.min_gap) {
      scan.min_gap = gap;
      scan.argmin_s = s;
    }
  }
  scan.above_floor = scan.min_gap >= path.gamma_floor();
  return scan;
}

MatrixXcd heisenberg(const SpectralData& spectral, const MatrixXcd& O,
                     double t) {
  const auto& V = spectral.eigenvectors;
  if (O.rows() != V.rows() || O.cols() != V.rows())
    throw DomainError("heisenberg: operator dimension mismatch");
  MatrixXcd tilde = V.adjoint() * O * V;
  const auto& E = spectral.eigenvalues;
  for (Eigen::Index n = 0; n < tilde.rows(); ++n)
    for (Eigen::Index m = 0; m < tilde.cols(); ++m)
      tilde(n, m) *= std::exp(Complex(0, (E(n) - E(m)) * t));
  return V * tilde * V.adjoint();
}

// ---------------------------------------------------------------------------
// Model validation
// ---------------------------------------------------------------------------

PathValidation validate_path(const HamiltonianPath& path, int grid_points) {
  if (grid_points < 2) throw DomainError("validation grid needs at least 2 points");
  PathValidation v;
  for (const auto& q : path.static_terms())
    v.max_static_norm = std::max(v.max_static_norm, q.norm());
  for (const auto& [anchor, op] : path.ramp_terms()) {
    const double pnorm = op.norm();
    for (int k = 0; k < grid_points; ++k) {
      const double s = static_cast<double>(k) / (grid_points - 1);
      v.max_ramp_norm = std::max(v.max_ramp_norm, s * pnorm);  // V_u(s) = s P_u
      v.max_derivative_norm = std::max(v.max_derivative_norm, pnorm);
    }
    v.ramp_at_zero = std::max(v.ramp_at_zero, 0.0);  // V_u(0) = 0 for ramps
  }
  const double slack = 1e-12;
  v.ok = v.max_static_norm <= path.J1() + slack &&
         v.max_ramp_norm <= path.J1() + slack &&
         v.max_derivative_norm <= path.J2() + slack && v.ramp_at_zero <= slack;
  return v;
}

}  // namespace qflow
