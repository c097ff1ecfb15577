#include "qflow/filter.hpp"

#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <numbers>

#include "qflow/errors.hpp"
#include "qflow/linalg.hpp"

namespace qflow {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

}  // namespace

// ---------------------------------------------------------------------------
// Filter profile
// ---------------------------------------------------------------------------

FilterFunction::FilterFunction(double gamma) : gamma_(gamma) {
  if (gamma <= 0) throw DomainError("filter gap scale must be positive");
}

double FilterFunction::w_hat(double omega) const {
  if (std::abs(omega) >= gamma_) return 1.0 / omega;
  return omega / (gamma_ * gamma_);
}

double window_value(const FilterFunction& filter, double t) {
  if (t == 0.0) return 0.0;  // odd principal value at the jump
  const double ax = filter.gamma() * std::abs(t);
  // (sin x - x cos x) / x^2, series-expanded near 0 to dodge cancellation
  double bump;
  if (ax < 1e-3) {
    bump = ax / 3.0 - ax * ax * ax / 30.0;
  } else {
    bump = (std::sin(ax) - ax * std::cos(ax)) / (ax * ax);
  }
  const double w = 0.5 - gsl_sf_Si(ax) / kPi + bump / kPi;
  return t > 0 ? w : -w;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

MatrixXcd exact_generator(const SpectralData& spectral, const MatrixXcd& dH) {
  const auto& V = spectral.eigenvectors;
  const auto& E = spectral.eigenvalues;
  if (dH.rows() != V.rows() || dH.cols() != V.rows())
    throw DomainError("exact_generator: dimension mismatch");
  const VectorXcd dh_col = V.adjoint() * (dH * V.col(0));
  VectorXcd d_col = VectorXcd::Zero(V.rows());
  for (Eigen::Index n = 1; n < V.rows(); ++n)
    d_col(n) = Complex(0, 1) * dh_col(n) / (E(n) - E(0));
  MatrixXcd d_tilde = MatrixXcd::Zero(V.rows(), V.rows());
  d_tilde.col(0) = d_col;
  d_tilde.row(0) = d_col.adjoint();
  return V * d_tilde * V.adjoint();
}

MatrixXcd filtered_generator(const SpectralData& spectral, const MatrixXcd& dH,
                             const FilterFunction& filter) {
  const auto& V = spectral.eigenvectors;
  const auto& E = spectral.eigenvalues;
  if (dH.rows() != V.rows() || dH.cols() != V.rows())
    throw DomainError("filtered_generator: dimension mismatch");
  MatrixXcd tilde = V.adjoint() * dH * V;
  for (Eigen::Index n = 0; n < tilde.rows(); ++n)
    for (Eigen::Index m = 0; m < tilde.cols(); ++m)
      tilde(n, m) *= Complex(0, 1) * filter.w_hat(E(n) - E(m));
  return V * tilde * V.adjoint();
}

MatrixXcd quadrature_generator(const SpectralData& spectral,
                               const MatrixXcd& dH,
                               const FilterFunction& filter,
                               QuadratureSpec spec) {
  const auto& V = spectral.eigenvectors;
  const auto& E = spectral.eigenvalues;
  if (dH.rows() != V.rows() || dH.cols() != V.rows())
    throw DomainError("quadrature_generator: dimension mismatch");
  const double g = filter.gamma();
  if (spec.T <= 0) spec.T = 10.0 / g;
  if (spec.panels <= 0) spec.panels = static_cast<int>(std::ceil(2.0 * g * spec.T));
  if (spec.points_per_panel < 2)
    throw DomainError("quadrature needs at least 2 points per panel");

  // Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
  const int q = spec.points_per_panel;
  std::vector<double> ref_x(q), ref_w(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = q * (x * p1 - p0) / (x * x - 1.0);
    ref_x[i] = x;
    ref_w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }

  // Window samples on (0, T]: panels never straddle the jump at t = 0.
  std::vector<double> t_nodes, weighted_window;
  const double width = spec.T / spec.panels;
  for (int p = 0; p < spec.panels; ++p) {
    const double lo = p * width, hi = lo + width;
    for (int i = 0; i < q; ++i) {
      const double t = 0.5 * (hi + lo) + 0.5 * width * ref_x[i];
      t_nodes.push_back(t);
      weighted_window.push_back(0.5 * width * ref_w[i] * window_value(filter, t));
    }
  }

  MatrixXcd tilde = V.adjoint() * dH * V;
  for (Eigen::Index n = 0; n < tilde.rows(); ++n)
    for (Eigen::Index m = 0; m < tilde.cols(); ++m) {
      const double omega = E(n) - E(m);
      double w_t = 0.0;  // 2 * Int_0^T W(t) sin(omega t) dt
      for (std::size_t k = 0; k < t_nodes.size(); ++k)
        w_t += 2.0 * weighted_window[k] * std::sin(omega * t_nodes[k]);
      tilde(n, m) *= Complex(0, 1) * w_t;
    }
  return V * tilde * V.adjoint();
}

// ---------------------------------------------------------------------------
// Decay model
// ---------------------------------------------------------------------------

namespace {

// g(r) = r / ln^2(r + e); strictly increasing on r >= 0 with g(0) = 0.
double decay_shape(double r) {
  const double l = std::log(r + std::numbers::e);
  return r / (l * l);
}

}  // namespace

DecayModel::DecayModel(double c0) : c0_(c0) {
  if (c0 <= 0) throw DomainError("decay constant must be positive");
}

double DecayModel::f(double r) const {
  if (r < 0) throw DomainError("decay model radius must be >= 0");
  return std::exp(-c0_ * decay_shape(r));
}

double DecayModel::tail_sum(int from) const {
  if (from < 0) throw DomainError("tail sum start must be >= 0");
  double sum = 0.0;
  for (int r = from;; ++r) {
    const double term = f(r);
    sum += term;
    if (term < 1e-18) break;
    if (r > from + 2000000) throw DomainError("decay tail failed to converge");
  }
  return sum;
}

DecayFit fit_decay(const std::vector<int>& radii,
                   const std::vector<double>& norms, int r0) {
  if (radii.size() != norms.size())
    throw DomainError("decay fit needs matching radius/norm tables");
  double sxx = 0, sx = 0, sxy = 0, sy = 0;
  int n = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (norms[i] < 1e-14) continue;  // numerical noise floor
    if (radii[i] < r0) throw DomainError("decay fit radius below r0");
    const double x = decay_shape(radii[i] - r0);
    const double y = std::log(norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw DomainError("decay fit needs at least 2 usable points");
  const double det = n * sxx - sx * sx;
  if (det <= 0) throw DomainError("decay fit is degenerate (all radii equal)");
  DecayFit fit;
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;
  fit.c0 = -slope;
  fit.amplitude = std::exp(intercept);
  fit.points_used = n;
  double ss = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (norms[i] < 1e-14) continue;
    const double pred = intercept + slope * decay_shape(radii[i] - r0);
    const double resid = std::log(norms[i]) - pred;
    ss += resid * resid;
  }
  fit.rms_log_residual = std::sqrt(ss / n);
  return fit;
}

// ---------------------------------------------------------------------------
// Localization
// ---------------------------------------------------------------------------

std::vector<LocalOperator> localize(const HamiltonianPath& path,
                                    const SpectralData& spectral,
                                    const FilterFunction& filter, int anchor,
                                    int r_max) {
  const Lattice& lat = path.lattice();
  if (!lat.contains(anchor)) throw DomainError("localize: anchor outside lattice");
  if (r_max < path.r0()) throw DomainError("localize: r_max below r0");

  // The single-anchor generator: filtered image of this anchor's derivative
  // terms only.
  MatrixXcd dH_u = MatrixXcd::Zero(path.dim(), path.dim());
  bool found = false;
  for (const auto& [u, op] : path.ramp_terms()) {
    if (u != anchor) continue;
    dH_u += embed(op, lat);
    found = true;
  }
  std::vector<LocalOperator> pieces;
  if (!found) {
    // No parameterized term anchored here: all pieces vanish.
    for (int r = path.r0(); r <= r_max; ++r) {
      const Region b = ball(lat, anchor, r);
      pieces.emplace_back(b, MatrixXcd::Zero(ipow(path.local_dim(), b.size()),
                                             ipow(path.local_dim(), b.size())),
                          path.local_dim());
    }
    return pieces;
  }
  const MatrixXcd d_u = filtered_generator(spectral, dH_u, filter);

  MatrixXcd prev_reduced;  // reduced matrix of the previous ball
  Region prev_ball;
  for (int r = path.r0(); r <= r_max; ++r) {
    const Region b = ball(lat, anchor, r);
    SubsetIndex idx(b.sites(), lat.n_sites(), path.local_dim());
    MatrixXcd reduced =
        partial_trace(d_u, idx) / static_cast<double>(idx.dim_c());
    MatrixXcd piece = reduced;
    if (r > path.r0()) {
      // subtract the previous conditional expectation, embedded into this ball
      std::vector<int> positions;
      for (int i = 0; i < b.size(); ++i)
        if (prev_ball.contains(b.sites()[i])) positions.push_back(i);
      SubsetIndex inner(positions, b.size(), path.local_dim());
      piece -= embed_operator(prev_reduced, inner);
    }
    pieces.emplace_back(b, piece, path.local_dim());
    prev_reduced = std::move(reduced);
    prev_ball = b;
  }
  return pieces;
}

std::vector<LocalOperator> localize(const HamiltonianPath& path, double s,
                                    const FilterFunction& filter, int anchor,
                                    int r_max) {
  return localize(path, diagonalize(path.assemble(s), s), filter, anchor,
                  r_max);
}

GeneratorDecomposition decompose_generator(const HamiltonianPath& path,
                                           double s,
                                           const FilterFunction& filter,
                                           int r_max) {
  GeneratorDecomposition out;
  out.s = s;
  out.r_max = r_max;
  const auto spectral = diagonalize(path.assemble(s), s);
  out.full = filtered_generator(spectral, path.derivative_full(s), filter);
  for (int u = 0; u < path.lattice().n_sites(); ++u) {
    auto pieces = localize(path, spectral, filter, u, r_max);
    for (std::size_t i = 0; i < pieces.size(); ++i)
      out.pieces.push_back(
          {u, path.r0() + static_cast<int>(i), std::move(pieces[i])});
  }
  return out;
}

MatrixXcd region_generator(const GeneratorDecomposition& decomposition,
                           const Region& z, const Lattice& lattice) {
  const long dim = decomposition.full.rows();
  MatrixXcd sum = MatrixXcd::Zero(dim, dim);
  for (const auto& piece : decomposition.pieces) {
    if (!z.contains_all(piece.op.support())) continue;
    sum += embed(piece.op, lattice);
  }
  return sum;
}

MatrixXcd boundary_generator(const GeneratorDecomposition& decomposition,
                             const Cut& cut, int R, const Lattice& lattice) {
  if (R < 0) throw DomainError("boundary generator needs R >= 0");
  const Region collar = boundary_collar(lattice, cut, R);
  const long dim = decomposition.full.rows();
  MatrixXcd sum = MatrixXcd::Zero(dim, dim);
  for (const auto& piece : decomposition.pieces) {
    const Region& support = piece.op.support();
    bool meets_a = false, meets_ac = false;
    for (int site : support.sites())
      (cut.a().contains(site) ? meets_a : meets_ac) = true;
    if (!meets_a || !meets_ac) continue;
    if (!collar.contains_all(support)) continue;
    sum += embed(piece.op, lattice);
  }
  return sum;
}

}  // namespace qflow
