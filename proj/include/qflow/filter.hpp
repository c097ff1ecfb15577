// Spectral-flow generator construction: the gap filter w(omega), the exact
// ground-state transport generator, its filtered stand-in, a time-domain
// quadrature cross-check, and the localization of the generator into
// ball-supported pieces with measured decay.

#pragma once

#include <vector>

#include "qflow/lattice.hpp"
#include "qflow/model.hpp"
#include "qflow/space.hpp"

namespace qflow {

// ---------------------------------------------------------------------------
// Filter profile
// ---------------------------------------------------------------------------

// Odd spectral profile with w(omega) = 1/omega beyond the gap scale and the
// linear completion omega/gamma^2 inside it (continuous at |omega| = gamma).
// Applied as generator elements D_nm = i * w(E_n - E_m) * dH_nm, this
// reproduces exact ground-state transport whenever every transition energy
// from the ground state clears gamma.
class FilterFunction {
 public:
  explicit FilterFunction(double gamma);
  double gamma() const { return gamma_; }
  double w_hat(double omega) const;

 private:
  double gamma_;
};

// Time-domain window dual to w_hat: W(t) = (1/pi) * Int_0^inf w(omega)
// sin(omega t) d omega, evaluated in closed form via the sine integral.
// Odd in t, jumps at t = 0 (W(0+) = 1/2), and decays like 1/t^2.
double window_value(const FilterFunction& filter, double t);

// Gauss-Legendre panel layout for the time-domain cross-check. Zero values
// resolve to defaults: T = 10/gamma, panels so each spans ~0.5/gamma. The
// window tail decays like 1/t^2, so the truncation error shrinks as T grows;
// pass a larger T for tighter agreement with the spectral construction.
struct QuadratureSpec {
  double T = 0.0;
  int panels = 0;
  int points_per_panel = 12;
};

// ---------------------------------------------------------------------------
// Flow generators (Hermitian matrices D with dU/ds = i D U)
// ---------------------------------------------------------------------------

// Ground-row/column generator from first-order perturbation theory:
// <n|D|0> = i <n|dH|0> / (E_n - E_0), zero elsewhere. Transports the ground
// state exactly.
MatrixXcd exact_generator(const SpectralData& spectral, const MatrixXcd& dH);

// Full filtered generator: D_nm = i * w(E_n - E_m) * dH_nm in the eigenbasis,
// rotated back. Agrees with exact_generator on the ground row/column when the
// gap stays above the filter's gamma.
MatrixXcd filtered_generator(const SpectralData& spectral, const MatrixXcd& dH,
                             const FilterFunction& filter);

// Time-domain variant: D = Int_{-T}^{T} W(t) e^{iHt} dH e^{-iHt} dt by
// Gauss-Legendre panels. Converges to filtered_generator as T grows; used as
// a cross-check of the spectral construction.
MatrixXcd quadrature_generator(const SpectralData& spectral,
                               const MatrixXcd& dH,
                               const FilterFunction& filter,
                               QuadratureSpec spec = {});

// Eigenbasis kernel for flow engines: K_tilde(n,m) = -w(E_n - E_m) *
// dH_tilde(n,m). This is i * D expressed in the eigenbasis; for real
// symmetric inputs it is real antisymmetric, so the flow stays orthogonal.
template <class Mat>
Mat skew_kernel(const VectorXd& energies, const Mat& dH_tilde,
                const FilterFunction& filter) {
  Mat out(dH_tilde.rows(), dH_tilde.cols());
  for (Eigen::Index n = 0; n < out.rows(); ++n)
    for (Eigen::Index m = 0; m < out.cols(); ++m)
      out(n, m) = -filter.w_hat(energies(n) - energies(m)) * dH_tilde(n, m);
  return out;
}

// ---------------------------------------------------------------------------
// Decay model for localized-piece norms
// ---------------------------------------------------------------------------

// f(r) = exp(-c0 * r / ln^2(r + e)): normalized to f(0) = 1, strictly
// decreasing, with a summable tail.
class DecayModel {
 public:
  explicit DecayModel(double c0);
  double c0() const { return c0_; }
  double f(double r) const;
  // Sum_{r >= from} f(r), truncated once terms drop below 1e-18.
  double tail_sum(int from) const;

 private:
  double c0_;
};

struct DecayFit {
  double c0 = 0.0;         // fitted shape constant
  double amplitude = 0.0;  // fitted prefactor: norms ~ amplitude * f(r - r0)
  double rms_log_residual = 0.0;
  int points_used = 0;
};

// Least-squares fit of log(norm) = log(amplitude) - c0 * g(r - r0) over the
// measured piece norms; points below 1e-14 are dropped as numerical noise.
DecayFit fit_decay(const std::vector<int>& radii,
                   const std::vector<double>& norms, int r0);

// ---------------------------------------------------------------------------
// Localization into ball-supported pieces
// ---------------------------------------------------------------------------

// Pieces D_s(u;r) of the single-term generator D_s(u) (the filtered image of
// the embedded derivative term anchored at u): successive differences of
// conditional expectations onto the balls b_u(r), r = r0..r_max. Their
// telescoping sum is the conditional expectation onto b_u(r_max).
std::vector<LocalOperator> localize(const HamiltonianPath& path,
                                    const SpectralData& spectral,
                                    const FilterFunction& filter, int anchor,
                                    int r_max);
// Convenience overload that diagonalizes assemble(s) itself.
std::vector<LocalOperator> localize(const HamiltonianPath& path, double s,
                                    const FilterFunction& filter, int anchor,
                                    int r_max);

struct GeneratorPiece {
  int anchor;
  int radius;
  LocalOperator op;  // supported on ball(anchor, radius)
};

// All pieces over all anchors at one s, plus the full generator they telescope
// back to when r_max spans the lattice.
struct GeneratorDecomposition {
  double s = 0.0;
  int r_max = 0;
  std::vector<GeneratorPiece> pieces;
  MatrixXcd full;
};

GeneratorDecomposition decompose_generator(const HamiltonianPath& path,
                                           double s,
                                           const FilterFunction& filter,
                                           int r_max);

// Sum of the embedded pieces whose ball lies inside Z. With Z the whole
// lattice (and r_max spanning it) this reconstructs the full generator.
// Drives the region-restricted flows U_s(A), U_s(A^c), U_s(boundary collar).
MatrixXcd region_generator(const GeneratorDecomposition& decomposition,
                           const Region& z, const Lattice& lattice);

// Sum of the embedded pieces whose ball both crosses the cut (meets A and
// A^c) and fits inside the collar of width R around it. The crossing
// restriction matters: collar pieces confined to one side already drive
// U_s(A) or U_s(A^c), so only the crossing ones belong to the coupling flow.
// As R grows this converges to the full crossing sum
// D_s - D_s(A) - D_s(A^c).
MatrixXcd boundary_generator(const GeneratorDecomposition& decomposition,
                             const Cut& cut, int R, const Lattice& lattice);

}  // namespace qflow
