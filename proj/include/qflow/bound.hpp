// Constrained entropy maximization over rank-tail constraints, the resulting
// entanglement-entropy bounds, and the majorization utilities backing them.
//
// A TailConstraint pins the mass a sorted distribution may carry past a
// sequence of rank cut points; the block-uniform distribution that meets
// every constraint with equality maximizes the Shannon entropy, which yields
// the closed-form bound ln s_1 + c_1 ln r + h_1.

#pragma once

#include <limits>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/schmidt.hpp"

namespace qflow {

// ---------------------------------------------------------------------------
// TailConstraint
// ---------------------------------------------------------------------------

// Rank cut points s_n with tail bounds f(n): admissible sorted distributions
// satisfy sum_{alpha > s_n} p(alpha) <= f(n) for every n. Cut points are
// integers with s_0 = 0, s_1 >= 1, strictly increasing and growing by at most
// the ratio r per step; tail bounds start at f(0) = 1 and decrease strictly.
// Stored as doubles so that cut points up to N^(5 n R |dA|) stay exact.
class TailConstraint {
 public:
  TailConstraint(std::vector<double> cut_points, std::vector<double> tail_bounds,
                 double ratio);

  int levels() const { return static_cast<int>(cut_points_.size()); }
  double cut_point(int n) const { return cut_points_[n]; }
  double tail_bound(int n) const { return tail_bounds_[n]; }
  double ratio() const { return ratio_; }

  // Block mass f(n) - f(n+1); the final level folds its whole remaining
  // tail, delta(levels-1) = f(levels-1).
  double delta(int n) const;

 private:
  std::vector<double> cut_points_;
  std::vector<double> tail_bounds_;
  double ratio_;
};

// ---------------------------------------------------------------------------
// BoundReport
// ---------------------------------------------------------------------------

// Assembled entropy bound: the block masses delta(n), their weighted count
// c_1 = sum n delta(n), the block-mass entropy h_1 = -sum delta ln delta, and
// the bound itself. Theorem-style reports additionally carry the minimum
// feasible radius r0, the boundary size, and the combined tail table used.
// `measured_entropy` and `margin` stay NaN until a pipeline fills them.
struct BoundReport {
  std::vector<double> delta;
  double c1 = 0.0;
  double h1 = 0.0;
  double bound = 0.0;
  double maximizer_entropy = 0.0;  // H of the block-uniform maximizer
  double folded_mass = 0.0;        // tail mass folded into the last block
  int r0 = 0;
  int boundary_size = 0;
  std::vector<double> combined_f;
  double measured_entropy = std::numeric_limits<double>::quiet_NaN();
  double margin = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// The entropy-maximizing distribution truncated to n_max blocks: uniform
// within each block (s_n, s_{n+1}] with mass delta(n), the remainder f(n_max)
// folded uniformly into the last block. Meets every interior tail constraint
// with equality. Requires 1 <= n_max <= levels()-1 and a materializable size.
std::vector<double> maximizing_distribution(const TailConstraint& tc,
                                            int n_max);

// The bound ln s_1 + c_1 ln r + h_1 on the entropy of any admissible
// distribution, with the series truncated once f(n) < 1e-15 (remainder
// folded, recorded in folded_mass). Also evaluates the maximizer entropy
// H(mu) analytically and checks H(mu) <= bound.
BoundReport entropy_bound(const TailConstraint& tc);

// Bound assembly from a measured decay profile and a table of flow
// decomposition errors eps indexed by radius (eps[0] is never read):
// r0 is the smallest radius with f(r0) + 2 eps[r0] <= 1/2, the combined tails
// f(n) = f(n r0) + 2 eps(n r0) live on the grid n r0 (clipped at the common
// table end, remainder folded and logged), and
//   bound = 5 (1 + c_1) r0 boundary_size + h_1.
// Throws NoFeasibleR0Error when no radius meets the 1/2 threshold.
BoundReport theorem_bound(const DecayProfile& fa, const std::vector<double>& eps,
                          int boundary_size);

// True iff the descending prefix sums of p dominate those of q. Both must
// sum to 1 within 1e-10; inputs are sorted internally and zero-padded to a
// common length; dominance is checked with 1e-12 slack.
bool majorizes(const std::vector<double>& p, const std::vector<double>& q);

// True iff sum sigma(alpha) p(alpha) >= sum sigma(alpha) q(alpha) with p and
// q sorted descending internally. sigma must already be sorted descending
// (the pairing is only monotone for sorted weights). When p majorizes q the
// result is always true.
bool schur_pairing_check(const std::vector<double>& sigma,
                         const std::vector<double>& p,
                         const std::vector<double>& q);

}  // namespace qflow
