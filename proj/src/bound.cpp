#include "qflow/bound.hpp"

#include <algorithm>
#include <cmath>

namespace qflow {

namespace {

// Tail levels below this floor are folded into the final block; the folded
// mass is below every test tolerance.
constexpr double kSeriesFloor = 1e-15;

double xlnx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double checked_sum(const std::vector<double>& v, const char* what) {
  double s = 0.0;
  for (double x : v) s += x;
  if (std::abs(s - 1.0) > 1e-10) throw DomainError(std::string(what) + " does not sum to 1");
  return s;
}

}  // namespace

TailConstraint::TailConstraint(std::vector<double> cut_points,
                               std::vector<double> tail_bounds, double ratio)
    : cut_points_(std::move(cut_points)),
      tail_bounds_(std::move(tail_bounds)),
      ratio_(ratio) {
  if (cut_points_.size() < 2)
    throw DomainError("tail constraint needs at least levels s_0 and s_1");
  if (tail_bounds_.size() != cut_points_.size())
    throw DomainError("tail constraint tables differ in length");
  if (!(ratio_ >= 1.0)) throw DomainError("tail constraint ratio must be >= 1");
  if (cut_points_[0] != 0.0)
    throw DomainError("tail constraint must start at s_0 = 0");
  if (cut_points_[1] < 1.0) throw DomainError("s_1 must be at least 1");
  for (std::size_t n = 0; n < cut_points_.size(); ++n) {
    if (cut_points_[n] != std::floor(cut_points_[n]))
      throw DomainError("cut points must be integers");
    if (n > 0 && cut_points_[n] <= cut_points_[n - 1])
      throw DomainError("cut points must increase strictly");
    if (n >= 2 && cut_points_[n] > ratio_ * cut_points_[n - 1] * (1.0 + 1e-12))
      throw DomainError("cut points outgrow the ratio cap");
  }
  if (std::abs(tail_bounds_[0] - 1.0) > 1e-12)
    throw DomainError("tail bounds must start at f(0) = 1");
  for (std::size_t n = 1; n < tail_bounds_.size(); ++n) {
    if (tail_bounds_[n] < 0.0)
      throw DomainError("tail bounds must be nonnegative");
    if (!(tail_bounds_[n] < tail_bounds_[n - 1]))
      throw DomainError("tail bounds must decrease strictly");
  }
}

double TailConstraint::delta(int n) const {
  if (n < 0 || n >= levels())
    throw DomainError("tail constraint level out of range");
  if (n == levels() - 1) return tail_bounds_[n];
  return tail_bounds_[n] - tail_bounds_[n + 1];
}

std::vector<double> maximizing_distribution(const TailConstraint& tc,
                                            int n_max) {
  if (n_max < 1 || n_max > tc.levels() - 1)
    throw DomainError("maximizing_distribution: n_max out of range");
  const double size_d = tc.cut_point(n_max);
  if (size_d > 1e7)
    throw DomainError("maximizing_distribution: too large to materialize");
  std::vector<double> mu(static_cast<long>(std::lround(size_d)), 0.0);
  for (int n = 0; n < n_max; ++n) {
    const long lo = std::lround(tc.cut_point(n));
    const long hi = std::lround(tc.cut_point(n + 1));
    if (hi <= lo)
      throw StructuralError("maximizing_distribution: zero-width block");
    // the final block absorbs the remainder f(n_max) uniformly
    const double mass = (n == n_max - 1)
                            ? tc.tail_bound(n)
                            : tc.tail_bound(n) - tc.tail_bound(n + 1);
    const double per_entry = mass / static_cast<double>(hi - lo);
    for (long k = lo; k < hi; ++k) mu[k] = per_entry;
  }
  return mu;
}

BoundReport entropy_bound(const TailConstraint& tc) {
  int last = tc.levels() - 1;
  for (int n = 1; n < tc.levels(); ++n)
    if (tc.tail_bound(n) < kSeriesFloor) {
      last = n;
      break;
    }

  BoundReport report;
  report.delta.assign(last + 1, 0.0);
  for (int n = 0; n < last; ++n)
    report.delta[n] = tc.tail_bound(n) - tc.tail_bound(n + 1);
  report.delta[last] = tc.tail_bound(last);
  report.folded_mass = tc.tail_bound(last);
  for (int n = 1; n <= last; ++n) report.c1 += n * report.delta[n];
  for (int n = 0; n <= last; ++n) report.h1 -= xlnx(report.delta[n]);
  report.bound = std::log(tc.cut_point(1)) + report.c1 * std::log(tc.ratio()) +
                 report.h1;

  // H of the maximizer folded at `last`, from block masses and widths
  double h_mu = 0.0;
  for (int n = 0; n < last; ++n) {
    const double mass =
        (n == last - 1) ? tc.tail_bound(n) : report.delta[n];
    const double width = tc.cut_point(n + 1) - tc.cut_point(n);
    if (mass > 0.0) h_mu += mass * (std::log(width) - std::log(mass));
  }
  report.maximizer_entropy = h_mu;
  if (h_mu > report.bound + 1e-9)
    throw StructuralError("entropy_bound: maximizer exceeded its own bound");
  return report;
}

BoundReport theorem_bound(const DecayProfile& fa,
                          const std::vector<double>& eps, int boundary_size) {
  if (boundary_size < 1)
    throw DomainError("theorem_bound: boundary size must be positive");
  if (fa.max_radius() < 1)
    throw DomainError("theorem_bound: decay profile covers no radius");
  if (eps.size() < 2)
    throw DomainError("theorem_bound: error table covers no radius");
  for (double e : eps)
    if (!(e >= 0.0) || !std::isfinite(e))
      throw DomainError("theorem_bound: error table entries must be finite "
                        "and nonnegative");

  const int r_common =
      std::min(fa.max_radius(), static_cast<int>(eps.size()) - 1);
  int r0 = 0;
  for (int r = 1; r <= r_common; ++r)
    if (fa.f(r) + 2.0 * eps[r] <= 0.5) {
      r0 = r;
      break;
    }
  if (r0 == 0)
    throw NoFeasibleR0Error(
        "theorem_bound: no radius meets the 1/2 overlap threshold");

  // combined tails on the grid n * r0, clipped at the common table end
  std::vector<double> combined{1.0};
  for (int n = 1; n * r0 <= r_common; ++n)
    combined.push_back(fa.f(n * r0) + 2.0 * eps[n * r0]);
  int last = static_cast<int>(combined.size()) - 1;
  for (int n = 1; n < static_cast<int>(combined.size()); ++n)
    if (combined[n] < kSeriesFloor) {
      last = n;
      break;
    }
  combined.resize(last + 1);

  BoundReport report;
  report.r0 = r0;
  report.boundary_size = boundary_size;
  report.combined_f = combined;
  report.delta.assign(last + 1, 0.0);
  for (int n = 0; n < last; ++n) {
    report.delta[n] = combined[n] - combined[n + 1];
    if (report.delta[n] < 0.0)
      throw DomainError("theorem_bound: combined tail table increases");
  }
  report.delta[last] = combined[last];
  report.folded_mass = combined[last];
  for (int n = 1; n <= last; ++n) report.c1 += n * report.delta[n];
  for (int n = 0; n <= last; ++n) report.h1 -= xlnx(report.delta[n]);
  report.bound =
      5.0 * (1.0 + report.c1) * r0 * boundary_size + report.h1;

  // H of the maximizer on the implied cut points N^(5 n r0 |dA|), evaluated
  // in log space since the cut points overflow quickly
  const double step =
      5.0 * r0 * boundary_size * std::log(static_cast<double>(fa.local_dim));
  double h_mu = 0.0;
  for (int n = 0; n < last; ++n) {
    const double mass = (n == last - 1) ? combined[n] : report.delta[n];
    const double ln_width =
        (n == 0) ? step : (n + 1) * step + std::log1p(-std::exp(-step));
    if (mass > 0.0) h_mu += mass * (ln_width - std::log(mass));
  }
  report.maximizer_entropy = h_mu;
  return report;
}

bool majorizes(const std::vector<double>& p, const std::vector<double>& q) {
  checked_sum(p, "majorizes: first vector");
  checked_sum(q, "majorizes: second vector");
  std::vector<double> ps = p, qs = q;
  std::sort(ps.rbegin(), ps.rend());
  std::sort(qs.rbegin(), qs.rend());
  const std::size_t len = std::max(ps.size(), qs.size());
  double prefix_p = 0.0, prefix_q = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    prefix_p += k < ps.size() ? ps[k] : 0.0;
    prefix_q += k < qs.size() ? qs[k] : 0.0;
    if (prefix_p + 1e-12 < prefix_q) return false;
  }
  return true;
}

bool schur_pairing_check(const std::vector<double>& sigma,
                         const std::vector<double>& p,
                         const std::vector<double>& q) {
  for (std::size_t k = 1; k < sigma.size(); ++k)
    if (sigma[k] > sigma[k - 1] + 1e-12)
      throw DomainError("schur_pairing_check: weights must be sorted "
                        "in decreasing order");
  std::vector<double> ps = p, qs = q;
  std::sort(ps.rbegin(), ps.rend());
  std::sort(qs.rbegin(), qs.rend());
  const std::size_t len = std::max({sigma.size(), ps.size(), qs.size()});
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double w = k < sigma.size() ? sigma[k] : 0.0;
    lhs += w * (k < ps.size() ? ps[k] : 0.0);
    rhs += w * (k < qs.size() ? qs[k] : 0.0);
  }
  return lhs >= rhs - 1e-12;
}

}  // namespace qflow
