#include "qflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>

#include "qflow/errors.hpp"
#include "qflow/linalg.hpp"
#include "qflow/space.hpp"

namespace qflow {

namespace {

using Complex = std::complex<double>;

constexpr double kHermTol = 1e-10;
constexpr double kSnapTol = 1e-9;

// ---------------------------------------------------------------------------
// Scalar dispatch: real paths run on real symmetric solves and orthogonal
// flows, everything else on the complex versions.
// ---------------------------------------------------------------------------

template <class Scalar>
struct FlowTraits;

template <>
struct FlowTraits<double> {
  using Mat = MatrixXd;
  static Mat assemble(const HamiltonianPath& path, double s) {
    return path.assemble_real(s);
  }
  static SpectralDataReal diag(const Mat& h, double s) {
    return diagonalize_real(h, s);
  }
  static Mat term_matrix(const LocalOperator& op) {
    return op.matrix().real();
  }
  static MatrixXcd to_complex(const Mat& m) { return m.cast<Complex>(); }
};

template <>
struct FlowTraits<Complex> {
  using Mat = MatrixXcd;
  static Mat assemble(const HamiltonianPath& path, double s) {
    return path.assemble(s);
  }
  static SpectralData diag(const Mat& h, double s) { return diagonalize(h, s); }
  static Mat term_matrix(const LocalOperator& op) { return op.matrix(); }
  static MatrixXcd to_complex(const Mat& m) { return m; }
};

// target(full(a,c), full(b,c)) += reduced(a,b) * sign
template <class Mat>
void accumulate_embedded(Mat& target, const Mat& reduced,
                         const SubsetIndex& idx, double sign) {
  for (long a = 0; a < idx.dim_s(); ++a)
    for (long b = 0; b < idx.dim_s(); ++b) {
      const auto v = reduced(a, b) * sign;
      if (v == typename Mat::Scalar(0)) continue;
      for (long c = 0; c < idx.dim_c(); ++c)
        target(idx.full_index(a, c), idx.full_index(b, c)) += v;
    }
}

std::vector<int> positions_within(const Region& inner, const Region& outer) {
  std::vector<int> pos;
  const auto& sites = outer.sites();
  for (int i = 0; i < outer.size(); ++i)
    if (inner.contains(sites[i])) pos.push_back(i);
  return pos;
}

int saturation_radius(const Lattice& lattice, int u) {
  int r = 0;
  while (ball(lattice, u, r).size() < lattice.n_sites()) ++r;
  return r;
}

// Largest r in [r0, cap] with ball(u, r) inside z, or -1.
int rho_in_region(const Lattice& lattice, int u, int r0, int cap,
                  const Region& z) {
  int best = -1;
  for (int r = r0; r <= cap; ++r) {
    if (z.contains_all(ball(lattice, u, r)))
      best = r;
    else if (best >= 0)
      break;  // balls are nested: once one overflows, all larger ones do
  }
  return best;
}

// ---------------------------------------------------------------------------
// Decomposition engine
// ---------------------------------------------------------------------------

// Destinations a reduced operator feeds. Index -1 means "not used".
struct ReductionPlan {
  int rho = -1;              // ball radius
  SubsetIndex ball_index;    // ball within the full lattice
  bool to_a = false;         // K(A), embedded at a_positions
  bool to_ac = false;
  SubsetIndex a_index, ac_index;
  // per R-list entry: +1 into the crossing kernel, -1 (confined) out of it
  std::vector<double> cross_sign;
  // per R-list entry: embed into the 2R-collar subspace with this sign
  // (crossing pieces and, separately, the plain collar kernel)
  std::vector<double> cross_local_sign;
  std::vector<bool> to_collar2;
  std::vector<SubsetIndex> collar2_index;
};

template <class Scalar>
class DecompositionEngine {
 public:
  using Traits = FlowTraits<Scalar>;
  using Mat = typename Traits::Mat;

  DecompositionEngine(const HamiltonianPath& path, const Cut& cut,
                      std::vector<int> r_list, const FlowConfig& config)
      : path_(path),
        cut_(cut),
        lattice_(path.lattice()),
        r_list_(std::move(r_list)),
        filter_(config.filter_gamma > 0 ? config.filter_gamma
                                        : path.gamma_floor()),
        steps_per_unit_(config.steps),
        observer_(config.snapshot_observer) {
    if (steps_per_unit_ <= 0) throw DomainError("flow needs a positive step count");
    if (r_list_.empty()) throw DomainError("decomposition needs at least one R");
    for (int r : r_list_)
      if (r < 0) throw DomainError("boundary width R must be >= 0");

    dim_ = path_.dim();
    const int n = lattice_.n_sites();
    a_index_ = SubsetIndex(cut_.a().sites(), n, path_.local_dim());

    for (int r : r_list_) {
      const Region collar2 = boundary_collar(lattice_, cut_, 2 * r);
      collar2_.push_back(collar2);
      proper_.push_back(collar2.size() < n);
      collar2_index_.emplace_back(collar2.sites(), n, path_.local_dim());
    }

    // Group ramp terms by anchor and lay out the per-anchor reduction plans.
    const auto& ramps = path_.ramp_terms();
    std::map<int, std::vector<int>> by_anchor;
    for (std::size_t i = 0; i < ramps.size(); ++i)
      by_anchor[ramps[i].anchor].push_back(static_cast<int>(i));
    const Region& a = cut_.a();
    const Region& ac = cut_.a_complement();
    for (const auto& [u, term_idx] : by_anchor) {
      AnchorPlan plan;
      plan.anchor = u;
      plan.term_indices = term_idx;
      const int cap = saturation_radius(lattice_, u);
      const int r0 = path_.r0();
      std::map<int, ReductionPlan> by_rho;
      auto reduction = [&](int rho) -> ReductionPlan& {
        ReductionPlan& red = by_rho[rho];
        if (red.rho < 0) {
          red.rho = rho;
          const Region b = ball(lattice_, u, rho);
          red.ball_index = SubsetIndex(b.sites(), n, path_.local_dim());
          red.cross_sign.assign(r_list_.size(), 0.0);
          red.cross_local_sign.assign(r_list_.size(), 0.0);
          red.to_collar2.assign(r_list_.size(), false);
          red.collar2_index.resize(r_list_.size());
        }
        return red;
      };
      if (int rho = rho_in_region(lattice_, u, r0, cap, a); rho >= 0) {
        ReductionPlan& red = reduction(rho);
        red.to_a = true;
        red.a_index = SubsetIndex(
            positions_within(ball(lattice_, u, rho), a),
            a.size(), path_.local_dim());
      }
      if (int rho = rho_in_region(lattice_, u, r0, cap, ac); rho >= 0) {
        ReductionPlan& red = reduction(rho);
        red.to_ac = true;
        red.ac_index = SubsetIndex(
            positions_within(ball(lattice_, u, rho), ac),
            ac.size(), path_.local_dim());
      }
      for (std::size_t ri = 0; ri < r_list_.size(); ++ri) {
        const Region collar = boundary_collar(lattice_, cut_, r_list_[ri]);
        const Region collar_a = collar.intersected(a);
        const Region collar_ac = collar.intersected(ac);
        // crossing kernel: pieces in the collar minus those confined to
        // either side of the cut
        const int rho_col = rho_in_region(lattice_, u, r0, cap, collar);
        const int rho_ca = rho_in_region(lattice_, u, r0, cap, collar_a);
        const int rho_cc = rho_in_region(lattice_, u, r0, cap, collar_ac);
        auto local_index = [&](ReductionPlan& red, int rho) {
          if (red.collar2_index[ri].sites().empty())
            red.collar2_index[ri] = SubsetIndex(
                positions_within(ball(lattice_, u, rho), collar2_[ri]),
                collar2_[ri].size(), path_.local_dim());
        };
        auto add_cross = [&](int rho, double sign) {
          if (rho < 0) return;
          ReductionPlan& red = reduction(rho);
          red.cross_sign[ri] += sign;
          if (proper_[ri]) {
            red.cross_local_sign[ri] += sign;
            local_index(red, rho);
          }
        };
        add_cross(rho_col, 1.0);
        add_cross(rho_ca, -1.0);
        add_cross(rho_cc, -1.0);
        if (proper_[ri]) {
          if (int rho = rho_in_region(lattice_, u, r0, cap, collar2_[ri]);
              rho >= 0) {
            ReductionPlan& red = reduction(rho);
            red.to_collar2[ri] = true;
            local_index(red, rho);
          }
        }
      }
      for (auto& [rho, red] : by_rho) plan.reductions.push_back(std::move(red));
      anchors_.push_back(std::move(plan));
    }
  }

  // All kernels at one parameter value. K = i*D throughout.
  struct Kernels {
    Mat full;
    Mat a_local, ac_local;
    std::vector<Mat> cross_full;
    std::vector<Mat> collar2_local, cross_local;
  };

  Kernels kernels_at(double s) {
    Kernels k;
    const long dim_a = a_index_.dim_s();
    const long dim_ac = a_index_.dim_c();
    k.full = Mat::Zero(dim_, dim_);
    k.a_local = Mat::Zero(dim_a, dim_a);
    k.ac_local = Mat::Zero(dim_ac, dim_ac);
    for (std::size_t ri = 0; ri < r_list_.size(); ++ri) {
      k.cross_full.push_back(Mat::Zero(dim_, dim_));
      const long dl = proper_[ri] ? collar2_index_[ri].dim_s() : 0;
      k.collar2_local.push_back(Mat::Zero(dl, dl));
      k.cross_local.push_back(Mat::Zero(dl, dl));
    }

    const auto spectral = Traits::diag(Traits::assemble(path_, s), s);
    const Mat& v = spectral.eigenvectors;
    const auto terms = path_.derivative_terms(s);
    const int n = lattice_.n_sites();

    for (const AnchorPlan& plan : anchors_) {
      // K_u = V (-w o (V^dag dH_u V)) V^dag for this anchor's terms
      Mat dh_v = Mat::Zero(dim_, dim_);
      for (int ti : plan.term_indices) {
        const LocalOperator& op = terms[ti];
        SubsetIndex idx(op.support().sites(), n, path_.local_dim());
        Mat applied;
        apply_local_left(Mat(Traits::term_matrix(op)), idx, v, applied);
        dh_v += applied;
      }
      Mat tilde = v.adjoint() * dh_v;
      Mat k_tilde = skew_kernel(spectral.eigenvalues, tilde, filter_);
      Mat k_u = v * Mat(k_tilde * v.adjoint());
      k.full += k_u;

      for (const ReductionPlan& red : plan.reductions) {
        const Mat reduced =
            partial_trace(k_u, red.ball_index) /
            static_cast<double>(red.ball_index.dim_c());
        if (red.to_a) accumulate_embedded(k.a_local, reduced, red.a_index, 1.0);
        if (red.to_ac)
          accumulate_embedded(k.ac_local, reduced, red.ac_index, 1.0);
        for (std::size_t ri = 0; ri < r_list_.size(); ++ri) {
          if (red.cross_sign[ri] != 0.0)
            accumulate_embedded(k.cross_full[ri], reduced, red.ball_index,
                                red.cross_sign[ri]);
          if (red.cross_local_sign[ri] != 0.0)
            accumulate_embedded(k.cross_local[ri], reduced,
                                red.collar2_index[ri],
                                red.cross_local_sign[ri]);
          if (red.to_collar2[ri])
            accumulate_embedded(k.collar2_local[ri], reduced,
                                red.collar2_index[ri], 1.0);
        }
      }
    }
    return k;
  }

  DecompositionScan run(const std::vector<double>& snapshots) {
    if (snapshots.empty()) throw DomainError("scan needs at least one snapshot");
    double s_end = 0.0;
    for (double s : snapshots) {
      if (s < 0) throw DomainError("snapshot s must be >= 0");
      s_end = std::max(s_end, s);
    }
    DecompositionScan out;
    init_flows();
    if (s_end == 0.0) {
      emit_snapshot(0.0, true, out.rows);
      finalize_reports(out);
      return out;
    }
    const int n_steps =
        std::max<int>(1, static_cast<int>(std::llround(s_end * steps_per_unit_)));
    const double h = s_end / n_steps;
    std::map<int, double> snap_at_step;
    for (double s : snapshots) {
      const int k = static_cast<int>(std::llround(s / h));
      if (std::abs(k * h - s) > kSnapTol)
        throw DomainError("snapshot s does not land on a step boundary");
      snap_at_step[k] = s;
    }

    if (snap_at_step.count(0)) emit_snapshot(0.0, true, out.rows);
    for (int k = 0; k < n_steps; ++k) {
      advance((k + 0.5) * h, h);
      auto it = snap_at_step.find(k + 1);
      if (it != snap_at_step.end()) emit_snapshot(it->second, false, out.rows);
    }
    finalize_reports(out);
    return out;
  }

 private:
  struct AnchorPlan {
    int anchor = 0;
    std::vector<int> term_indices;
    std::vector<ReductionPlan> reductions;
  };

  void init_flows() {
    u_ = Mat::Identity(dim_, dim_);
    u_a_ = Mat::Identity(a_index_.dim_s(), a_index_.dim_s());
    u_ac_ = Mat::Identity(a_index_.dim_c(), a_index_.dim_c());
    x_.clear();
    u2_.clear();
    x2_.clear();
    for (std::size_t ri = 0; ri < r_list_.size(); ++ri) {
      x_.push_back(Mat::Identity(dim_, dim_));
      const long dl = proper_[ri] ? collar2_index_[ri].dim_s() : 0;
      u2_.push_back(Mat::Identity(dl, dl));
      x2_.push_back(Mat::Identity(dl, dl));
    }
  }

  void advance(double s_mid, double h) {
    const Kernels k = kernels_at(s_mid);
    u_ = expm_normal(Mat(h * k.full)) * u_;
    u_a_ = expm_normal(Mat(h * k.a_local)) * u_a_;
    u_ac_ = expm_normal(Mat(h * k.ac_local)) * u_ac_;
    for (std::size_t ri = 0; ri < r_list_.size(); ++ri) {
      x_[ri] = expm_normal(Mat(h * (k.full - k.cross_full[ri]))) * x_[ri];
      if (proper_[ri]) {
        u2_[ri] = expm_normal(Mat(h * k.collar2_local[ri])) * u2_[ri];
        x2_[ri] =
            expm_normal(Mat(h * (k.collar2_local[ri] - k.cross_local[ri]))) *
            x2_[ri];
      }
    }
  }

  DecompositionErrors identity_row(double s, std::size_t ri) const {
    DecompositionErrors row;
    row.R = r_list_[ri];
    row.s = s;
    row.collar_is_whole_lattice = !proper_[ri];
    return row;
  }

  DecompositionReport make_report(DecompositionErrors row, std::size_t ri) {
    return DecompositionReport{
        std::move(row),
        LocalOperator(cut_.a(), Traits::to_complex(u_a_), path_.local_dim(),
                      false),
        LocalOperator(cut_.a_complement(), Traits::to_complex(u_ac_),
                      path_.local_dim(), false),
        boundary_unitary(ri)};
  }

  DecompositionErrors make_row(double s, std::size_t ri) {
    DecompositionErrors row;
    row.R = r_list_[ri];
    row.s = s;
    row.collar_is_whole_lattice = !proper_[ri];
    const Mat tp = tensor_pair(u_a_, u_ac_, a_index_);
    row.err_vw = operator_norm(Mat(tp - x_[ri]));
    const long dim = dim_;
    const Mat eye = Mat::Identity(dim, dim);
    double defect = (u_.adjoint() * u_ - eye).norm();
    defect = std::max(defect, (x_[ri].adjoint() * x_[ri] - eye).norm());
    if (proper_[ri]) {
      const Mat w2 = u2_[ri].adjoint() * x2_[ri];
      const Mat w2_full = embed_operator(w2, collar2_index_[ri]);
      row.e_meas = operator_norm(Mat(tp * w2_full.adjoint() - u_));
      row.err_wboundary = operator_norm(Mat(x_[ri] - u_ * w2_full));
      defect = std::max(
          defect, (w2.adjoint() * w2 -
                   Mat::Identity(w2.rows(), w2.cols())).norm());
    } else {
      row.e_meas = row.err_vw;
      row.err_wboundary = 0.0;
    }
    row.unitarity_defect = defect;
    return row;
  }

  void emit_snapshot(double s, bool at_origin,
                     std::vector<DecompositionErrors>& rows) {
    std::vector<DecompositionReport> reports;
    for (std::size_t ri = 0; ri < r_list_.size(); ++ri) {
      DecompositionErrors row = at_origin ? identity_row(s, ri) : make_row(s, ri);
      rows.push_back(row);
      if (observer_) reports.push_back(make_report(std::move(row), ri));
    }
    if (observer_) observer_(s, reports);
  }

  void finalize_reports(DecompositionScan& out) {
    const bool at_origin = s_final_ == 0.0;
    for (std::size_t ri = 0; ri < r_list_.size(); ++ri)
      out.final_reports.push_back(make_report(
          at_origin ? identity_row(s_final_, ri) : make_row(s_final_, ri), ri));
  }

  LocalOperator boundary_unitary(std::size_t ri) {
    if (proper_[ri]) {
      const Mat b = x2_[ri].adjoint() * u2_[ri];
      return LocalOperator(collar2_[ri], Traits::to_complex(b),
                           path_.local_dim(), false);
    }
    const Mat b = x_[ri].adjoint() * u_;
    Region everything = cut_.a().united(cut_.a_complement());
    return LocalOperator(everything, Traits::to_complex(b), path_.local_dim(),
                         false);
  }

 public:
  // Track the end parameter so finalize_reports can label its rows.
  void set_final_s(double s) { s_final_ = s; }

 private:
  const HamiltonianPath& path_;
  const Cut& cut_;
  const Lattice& lattice_;
  std::vector<int> r_list_;
  FilterFunction filter_;
  int steps_per_unit_;
  std::function<void(double, const std::vector<DecompositionReport>&)>
      observer_;
  long dim_ = 0;
  SubsetIndex a_index_;
  std::vector<Region> collar2_;
  std::vector<bool> proper_;
  std::vector<SubsetIndex> collar2_index_;
  std::vector<AnchorPlan> anchors_;
  double s_final_ = 0.0;

  Mat u_, u_a_, u_ac_;
  std::vector<Mat> x_, u2_, x2_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Generic integrator
// ---------------------------------------------------------------------------

FlowResult integrate_flow(const std::function<MatrixXcd(double)>& gen,
                          double s_end, int steps) {
  if (steps <= 0) throw DomainError("flow needs a positive step count");
  FlowResult out;
  out.s_grid.push_back(0.0);
  const double h = s_end / steps;
  MatrixXcd u;
  for (int k = 0; k < steps; ++k) {
    const double s_mid = (k + 0.5) * h;
    MatrixXcd g = gen(s_mid);
    ++out.generator_evaluations;
    if (g.rows() != g.cols()) throw StructuralError("generator must be square");
    const double scale = std::max(1.0, g.norm());
    if ((g - g.adjoint()).norm() > kHermTol * scale)
      throw StructuralError("generator sample is not Hermitian");
    if (k == 0) u = MatrixXcd::Identity(g.rows(), g.cols());
    u = expm_normal(MatrixXcd(Complex(0, 1) * h * g)) * u;
    out.s_grid.push_back((k + 1) * h);
    out.unitarity_defects.push_back(
        (u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols())).norm());
  }
  out.unitary = std::move(u);
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition entry points
// ---------------------------------------------------------------------------

namespace {

template <class Scalar>
DecompositionScan run_scan(const HamiltonianPath& path, const Cut& cut,
                           const std::vector<int>& r_list,
                           const std::vector<double>& snapshots,
                           const FlowConfig& config) {
  DecompositionEngine<Scalar> engine(path, cut, r_list, config);
  double s_end = 0.0;
  for (double s : snapshots) s_end = std::max(s_end, s);
  engine.set_final_s(s_end);
  return engine.run(snapshots);
}

}  // namespace

DecompositionScan decomposition_scan(const HamiltonianPath& path,
                                     const Cut& cut,
                                     const std::vector<int>& r_list,
                                     const std::vector<double>& s_snapshots,
                                     const FlowConfig& config) {
  if (path.is_real())
    return run_scan<double>(path, cut, r_list, s_snapshots, config);
  return run_scan<Complex>(path, cut, r_list, s_snapshots, config);
}

DecompositionReport decompose_flow(const HamiltonianPath& path, const Cut& cut,
                                   int R, double s, const FlowConfig& config) {
  auto scan = decomposition_scan(path, cut, {R}, {s}, config);
  return std::move(scan.final_reports.at(0));
}

ErrorScan error_scan(const HamiltonianPath& path, const Cut& cut,
                     const std::vector<int>& r_list, double s,
                     const FlowConfig& config) {
  ErrorScan out;
  auto scan = decomposition_scan(path, cut, r_list, {s}, config);
  out.rows = std::move(scan.rows);
  // least-squares slope of log(e_meas) against R
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : out.rows) {
    if (row.e_meas <= 0) continue;
    const double x = row.R, y = std::log(row.e_meas);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double det = n * sxx - sx * sx;
  out.log_slope = (n >= 2 && det > 0) ? (n * sxy - sx * sy) / det : 0.0;
  return out;
}

RegionKernels region_kernels(const HamiltonianPath& path, const Cut& cut,
                             const std::vector<int>& r_list, double s,
                             const FilterFunction& filter) {
  FlowConfig config;
  config.steps = 1;
  config.filter_gamma = filter.gamma();
  RegionKernels out;
  if (path.is_real()) {
    DecompositionEngine<double> engine(path, cut, r_list, config);
    auto k = engine.kernels_at(s);
    out.k_full = k.full.cast<Complex>();
    out.k_a_local = k.a_local.cast<Complex>();
    out.k_ac_local = k.ac_local.cast<Complex>();
    for (auto& m : k.cross_full) out.k_boundary_full.push_back(m.cast<Complex>());
    for (auto& m : k.collar2_local)
      out.k_collar2_local.push_back(m.cast<Complex>());
    return out;
  }
  DecompositionEngine<Complex> engine(path, cut, r_list, config);
  auto k = engine.kernels_at(s);
  out.k_full = std::move(k.full);
  out.k_a_local = std::move(k.a_local);
  out.k_ac_local = std::move(k.ac_local);
  out.k_boundary_full = std::move(k.cross_full);
  out.k_collar2_local = std::move(k.collar2_local);
  return out;
}

// ---------------------------------------------------------------------------
// Support certification
// ---------------------------------------------------------------------------

double support_defect(const MatrixXcd& m, const Region& support,
                      const Lattice& lattice, int local_dim, int probes,
                      unsigned long long seed) {
  if (m.rows() != m.cols()) throw DomainError("support test needs a square matrix");
  if (m.rows() != ipow(local_dim, lattice.n_sites()))
    throw DomainError("support test matrix does not match the lattice dimension");
  std::vector<int> outside;
  for (int site = 0; site < lattice.n_sites(); ++site)
    if (!support.contains(site)) outside.push_back(site);
  if (outside.empty()) return 0.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const int site = outside[rng() % outside.size()];
    MatrixXcd g(local_dim, local_dim);
    for (int i = 0; i < local_dim; ++i)
      for (int j = 0; j < local_dim; ++j)
        g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    MatrixXcd q = qr.householderQ();
    const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < local_dim; ++i) {
      const Complex d = r(i, i);
      if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    SubsetIndex idx({site}, lattice.n_sites(), local_dim);
    MatrixXcd pm, mp_adj;
    apply_local_left(q, idx, m, pm);                       // P * M
    apply_local_left(MatrixXcd(q.adjoint()), idx, MatrixXcd(m.adjoint()),
                     mp_adj);                              // (M P)^dag
    worst = std::max(worst, (mp_adj.adjoint() - pm).norm());
  }
  return worst;
}

}  // namespace qflow
