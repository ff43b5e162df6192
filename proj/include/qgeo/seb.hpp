#pragma once

// Smallest enclosing balls by Welzl's move-to-front recursion, generic over the
// space: exact circumspheres for Euclidean points and an optimization-based
// boundary solver for the quantum divergence D(point || center).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <list>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgeo/error.hpp"
#include "qgeo/linalg.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

enum class FullBoundaryPolicy {
  Throw,  // surface TooManyBoundary when the final ball misses a point
  Skip,   // return the final ball anyway and count the points it misses
};

struct SebConfig {
  double penalty_start = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e6;
  double inner_tol = 1e-9;
  double membership_rel = 1e-9;
  double membership_abs = 1e-12;
  std::uint64_t shuffle_seed = 0;
  int max_boundary = 0;  // 0 selects d^2 - 1; at most d^2
  double tol_eq = 1e-6;
  int max_inner_iterations = 300;
  bool move_to_front = true;
  FullBoundaryPolicy full_boundary = FullBoundaryPolicy::Throw;
};

struct SebStats {
  std::size_t boundary_solves = 0;
  std::size_t penalty_iterations = 0;
  std::size_t polish_failures = 0;      // Newton refinement rejected, penalty answer kept
  std::size_t skipped_violations = 0;   // violators of a capped boundary ball inside the recursion
  std::size_t final_violations = 0;     // points outside the returned ball (Skip policy only)
  std::size_t not_minimal = 0;          // divergence balls whose centre is outside the support hull
};

struct EuclideanBall {
  RealVector center;
  double radius = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> support;
};

struct DivergenceBall {
  DensityMatrix center;
  double radius = 0.0;
  std::vector<std::size_t> support;
};

// ---------------------------------------------------------------------------
// Euclidean circumsphere

/// Smallest ball with all of r on its boundary (centre in their affine hull).
inline EuclideanBall boundary_ball_euclid(std::span<const RealVector> r) {
  EuclideanBall ball;
  if (r.empty()) return ball;
  const RealVector& p0 = r.front();
  const auto m = static_cast<Eigen::Index>(r.size()) - 1;
  if (m == 0) {
    ball.center = p0;
    ball.radius = 0.0;
  } else {
    Eigen::MatrixXd diffs(p0.size(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (r[j + 1].size() != p0.size()) throw Error(Errc::DimMismatch, "points of different dims");
      diffs.col(j) = r[j + 1] - p0;
    }
    const Eigen::MatrixXd gram = 2.0 * diffs.transpose() * diffs;
    const RealVector rhs = diffs.colwise().squaredNorm().transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) {
      throw Error(Errc::Degenerate, "boundary points are affinely dependent");
    }
    const RealVector alpha = lu.solve(rhs);
    ball.center = p0 + diffs * alpha;
    ball.radius = (ball.center - p0).norm();
  }
  ball.support.resize(r.size());
  std::iota(ball.support.begin(), ball.support.end(), std::size_t{0});
  return ball;
}

// ---------------------------------------------------------------------------
// Divergence boundary solver

namespace detail {

struct CenterEval {
  bool faithful = false;
  EigenDecomposition spec;
  ComplexMatrix log_center;
};

inline CenterEval eval_center(const ComplexMatrix& rho) {
  CenterEval ev;
  if (!rho.allFinite()) return ev;
  ev.spec = eig_hermitian(rho, 1e-6);
  if (ev.spec.values.minCoeff() <= 1e-13) return ev;
  ev.faithful = true;
  ev.log_center = compose_spectral(ev.spec, ev.spec.values.unaryExpr([](double v) { return std::log(v); }));
  return ev;
}

/// Divergences of a fixed boundary set against a moving centre.
class BoundarySet {
 public:
  explicit BoundarySet(std::span<const DensityMatrix> r) : states_(r) {
    neg_s_.reserve(r.size());
    for (const auto& s : r) neg_s_.push_back(neg_entropy(s));
  }

  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] int dim() const { return states_.front().dim(); }
  [[nodiscard]] const DensityMatrix& state(std::size_t k) const { return states_[k]; }
  [[nodiscard]] double neg_s(std::size_t k) const { return neg_s_[k]; }

  [[nodiscard]] RealVector divergences(const CenterEval& ev) const {
    RealVector out(static_cast<Eigen::Index>(size()));
    for (std::size_t k = 0; k < size(); ++k) {
      out(static_cast<Eigen::Index>(k)) = neg_s_[k] - trace_product(states_[k].matrix(), ev.log_center);
    }
    return out;
  }

 private:
  std::span<const DensityMatrix> states_;
  std::vector<double> neg_s_;
};

/// f(xi) = D_1 + A sum_k (D_k - D_{k+1})^2 and its gradient over xi.
struct PenaltyObjective {
  const BoundarySet& set;
  double weight;

  [[nodiscard]] std::optional<double> value(const RealVector& xi, RealVector* grad) const {
    const int d = set.dim();
    const auto ev = eval_center(from_coords({d, xi}));
    if (!ev.faithful) return std::nullopt;
    const RealVector dv = set.divergences(ev);
    double f = dv(0);
    for (Eigen::Index k = 0; k + 1 < dv.size(); ++k) {
      const double diff = dv(k) - dv(k + 1);
      f += weight * diff * diff;
    }
    if (grad != nullptr) {
      const LogDerivative dlog(ev.spec);
      std::vector<RealVector> g(set.size());
      for (std::size_t k = 0; k < set.size(); ++k) {
        g[k] = -coordinate_pairing(dlog(set.state(k).matrix()));
      }
      RealVector total = g[0];
      for (std::size_t k = 0; k + 1 < set.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        total += 2.0 * weight * (dv(kk) - dv(kk + 1)) * (g[k] - g[k + 1]);
      }
      *grad = total;
    }
    return f;
  }
};

/// BFGS with backtracking; iterates that leave the faithful cone are
/// rejected by the line search.
inline RealVector minimize_bfgs(const PenaltyObjective& obj, RealVector x, double tol, int max_iter,
                                std::size_t& iterations) {
  const auto n = x.size();
  RealVector g(n);
  auto fx = obj.value(x, &g);
  if (!fx) throw Error(Errc::NotFaithful, "penalty start is not faithful");
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (int it = 0; it < max_iter; ++it) {
    ++iterations;
    if (g.lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, std::abs(*fx))) break;
    RealVector p = -h * g;
    double slope = g.dot(p);
    if (slope >= 0.0) {
      h.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    RealVector x_new;
    RealVector g_new(n);
    std::optional<double> f_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + t * p;
      f_new = obj.value(x_new, &g_new);
      if (f_new && *f_new <= *fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const RealVector s = x_new - x;
    const RealVector y = g_new - g;
    const double sy = s.dot(y);
    const double decrease = *fx - *f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
      h = (ident - rho * s * y.transpose()) * h * (ident - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    if (decrease <= 1e-16 * std::max(1.0, std::abs(*fx)) && s.norm() <= 1e-14) break;
  }
  return x;
}

/// Newton iteration on the mixture weights: the equal-divergence centre is
/// rho = sigma_1 + sum_k mu_k (sigma_k - sigma_1). Returns nullopt when the
/// iteration cannot reach an interior solution.
inline std::optional<ComplexMatrix> polish_on_affine_hull(const BoundarySet& set,
                                                          const ComplexMatrix& start) {
  const std::size_t n = set.size();
  const int d = set.dim();
  const auto m = static_cast<Eigen::Index>(n - 1);
  const ComplexMatrix& s1 = set.state(0).matrix();
  std::vector<ComplexMatrix> diffs;
  Eigen::MatrixXd coord_diffs(static_cast<Eigen::Index>(coord_count(d)), m);
  const RealVector xi1 = to_coords(s1).xi;
  for (std::size_t k = 1; k < n; ++k) {
    diffs.push_back(set.state(k).matrix() - s1);
    coord_diffs.col(static_cast<Eigen::Index>(k - 1)) = to_coords(set.state(k).matrix()).xi - xi1;
  }
  RealVector mu = coord_diffs.colPivHouseholderQr().solve(to_coords(start).xi - xi1);

  auto center_of = [&](const RealVector& w) {
    ComplexMatrix c = s1;
    for (Eigen::Index k = 0; k < m; ++k) c += w(k) * diffs[static_cast<std::size_t>(k)];
    return c;
  };
  auto residual = [&](const CenterEval& ev) {
    const RealVector dv = set.divergences(ev);
    RealVector f(m);
    for (Eigen::Index k = 0; k < m; ++k) f(k) = dv(k + 1) - dv(0);
    return f;
  };

  CenterEval ev = eval_center(center_of(mu));
  if (!ev.faithful) return std::nullopt;
  RealVector f = residual(ev);
  for (int it = 0; it < 100; ++it) {
    if (f.lpNorm<Eigen::Infinity>() <= 1e-13) return center_of(mu);
    const LogDerivative dlog(ev.spec);
    Eigen::MatrixXd jac(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const ComplexMatrix dj = dlog(diffs[static_cast<std::size_t>(j)]);
      for (Eigen::Index k = 0; k < m; ++k) {
        jac(k, j) = -trace_product(diffs[static_cast<std::size_t>(k)], dj);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) return std::nullopt;
    const RealVector step = lu.solve(-f);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      const RealVector trial = mu + t * step;
      CenterEval tev = eval_center(center_of(trial));
      if (tev.faithful) {
        const RealVector tf = residual(tev);
        if (tf.norm() < (1.0 - 1e-4 * t) * f.norm()) {
          mu = trial;
          ev = std::move(tev);
          f = tf;
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  if (f.lpNorm<Eigen::Infinity>() <= 1e-11) return center_of(mu);
  return std::nullopt;
}

}  // namespace detail

/// Boundary cap: d^2 - 1 by default (balls pinned by d^2 points are not
/// formed). Setting max_boundary = d^2 enables the square equal-divergence
/// solve for those balls.
inline int default_max_boundary(int d, const SebConfig& cfg) {
  if (cfg.max_boundary > d * d) {
    throw Error(Errc::InvalidArgument, "max_boundary exceeds d^2 = " + std::to_string(d * d));
  }
  return cfg.max_boundary > 0 ? cfg.max_boundary : d * d - 1;
}

namespace detail {

/// Equal-divergence centre for boundary states whose joint support is the
/// whole space: graduated penalty over xi, then Newton on the mixture weights.
inline std::optional<ComplexMatrix> equal_divergence_center(std::span<const DensityMatrix> r,
                                                            const SebConfig& cfg, SebStats* stats) {
  const int d = r.front().dim();
  const BoundarySet set(r);
  ComplexMatrix start = ComplexMatrix::Zero(d, d);
  for (const auto& s : r) start += s.matrix();
  start /= static_cast<double>(r.size());
  start = ensure_faithful(DensityMatrix::from_matrix(start, 1e-9)).matrix();

  RealVector xi = to_coords(start).xi;
  std::size_t iterations = 0;
  for (double a = cfg.penalty_start; a <= cfg.penalty_max * (1.0 + 1e-12); a *= cfg.penalty_growth) {
    const PenaltyObjective obj{set, a};
    xi = minimize_bfgs(obj, xi, cfg.inner_tol, cfg.max_inner_iterations, iterations);
  }
  if (stats) stats->penalty_iterations += iterations;
  const ComplexMatrix penalty_center = from_coords({d, xi});

  auto residual_ok = [&](const ComplexMatrix& c) {
    const auto ev = eval_center(c);
    if (!ev.faithful) return false;
    const RealVector dv = set.divergences(ev);
    return dv.maxCoeff() - dv.minCoeff() <= cfg.tol_eq;
  };
  if (auto polished = polish_on_affine_hull(set, penalty_center)) {
    if (residual_ok(*polished)) return polished;
  }
  if (stats) ++stats->polish_failures;
  if (residual_ok(penalty_center)) return penalty_center;
  return std::nullopt;
}

}  // namespace detail

/// Smallest divergence ball with every state of r on its boundary, found by
/// minimizing D(sigma_1 || rho) + A sum_k (D(sigma_k || rho) - D(sigma_{k+1} || rho))^2
/// over the coordinates of rho for a growing penalty weight A, then refined by
/// Newton's method on the mixture weights.
///
/// When the boundary states share a proper support subspace the optimum has
/// the same support, so the problem is solved there and the centre is mixed
/// with I/d at weight 1e-9 afterwards.
inline DivergenceBall boundary_ball_divergence(std::span<const DensityMatrix> r, const SebConfig& cfg,
                                               SebStats* stats = nullptr) {
  if (r.empty()) throw Error(Errc::InvalidArgument, "boundary set is empty");
  const int d = r.front().dim();
  if (static_cast<int>(r.size()) > default_max_boundary(d, cfg)) {
    throw Error(Errc::TooManyBoundary, std::to_string(r.size()) + " boundary states for d = " +
                                           std::to_string(d));
  }
  if (stats) ++stats->boundary_solves;
  std::vector<std::size_t> support(r.size());
  std::iota(support.begin(), support.end(), std::size_t{0});

  auto make_ball = [&](const ComplexMatrix& c) {
    auto center = ensure_faithful(DensityMatrix::from_matrix(c, 1e-9));
    double rad = 0.0;
    for (const auto& s : r) rad = std::max(rad, divergence(s, center));
    return DivergenceBall{std::move(center), rad, support};
  };

  if (r.size() == 1) return make_ball(r.front().matrix());

  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& s : r) sum += s.matrix();
  const auto joint = eig_hermitian(sum);
  const double cut = 1e-10 * static_cast<double>(r.size());
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < joint.values.size(); ++i) rank += joint.values(i) > cut ? 1 : 0;

  std::optional<ComplexMatrix> center;
  if (rank == d) {
    center = detail::equal_divergence_center(r, cfg, stats);
  } else if (rank == 1) {
    center = r.front().matrix();
  } else {
    const ComplexMatrix basis = joint.vectors.rightCols(rank);
    std::vector<DensityMatrix> reduced;
    reduced.reserve(r.size());
    for (const auto& s : r) {
      reduced.push_back(DensityMatrix::from_matrix(basis.adjoint() * s.matrix() * basis, 1e-8));
    }
    SebConfig sub = cfg;
    sub.max_boundary = static_cast<int>(r.size());
    if (auto c = detail::equal_divergence_center(reduced, sub, stats)) {
      center = ComplexMatrix(basis * *c * basis.adjoint());
    }
  }
  if (!center) {
    throw Error(Errc::SubsolverFailed, "no equal-divergence centre for " + std::to_string(r.size()) +
                                           " boundary states");
  }
  return make_ball(*center);
}

// ---------------------------------------------------------------------------
// Welzl driver

/// Requirements on a space: point count, the smallest ball through a boundary
/// index set, and a strict "outside" membership test.
template <class S>
concept BallSpace = requires(const S& s, const std::vector<std::size_t>& r,
                             const typename S::ball_type& b, std::size_t i) {
  { s.size() } -> std::convertible_to<std::size_t>;
  { s.boundary_ball(r) } -> std::same_as<typename S::ball_type>;
  { s.outside(i, b) } -> std::convertible_to<bool>;
  { s.empty_ball() } -> std::same_as<typename S::ball_type>;
};

template <BallSpace Space>
class Welzl {
 public:
  using Ball = typename Space::ball_type;

  Welzl(const Space& space, std::size_t cap, const SebConfig& cfg, SebStats& stats)
      : space_(space), cap_(cap), cfg_(cfg), stats_(stats) {}

  /// Runs the move-to-front recursion. At the boundary cap, points outside the
  /// capped ball are skipped and counted; the final ball is then checked
  /// against every point. Remaining violations trigger a few extra passes in
  /// the updated order and, if they persist, TooManyBoundary (Throw) or a
  /// count in stats.final_violations (Skip).
  Ball solve() {
    std::vector<std::size_t> order(space_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg_.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
    list_.assign(order.begin(), order.end());
    std::vector<std::size_t> boundary;
    Ball ball = move_to_front(list_.end(), boundary);
    std::size_t outside = count_outside(ball);
    for (int pass = 0; outside > 0 && pass < kExtraPasses; ++pass) {
      boundary.clear();
      ball = move_to_front(list_.end(), boundary);
      outside = count_outside(ball);
    }
    if (outside > 0) {
      if (cfg_.full_boundary == FullBoundaryPolicy::Throw) {
        throw Error(Errc::TooManyBoundary, std::to_string(outside) + " point(s) lie outside every ball of at most " +
                                               std::to_string(cap_) + " boundary points found");
      }
      stats_.final_violations += outside;
    }
    return ball;
  }

 private:
  static constexpr int kExtraPasses = 3;

  std::size_t count_outside(const Ball& ball) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < space_.size(); ++i) {
      if (space_.outside(i, ball)) {
        ++n;
        // bring violators forward for the next pass
        list_.remove(i);
        list_.push_front(i);
      }
    }
    return n;
  }

  Ball move_to_front(std::list<std::size_t>::iterator end, std::vector<std::size_t>& boundary) {
    Ball ball = boundary.empty() ? space_.empty_ball() : space_.boundary_ball(boundary);
    if (boundary.size() >= cap_) {
      for (auto it = list_.begin(); it != end; ++it) {
        if (space_.outside(*it, ball)) ++stats_.skipped_violations;
      }
      return ball;
    }
    for (auto it = list_.begin(); it != end;) {
      auto next = std::next(it);
      if (space_.outside(*it, ball)) {
        boundary.push_back(*it);
        ball = move_to_front(it, boundary);
        boundary.pop_back();
        if (cfg_.move_to_front) list_.splice(list_.begin(), list_, it);
      }
      it = next;
    }
    return ball;
  }

  const Space& space_;
  std::size_t cap_;
  const SebConfig& cfg_;
  SebStats& stats_;
  std::list<std::size_t> list_;
};

class EuclideanSpace {
 public:
  using ball_type = EuclideanBall;

  EuclideanSpace(std::span<const RealVector> pts, const SebConfig& cfg) : pts_(pts), cfg_(cfg) {}

  [[nodiscard]] std::size_t size() const { return pts_.size(); }
  [[nodiscard]] EuclideanBall empty_ball() const { return {}; }

  [[nodiscard]] EuclideanBall boundary_ball(const std::vector<std::size_t>& r) const {
    std::vector<RealVector> sel;
    sel.reserve(r.size());
    for (auto i : r) sel.push_back(pts_[i]);
    auto ball = boundary_ball_euclid(sel);
    ball.support = r;
    return ball;
  }

  [[nodiscard]] bool outside(std::size_t i, const EuclideanBall& b) const {
    if (b.center.size() == 0) return true;
    return (pts_[i] - b.center).norm() > b.radius * (1.0 + cfg_.membership_rel) + cfg_.membership_abs;
  }

 private:
  std::span<const RealVector> pts_;
  const SebConfig& cfg_;
};

/// Points are measured as the first argument of D(point || center).
class DivergenceSpace {
 public:
  struct ball_type {
    std::optional<DivergenceBall> ball;
    ComplexMatrix log_center;
  };

  DivergenceSpace(std::span<const DensityMatrix> pts, const SebConfig& cfg, SebStats& stats)
      : pts_(pts), cfg_(cfg), stats_(stats) {
    neg_s_.reserve(pts.size());
    for (const auto& p : pts) neg_s_.push_back(neg_entropy(p));
  }

  [[nodiscard]] std::size_t size() const { return pts_.size(); }
  [[nodiscard]] ball_type empty_ball() const { return {}; }

  [[nodiscard]] ball_type boundary_ball(const std::vector<std::size_t>& r) const {
    std::vector<DensityMatrix> sel;
    sel.reserve(r.size());
    for (auto i : r) sel.push_back(pts_[i]);
    auto ball = boundary_ball_divergence(sel, cfg_, &stats_);
    ball.support = r;
    ComplexMatrix log_c = log_of_faithful(ball.center);
    return {std::move(ball), std::move(log_c)};
  }

  [[nodiscard]] double divergence_to(std::size_t i, const ball_type& b) const {
    return neg_s_[i] - trace_product(pts_[i].matrix(), b.log_center);
  }

  [[nodiscard]] bool outside(std::size_t i, const ball_type& b) const {
    if (!b.ball) return true;
    return divergence_to(i, b) > b.ball->radius * (1.0 + cfg_.membership_rel) + cfg_.membership_abs;
  }

 private:
  std::span<const DensityMatrix> pts_;
  const SebConfig& cfg_;
  SebStats& stats_;
  std::vector<double> neg_s_;
};

inline EuclideanBall welzl_euclidean(std::span<const RealVector> pts, const SebConfig& cfg = {},
                                     SebStats* stats = nullptr) {
  if (pts.empty()) throw Error(Errc::InvalidArgument, "welzl needs at least one point");
  SebStats local;
  SebConfig c = cfg;
  c.full_boundary = FullBoundaryPolicy::Skip;
  const EuclideanSpace space(pts, c);
  Welzl<EuclideanSpace> solver(space, static_cast<std::size_t>(pts.front().size()) + 1, c,
                               stats ? *stats : local);
  return solver.solve();
}

/// Largest support whose minimality welzl_divergence certifies (active-set
/// enumeration is exponential in it).
inline constexpr std::size_t kMaxCertifiedSupport = 16;

struct WeightFit {
  std::vector<double> weights;
  double residual = 0.0;  // Frobenius norm of sum w_i image_i - center
};

namespace detail {

inline RealVector flatten(const ComplexMatrix& m) {
  RealVector v(2 * m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    v(2 * i) = m.data()[i].real();
    v(2 * i + 1) = m.data()[i].imag();
  }
  return v;
}

}  // namespace detail

/// Least squares for center ~ sum w_i image_i over the probability simplex,
/// solved exactly by enumerating active sets (support sizes are small).
inline WeightFit weights_for_center(const DensityMatrix& center, std::span<const DensityMatrix> images) {
  if (images.empty()) throw Error(Errc::InvalidArgument, "weights need at least one support image");
  if (images.size() > 20) throw Error(Errc::InvalidArgument, "too many support images for exact fit");
  const auto n = static_cast<Eigen::Index>(images.size());
  const RealVector c = detail::flatten(center.matrix());
  Eigen::MatrixXd a(c.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) a.col(i) = detail::flatten(images[static_cast<std::size_t>(i)].matrix());

  WeightFit best;
  best.residual = std::numeric_limits<double>::infinity();
  const unsigned long subsets = 1UL << images.size();
  for (unsigned long mask = 1; mask < subsets; ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask & (1UL << i)) idx.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    RealVector rhs(k + 1);
    for (Eigen::Index p = 0; p < k; ++p) {
      for (Eigen::Index q = 0; q < k; ++q) kkt(p, q) = 2.0 * a.col(idx[p]).dot(a.col(idx[q]));
      kkt(p, k) = 1.0;
      kkt(k, p) = 1.0;
      rhs(p) = 2.0 * a.col(idx[p]).dot(c);
    }
    rhs(k) = 1.0;
    const RealVector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if (!sol.allFinite() || std::abs(sol.head(k).sum() - 1.0) > 1e-9) continue;
    if (sol.head(k).minCoeff() < -1e-12) continue;
    std::vector<double> w(images.size(), 0.0);
    for (Eigen::Index p = 0; p < k; ++p) w[static_cast<std::size_t>(idx[p])] = std::max(0.0, sol(p));
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    RealVector fit = RealVector::Zero(c.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] /= total;
      fit += w[static_cast<std::size_t>(i)] * a.col(i);
    }
    const double res = (fit - c).norm();
    if (res < best.residual - 1e-15) {
      best.residual = res;
      best.weights = std::move(w);
    }
  }
  return best;
}

namespace detail {

/// S(sum_k p_k sigma_k) - sum_k p_k S(sigma_k), for rank-deficient mixtures too.
class HolevoOfWeights {
 public:
  explicit HolevoOfWeights(std::span<const DensityMatrix> pts) : pts_(pts) {
    for (const auto& p : pts) ent_.push_back(entropy(p));
  }

  [[nodiscard]] ComplexMatrix mixture_of(const std::vector<double>& w) const {
    ComplexMatrix m = ComplexMatrix::Zero(pts_.front().dim(), pts_.front().dim());
    for (std::size_t k = 0; k < w.size(); ++k) m += w[k] * pts_[k].matrix();
    return m;
  }

  [[nodiscard]] double operator()(const std::vector<double>& w) const {
    const RealVector ev = eig_hermitian(mixture_of(w)).values;
    double chi = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) > 0.0) chi -= ev(i) * std::log(ev(i));
    }
    for (std::size_t k = 0; k < w.size(); ++k) chi -= w[k] * ent_[k];
    return chi;
  }

 private:
  std::span<const DensityMatrix> pts_;
  std::vector<double> ent_;
};

}  // namespace detail

/// Smallest divergence ball. The result is checked for minimality (support
/// up to kMaxCertifiedSupport states); a ball that encloses every point but
/// is not minimal raises TooManyBoundary if the boundary cap skipped points,
/// SubsolverFailed otherwise, or is counted in stats.not_minimal under Skip.
inline DivergenceBall welzl_divergence(std::span<const DensityMatrix> pts, const SebConfig& cfg = {},
                                       SebStats* stats = nullptr) {
  if (pts.empty()) throw Error(Errc::InvalidArgument, "welzl needs at least one point");
  SebStats local;
  SebStats& st = stats ? *stats : local;
  const DivergenceSpace space(pts, cfg, st);
  const auto cap = static_cast<std::size_t>(default_max_boundary(pts.front().dim(), cfg));
  Welzl<DivergenceSpace> solver(space, cap, cfg, st);
  const std::size_t skipped_before = st.skipped_violations;
  auto result = solver.solve();
  DivergenceBall ball = std::move(*result.ball);
  // A ball is minimal when its centre is a mixture of its support states:
  // the Holevo quantity of those weights then equals the radius.
  if (ball.support.size() >= 2 && ball.support.size() <= kMaxCertifiedSupport) {
    std::vector<DensityMatrix> sup;
    for (auto i : ball.support) sup.push_back(pts[i]);
    const auto fit = weights_for_center(ball.center, sup);
    const double chi = fit.weights.empty() ? 0.0 : detail::HolevoOfWeights(sup)(fit.weights);
    if (chi < ball.radius - 1e-6 * (1.0 + ball.radius)) {
      ++st.not_minimal;
      if (cfg.full_boundary == FullBoundaryPolicy::Throw) {
        if (st.skipped_violations > skipped_before) {
          throw Error(Errc::TooManyBoundary, "the enclosing ball found with at most " + std::to_string(cap) +
                                                 " boundary points is not minimal");
        }
        throw Error(Errc::SubsolverFailed, "enclosing ball is not minimal (centre outside its support hull)");
      }
    }
  }
  return ball;
}

/// Metric-generic entry point over states: Divergence (centre as second
/// argument) or EuclideanParam (coordinates of the states).
inline DivergenceBall welzl(std::span<const DensityMatrix> pts, MetricKind metric,
                            const SebConfig& cfg = {}, SebStats* stats = nullptr) {
  switch (metric) {
    case MetricKind::Divergence: return welzl_divergence(pts, cfg, stats);
    case MetricKind::EuclideanParam: {
      std::vector<RealVector> coords;
      coords.reserve(pts.size());
      for (const auto& p : pts) coords.push_back(to_coords(p).xi);
      auto ball = welzl_euclidean(coords, cfg, stats);
      const int d = pts.front().dim();
      return {DensityMatrix::from_matrix(from_coords({d, ball.center}), 1e-9), ball.radius,
              std::move(ball.support)};
    }
    default:
      throw Error(Errc::Unsupported, "welzl supports divergence and euclid, not " +
                                         std::string(to_string(metric)));
  }
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace detail {

/// max_k dist(point_k, centre) for a centre given by coordinates; +inf when the
/// centre is not a faithful state (divergence) or not PSD (euclid).
class MaxDistance {
 public:
  MaxDistance(std::span<const DensityMatrix> pts, MetricKind metric) : pts_(pts), metric_(metric) {
    if (metric != MetricKind::Divergence && metric != MetricKind::EuclideanParam) {
      throw Error(Errc::Unsupported, "seb_bruteforce supports divergence and euclid");
    }
    for (const auto& p : pts) {
      neg_s_.push_back(neg_entropy(p));
      coords_.push_back(to_coords(p).xi);
    }
  }

  [[nodiscard]] double operator()(const RealVector& xi) const {
    const int d = pts_.front().dim();
    if (metric_ == MetricKind::EuclideanParam) {
      double m = 0.0;
      for (const auto& c : coords_) m = std::max(m, (c - xi).norm());
      return m;
    }
    const auto ev = eval_center(from_coords({d, xi}));
    if (!ev.faithful) return std::numeric_limits<double>::infinity();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pts_.size(); ++k) {
      m = std::max(m, neg_s_[k] - trace_product(pts_[k].matrix(), ev.log_center));
    }
    return m;
  }

  [[nodiscard]] const std::vector<RealVector>& coords() const { return coords_; }

 private:
  std::span<const DensityMatrix> pts_;
  MetricKind metric_;
  std::vector<double> neg_s_;
  std::vector<RealVector> coords_;
};

inline void for_each_composition(int parts, int total, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> c(static_cast<std::size_t>(parts), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      c[static_cast<std::size_t>(pos)] = left;
      fn(c);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
}

}  // namespace detail

struct BruteForceBall {
  RealVector center_coords;
  double radius = 0.0;       // max distance from the returned centre (an upper bound)
  double lower_bound = 0.0;  // divergence only: Holevo quantity of the best weights
};

namespace detail {

/// Primal oracle: minimizes the maximum distance over candidate centres
/// drawn from a simplex grid of mixtures of the points (plus a Bloch-ball
/// lattice for d = 2), then walks a shrinking local grid around the best one.
inline BruteForceBall primal_grid_walk(std::span<const DensityMatrix> pts, MetricKind metric,
                                       int grid_resolution, double final_spacing) {
  const detail::MaxDistance f(pts, metric);
  const int d = pts.front().dim();
  const auto n = static_cast<Eigen::Index>(coord_count(d));

  RealVector best = f.coords().front();
  double best_val = f(best);
  auto consider = [&](const RealVector& xi) {
    const double v = f(xi);
    if (v < best_val) {
      best_val = v;
      best = xi;
    }
  };

  int res = std::max(1, grid_resolution);
  detail::for_each_composition(static_cast<int>(pts.size()), res, [&](const std::vector<int>& c) {
    RealVector xi = RealVector::Zero(n);
    for (std::size_t k = 0; k < c.size(); ++k) xi += (double(c[k]) / res) * f.coords()[k];
    consider(xi);
  });
  if (d == 2) {
    for (int i = -res; i <= res; ++i)
      for (int j = -res; j <= res; ++j)
        for (int k = -res; k <= res; ++k) {
          RealVector xi(3);
          xi << double(i) / res, double(j) / res, double(k) / res;
          if (xi.norm() < 1.0) consider(xi);
        }
  }

  // Local grid walk: re-centre until the best point is interior, then halve.
  // The stencil is also tried in a few fixed random orientations, since the
  // max of several divergences has narrow valleys an axis grid can miss.
  double h = 1.0 / res;
  const int span_steps = n <= 3 ? 2 : 1;
  const int width = 2 * span_steps + 1;
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= width;
  std::vector<Eigen::MatrixXd> frames{Eigen::MatrixXd::Identity(n, n)};
  std::mt19937_64 frame_rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int extra_frames = n <= 3 ? 6 : 0;
  for (int k = 0; k < extra_frames; ++k) {
    const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) {
      return gauss(frame_rng);
    });
    frames.push_back(Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ());
  }
  RealVector offset(n);
  while (h > final_spacing) {
    bool moved = true;
    int guard = 0;
    while (moved && guard++ < 200) {
      moved = false;
      const RealVector centre = best;
      for (const auto& frame : frames) {
        for (long code = 0; code < total; ++code) {
          long rem = code;
          for (Eigen::Index i = 0; i < n; ++i) {
            offset(i) = h * double(rem % width - span_steps);
            rem /= width;
          }
          const RealVector xi = centre + frame * offset;
          const double v = f(xi);
          if (v < best_val - 1e-15) {
            best_val = v;
            best = xi;
            moved = true;
          }
        }
      }
    }
    h /= 2.0;
  }
  return {best, best_val};
}

/// Dual oracle for the divergence: the radius equals the largest Holevo
/// quantity over mixture weights. Grid over the weight simplex, then
/// pairwise mass transfers with a halving step (the quantity is concave).
inline BruteForceBall dual_weight_grid(std::span<const DensityMatrix> pts, int grid_resolution,
                                       double final_spacing) {
  const HolevoOfWeights chi(pts);
  const std::size_t n = pts.size();
  const int res = std::max(1, grid_resolution);
  std::vector<double> best(n, 0.0);
  best[0] = 1.0;
  double best_val = chi(best);
  for_each_composition(static_cast<int>(n), res, [&](const std::vector<int>& c) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = double(c[k]) / res;
    const double v = chi(w);
    if (v > best_val) {
      best_val = v;
      best = w;
    }
  });
  for (double h = 1.0 / res; h > final_spacing; h /= 2.0) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double t = std::min(h, best[i]);
          if (i == j || t <= 0.0) continue;
          std::vector<double> w = best;
          w[i] -= t;
          w[j] += t;
          const double v = chi(w);
          if (v > best_val + 1e-16) {
            best_val = v;
            best = std::move(w);
            moved = true;
          }
        }
      }
    }
  }
  const ComplexMatrix center = chi.mixture_of(best);
  BruteForceBall out{to_coords(center).xi, best_val, best_val};
  const auto ev = eval_center(center);
  if (ev.faithful) {
    double m = 0.0;
    for (const auto& p : pts) m = std::max(m, neg_entropy(p) - trace_product(p.matrix(), ev.log_center));
    out.radius = m;
  }
  return out;
}

}  // namespace detail

/// Test oracle for small instances (<= 12 points, d <= 3).
///
/// Divergence: maximizes the Holevo quantity of mixture weights over a simplex
/// grid refined by pairwise transfers; radius is the largest divergence from
/// the resulting mixture (equal to lower_bound when that mixture is not
/// faithful). Euclid: minimizes the maximum distance over a grid of centres.
inline BruteForceBall seb_bruteforce(std::span<const DensityMatrix> pts, MetricKind metric,
                                     int grid_resolution, double final_spacing = 1e-9) {
  if (pts.empty()) throw Error(Errc::InvalidArgument, "seb_bruteforce needs points");
  if (pts.size() > 12 || pts.front().dim() > 3) {
    throw Error(Errc::InvalidArgument, "seb_bruteforce is limited to <= 12 points and d <= 3");
  }
  if (metric == MetricKind::Divergence) return detail::dual_weight_grid(pts, grid_resolution, final_spacing);
  return detail::primal_grid_walk(pts, metric, grid_resolution, final_spacing);
}

// ---------------------------------------------------------------------------
// LP-type axiom audit

struct LpTypeReport {
  std::size_t monotonicity_checks = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t locality_checks = 0;
  std::size_t locality_violations = 0;
  double worst_monotonicity_gap = 0.0;
  std::vector<std::string> violations;
};

/// Samples nested subsets F subset G of the points and checks
/// w(F) <= w(G) and the locality implication with w = welzl radius.
inline LpTypeReport lp_type_check(std::span<const DensityMatrix> pts, MetricKind metric, int trials,
                                  std::uint64_t seed, const SebConfig& cfg = {}, double tol = 1e-8) {
  LpTypeReport report;
  std::mt19937_64 rng(seed);
  const std::size_t n = pts.size();
  if (n < 2) return report;
  auto radius_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<DensityMatrix> sub;
    for (auto i : idx) sub.push_back(pts[i]);
    return welzl(sub, metric, cfg);
  };
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int t = 0; t < trials; ++t) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t g_size = 1 + pick(rng) % (n - 1);
    std::vector<std::size_t> g(perm.begin(), perm.begin() + static_cast<long>(g_size));
    const std::size_t f_size = 1 + pick(rng) % g_size;
    std::vector<std::size_t> f(g.begin(), g.begin() + static_cast<long>(f_size));

    const auto ball_g = radius_of(g);
    const double wf = radius_of(f).radius;
    ++report.monotonicity_checks;
    if (wf > ball_g.radius + tol) {
      ++report.monotonicity_violations;
      report.worst_monotonicity_gap = std::max(report.worst_monotonicity_gap, wf - ball_g.radius);
      report.violations.push_back("monotonicity: w(F)=" + std::to_string(wf) +
                                  " > w(G)=" + std::to_string(ball_g.radius));
    }

    // Locality on F' = support(G) plus part of F, so that w(F') = w(G).
    std::vector<std::size_t> floc;
    for (auto s : ball_g.support) floc.push_back(g[s]);
    for (auto i : f) {
      if (std::find(floc.begin(), floc.end(), i) == floc.end()) floc.push_back(i);
    }
    const double wfl = radius_of(floc).radius;
    const std::size_t h = perm[g_size];  // not in G
    auto with_h = [&](std::vector<std::size_t> s) {
      s.push_back(h);
      return radius_of(s).radius;
    };
    ++report.locality_checks;
    const double f_gain = with_h(floc) - wfl;
    const double g_gain = with_h(g) - ball_g.radius;
    if (f_gain > tol && g_gain <= tol) {
      ++report.locality_violations;
      report.violations.push_back("locality: w(F+h)-w(F)=" + std::to_string(f_gain) +
                                  " but w(G+h)-w(G)=" + std::to_string(g_gain));
    }
  }
  return report;
}

}  // namespace qgeo
