#pragma once

// Bisectors between pairs of sites under the various state distances, the
// pure-limit divergence bisector, and the three-coordinate section of the
// d-level state space on which divergence and Euclidean diagrams are compared.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qgeo/error.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

// ---------------------------------------------------------------------------
// Bisector kinds

enum class BisectorKind {
  Divergence,          // D(site || x)
  DivergenceReversed,  // D(x || site)
  DivergenceDual,
  DivergenceLimit,     // pure-limit divergence, pure sites and samples only
  Bures,
  FubiniStudy,
  Euclid,
  Geodesic,
  SectionDivergence,
  SectionEuclid,
};

inline std::string_view to_string(BisectorKind k) {
  switch (k) {
    case BisectorKind::Divergence: return "divergence";
    case BisectorKind::DivergenceReversed: return "divergence-rev";
    case BisectorKind::DivergenceDual: return "divergence-dual";
    case BisectorKind::DivergenceLimit: return "divergence-limit";
    case BisectorKind::Bures: return "bures";
    case BisectorKind::FubiniStudy: return "fubini-study";
    case BisectorKind::Euclid: return "euclid";
    case BisectorKind::Geodesic: return "geodesic";
    case BisectorKind::SectionDivergence: return "section-divergence";
    case BisectorKind::SectionEuclid: return "section-euclid";
  }
  return "?";
}

inline BisectorKind parse_bisector_kind(std::string_view s) {
  for (auto k : {BisectorKind::Divergence, BisectorKind::DivergenceReversed, BisectorKind::DivergenceDual,
                 BisectorKind::DivergenceLimit, BisectorKind::Bures, BisectorKind::FubiniStudy,
                 BisectorKind::Euclid, BisectorKind::Geodesic, BisectorKind::SectionDivergence,
                 BisectorKind::SectionEuclid}) {
    if (to_string(k) == s) return k;
  }
  if (s == "fs") return BisectorKind::FubiniStudy;
  throw Error(Errc::InvalidArgument, "unknown metric '" + std::string(s) + "'");
}

inline bool is_section_kind(BisectorKind k) {
  return k == BisectorKind::SectionDivergence || k == BisectorKind::SectionEuclid;
}

/// Shrink factor for the radial pure-state limit of divergence gaps.
inline constexpr double kLimitShrink = 1.0 - 1e-6;
/// Gaps below this magnitude carry no sign.
inline constexpr double kGapFloor = 1e-10;

inline DensityMatrix faithful_approximant(const DensityMatrix& rho) {
  if (rho.min_eigenvalue() > 1e-9) return rho;
  return shrink_toward_mixed(rho, kLimitShrink);
}

/// |<x|psi2>|^2 - |<x|psi1>|^2 = Tr(x s2) - Tr(x s1): negative on s1's side.
inline double pure_limit_divergence_gap(const DensityMatrix& s1, const DensityMatrix& s2,
                                        const DensityMatrix& x) {
  require_pure(s1, "first site");
  require_pure(s2, "second site");
  require_pure(x, "sample");
  if (s1.dim() != x.dim() || s2.dim() != x.dim()) throw Error(Errc::DimMismatch, "gap of different dims");
  return trace_product(x.matrix(), s2.matrix()) - trace_product(x.matrix(), s1.matrix());
}

// ---------------------------------------------------------------------------
// Section xi_2 = d - 2 - xi_1, xi_3 = ... = xi_{d-1} = -1, all other
// coordinates except xi_d, xi_{d+1} zero. States there live on levels 1, 2
// with Bloch vector ((2 xi_1 - (d - 2)) / d, xi_d, xi_{d+1}) in (z, x, y).

struct SectionPoint {
  int dim = 3;
  double xi1 = 0.0;
  double xid = 0.0;
  double xid1 = 0.0;

  [[nodiscard]] double bloch_z() const { return (2.0 * xi1 - (dim - 2)) / dim; }

  /// (d - 2 - 2 xi_1)^2 / d^2 + xi_d^2 + xi_{d+1}^2 - 1.
  [[nodiscard]] double ellipsoid_residual() const {
    const double z = bloch_z();
    return z * z + xid * xid + xid1 * xid1 - 1.0;
  }

  [[nodiscard]] bool on_pure_ellipsoid(double tol = 1e-9) const { return std::abs(ellipsoid_residual()) <= tol; }

  [[nodiscard]] GeneralizedCoords coords() const {
    GeneralizedCoords c{dim, RealVector::Zero(static_cast<Eigen::Index>(coord_count(dim)))};
    c.xi(0) = xi1;
    if (dim >= 3) c.xi(1) = dim - 2 - xi1;
    for (int k = 2; k < dim - 1; ++k) c.xi(k) = -1.0;
    c.xi(dim - 1) = xid;
    c.xi(dim) = xid1;
    return c;
  }

  [[nodiscard]] DensityMatrix state() const {
    return DensityMatrix::from_matrix(from_coords(coords()), 1e-9);
  }

  /// Point with the given Bloch vector (z, x, y) on levels 1, 2.
  static SectionPoint from_bloch(int d, double z, double x, double y) {
    return {d, (d * z + d - 2) / 2.0, x, y};
  }

  /// Point on the pure ellipsoid above (sheet +1) or below (sheet -1) (xd, xd1).
  static SectionPoint on_ellipsoid(int d, double xd, double xd1, int sheet) {
    const double z = std::sqrt(std::max(0.0, 1.0 - xd * xd - xd1 * xd1));
    return from_bloch(d, sheet >= 0 ? z : -z, xd, xd1);
  }

  /// Reads the section coordinates of a state; throws when it is off the section.
  static SectionPoint from_state(const DensityMatrix& rho) {
    const int d = rho.dim();
    const auto c = to_coords(rho);
    SectionPoint p{d, c.xi(0), c.xi(d - 1), c.xi(d)};
    if ((p.coords().xi - c.xi).lpNorm<Eigen::Infinity>() > 1e-9) {
      throw Error(Errc::InvalidArgument, "state does not lie on the section");
    }
    return p;
  }
};

namespace detail {

inline void require_section(const SectionPoint& a, const SectionPoint& b, const SectionPoint& x) {
  if (a.dim < 3) throw Error(Errc::DimTooSmall, "section analysis needs d >= 3");
  if (a.dim != b.dim || a.dim != x.dim) throw Error(Errc::DimMismatch, "section points of different dims");
}

}  // namespace detail

/// Pure-limit divergence score of a site at x on the section: minus the Bloch
/// inner product, -[4 eta_1 (xi_1 - (d-2)/2) / d^2 + eta_d xi_d + eta_{d+1} xi_{d+1}]
/// up to a site-independent constant (sites on the pure ellipsoid).
inline double section_score_divergence(const SectionPoint& site, const SectionPoint& x) {
  const double d = site.dim;
  return -(4.0 * site.xi1 * (x.xi1 - (d - 2.0) / 2.0) / (d * d) + site.xid * x.xid + site.xid1 * x.xid1);
}

/// Squared Euclidean distance on the section with the diagonal coordinates
/// (xi_1 and xi_2 = d - 2 - xi_1) divided by scale.
inline double section_score_euclidean(const SectionPoint& site, const SectionPoint& x, double scale = 1.0) {
  const double d1 = (site.xi1 - x.xi1) / scale;
  const double dd = site.xid - x.xid;
  const double dd1 = site.xid1 - x.xid1;
  return 2.0 * d1 * d1 + dd * dd + dd1 * dd1;
}

/// Divergence bisector gap on the section for pure-ellipsoid sites:
///   -[(eta_d - et_d) xi_d + (eta_{d+1} - et_{d+1}) xi_{d+1} + 4 (eta_1 - et_1)(xi_1 - (d-2)/2) / d^2],
/// negative on eta's side.
inline double section_gap_divergence(const SectionPoint& eta, const SectionPoint& eta_t, const SectionPoint& x) {
  detail::require_section(eta, eta_t, x);
  return section_score_divergence(eta, x) - section_score_divergence(eta_t, x);
}

/// Squared-distance Euclidean gap on the section, negative on eta's side.
inline double section_gap_euclidean(const SectionPoint& eta, const SectionPoint& eta_t, const SectionPoint& x,
                                    double scale = 1.0) {
  detail::require_section(eta, eta_t, x);
  if (!(scale > 0.0)) throw Error(Errc::InvalidArgument, "scale must be positive");
  return section_score_euclidean(eta, x, scale) - section_score_euclidean(eta_t, x, scale);
}

/// Scale under which the Euclidean and divergence section diagrams coincide.
inline double coinciding_scale(int d) { return d / std::numbers::sqrt2; }

/// The eight sites (on the pure ellipsoid) of the standard d-level example.
inline std::vector<SectionPoint> example3_sites(int d = 5) {
  const double c = (d - 2) / 2.0;
  const double s3 = std::sqrt(3.0);
  const double r23 = std::sqrt(2.0 / 3.0);
  std::vector<SectionPoint> out;
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) out.push_back({d, c + d / (2.0 * s3), sx / s3, sy / s3});
  }
  for (int s : {1, -1}) out.push_back({d, c - d / (2.0 * s3), s * r23, 0.0});
  for (int s : {1, -1}) out.push_back({d, c - d / (2.0 * s3), 0.0, s * r23});
  return out;
}

// ---------------------------------------------------------------------------
// Generic scores and gaps

struct BisectorSpec {
  BisectorKind kind = BisectorKind::Euclid;
  double scale = 1.0;  // section-euclid only
};

/// Distance-like score of site at x; the gap of two sites is the difference.
/// Divergence-type kinds use faithful approximants of pure arguments.
inline double site_score(const BisectorSpec& spec, const DensityMatrix& site, const DensityMatrix& x) {
  switch (spec.kind) {
    case BisectorKind::Divergence: return divergence(site, faithful_approximant(x));
    case BisectorKind::DivergenceReversed: return divergence(x, faithful_approximant(site));
    case BisectorKind::DivergenceDual:
      return distance(MetricKind::DivergenceDual, faithful_approximant(site), faithful_approximant(x));
    case BisectorKind::DivergenceLimit:
      require_pure(site, "site");
      require_pure(x, "sample");
      return -trace_product(x.matrix(), site.matrix());
    case BisectorKind::Bures: return bures(x, site);
    case BisectorKind::FubiniStudy: return fubini_study(x, site);
    case BisectorKind::Euclid: return euclidean_param(to_coords(x), to_coords(site));
    case BisectorKind::Geodesic: return distance(MetricKind::GeodesicSphere, site, x);
    case BisectorKind::SectionDivergence:
      return section_score_divergence(SectionPoint::from_state(site), SectionPoint::from_state(x));
    case BisectorKind::SectionEuclid:
      return section_score_euclidean(SectionPoint::from_state(site), SectionPoint::from_state(x), spec.scale);
  }
  throw Error(Errc::Unsupported, "unknown bisector kind");
}

inline double bisector_gap(const BisectorSpec& spec, const DensityMatrix& s1, const DensityMatrix& s2,
                           const DensityMatrix& x) {
  if (spec.kind == BisectorKind::DivergenceLimit) return pure_limit_divergence_gap(s1, s2, x);
  if (is_section_kind(spec.kind)) {
    const auto a = SectionPoint::from_state(s1);
    const auto b = SectionPoint::from_state(s2);
    const auto p = SectionPoint::from_state(x);
    return spec.kind == BisectorKind::SectionDivergence ? section_gap_divergence(a, b, p)
                                                        : section_gap_euclidean(a, b, p, spec.scale);
  }
  return site_score(spec, s1, x) - site_score(spec, s2, x);
}

// ---------------------------------------------------------------------------
// Coincidence audit

struct Witness {
  std::size_t site_a = 0;
  std::size_t site_b = 0;
  std::size_t sample = 0;
  std::size_t metric = 0;  // index of the metric disagreeing with metric 0
  double gap_reference = 0.0;
  double gap_other = 0.0;
};

struct CoincidenceReport {
  std::vector<BisectorSpec> metrics;
  std::size_t site_pairs = 0;
  std::size_t samples = 0;
  std::size_t comparisons = 0;
  std::size_t disagreements = 0;
  double max_abs_gap = 0.0;  // largest min(|gap_ref|, |gap_other|) at a disagreement
  std::vector<Witness> witnesses;
};

inline constexpr std::size_t kMaxWitnesses = 1000;

/// Compares the sign of every metric's gap with the first metric's, over all
/// site pairs and samples. Pairs where either gap is below the floor are skipped.
inline CoincidenceReport coincidence_report(const std::vector<BisectorSpec>& metrics,
                                            std::span<const DensityMatrix> sites,
                                            std::span<const DensityMatrix> samples,
                                            double floor = kGapFloor) {
  if (metrics.size() < 2) throw Error(Errc::InvalidArgument, "coincidence needs at least two metrics");
  CoincidenceReport rep;
  rep.metrics = metrics;
  rep.samples = samples.size();
  std::vector<std::vector<double>> scores(metrics.size(), std::vector<double>(sites.size() * samples.size()));
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    if (metrics[m].kind == BisectorKind::DivergenceLimit) continue;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      for (std::size_t x = 0; x < samples.size(); ++x) {
        scores[m][s * samples.size() + x] = site_score(metrics[m], sites[s], samples[x]);
      }
    }
  }
  auto gap = [&](std::size_t m, std::size_t a, std::size_t b, std::size_t x) {
    if (metrics[m].kind == BisectorKind::DivergenceLimit) {
      return pure_limit_divergence_gap(sites[a], sites[b], samples[x]);
    }
    return scores[m][a * samples.size() + x] - scores[m][b * samples.size() + x];
  };
  for (std::size_t a = 0; a < sites.size(); ++a) {
    for (std::size_t b = a + 1; b < sites.size(); ++b) {
      ++rep.site_pairs;
      for (std::size_t x = 0; x < samples.size(); ++x) {
        const double ref = gap(0, a, b, x);
        for (std::size_t m = 1; m < metrics.size(); ++m) {
          const double g = gap(m, a, b, x);
          ++rep.comparisons;
          if (std::abs(ref) <= floor || std::abs(g) <= floor) continue;
          if ((ref > 0) == (g > 0)) continue;
          ++rep.disagreements;
          rep.max_abs_gap = std::max(rep.max_abs_gap, std::min(std::abs(ref), std::abs(g)));
          if (rep.witnesses.size() < kMaxWitnesses) rep.witnesses.push_back({a, b, x, m, ref, g});
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Fields for plotting

struct FieldRow {
  SectionPoint point;
  std::vector<double> values;  // one per metric: gap (two sites) or nearest-site index
};

struct FieldGrid {
  int dim = 2;
  int resolution = 0;
  std::vector<BisectorSpec> metrics;
  bool cells = false;  // values are nearest-site indices rather than gaps
  std::vector<FieldRow> rows;
};

/// Samples the pure ellipsoid (the Bloch sphere for d = 2) on a
/// resolution x resolution grid over (xi_d, xi_{d+1}) in [-1, 1]^2, both
/// sheets. Two sites give gap columns; more sites give nearest-site labels.
inline FieldGrid bisector_field_sample(const std::vector<BisectorSpec>& metrics,
                                       std::span<const DensityMatrix> sites, int resolution) {
  if (sites.size() < 2) throw Error(Errc::InvalidArgument, "field needs at least two sites");
  if (resolution < 2) throw Error(Errc::InvalidArgument, "grid resolution must be >= 2");
  const int d = sites.front().dim();
  FieldGrid grid{d, resolution, metrics, sites.size() > 2, {}};
  for (int sheet : {1, -1}) {
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        const double xd = -1.0 + 2.0 * i / (resolution - 1);
        const double xd1 = -1.0 + 2.0 * j / (resolution - 1);
        if (xd * xd + xd1 * xd1 > 1.0) continue;
        const auto p = SectionPoint::on_ellipsoid(d, xd, xd1, sheet);
        const auto x = p.state();
        FieldRow row{p, {}};
        for (const auto& m : metrics) {
          if (!grid.cells) {
            row.values.push_back(bisector_gap(m, sites[0], sites[1], x));
            continue;
          }
          std::size_t best = 0;
          double best_score = std::numeric_limits<double>::infinity();
          for (std::size_t s = 0; s < sites.size(); ++s) {
            const double sc = m.kind == BisectorKind::DivergenceLimit
                                  ? -trace_product(x.matrix(), sites[s].matrix())
                                  : site_score(m, sites[s], x);
            if (sc < best_score) {
              best_score = sc;
              best = s;
            }
          }
          row.values.push_back(static_cast<double>(best));
        }
        grid.rows.push_back(std::move(row));
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Sampling helpers

template <class Rng>
SectionPoint random_ellipsoid_point(int d, Rng& rng) {
  const auto b = random_bloch(rng, 1.0);
  return SectionPoint::from_bloch(d, b.z, b.x, b.y);
}

}  // namespace qgeo
