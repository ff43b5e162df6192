#pragma once

// Pseudo-distances on quantum states and the Bregman potentials behind them.
// All logarithms are natural; values are in nats.

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "qgeo/error.hpp"
#include "qgeo/linalg.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

enum class MetricKind {
  Divergence,          // D(site || x): site first, x (or a ball center) second
  DivergenceReversed,  // D(x || site)
  DivergenceDual,      // Dhat(xhat || sitehat) in dual coordinates
  Bures,
  FubiniStudy,
  EuclideanParam,
  GeodesicSphere,
};

inline std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Divergence: return "divergence";
    case MetricKind::DivergenceReversed: return "divergence-rev";
    case MetricKind::DivergenceDual: return "divergence-dual";
    case MetricKind::Bures: return "bures";
    case MetricKind::FubiniStudy: return "fubini-study";
    case MetricKind::EuclideanParam: return "euclid";
    case MetricKind::GeodesicSphere: return "geodesic";
  }
  return "?";
}

/// sum lambda log lambda over the positive spectrum, i.e. -S(rho).
inline double neg_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double v : rho.eigenvalues()) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s;
}

inline double entropy(const DensityMatrix& rho) { return -neg_entropy(rho); }

inline ComplexMatrix log_of_faithful(const DensityMatrix& rho, Errc code = Errc::NotFaithful) {
  if (!rho.is_faithful()) {
    throw Error(code, "state is not faithful, min eigenvalue " +
                          std::to_string(rho.min_eigenvalue()));
  }
  const auto& e = rho.spectrum();
  return compose_spectral(e, e.values.unaryExpr([](double v) { return std::log(v); }));
}

/// D(sigma || rho) = Tr sigma (log sigma - log rho), with 0 log 0 = 0.
inline double divergence(const DensityMatrix& sigma, const DensityMatrix& rho) {
  if (sigma.dim() != rho.dim()) throw Error(Errc::DimMismatch, "divergence of different dims");
  const ComplexMatrix log_rho = log_of_faithful(rho, Errc::SecondArgNotFaithful);
  return neg_entropy(sigma) - trace_product(sigma.matrix(), log_rho);
}

namespace detail {

// atanh(r) / r = (1 / 2r) log((1 + r) / (1 - r)), continuous at r = 0.
inline double atanh_over_r(double r) {
  if (r < 1e-6) return 1.0 + r * r / 3.0;
  return std::atanh(r) / r;
}

inline double binary_neg_entropy(double r) {
  const double a = (1.0 + r) / 2.0;
  const double b = (1.0 - r) / 2.0;
  return (a > 0 ? a * std::log(a) : 0.0) + (b > 0 ? b * std::log(b) : 0.0);
}

}  // namespace detail

/// Closed form of D(rho || sigma) for one qubit with sigma mixed. The first two
/// terms of the lemma, (1/2) log((1-r^2)/4) + (r/2) log((1+r)/(1-r)), are the
/// negative entropy of rho and are evaluated in that form so r = 1 is finite.
inline double divergence_qubit_closed(const BlochVector& rho, const BlochVector& sigma) {
  const double rt = sigma.r();
  if (rt >= 1.0 - 1e-12) {
    throw Error(Errc::SiteIsPure, "second argument has Bloch radius " + std::to_string(rt));
  }
  if (rho.r() > 1.0 + 1e-12) throw Error(Errc::OutOfBall, "first argument outside Bloch ball");
  const double first = detail::binary_neg_entropy(std::min(rho.r(), 1.0));
  if (rt == 0.0) {
    return first - 0.5 * std::log(0.25);
  }
  return first - 0.5 * std::log((1.0 - rt * rt) / 4.0) -
         detail::atanh_over_r(rt) * rho.dot(sigma);
}

/// Tr sqrt(sqrt(sigma) rho sqrt(sigma)), computed as the nuclear norm of
/// sqrt(rho) sqrt(sigma).
inline double fidelity_root(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const ComplexMatrix a = matrix_sqrt(rho.matrix());
  const ComplexMatrix b = matrix_sqrt(sigma.matrix());
  Eigen::JacobiSVD<ComplexMatrix> svd(a * b);
  return svd.singularValues().sum();
}

inline double bures(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(Errc::DimMismatch, "bures of different dims");
  const double f = std::clamp(fidelity_root(rho, sigma), 0.0, 1.0);
  return std::sqrt(1.0 - f);
}

inline void require_pure(const DensityMatrix& rho, std::string_view what) {
  if (!is_pure(rho, 1e-9)) {
    throw Error(Errc::NotPure, std::string(what) + " is not a pure state");
  }
}

/// cos d = sqrt(Tr rho sigma), d in [0, pi/2].
inline double fubini_study(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(Errc::DimMismatch, "fubini_study of different dims");
  require_pure(rho, "first argument");
  require_pure(sigma, "second argument");
  const double overlap = std::clamp(trace_product(rho.matrix(), sigma.matrix()), 0.0, 1.0);
  return std::acos(std::sqrt(overlap));
}

inline double euclidean_param(const GeneralizedCoords& a, const GeneralizedCoords& b) {
  if (a.dim != b.dim || a.xi.size() != b.xi.size()) {
    throw Error(Errc::DimMismatch, "euclidean_param of different dims");
  }
  return (a.xi - b.xi).norm();
}

inline double geodesic_sphere(const BlochVector& a, const BlochVector& b) {
  if (std::abs(a.r() - 1.0) > 1e-9 || std::abs(b.r() - 1.0) > 1e-9) {
    throw Error(Errc::NotOnSphere, "geodesic distance needs unit Bloch vectors");
  }
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Bregman potentials

inline DensityMatrix state_from_coords(const GeneralizedCoords& c) {
  return DensityMatrix::from_matrix(from_coords(c));
}

/// phi(xi) = Tr(rho log rho): convex, so the Bregman form reproduces D >= 0.
inline double phi_potential(const GeneralizedCoords& c) {
  const auto rho = state_from_coords(c);
  if (!rho.is_faithful()) throw Error(Errc::NotFaithful, "phi needs a faithful state");
  return neg_entropy(rho);
}

/// grad phi(xi)_k = Tr(d rho / d xi_k log rho).
inline DualCoords grad_phi(const GeneralizedCoords& c) {
  const auto rho = state_from_coords(c);
  return {c.dim, coordinate_pairing(log_of_faithful(rho))};
}

/// D(rho(xi) || sigma(eta)) = phi(xi) - phi(eta) - <xi - eta, grad phi(eta)>.
inline double bregman_phi(const GeneralizedCoords& xi, const GeneralizedCoords& eta) {
  return phi_potential(xi) - phi_potential(eta) - (xi.xi - eta.xi).dot(grad_phi(eta).xihat);
}

/// psi(rhohat) = log Tr exp(rhohat), evaluated with a max shift.
inline double psi_potential(const DualCoords& c) {
  const auto e = eig_hermitian(dual_matrix(c));
  const double top = e.values.maxCoeff();
  return top + std::log((e.values.array() - top).exp().sum());
}

/// grad psi = xi of the state exp(rhohat) / Tr exp(rhohat).
inline GeneralizedCoords grad_psi(const DualCoords& c) {
  return to_coords(from_dual(c, DualSign::Positive));
}

/// Dhat(a || b) = psi(a) - psi(b) - <a - b, grad psi(b)>.
inline double dual_divergence(const DualCoords& a, const DualCoords& b) {
  if (a.dim != b.dim) throw Error(Errc::DimMismatch, "dual_divergence of different dims");
  return psi_potential(a) - psi_potential(b) - (a.xihat - b.xihat).dot(grad_psi(b).xi);
}

// ---------------------------------------------------------------------------
// Generic distance and bisector gap

inline double distance(MetricKind kind, const DensityMatrix& site, const DensityMatrix& x) {
  switch (kind) {
    case MetricKind::Divergence: return divergence(site, x);
    case MetricKind::DivergenceReversed: return divergence(x, site);
    case MetricKind::DivergenceDual: return dual_divergence(to_dual(x), to_dual(site));
    case MetricKind::Bures: return bures(x, site);
    case MetricKind::FubiniStudy: return fubini_study(x, site);
    case MetricKind::EuclideanParam: return euclidean_param(to_coords(x), to_coords(site));
    case MetricKind::GeodesicSphere: {
      require_pure(site, "site");
      require_pure(x, "sample");
      return geodesic_sphere(to_bloch(site), to_bloch(x));
    }
  }
  throw Error(Errc::Unsupported, "unknown metric");
}

/// d(x, site1) - d(x, site2): negative on site1's side, zero on the bisector.
inline double bisector_gap(MetricKind kind, const DensityMatrix& site1, const DensityMatrix& site2,
                           const DensityMatrix& x) {
  return distance(kind, site1, x) - distance(kind, site2, x);
}

}  // namespace qgeo
