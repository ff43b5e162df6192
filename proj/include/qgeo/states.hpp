#pragma once

// Density matrices and their parameterizations.
//
// Generalized coordinates xi (length d^2 - 1) follow the Bloch-style layout
//
//   rho_kk      = (xi_k + 1) / d               k = 0 .. d-2
//   rho_{d-1,d-1} = (1 - sum_k xi_k) / d
//   rho_jl      = (xi_a - i xi_b) / 2          j < l, row-major upper triangle
//
// so the flat index map is
//
//   index            | slot
//   -----------------+-------------------------------
//   0 .. d-2         | diagonal k
//   d-1, d           | Re, Im of (0,1)
//   d+1, d+2         | Re, Im of (0,2)
//   ...              | ... row 0, then row 1, ...
//   d^2-3, d^2-2     | Re, Im of (d-2, d-1)
//
// For d = 2 this gives xi = (z, x, y) in Bloch coordinates.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgeo/error.hpp"
#include "qgeo/linalg.hpp"

namespace qgeo {

inline constexpr double kStateTol = 1e-10;

class DensityMatrix {
 public:
  /// The one-dimensional state [1]; a placeholder until assigned.
  DensityMatrix()
      : mat_(ComplexMatrix::Ones(1, 1)), spec_{RealVector::Ones(1), ComplexMatrix::Ones(1, 1)} {}

  /// Validates Hermiticity, unit trace and positivity (all at 1e-10) and stores
  /// the symmetrized matrix together with its spectrum.
  static DensityMatrix from_matrix(const ComplexMatrix& m, double tol = kStateTol) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw Error(Errc::DimMismatch, "density matrix must be square and non-empty");
    }
    if (!m.allFinite()) {
      throw Error(Errc::InvalidArgument, "density matrix has non-finite entries");
    }
    const double dev = hermitian_deviation(m);
    if (dev > tol) {
      throw Error(Errc::NotHermitian, "max |m - m^dagger| = " + std::to_string(dev));
    }
    ComplexMatrix sym = symmetrize(m);
    const double tr = sym.trace().real();
    if (std::abs(tr - 1.0) > tol) {
      throw Error(Errc::NotUnitTrace, "trace = " + std::to_string(tr));
    }
    auto spec = eig_hermitian(sym);
    if (spec.values(0) < -tol) {
      throw Error(Errc::NotPSD, "min eigenvalue = " + std::to_string(spec.values(0)));
    }
    return DensityMatrix(std::move(sym), std::move(spec));
  }

  /// |v><v| / <v|v>.
  static DensityMatrix from_pure(const Eigen::VectorXcd& v) {
    const double n = v.norm();
    if (!(n > 1e-12)) {
      throw Error(Errc::InvalidArgument, "state vector has zero norm");
    }
    const Eigen::VectorXcd u = v / n;
    return from_matrix(u * u.adjoint());
  }

  static DensityMatrix maximally_mixed(int d) {
    return from_matrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  }

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(mat_.rows()); }
  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return mat_; }
  [[nodiscard]] const EigenDecomposition& spectrum() const noexcept { return spec_; }
  [[nodiscard]] const RealVector& eigenvalues() const noexcept { return spec_.values; }
  [[nodiscard]] double min_eigenvalue() const noexcept { return spec_.values(0); }
  [[nodiscard]] bool is_faithful(double eps = kRankEps) const noexcept {
    return spec_.values(0) > eps;
  }

 private:
  DensityMatrix(ComplexMatrix m, EigenDecomposition s) : mat_(std::move(m)), spec_(std::move(s)) {}

  ComplexMatrix mat_;
  EigenDecomposition spec_;
};

enum class RankClass { Pure, MixedNonFaithful, Faithful };

inline std::string to_string(RankClass r) {
  switch (r) {
    case RankClass::Pure: return "Pure";
    case RankClass::MixedNonFaithful: return "MixedNonFaithful";
    case RankClass::Faithful: return "Faithful";
  }
  return "?";
}

inline int numeric_rank(const DensityMatrix& rho, double eps = kRankEps) {
  return static_cast<int>((rho.eigenvalues().array() > eps).count());
}

inline RankClass rank_class(const DensityMatrix& rho, double eps = kRankEps) {
  const int rank = numeric_rank(rho, eps);
  if (rank <= 1) return RankClass::Pure;
  if (rank == rho.dim()) return RankClass::Faithful;
  return RankClass::MixedNonFaithful;
}

/// Pure within tolerance on the spectrum: largest eigenvalue >= 1 - tol.
inline bool is_pure(const DensityMatrix& rho, double tol = 1e-9) {
  return rho.eigenvalues()(rho.dim() - 1) >= 1.0 - tol;
}

// ---------------------------------------------------------------------------
// Bloch ball (d = 2)

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  [[nodiscard]] double r() const { return std::sqrt(x * x + y * y + z * z); }
  [[nodiscard]] double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
  [[nodiscard]] BlochVector scaled(double s) const { return {x * s, y * s, z * s}; }
};

inline DensityMatrix from_bloch(const BlochVector& b) {
  if (b.r() > 1.0 + 1e-12) {
    throw Error(Errc::OutOfBall, "Bloch radius " + std::to_string(b.r()) + " > 1");
  }
  ComplexMatrix m(2, 2);
  m(0, 0) = Complex((1.0 + b.z) / 2.0, 0.0);
  m(0, 1) = Complex(b.x / 2.0, -b.y / 2.0);
  m(1, 0) = Complex(b.x / 2.0, b.y / 2.0);
  m(1, 1) = Complex((1.0 - b.z) / 2.0, 0.0);
  return DensityMatrix::from_matrix(m);
}

inline BlochVector to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw Error(Errc::WrongLevel, "to_bloch needs d = 2, got " + std::to_string(rho.dim()));
  }
  const auto& m = rho.matrix();
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), m(0, 0).real() - m(1, 1).real()};
}

// ---------------------------------------------------------------------------
// Generalized and dual coordinates

inline std::size_t coord_count(int d) { return static_cast<std::size_t>(d) * d - 1; }

struct GeneralizedCoords {
  int dim = 2;
  RealVector xi;
};

struct DualCoords {
  int dim = 2;
  RealVector xihat;
};

enum class SlotKind { Diagonal, RealPart, ImagPart };

struct CoordSlot {
  SlotKind kind;
  int row;
  int col;
};

inline std::vector<CoordSlot> coordinate_layout(int d) {
  std::vector<CoordSlot> slots;
  slots.reserve(coord_count(d));
  for (int k = 0; k + 1 < d; ++k) slots.push_back({SlotKind::Diagonal, k, k});
  for (int j = 0; j < d; ++j) {
    for (int l = j + 1; l < d; ++l) {
      slots.push_back({SlotKind::RealPart, j, l});
      slots.push_back({SlotKind::ImagPart, j, l});
    }
  }
  return slots;
}

inline void check_length(int d, const RealVector& v) {
  if (d < 2) throw Error(Errc::InvalidArgument, "dimension must be >= 2");
  if (static_cast<std::size_t>(v.size()) != coord_count(d)) {
    throw Error(Errc::WrongLength, "expected " + std::to_string(coord_count(d)) +
                                       " coordinates, got " + std::to_string(v.size()));
  }
}

/// Hermitian unit-trace matrix for the coordinates; positivity is NOT implied.
inline ComplexMatrix from_coords(const GeneralizedCoords& c) {
  const int d = c.dim;
  check_length(d, c.xi);
  ComplexMatrix m = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  const auto slots = coordinate_layout(d);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const double v = c.xi(static_cast<Eigen::Index>(k));
    const auto& s = slots[k];
    switch (s.kind) {
      case SlotKind::Diagonal:
        m(s.row, s.row) += v / d;
        m(d - 1, d - 1) -= v / d;
        break;
      case SlotKind::RealPart:
        m(s.row, s.col) += v / 2.0;
        m(s.col, s.row) += v / 2.0;
        break;
      case SlotKind::ImagPart:
        m(s.row, s.col) += Complex(0.0, -v / 2.0);
        m(s.col, s.row) += Complex(0.0, v / 2.0);
        break;
    }
  }
  return m;
}

inline GeneralizedCoords to_coords(const ComplexMatrix& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d || d < 2) throw Error(Errc::DimMismatch, "to_coords expects square d >= 2");
  GeneralizedCoords c{d, RealVector(coord_count(d))};
  const auto slots = coordinate_layout(d);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    double v = 0.0;
    switch (s.kind) {
      case SlotKind::Diagonal: v = d * m(s.row, s.row).real() - 1.0; break;
      case SlotKind::RealPart: v = 2.0 * m(s.row, s.col).real(); break;
      case SlotKind::ImagPart: v = -2.0 * m(s.row, s.col).imag(); break;
    }
    c.xi(static_cast<Eigen::Index>(k)) = v;
  }
  return c;
}

inline GeneralizedCoords to_coords(const DensityMatrix& rho) { return to_coords(rho.matrix()); }

/// (Tr(G dRho/dxi_k))_k for Hermitian G: the gradient of Tr(G rho(xi)).
inline RealVector coordinate_pairing(const ComplexMatrix& g) {
  const int d = static_cast<int>(g.rows());
  RealVector out(coord_count(d));
  const auto slots = coordinate_layout(d);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    double v = 0.0;
    switch (s.kind) {
      case SlotKind::Diagonal: v = (g(s.row, s.row).real() - g(d - 1, d - 1).real()) / d; break;
      case SlotKind::RealPart: v = g(s.row, s.col).real(); break;
      case SlotKind::ImagPart: v = -g(s.row, s.col).imag(); break;
    }
    out(static_cast<Eigen::Index>(k)) = v;
  }
  return out;
}

/// Traceless Hermitian matrix of the dual parameterization:
/// diagonal k < d-1: d*xihat_k - sum, last diagonal: -sum, off-diagonal: a - i b.
inline ComplexMatrix dual_matrix(const DualCoords& c) {
  const int d = c.dim;
  check_length(d, c.xihat);
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  const auto slots = coordinate_layout(d);
  double diag_sum = 0.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const double v = c.xihat(static_cast<Eigen::Index>(k));
    const auto& s = slots[k];
    switch (s.kind) {
      case SlotKind::Diagonal:
        m(s.row, s.row) += d * v;
        diag_sum += v;
        break;
      case SlotKind::RealPart:
        m(s.row, s.col) += v;
        m(s.col, s.row) += v;
        break;
      case SlotKind::ImagPart:
        m(s.row, s.col) += Complex(0.0, -v);
        m(s.col, s.row) += Complex(0.0, v);
        break;
    }
  }
  for (int k = 0; k < d; ++k) m(k, k) -= diag_sum;
  return m;
}

/// Sign s in rho_hat = s (log rho - Tr(log rho)/d I). Positive is the sign for
/// which psi = log Tr exp(rho_hat) is the Legendre conjugate of Tr(rho log rho).
enum class DualSign { Positive, Negative };

inline double sign_value(DualSign s) { return s == DualSign::Positive ? 1.0 : -1.0; }

inline DualCoords to_dual(const DensityMatrix& rho, DualSign sign = DualSign::Positive) {
  if (!rho.is_faithful()) {
    throw Error(Errc::NotFaithful, "to_dual needs a faithful state, min eigenvalue " +
                                       std::to_string(rho.min_eigenvalue()));
  }
  const int d = rho.dim();
  const auto& e = rho.spectrum();
  const ComplexMatrix log_rho =
      compose_spectral(e, e.values.unaryExpr([](double v) { return std::log(v); }));
  const Complex shift = log_rho.trace() / static_cast<double>(d);
  ComplexMatrix hat = log_rho - shift * ComplexMatrix::Identity(d, d);
  hat *= sign_value(sign);
  return {d, coordinate_pairing(hat)};
}

inline DensityMatrix from_dual(const DualCoords& c, DualSign sign = DualSign::Positive) {
  const ComplexMatrix hat = dual_matrix(c) * sign_value(sign);
  const auto e = eig_hermitian(hat);
  const double top = e.values.maxCoeff();
  const ComplexMatrix expm =
      compose_spectral(e, e.values.unaryExpr([top](double v) { return std::exp(v - top); }));
  return DensityMatrix::from_matrix(expm / expm.trace().real());
}

// ---------------------------------------------------------------------------
// Mixtures and sampling helpers

/// r rho + (1 - r) I/d.
inline DensityMatrix shrink_toward_mixed(const DensityMatrix& rho, double r) {
  const int d = rho.dim();
  return DensityMatrix::from_matrix(r * rho.matrix() +
                                    (1.0 - r) * ComplexMatrix::Identity(d, d) / double(d));
}

inline constexpr double kFaithfulMix = 1e-9;

/// Mixes with I/d at weight 1e-9 if the minimum eigenvalue is below 1e-9.
inline DensityMatrix ensure_faithful(const DensityMatrix& rho) {
  if (rho.min_eigenvalue() >= kFaithfulMix) return rho;
  return shrink_toward_mixed(rho, 1.0 - kFaithfulMix);
}

inline DensityMatrix mixture(std::span<const DensityMatrix> states, std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size()) {
    throw Error(Errc::DimMismatch, "mixture needs matching non-empty states and weights");
  }
  const int d = states.front().dim();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != d) throw Error(Errc::DimMismatch, "mixture of different dimensions");
    m += weights[i] * states[i].matrix();
  }
  return DensityMatrix::from_matrix(m, 1e-9);
}

template <class Rng>
Eigen::VectorXcd random_state_vector(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v.normalized();
}

template <class Rng>
DensityMatrix random_pure_state(int d, Rng& rng) {
  return DensityMatrix::from_pure(random_state_vector(d, rng));
}

/// Ginibre-distributed full-rank state, mixed with I/d so the smallest
/// eigenvalue stays above min_weight / d.
template <class Rng>
DensityMatrix random_faithful_state(int d, Rng& rng, double min_weight = 0.02) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = (1.0 - min_weight) * m + min_weight * ComplexMatrix::Identity(d, d) / double(d);
  return DensityMatrix::from_matrix(m);
}

template <class Rng>
BlochVector random_bloch(Rng& rng, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  BlochVector b{gauss(rng), gauss(rng), gauss(rng)};
  return b.scaled(radius / b.r());
}

}  // namespace qgeo
