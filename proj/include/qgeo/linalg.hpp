#pragma once

// Hermitian eigendecomposition and spectral matrix functions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "qgeo/error.hpp"

namespace qgeo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Numeric rank threshold shared by rank classification and the matrix log.
inline constexpr double kRankEps = 1e-12;
/// Negative eigenvalues down to this value are treated as round-off and clamped.
inline constexpr double kPsdSlack = 1e-10;

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermitian_deviation(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

inline ComplexMatrix symmetrize(const ComplexMatrix& m) {
  return (m + m.adjoint()) / 2.0;
}

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns are eigenvectors
};

/// m = U diag(values) U^dagger. The input is symmetrized before solving.
inline EigenDecomposition eig_hermitian(const ComplexMatrix& m, double herm_tol = 1e-8) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(Errc::DimMismatch, "eig_hermitian expects a non-empty square matrix");
  }
  const double dev = hermitian_deviation(m);
  if (!(dev <= herm_tol)) {
    throw Error(Errc::NotHermitian, "max |m - m^dagger| = " + std::to_string(dev));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::DomainError, "eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline ComplexMatrix compose_spectral(const EigenDecomposition& e, const RealVector& fvals) {
  const ComplexMatrix scaled = e.vectors * fvals.cast<Complex>().asDiagonal();
  return symmetrize(scaled * e.vectors.adjoint());
}

inline ComplexMatrix matrix_fn(const ComplexMatrix& m, const std::function<double(double)>& f) {
  const auto e = eig_hermitian(m);
  return compose_spectral(e, e.values.unaryExpr(f));
}

inline ComplexMatrix matrix_log(const ComplexMatrix& m) {
  const auto e = eig_hermitian(m);
  if (e.values.minCoeff() <= kRankEps) {
    throw Error(Errc::DomainError, "log of a matrix with eigenvalue " +
                                       std::to_string(e.values.minCoeff()));
  }
  return compose_spectral(e, e.values.unaryExpr([](double v) { return std::log(v); }));
}

/// Eigenvalues in [-kPsdSlack, kRankEps] are clamped to zero.
inline ComplexMatrix matrix_sqrt(const ComplexMatrix& m) {
  const auto e = eig_hermitian(m);
  if (e.values.minCoeff() < -kPsdSlack) {
    throw Error(Errc::DomainError, "sqrt of a matrix with eigenvalue " +
                                       std::to_string(e.values.minCoeff()));
  }
  return compose_spectral(e, e.values.unaryExpr([](double v) {
    return v <= kRankEps ? 0.0 : std::sqrt(v);
  }));
}

inline ComplexMatrix matrix_exp(const ComplexMatrix& m) {
  const auto e = eig_hermitian(m);
  return compose_spectral(e, e.values.unaryExpr([](double v) { return std::exp(v); }));
}

/// Divided differences of log on the spectrum (Daleckii-Krein kernel).
inline Eigen::MatrixXd log_divided_differences(const RealVector& lambda) {
  const auto n = lambda.size();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = lambda(i);
      const double b = lambda(j);
      if (std::abs(a - b) <= 1e-12 * std::max(a, b)) {
        k(i, j) = 2.0 / (a + b);
      } else {
        k(i, j) = std::log1p((a - b) / b) / (a - b);
      }
    }
  }
  return k;
}

/// Frechet derivative of the matrix log at a positive definite point, applied to
/// direction h. The map is self-adjoint under the trace pairing.
class LogDerivative {
 public:
  explicit LogDerivative(const EigenDecomposition& e)
      : vectors_(e.vectors), kernel_(log_divided_differences(e.values)) {}

  [[nodiscard]] ComplexMatrix operator()(const ComplexMatrix& h) const {
    const ComplexMatrix rotated = vectors_.adjoint() * h * vectors_;
    const ComplexMatrix weighted = rotated.cwiseProduct(kernel_.cast<Complex>());
    return vectors_ * weighted * vectors_.adjoint();
  }

 private:
  ComplexMatrix vectors_;
  Eigen::MatrixXd kernel_;
};

/// Tr(a b) for Hermitian a, b, real part only.
inline double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace qgeo
