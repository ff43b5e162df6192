#pragma once

// Quantum channels in Kraus form, Gamma(rho) = sum_i V_i rho V_i^dagger.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qgeo/error.hpp"
#include "qgeo/linalg.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

inline constexpr double kTraceTol = 1e-8;

class KrausChannel {
 public:
  KrausChannel(int dim, std::vector<ComplexMatrix> kraus) : dim_(dim), kraus_(std::move(kraus)) {
    if (dim_ < 1) throw Error(Errc::InvalidArgument, "channel dimension must be positive");
    if (kraus_.empty()) throw Error(Errc::InvalidArgument, "channel needs at least one Kraus operator");
    for (const auto& k : kraus_) {
      if (k.rows() != dim_ || k.cols() != dim_) {
        throw Error(Errc::DimMismatch, "Kraus operator is not " + std::to_string(dim_) + "x" +
                                           std::to_string(dim_));
      }
    }
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }

 private:
  int dim_;
  std::vector<ComplexMatrix> kraus_;
};

inline ComplexMatrix kraus_gram(int dim, const std::vector<ComplexMatrix>& ops) {
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& v : ops) sum += v.adjoint() * v;
  return sum;
}

/// max |sum V^dagger V - I|.
inline double trace_deviation(const KrausChannel& ch) {
  return max_abs(kraus_gram(ch.dim(), ch.kraus()) - ComplexMatrix::Identity(ch.dim(), ch.dim()));
}

inline void validate(const KrausChannel& ch, double tol = kTraceTol) {
  const double dev = trace_deviation(ch);
  if (!(dev <= tol)) {
    throw Error(Errc::NotTracePreserving, "max |sum V^dagger V - I| = " + std::to_string(dev));
  }
}

inline ComplexMatrix apply_raw(const KrausChannel& ch, const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& v : ch.kraus()) out += v * rho * v.adjoint();
  return out;
}

inline DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.dim()) {
    throw Error(Errc::DimMismatch, "state has d = " + std::to_string(rho.dim()) +
                                       ", channel has d = " + std::to_string(ch.dim()));
  }
  return DensityMatrix::from_matrix(apply_raw(ch, rho.matrix()), 1e-9);
}

/// Appends sqrt(I - sum V^dagger V) so that the channel becomes trace preserving.
inline KrausChannel kraus_complete(int dim, std::vector<ComplexMatrix> partial) {
  for (const auto& v : partial) {
    if (v.rows() != dim || v.cols() != dim) throw Error(Errc::DimMismatch, "partial Kraus operator");
  }
  const ComplexMatrix rest =
      ComplexMatrix::Identity(dim, dim) - kraus_gram(dim, partial);
  const auto e = eig_hermitian(rest);
  if (e.values.minCoeff() < -kPsdSlack) {
    throw Error(Errc::NotCompletable, "I - sum V^dagger V has eigenvalue " +
                                          std::to_string(e.values.minCoeff()));
  }
  partial.push_back(matrix_sqrt(rest));
  return KrausChannel(dim, std::move(partial));
}

inline KrausChannel identity_channel(int d) {
  return KrausChannel(d, {ComplexMatrix::Identity(d, d)});
}

inline KrausChannel unitary_channel(const ComplexMatrix& u) {
  return KrausChannel(static_cast<int>(u.rows()), {u});
}

/// Kraus operators |i><j| / sqrt(d): every input goes to I/d.
inline KrausChannel depolarizing_channel(int d) {
  std::vector<ComplexMatrix> ops;
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ComplexMatrix k = ComplexMatrix::Zero(d, d);
      k(i, j) = w;
      ops.push_back(std::move(k));
    }
  }
  return KrausChannel(d, std::move(ops));
}

/// The three-level test channel with two given Kraus operators and the third
/// obtained by completion.
inline KrausChannel gamma5() {
  using namespace std::complex_literals;
  ComplexMatrix v1(3, 3);
  v1 << 0.2, 0.3, 0.4,
        0.0, 0.5i, 0.0,
        0.1i, 0.4i, 0.5i;
  ComplexMatrix v2(3, 3);
  v2 << 0.1 - 0.3i, 0.0, 0.0,
        0.0, -0.3i, 0.1 - 0.2i,
        0.3 - 0.3i, 0.2 + 0.1i, 0.0;
  return kraus_complete(3, {v1, v2});
}

}  // namespace qgeo
