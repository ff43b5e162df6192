#pragma once

// Deterministic pure-state meshes built from an odometer over grid counters.
//
// Linear rule: the carry rule as written. Counter i is advanced by one step
// and, when n_i * delta exceeds 1 - (phi_0 + ... + phi_{i-1}), reset to zero
// with a carry into i + 1. The state vector is
//   Phi = (phi_0 + i phi_1, ..., phi_{2d-4} + i phi_{2d-3}, 1 - sum phi)
// normalized to unit length.
//
// Quadratic rule: all signed integer tuples with sum (n_i delta)^2 <= 1, and
//   Phi = (phi_0 + i phi_1, ..., sqrt(1 - sum phi^2)),
// which is already unit length.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgeo/error.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

enum class FeasibilityRule { Linear, Quadratic };

inline std::string_view to_string(FeasibilityRule r) {
  return r == FeasibilityRule::Linear ? "linear" : "quadratic";
}

inline FeasibilityRule parse_rule(std::string_view s) {
  if (s == "linear") return FeasibilityRule::Linear;
  if (s == "quadratic") return FeasibilityRule::Quadratic;
  throw Error(Errc::InvalidArgument, "unknown feasibility rule '" + std::string(s) + "'");
}

struct MeshSpec {
  int dim = 2;
  double delta = 0.25;
  FeasibilityRule rule = FeasibilityRule::Linear;
};

inline void validate(const MeshSpec& spec) {
  if (spec.dim < 2) throw Error(Errc::InvalidArgument, "mesh dimension must be >= 2");
  if (!(spec.delta > 0.0) || !(spec.delta <= 1.0)) {
    throw Error(Errc::InvalidArgument, "mesh delta must lie in (0, 1], got " +
                                           std::to_string(spec.delta));
  }
}

struct PointSet {
  int dim = 2;
  std::vector<DensityMatrix> points;
  std::optional<MeshSpec> mesh;  // empty when loaded from a file
};

/// Grid counters; the grid value of counter i is n_i * delta.
using Counters = std::vector<long>;

inline constexpr double kGridSlack = 1e-12;

inline std::size_t counter_count(int d) { return 2 * static_cast<std::size_t>(d - 1); }

/// One carry step of the linear rule starting at position i (0-based).
/// Returns nullopt once the carry runs past the last position.
inline std::optional<Counters> next_state(Counters phi, std::size_t i, double delta) {
  for (; i < phi.size(); ++i) {
    ++phi[i];
    double prefix = 0.0;
    for (std::size_t j = 0; j < i; ++j) prefix += static_cast<double>(phi[j]) * delta;
    if (static_cast<double>(phi[i]) * delta > 1.0 - prefix + kGridSlack) {
      phi[i] = 0;
      continue;
    }
    return phi;
  }
  return std::nullopt;
}

/// Largest n with n * delta <= bound (up to grid slack).
inline long grid_floor(double bound, double delta) {
  if (bound < 0.0) return -1;
  long n = static_cast<long>(std::floor(bound / delta));
  while (static_cast<double>(n + 1) * delta <= bound + kGridSlack) ++n;
  while (n >= 0 && static_cast<double>(n) * delta > bound + kGridSlack) --n;
  return n;
}

namespace detail {

inline double sum_sq_above(const Counters& phi, std::size_t i, double delta) {
  double s = 0.0;
  for (std::size_t j = i; j < phi.size(); ++j) {
    const double v = static_cast<double>(phi[j]) * delta;
    s += v * v;
  }
  return s;
}

inline long quadratic_bound(const Counters& phi, std::size_t i, double delta) {
  const double rest = 1.0 - sum_sq_above(phi, i + 1, delta);
  return grid_floor(std::sqrt(std::max(rest, 0.0)), delta);
}

}  // namespace detail

/// Odometer for the quadratic rule: counter i runs over [-m_i, m_i] where m_i
/// depends on the higher counters; lower counters restart at -m after a carry.
inline std::optional<Counters> next_state_quadratic(Counters phi, double delta) {
  const std::size_t k = phi.size();
  for (std::size_t i = 0; i < k; ++i) {
    const long m = detail::quadratic_bound(phi, i, delta);
    if (phi[i] < m) {
      ++phi[i];
      for (std::size_t j = i; j-- > 0;) phi[j] = -detail::quadratic_bound(phi, j, delta);
      return phi;
    }
  }
  return std::nullopt;
}

inline Counters first_state(const MeshSpec& spec) {
  Counters phi(counter_count(spec.dim), 0);
  if (spec.rule == FeasibilityRule::Quadratic) {
    for (std::size_t j = phi.size(); j-- > 0;) {
      phi[j] = -detail::quadratic_bound(phi, j, spec.delta);
    }
  }
  return phi;
}

inline Eigen::VectorXcd state_vector(const MeshSpec& spec, const Counters& phi) {
  const int d = spec.dim;
  Eigen::VectorXcd v(d);
  double lin = 0.0;
  double sq = 0.0;
  for (int k = 0; k + 1 < d; ++k) {
    const double re = static_cast<double>(phi[2 * k]) * spec.delta;
    const double im = static_cast<double>(phi[2 * k + 1]) * spec.delta;
    v(k) = Complex(re, im);
    lin += re + im;
    sq += re * re + im * im;
  }
  v(d - 1) = spec.rule == FeasibilityRule::Linear ? Complex(1.0 - lin, 0.0)
                                                  : Complex(std::sqrt(std::max(0.0, 1.0 - sq)), 0.0);
  return v;
}

/// Every counter tuple visited by the generator, in visiting order.
inline std::vector<Counters> mesh_counters(const MeshSpec& spec) {
  validate(spec);
  std::vector<Counters> out;
  std::optional<Counters> cur = first_state(spec);
  while (cur) {
    out.push_back(*cur);
    cur = spec.rule == FeasibilityRule::Linear ? next_state(*cur, 0, spec.delta)
                                               : next_state_quadratic(*cur, spec.delta);
  }
  return out;
}

inline PointSet dist_points(const MeshSpec& spec) {
  PointSet set{spec.dim, {}, spec};
  for (const auto& phi : mesh_counters(spec)) {
    const Eigen::VectorXcd v = state_vector(spec, phi);
    if (v.norm() < 1e-12) continue;
    set.points.push_back(DensityMatrix::from_pure(v));
  }
  if (set.points.empty()) throw Error(Errc::EmptyMesh, "mesh produced no states");
  return set;
}

}  // namespace qgeo
