#pragma once

// Holevo capacity as the radius of the smallest divergence ball enclosing the
// channel image of a pure-state mesh.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "qgeo/channels.hpp"
#include "qgeo/error.hpp"
#include "qgeo/mesh.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/seb.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

struct SupportState {
  DensityMatrix input;
  DensityMatrix image;
  double weight = 0.0;
  std::size_t mesh_index = 0;
};

struct CapacityStats {
  SebStats seb;
  std::size_t mesh_points = 0;
  std::size_t unique_images = 0;
  double weight_residual = 0.0;
  double wall_seconds = 0.0;
};

struct CapacityResult {
  double capacity_nats = 0.0;
  double capacity_bits = 0.0;
  DensityMatrix center;
  std::vector<SupportState> support;
  MeshSpec mesh;
  CapacityStats stats;
};

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

/// S(sum w_i sigma_i) - sum w_i S(sigma_i).
inline double holevo_quantity(std::span<const double> weights, std::span<const DensityMatrix> images) {
  const auto avg = mixture(images, weights);
  double chi = entropy(avg);
  for (std::size_t i = 0; i < images.size(); ++i) chi -= weights[i] * entropy(images[i]);
  return chi;
}

/// Applies the channel to every state, preserving order, on up to `threads` workers.
inline std::vector<DensityMatrix> apply_all(const KrausChannel& ch, std::span<const DensityMatrix> states,
                                            unsigned threads = 0) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, states.size() / 64)));
  std::vector<std::optional<DensityMatrix>> out(states.size());
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned t) {
    try {
      for (std::size_t i = t; i < states.size(); i += threads) out[i] = apply(ch, states[i]);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<DensityMatrix> images;
  images.reserve(states.size());
  for (auto& o : out) images.push_back(std::move(*o));
  return images;
}

/// Indices of one representative per group of states equal up to max-entry distance tol.
inline std::vector<std::size_t> dedup_indices(std::span<const DensityMatrix> states, double tol = 1e-12) {
  std::vector<std::size_t> order(states.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) { return states[i].matrix()(0, 0).real(); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<char> dropped(states.size(), 0);
  for (std::size_t p = 0; p < order.size(); ++p) {
    const std::size_t i = order[p];
    if (dropped[i]) continue;
    for (std::size_t q = p + 1; q < order.size() && key(order[q]) - key(i) <= tol; ++q) {
      const std::size_t j = order[q];
      if (dropped[j]) continue;
      if (max_abs(states[i].matrix() - states[j].matrix()) <= tol) dropped[j] = 1;
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!dropped[i]) keep.push_back(i);
  }
  return keep;
}

/// Capacity of the channel restricted to the given input states.
inline CapacityResult holevo_capacity_of_inputs(const KrausChannel& ch, std::span<const DensityMatrix> inputs,
                                                const MeshSpec& mesh, const SebConfig& cfg = {},
                                                unsigned threads = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(ch);
  if (inputs.empty()) throw Error(Errc::EmptyMesh, "no input states");
  const auto images = apply_all(ch, inputs, threads);
  const auto keep = dedup_indices(images);
  std::vector<DensityMatrix> unique;
  unique.reserve(keep.size());
  for (auto i : keep) unique.push_back(images[i]);

  CapacityResult res;
  res.mesh = mesh;
  res.stats.mesh_points = inputs.size();
  res.stats.unique_images = unique.size();
  auto ball = welzl_divergence(unique, cfg, &res.stats.seb);
  res.capacity_nats = ball.radius;
  res.capacity_bits = nats_to_bits(ball.radius);

  std::vector<DensityMatrix> support_images;
  for (auto s : ball.support) support_images.push_back(unique[s]);
  const auto fit = weights_for_center(ball.center, support_images);
  res.stats.weight_residual = fit.residual;
  for (std::size_t k = 0; k < ball.support.size(); ++k) {
    const std::size_t mi = keep[ball.support[k]];
    res.support.push_back({inputs[mi], images[mi], fit.weights[k], mi});
  }
  res.center = std::move(ball.center);
  res.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline CapacityResult holevo_capacity(const KrausChannel& ch, const MeshSpec& spec, const SebConfig& cfg = {},
                                      unsigned threads = 0) {
  if (spec.dim != ch.dim()) {
    throw Error(Errc::DimMismatch, "mesh has d = " + std::to_string(spec.dim) + ", channel has d = " +
                                       std::to_string(ch.dim()));
  }
  const auto points = dist_points(spec);
  return holevo_capacity_of_inputs(ch, points.points, spec, cfg, threads);
}

struct CapacityRow {
  double delta = 0.0;
  std::size_t points = 0;
  double capacity_nats = 0.0;
  double wall_seconds = 0.0;
};

inline std::vector<CapacityRow> capacity_vs_delta(const KrausChannel& ch, std::span<const double> deltas,
                                                  const SebConfig& cfg = {},
                                                  FeasibilityRule rule = FeasibilityRule::Linear,
                                                  unsigned threads = 0) {
  if (!std::is_sorted(deltas.begin(), deltas.end(), std::greater<>())) {
    throw Error(Errc::InvalidArgument, "deltas must be sorted in descending order");
  }
  std::vector<CapacityRow> rows;
  for (double delta : deltas) {
    const auto r = holevo_capacity(ch, {ch.dim(), delta, rule}, cfg, threads);
    rows.push_back({delta, r.stats.mesh_points, r.capacity_nats, r.stats.wall_seconds});
  }
  return rows;
}

}  // namespace qgeo
