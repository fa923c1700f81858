#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gds/core/errors.hpp"
#include "gds/math/log_space.hpp"
#include "gds/random/streams.hpp"

namespace gds {

/// Sorted thresholds v₁ < … < v_m from the proposal pool plus the segment weights
/// ϖᵢ = (i/M)(e^{−vᵢ} − e^{−vᵢ₊₁}), v_{m+1} = ∞. Weights are kept on the log scale because
/// e^{−v} underflows once v reaches a few hundred.
struct ThresholdTable {
  std::vector<double> v;
  std::vector<double> log_weights;
  std::vector<double> weights;
  std::vector<double> cumulative;  // normalized running sum of the weights
  std::size_t total_count = 0;     // M, the pool size (dropped entries included)
  std::size_t dropped_infinite = 0;
  double log_weight_sum = -kInf;

  std::size_t size() const { return v.size(); }
  double upper(std::size_t i) const { return i + 1 < v.size() ? v[i + 1] : kInf; }
};

inline constexpr double kTieJitter = 1e-12;

/// Pool values v = −log Φ in draw order. Entries in [−1e-9, 0) are clamped to 0, each value gets
/// jitter 1e-12·i (i its 1-based pool index) so ties cannot produce empty segments, and +∞ entries
/// (zero posterior density) are dropped but still counted in M.
inline ThresholdTable build_threshold_table(std::span<const double> v_unsorted) {
  if (v_unsorted.empty()) throw ContractViolation("threshold table needs at least one proposal value");
  ThresholdTable t;
  t.total_count = v_unsorted.size();
  t.v.reserve(v_unsorted.size());
  for (std::size_t i = 0; i < v_unsorted.size(); ++i) {
    const double x = v_unsorted[i];
    if (std::isnan(x)) throw ContractViolation("threshold value " + std::to_string(i) + " is NaN");
    if (x < -kDominanceTolerance) {
      throw DominanceViolation("proposal does not dominate: v = " + std::to_string(x) + " < 0 at pool index " +
                                   std::to_string(i),
                               -x);
    }
    if (x == kInf) {
      ++t.dropped_infinite;
      continue;
    }
    t.v.push_back(std::max(x, 0.0) + kTieJitter * static_cast<double>(i + 1));
  }
  if (t.v.empty()) throw SamplerError("every proposal in the pool has zero posterior density");
  std::sort(t.v.begin(), t.v.end());

  const std::size_t m = t.v.size();
  const double log_total = std::log(static_cast<double>(t.total_count));
  t.log_weights.resize(m);
  t.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    t.log_weights[i] = std::log(static_cast<double>(i + 1)) - log_total - t.v[i] + math::log1mexp(t.upper(i) - t.v[i]);
    t.weights[i] = std::exp(t.log_weights[i]);
  }
  t.log_weight_sum = math::log_sum_exp(t.log_weights);

  t.cumulative.resize(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    running += std::exp(t.log_weights[i] - t.log_weight_sum);
    t.cumulative[i] = running;
  }
  for (std::size_t i = m; i-- > 0 && t.cumulative[i] >= running;) t.cumulative[i] = 1.0;
  return t;
}

/// v = vᵢ + ε with ε an Exp(1) variate truncated to (0, vᵢ₊₁ − vᵢ), by inversion of η ∈ [0, 1).
inline double threshold_in_segment(const ThresholdTable& t, std::size_t segment, double eta) {
  const double lower = t.v[segment];
  const double width = t.upper(segment) - lower;
  const double mass = -std::expm1(-width);  // 1 − e^{−width}
  return lower - std::log1p(-eta * mass);
}

template <class Rng>
std::size_t sample_segment(const ThresholdTable& t, Rng& rng) {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(t.cumulative.begin(), t.cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - t.cumulative.begin()), t.size() - 1);
}

/// Draws a threshold from the piecewise density ∝ q_M(v)e^{−v}.
template <class Rng>
double sample_threshold(const ThresholdTable& t, Rng& rng) {
  const std::size_t segment = sample_segment(t, rng);
  return threshold_in_segment(t, segment, uniform01(rng));
}

}  // namespace gds
