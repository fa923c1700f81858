#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <concepts>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "gds/core/errors.hpp"
#include "gds/mode/find_mode.hpp"
#include "gds/proposal/proposal.hpp"
#include "gds/random/streams.hpp"
#include "gds/sampler/accept_reject.hpp"
#include "gds/sampler/threshold_table.hpp"

namespace gds {

struct GdsConfig {
  std::size_t M = 10'000;  // proposal pool size
  std::size_t N = 100;     // posterior draws
  std::optional<double> scale;  // fixed covariance scale; tuned from s0 when empty
  double s0 = 1.0;
  std::size_t pilot_size = 0;  // tuning draws per ladder rung; 0 means M
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::optional<ParameterVector> init;  // mode search start; model.starting_point() or the origin when empty
  ModeOptions mode;
  AcceptRejectOptions accept;
};

struct StageTimes {
  double mode = 0.0;
  double proposals = 0.0;
  double accept_reject = 0.0;
};

struct GdsRunResult {
  std::vector<PosteriorDraw> draws;
  ThresholdTable table;
  ModeResult mode;
  Proposal proposal;
  double log_c1 = 0.0;
  double log_c2 = 0.0;
  double scale = 0.0;
  std::uint64_t total_attempts = 0;
  std::uint64_t seed = 0;
  std::size_t retunes = 0;
  std::uint64_t tail_violations = 0;
  StageTimes seconds;

  double acceptance_rate() const {
    return total_attempts == 0 ? 0.0 : static_cast<double>(draws.size()) / static_cast<double>(total_attempts);
  }
};

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is handled exactly once;
/// the exception from the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/// Steps 2–7 given a mode: scale, proposal pool, threshold table, thresholds, accept–reject.
template <LogDensityModel M>
GdsRunResult run_gds(const M& model, const ModeResult& mode, const GdsConfig& cfg) {
  if (cfg.M < 100) throw ContractViolation("proposal pool size M must be at least 100");
  if (cfg.N < 1) throw ContractViolation("number of posterior draws N must be at least 1");
  if (cfg.workers < 1) throw ContractViolation("need at least one worker");
  if (cfg.scale && !(*cfg.scale > 0.0)) throw ContractViolation("fixed scale must be positive");

  GdsRunResult out;
  out.mode = mode;
  out.log_c1 = mode.log_c1;
  out.seed = cfg.seed;

  const auto pool_start = std::chrono::steady_clock::now();
  Engine tuning_rng = make_stream(cfg.seed, StreamKind::tuning);
  Engine pool_rng = make_stream(cfg.seed, StreamKind::proposals);
  const std::size_t pilot = cfg.pilot_size == 0 ? cfg.M : cfg.pilot_size;

  double scale = cfg.scale ? *cfg.scale : tune_scale(model, mode, cfg.s0, pilot, tuning_rng);
  std::vector<double> pool_v(cfg.M);
  while (true) {
    out.proposal = build_proposal(mode, scale);
    double worst = -kInf;
    for (std::size_t m = 0; m < cfg.M; ++m) {
      ProposalSample s = sample_proposal(out.proposal, pool_rng);
      evaluate_sample(model, mode, out.proposal, s);
      pool_v[m] = s.v;
      worst = std::max(worst, s.log_phi);
    }
    if (worst <= kDominanceTolerance) break;
    if (cfg.scale) {
      DominanceViolation e("re-tune scale: a proposal pool draw has log Phi = " + std::to_string(worst) +
                               " > 0 at scale " + std::to_string(scale),
                           worst);
      e.scale = scale;
      throw e;
    }
    // Tuned scale failed on the full pool: continue up the ladder.
    const int used = static_cast<int>(std::lround(std::log(scale / cfg.s0) / std::log(kScaleLadderFactor)));
    if (used >= kScaleLadderSteps) {
      throw TuningFailed("proposal family cannot dominate posterior within the scale ladder");
    }
    scale = tune_scale(model, mode, scale * kScaleLadderFactor, pilot, tuning_rng, kScaleLadderSteps - used - 1);
    ++out.retunes;
  }
  out.scale = scale;
  out.log_c2 = out.proposal.log_c2;
  out.table = build_threshold_table(pool_v);

  Engine threshold_rng = make_stream(cfg.seed, StreamKind::thresholds);
  std::vector<double> thresholds(cfg.N);
  for (auto& t : thresholds) t = sample_threshold(out.table, threshold_rng);
  out.seconds.proposals = detail::seconds_since(pool_start);

  const auto ar_start = std::chrono::steady_clock::now();
  out.draws.resize(cfg.N);
  try {
    parallel_for(cfg.N, cfg.workers, [&](std::size_t i) {
      Engine rng = make_stream(cfg.seed, StreamKind::draw, i);
      out.draws[i] = accept_reject(model, mode, out.proposal, thresholds[i], rng, cfg.accept);
    });
  } catch (DominanceViolation& e) {
    e.scale = scale;
    throw;
  }
  out.seconds.accept_reject = detail::seconds_since(ar_start);

  for (const auto& d : out.draws) {
    out.total_attempts += d.attempts;
    out.tail_violations += d.tail_violations;
  }
  return out;
}

/// The full algorithm: mode search, then run_gds on that mode.
template <LogDensityModel M>
GdsRunResult run_gds(const M& model, const GdsConfig& cfg) {
  if (cfg.M < 100) throw ContractViolation("proposal pool size M must be at least 100");
  if (cfg.N < 1) throw ContractViolation("number of posterior draws N must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  ParameterVector init = ParameterVector::Zero(model.dimension());
  if (cfg.init) {
    init = *cfg.init;
  } else if constexpr (requires { { model.starting_point() } -> std::convertible_to<ParameterVector>; }) {
    init = model.starting_point();
  }
  const ModeResult mode = find_mode(model, init, cfg.mode);
  const double mode_seconds = detail::seconds_since(start);
  GdsRunResult out = run_gds(model, mode, cfg);
  out.seconds.mode = mode_seconds;
  return out;
}

}  // namespace gds
