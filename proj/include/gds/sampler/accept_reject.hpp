#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gds/core/errors.hpp"
#include "gds/proposal/proposal.hpp"

namespace gds {

struct PosteriorDraw {
  ParameterVector theta;
  double threshold_v = kNaN;
  std::uint64_t attempts = 0;
  double v = kNaN;  // −log Φ of the accepted proposal
  std::uint64_t tail_violations = 0;
};

struct AcceptRejectOptions {
  std::uint64_t max_attempts = 10'000'000;
  /// false: a proposal with log Φ > 0 aborts the run. true: it is accepted (its v < 0 beats any
  /// threshold) and counted in `tail_violations`.
  bool tolerate_tail_violations = false;
};

/// Draws from g until −log Φ(θ) < threshold_v; the first such θ is one posterior draw.
template <LogDensityModel M, class Rng>
PosteriorDraw accept_reject(const M& model, const ModeResult& mode, const Proposal& prop, double threshold_v,
                            Rng& rng, const AcceptRejectOptions& opts = {}) {
  if (!(threshold_v > 0.0)) throw ContractViolation("threshold must be positive");
  PosteriorDraw draw;
  draw.threshold_v = threshold_v;
  while (draw.attempts < opts.max_attempts) {
    ProposalSample s = sample_proposal(prop, rng);
    evaluate_sample(model, mode, prop, s);
    ++draw.attempts;
    if (s.log_phi > kDominanceTolerance) {
      if (!opts.tolerate_tail_violations) {
        throw DominanceViolation("proposal with log Phi = " + std::to_string(s.log_phi) +
                                     " > 0 during accept-reject; re-tune the scale factor",
                                 s.log_phi);
      }
      ++draw.tail_violations;
    }
    if (s.v < threshold_v) {
      draw.theta = std::move(s.theta);
      draw.v = s.v;
      return draw;
    }
  }
  throw AttemptCapExceeded("no proposal accepted within " + std::to_string(opts.max_attempts) +
                               " attempts for threshold v = " + std::to_string(threshold_v),
                           threshold_v, draw.attempts);
}

}  // namespace gds
