#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "gds/core/errors.hpp"
#include "gds/models/cauchy_normal.hpp"
#include "gds/models/gaussian.hpp"
#include "gds/models/hier_gauss.hpp"
#include "gds/sampler/run_gds.hpp"
#include "gds/simulate/designs.hpp"
#include "oracles.hpp"

namespace {

using namespace gds;

NormalNormalModel normal_normal() {
  Vector y(8);
  y << 1.2, 0.4, 2.1, 1.7, 0.9, 1.1, 2.5, 0.3;
  return NormalNormalModel(y, 1.5, 0.0, 4.0);
}

TEST(RunGds, Preconditions) {
  const auto m = GaussianModel::standard(2);
  GdsConfig cfg;
  cfg.N = 0;
  EXPECT_THROW(run_gds(m, cfg), ContractViolation);
  cfg.N = 10;
  cfg.M = 99;
  EXPECT_THROW(run_gds(m, cfg), ContractViolation);
  cfg.M = 100;
  cfg.scale = -1.0;
  EXPECT_THROW(run_gds(m, cfg), ContractViolation);
}

TEST(RunGds, AttemptsAddUpAndDrawsBeatThresholds) {
  const auto m = normal_normal();
  GdsConfig cfg;
  cfg.M = 2000;
  cfg.N = 300;
  cfg.scale = 3.0;
  const GdsRunResult r = run_gds(m, cfg);
  ASSERT_EQ(r.draws.size(), 300u);
  std::uint64_t sum = 0;
  for (const auto& d : r.draws) {
    sum += d.attempts;
    EXPECT_GE(d.attempts, 1u);
    EXPECT_LT(-log_phi(m, r.mode, r.proposal, d.theta), d.threshold_v);
  }
  EXPECT_EQ(r.total_attempts, sum);
  EXPECT_GT(r.acceptance_rate(), 0.0);
  EXPECT_LE(r.acceptance_rate(), 1.0);
  EXPECT_EQ(r.log_c2, r.proposal.log_c2);
  EXPECT_EQ(r.table.total_count, 2000u);
}

TEST(RunGds, BitIdenticalAcrossWorkerCounts) {
  const auto m = make_cauchy_normal();
  GdsConfig cfg;
  cfg.M = 2000;
  cfg.N = 64;
  cfg.scale = 200.0;
  cfg.seed = 3;
  cfg.accept.tolerate_tail_violations = true;
  const GdsRunResult one = run_gds(m, cfg);
  for (unsigned w : {2u, 4u, 8u}) {
    cfg.workers = w;
    const GdsRunResult many = run_gds(m, cfg);
    ASSERT_EQ(many.draws.size(), one.draws.size());
    for (std::size_t i = 0; i < one.draws.size(); ++i) {
      EXPECT_EQ(std::memcmp(one.draws[i].theta.data(), many.draws[i].theta.data(), 2 * sizeof(double)), 0);
      EXPECT_EQ(one.draws[i].attempts, many.draws[i].attempts);
      EXPECT_EQ(one.draws[i].threshold_v, many.draws[i].threshold_v);
    }
    EXPECT_EQ(one.total_attempts, many.total_attempts);
  }
}

TEST(RunGds, NormalNormalDrawsFollowThePosterior) {
  const auto m = normal_normal();
  GdsConfig cfg;
  cfg.M = 10000;
  cfg.N = 5000;
  cfg.scale = 2.0;
  const double mu = m.posterior_mean(), sd = std::sqrt(m.posterior_variance());
  auto p_value = [&](std::uint64_t seed, std::vector<double>& x) {
    cfg.seed = seed;
    const GdsRunResult r = run_gds(m, cfg);
    x.clear();
    for (const auto& d : r.draws) x.push_back(d.theta[0]);
    const double ks = oracle::ks_statistic(x, [&](double t) { return oracle::normal_cdf(t, mu, sd); });
    return oracle::ks_pvalue(ks, x.size());
  };
  std::vector<double> x;
  EXPECT_GT(p_value(1, x), 0.01);
  EXPECT_LT(std::abs(oracle::lag1_autocorrelation(x)), 3.0 / std::sqrt(5000.0));

  // A level-0.01 test rejects a correct sampler 1% of the time; over 20 seeds ≥3 rejections has
  // probability 0.001.
  int rejected = 0;
  for (std::uint64_t seed = 2; seed <= 21; ++seed) rejected += p_value(seed, x) < 0.01;
  EXPECT_LE(rejected, 2);
}

TEST(RunGds, FixedScaleThatFailsToDominateIsAnError) {
  const auto m = GaussianModel::standard(2);
  GdsConfig cfg;
  cfg.M = 1000;
  cfg.N = 5;
  cfg.scale = 0.5;
  EXPECT_THROW(run_gds(m, cfg), DominanceViolation);
}

TEST(RunGds, TunedScaleClimbsUntilThePoolIsDominated) {
  const auto m = make_cauchy_normal();
  GdsConfig cfg;
  cfg.M = 20000;
  cfg.N = 20;
  cfg.pilot_size = 100;
  cfg.accept.tolerate_tail_violations = true;
  const GdsRunResult r = run_gds(m, cfg);
  EXPECT_GT(r.retunes, 0u);
  EXPECT_GT(r.scale, 10.0);
  EXPECT_GE(r.table.v.front(), 0.0);
}

TEST(RunGds, CauchyNormalAtScaleTwoHundred) {
  const auto m = make_cauchy_normal();
  GdsConfig cfg;
  cfg.M = 20000;
  cfg.N = 200;
  cfg.scale = 200.0;
  cfg.seed = 1;
  cfg.accept.tolerate_tail_violations = true;
  const GdsRunResult r = run_gds(m, cfg);
  EXPECT_GT(r.acceptance_rate(), 0.005);
  EXPECT_LT(r.acceptance_rate(), 0.03);
  std::vector<double> xs, ts;
  for (const auto& d : r.draws) {
    if (d.theta.norm() > 5.0) {
      xs.push_back(d.theta[0]);
      ts.push_back(d.theta[1]);
    }
  }
  ASSERT_GE(xs.size(), 20u);
  const Eigen::Map<const Vector> a(xs.data(), static_cast<Index>(xs.size()));
  const Eigen::Map<const Vector> b(ts.data(), static_cast<Index>(ts.size()));
  const Vector ac = a.array() - a.mean(), bc = b.array() - b.mean();
  EXPECT_GT(ac.dot(bc) / (ac.norm() * bc.norm()), 0.9);
}

TEST(CauchyOracle, MarginalCdfsAreSymmetricAndNearlyCauchy) {
  using C = oracle::CauchyMarginals;
  EXPECT_NEAR(C::x_cdf(0.0), 0.5, 1e-10);
  EXPECT_NEAR(C::theta_cdf(0.0), 0.5, 1e-10);
  EXPECT_NEAR(C::x_cdf(-3.0) + C::x_cdf(3.0), 1.0, 1e-10);
  // The N(0, 50005) factor is nearly flat where the Cauchy mass sits.
  EXPECT_NEAR(C::x_cdf(1.0) - C::x_cdf(-1.0), 0.5, 2e-3);
  EXPECT_LT(C::theta_cdf(1.0), C::x_cdf(1.0));
  EXPECT_NEAR(C::theta_cdf(500.0), C::x_cdf(500.0), 1e-3);
}

TEST(RunGds, HierGaussTunedScale) {
  HierGaussDesign d;
  d.n = 25;
  const auto data = simulate_hier_gauss(d, 1).data;
  const auto m = make_hier_gauss(25, 4, 25, data);
  GdsConfig cfg;
  cfg.M = 10000;
  cfg.N = 20;
  cfg.seed = 1;
  const GdsRunResult r = run_gds(m, cfg);
  EXPECT_GE(r.scale, 1.05);
  EXPECT_LE(r.scale, 1.6);
  EXPECT_EQ(r.draws.size(), 20u);
}

}  // namespace
