#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mtvpar/dp_solver.hpp"
#include "mtvpar/metrics.hpp"
#include "mtvpar/mtv_par.hpp"
#include "mtvpar/simulation.hpp"

namespace mtvpar {
namespace {

TraceSet small_dataset(std::uint64_t seed, RateFunctionSpec spec, std::size_t trials,
                       std::size_t frames) {
  SimConfig cfg;
  cfg.trials = trials;
  cfg.frames = frames;
  cfg.seed = seed;
  return simulate_dataset(spec, cfg).traces;
}

FitConfig pooled_config(std::size_t trials, double lambda, double a) {
  FitConfig cfg;
  cfg.base_lambda = lambda;
  cfg.kernel = KernelConfig{200.0, KernelConfig::full_pooling_window(trials), a};
  return cfg;
}

void expect_same_result(const FitResult& x, const FitResult& y) {
  EXPECT_EQ(x.raster.counts, y.raster.counts);
  EXPECT_EQ(x.rates.rates, y.rates.rates);
  EXPECT_EQ(x.penalties.penalties, y.penalties.penalties);
  EXPECT_EQ(x.gamma, y.gamma);
  EXPECT_EQ(x.iterations, y.iterations);
  EXPECT_EQ(x.termination, y.termination);
  EXPECT_EQ(x.objective_trace, y.objective_trace);
  ASSERT_EQ(x.segmentations.size(), y.segmentations.size());
  for (std::size_t r = 0; r < x.segmentations.size(); ++r) {
    EXPECT_EQ(x.segmentations[r].changepoints, y.segmentations[r].changepoints);
    EXPECT_EQ(x.segmentations[r].calcium, y.segmentations[r].calcium);
    EXPECT_EQ(x.segmentations[r].objective, y.segmentations[r].objective);
  }
}

// ---- estimate_gamma ---------------------------------------------------

TEST(EstimateGamma, GeometricSequence) {
  std::vector<double> y(1000);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = std::pow(0.96, double(t + 1));
  // Direct lag-1 autocorrelation of the same sequence, written out in full.
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= 1000.0;
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < 1000; ++t) {
    den += (y[t] - mean) * (y[t] - mean);
    if (t > 0) num += (y[t] - mean) * (y[t - 1] - mean);
  }
  const double got = estimate_gamma(y);
  EXPECT_NEAR(got, num / den, 1e-12);
  EXPECT_NEAR(got, 0.96, 0.01);
}

TEST(EstimateGamma, WhiteNoiseClampsToFloor) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  std::vector<double> y(20000);
  for (double& v : y) v = gauss(rng);
  EXPECT_EQ(estimate_gamma(y), kGammaFloor);
}

TEST(EstimateGamma, ClampsToCeiling) {
  std::vector<double> y(5000);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = double(t);
  EXPECT_EQ(estimate_gamma(y), kGammaCeiling);
}

TEST(EstimateGamma, ConstantTraceIsAnError) {
  const std::vector<double> y(50, 0.3);
  try {
    estimate_gamma(y);
    FAIL() << "expected ConstantTrace";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConstantTrace);
  }
  EXPECT_THROW(estimate_gamma(std::vector<double>{1.0, 2.0}), Error);
}

// ---- fit ----------------------------------------------------------------

TEST(Fit, AllZeroTracesStopAtFirstIteration) {
  TraceSet traces;
  traces.values = Matrix<double>(4, 200, 0.0);
  traces.sample_rate_hz = 50.0;
  FitConfig cfg = pooled_config(4, 0.5, 1.0);
  cfg.gamma = std::vector<double>(4, 0.96);
  const FitResult res = fit(traces, cfg);
  EXPECT_EQ(res.termination, Termination::FixedPoint);
  EXPECT_EQ(res.iterations, 1);
  for (int c : res.raster.counts.values()) EXPECT_EQ(c, 0);
  for (double v : res.rates.rates.values()) EXPECT_EQ(v, 0.0);
  for (double v : res.penalties.penalties.values()) EXPECT_EQ(v, 0.5);
  EXPECT_EQ(to_string(res.termination), "fixed_point");
}

TEST(Fit, ZeroSharpnessEqualsIndependentConstantSolves) {
  const std::size_t trials = 8;
  const TraceSet traces =
      small_dataset(77, RateFunctionSpec::bimodal_constant(trials, 600), trials, 600);
  const FitResult res = fit(traces, pooled_config(trials, 0.3, 0.0));
  EXPECT_EQ(res.termination, Termination::FixedPoint);
  EXPECT_EQ(res.iterations, 2);
  for (std::size_t r = 0; r < trials; ++r) {
    const std::vector<double> pen(600, 0.3);
    const Segmentation seg = solve_l0(traces.values.row(r), res.gamma[r], pen);
    EXPECT_EQ(res.segmentations[r].changepoints, seg.changepoints);
    for (std::size_t t = 0; t < 600; ++t) {
      const bool spike = std::binary_search(seg.changepoints.begin(),
                                            seg.changepoints.end(), t);
      EXPECT_EQ(res.raster.counts(r, t), spike ? 1 : 0);
    }
  }
}

TEST(Fit, ResultInvariantsAndHistory) {
  const std::size_t trials = 10;
  const TraceSet traces =
      small_dataset(31, RateFunctionSpec::bimodal_dynamic(trials, 800), trials, 800);
  FitConfig cfg = pooled_config(trials, 0.25, 1.0);
  cfg.kernel.window_B = 5;
  cfg.record_history = true;
  const FitResult res = fit(traces, cfg);
  ASSERT_EQ(res.history.size(), std::size_t(res.iterations));
  ASSERT_EQ(res.objective_trace.size(), std::size_t(res.iterations));

  // Iteration 1 is the constant-penalty solution.
  for (std::size_t r = 0; r < trials; ++r) {
    const Segmentation seg = solve_l0(traces.values.row(r), res.gamma[r],
                                      std::vector<double>(800, 0.25));
    EXPECT_EQ(res.history[0].segmentations[r].changepoints, seg.changepoints);
  }
  if (res.history.size() > 1) {
    EXPECT_NE(res.history[1].raster.counts, res.history[0].raster.counts);
  }

  for (std::size_t r = 0; r < trials; ++r) {
    const Segmentation& seg = res.segmentations[r];
    std::vector<int> expected(800, 0);
    for (std::size_t tau : seg.changepoints) expected[tau] = 1;
    const auto row = res.raster.counts.row(r);
    EXPECT_TRUE(std::equal(row.begin(), row.end(), expected.begin()));
    const auto pen = res.penalties.penalties.row(r);
    const double direct = evaluate_objective(traces.values.row(r), seg.calcium,
                                             seg.changepoints, pen, res.gamma[r]);
    EXPECT_NEAR(seg.objective, direct, 1e-9 * std::max(1.0, std::abs(direct)));
    double mean = 0.0;
    for (double v : pen) mean += v;
    EXPECT_NEAR(mean / 800.0, 0.25, 1e-9 * 0.25);
  }

  if (res.termination == Termination::FixedPoint) {
    // One more alternation step reproduces the raster.
    const RateField rates = estimate_firing_rate(res.raster, cfg.kernel);
    const PenaltyField pen = build_penalty(rates, cfg.base_lambda, cfg.kernel.a);
    for (std::size_t r = 0; r < trials; ++r) {
      const Segmentation seg = solve_l0(traces.values.row(r), res.gamma[r],
                                        pen.penalties.row(r));
      EXPECT_EQ(seg.changepoints, res.segmentations[r].changepoints);
    }
  }
}

TEST(Fit, MaxIterTerminationIsReported) {
  const std::size_t trials = 4;
  const TraceSet traces =
      small_dataset(5, RateFunctionSpec::bimodal_constant(trials, 400), trials, 400);
  FitConfig cfg = pooled_config(trials, 0.3, 1.0);
  cfg.max_iter = 1;
  const FitResult res = fit(traces, cfg);
  EXPECT_EQ(res.termination, Termination::MaxIter);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(to_string(res.termination), "max_iter");
}

TEST(Fit, DeterministicAcrossRunsAndThreadCounts) {
  const std::size_t trials = 12;
  const TraceSet traces =
      small_dataset(19, RateFunctionSpec::bimodal_constant(trials, 700), trials, 700);
  FitConfig cfg = pooled_config(trials, 0.25, 1.0);
  const FitResult first = fit(traces, cfg);
  const FitResult second = fit(traces, cfg);
  expect_same_result(first, second);
  cfg.threads = 3;
  expect_same_result(first, fit(traces, cfg));
}

TEST(Fit, ErrorsCarryTrialIndex) {
  TraceSet traces;
  traces.values = Matrix<double>(3, 50, 0.0);
  traces.sample_rate_hz = 50.0;
  for (std::size_t t = 0; t < 50; ++t) {
    traces.values(0, t) = std::sin(double(t));
    traces.values(2, t) = std::cos(double(t));
  }
  try {
    fit(traces, pooled_config(3, 1.0, 1.0));
    FAIL() << "expected ConstantTrace";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConstantTrace);
    EXPECT_EQ(e.trial(), 2u);
  }
  FitConfig bad = pooled_config(3, 1.0, 1.0);
  bad.gamma = std::vector<double>{0.9, 0.9};
  EXPECT_THROW(fit(traces, bad), Error);
  bad.gamma = std::vector<double>{0.9, 1.5, 0.9};
  try {
    fit(traces, bad);
    FAIL() << "expected BadGamma";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadGamma);
    EXPECT_EQ(e.trial(), 2u);
  }
  bad = pooled_config(3, 0.0, 1.0);
  EXPECT_THROW(fit(traces, bad), Error);
}

// Scaled-down simulation study: fewer trials, one lambda near both methods'
// optimum, 20 replicates.
TEST(Fit, TimeVaryingPenaltyImprovesSpikeAccuracyOnAverage) {
  const std::size_t trials = 20;
  const std::size_t frames = 1000;
  const int replicates = 20;
  double vp_varying = 0.0, vp_constant = 0.0;
  for (int rep = 0; rep < replicates; ++rep) {
    SimConfig sim;
    sim.trials = trials;
    sim.frames = frames;
    sim.seed = 600 + rep;
    const SimulatedDataset data =
        simulate_dataset(RateFunctionSpec::bimodal_constant(trials, frames), sim);
    const FitResult varying = fit(data.traces, pooled_config(trials, 0.25, 1.0));
    const FitResult constant = fit(data.traces, pooled_config(trials, 0.25, 0.0));
    for (std::size_t r = 0; r < trials; ++r) {
      const SpikeTimes truth = raster_to_times(data.spikes.counts.row(r), 50.0);
      vp_varying += vp_distance(raster_to_times(varying.raster.counts.row(r), 50.0), truth);
      vp_constant += vp_distance(raster_to_times(constant.raster.counts.row(r), 50.0), truth);
    }
  }
  EXPECT_LT(vp_varying, vp_constant);
}

}  // namespace
}  // namespace mtvpar
