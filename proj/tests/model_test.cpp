#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mtvpar/model.hpp"
#include "support/oracles.hpp"

namespace mtvpar {
namespace {

TraceSet make_traces(std::size_t trials, std::size_t frames, double hz) {
  TraceSet ts;
  ts.values = Matrix<double>(trials, frames, 0.25);
  ts.sample_rate_hz = hz;
  return ts;
}

TEST(ValidateTraceSet, AcceptsFiniteMatrix) {
  EXPECT_FALSE(validate_trace_set(make_traces(2, 100, 15.0)).has_value());
}

TEST(ValidateTraceSet, ReportsFirstNonFiniteCellOneBased) {
  TraceSet ts = make_traces(2, 100, 15.0);
  ts.values(0, 6) = std::numeric_limits<double>::quiet_NaN();
  ts.values(1, 50) = std::numeric_limits<double>::infinity();
  const auto err = validate_trace_set(ts);
  ASSERT_TRUE(err.has_value());
  EXPECT_EQ(err->code(), ErrorCode::NonFiniteValue);
  EXPECT_EQ(err->trial(), 1u);
  EXPECT_EQ(err->frame(), 7u);
}

TEST(ValidateTraceSet, SingleFrameIsEmptyTrial) {
  const auto err = validate_trace_set(make_traces(3, 1, 15.0));
  ASSERT_TRUE(err.has_value());
  EXPECT_EQ(err->code(), ErrorCode::EmptyTrial);
}

TEST(ValidateTraceSet, RejectsNonPositiveSampleRate) {
  const auto err = validate_trace_set(make_traces(1, 10, 0.0));
  ASSERT_TRUE(err.has_value());
  EXPECT_EQ(err->code(), ErrorCode::BadSampleRate);
  EXPECT_THROW(require_valid(make_traces(1, 10, -2.0)), Error);
}

TEST(EvaluateObjective, PerfectFitWithoutChangepointsIsZero) {
  const std::vector<double> y{1.0, 0.5, 0.25, 0.125};
  const std::vector<double> pen(4, 2.0);
  EXPECT_EQ(evaluate_objective(y, y, {}, pen, 0.5), 0.0);
}

TEST(EvaluateObjective, PerfectFitChargesOnlyPenalty) {
  const std::vector<double> y{1.0, 0.5, 0.25, 3.0, 1.5};
  const std::vector<double> pen(5, 2.0);
  const std::vector<std::size_t> cps{3};
  EXPECT_EQ(evaluate_objective(y, y, cps, pen, 0.5), 2.0);
}

TEST(EvaluateObjective, ChargesPenaltyAtSpikeFrame) {
  const std::vector<double> y(5, 0.0);
  const std::vector<double> pen{10.0, 20.0, 30.0, 40.0, 50.0};
  const std::vector<std::size_t> cps{1, 4};
  // Spikes at frames 2 and 5.
  EXPECT_EQ(evaluate_objective(y, y, cps, pen, 0.9), 20.0 + 50.0);
}

TEST(EvaluateObjective, MatchesScalarRecomputationOnRandomInstances) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.1, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 20 + rep;
    std::vector<double> y(n), c(n), pen(n);
    for (std::size_t t = 0; t < n; ++t) {
      y[t] = gauss(rng);
      c[t] = gauss(rng);
      pen[t] = unit(rng);
    }
    std::vector<std::size_t> cps;
    for (std::size_t tau = 1; tau < n; tau += 1 + rep % 5) cps.push_back(tau);
    const double expected = testing::direct_objective(y, c, cps, pen);
    const double got = evaluate_objective(y, c, cps, pen, 0.9);
    EXPECT_NEAR(got, expected, 1e-12 * std::abs(expected));
    // Bitwise deterministic for identical inputs.
    EXPECT_EQ(got, evaluate_objective(y, c, cps, pen, 0.9));
  }
}

TEST(EvaluateObjective, RejectsMismatchedLengthsAndBadChangepoints) {
  const std::vector<double> y(4, 0.0);
  const std::vector<double> short_pen(3, 1.0);
  const std::vector<double> pen(4, 1.0);
  try {
    evaluate_objective(y, y, {}, short_pen, 0.5);
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  const std::vector<std::size_t> last_frame{4};
  EXPECT_THROW(evaluate_objective(y, y, last_frame, pen, 0.5), Error);
  const std::vector<std::size_t> unordered{2, 2};
  EXPECT_THROW(evaluate_objective(y, y, unordered, pen, 0.5), Error);
}

TEST(ErrorTagging, WithTrialPrefixesMessageAndKeepsCode) {
  const Error base(ErrorCode::BadPenalty, "nope", 0, 9);
  const Error tagged = base.with_trial(4);
  EXPECT_EQ(tagged.code(), ErrorCode::BadPenalty);
  EXPECT_EQ(tagged.trial(), 4u);
  EXPECT_EQ(tagged.frame(), 9u);
  EXPECT_NE(std::string(tagged.what()).find("trial 4"), std::string::npos);
}

}  // namespace
}  // namespace mtvpar
