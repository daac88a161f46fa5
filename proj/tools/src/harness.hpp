// harness.hpp
// Monte-Carlo study: simulate, fit with time-varying (a > 0) and constant
// (a = 0) penalties over a lambda grid, and score against ground truth.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtvpar/model.hpp"
#include "mtvpar/simulation.hpp"

namespace mtvpar::io {

enum class Scenario { ConstantRate, DynamicRate };

std::string_view to_string(Scenario scenario) noexcept;
std::optional<Scenario> parse_scenario(std::string_view text);

inline constexpr std::string_view kVaryingMethod = "time_varying";
inline constexpr std::string_view kConstantMethod = "constant";

// Eight log-spaced values from 0.1 to 0.8.
std::vector<double> default_lambda_grid();

// Full pooling for the constant-rate scenario, 10 trials for the dynamic one.
int scenario_window(Scenario scenario, std::size_t trials);
RateFunctionSpec scenario_rate(Scenario scenario, std::size_t trials, std::size_t frames);

struct StudyConfig {
  Scenario scenario = Scenario::ConstantRate;
  int replicates = 20;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  std::size_t trials = 50;
  std::size_t frames = 1000;
  double true_gamma = 0.96;
  double noise_sd = 0.15;
  double sample_rate_hz = 50.0;

  double sigma_ms = 200.0;
  std::optional<int> window_B;     // nullopt: scenario_window
  std::optional<double> fit_gamma;  // nullopt: estimated per trial
  double a = 1.0;
  int max_iter = 20;
  double q = 1.0;
};

void require_valid(const StudyConfig& cfg);

// Replicate `rep` (0-based) simulates with this seed.
std::uint64_t replicate_seed(std::uint64_t seed, int rep);

struct Score {
  double vp = 0.0;           // mean over trials
  double l2 = 0.0;           // over the whole trial x frame field
  double l2_marginal = 0.0;  // trial-averaged rate
};

Score score_estimate(const SpikeRaster& truth_spikes, const RateField& truth_rates,
                     const SpikeRaster& est_spikes, const RateField& est_rates, double q);

struct GridPoint {
  double lambda = 0.0;
  std::string method;
  double mean_vp = 0.0;
  double mean_l2 = 0.0;
  double mean_l2_marginal = 0.0;
  int n_replicates = 0;
  int max_iter_runs = 0;  // fits that hit max_iter
};

struct StudyResult {
  StudyConfig config;
  std::vector<GridPoint> varying;
  std::vector<GridPoint> constant;
  std::size_t best_varying = 0;  // VP-optimal grid index, ties to smaller lambda
  std::size_t best_constant = 0;
  double vp_reduction = 0.0;  // (constant - varying) / constant at the optima
  double l2_reduction = 0.0;
  double l2_marginal_reduction = 0.0;
  double seconds = 0.0;
};

StudyResult run_study(const StudyConfig& cfg);

// Index of the smallest mean VP, first on ties.
std::size_t vp_optimum(const std::vector<GridPoint>& points);

// benchmark_results.csv, report.md and plots/{vp,l2}.svg under `dir`.
void write_study_outputs(const std::filesystem::path& dir, const StudyResult& result);

std::string study_csv(const StudyResult& result);
std::string study_report(const StudyResult& result);

}  // namespace mtvpar::io
