// simulation.hpp
// Inhomogeneous-Poisson spike trains by thinning, and AR(1) fluorescence.
//
// Rates are per frame; multiply by the sample rate for spikes/second.
// Frames and trials are 1-based at this interface.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtvpar/model.hpp"

namespace mtvpar {

enum class RateKind { BimodalConstant, BimodalDynamic, CustomTable };

// Two-bump rate f(t) = baseline + amplitude * sum_t0 exp(-(t - t0)^2 / d^2).
// The dynamic variant scales the bumps by exp(-(r - center)^2 / scale).
struct RateFunctionSpec {
  RateKind kind = RateKind::BimodalConstant;
  std::size_t trials = 1;
  std::size_t frames = 1000;
  double baseline = 0.01;
  double amplitude = 0.19;
  std::vector<double> peak_frames{300.0, 700.0};
  double width_d = 150.0;
  double trial_center = 0.5;
  double trial_scale = 1000.0;
  std::optional<Matrix<double>> table;  // trials x frames, CustomTable only

  static RateFunctionSpec bimodal_constant(std::size_t trials, std::size_t frames);
  static RateFunctionSpec bimodal_dynamic(std::size_t trials, std::size_t frames);
  static RateFunctionSpec custom_table(Matrix<double> table);
  static RateFunctionSpec zero(std::size_t trials, std::size_t frames);
};

struct SimConfig {
  std::size_t trials = 50;
  std::size_t frames = 1000;
  double gamma = 0.96;
  double noise_sd = 0.15;
  double sample_rate_hz = 50.0;
  double spike_amplitude = 1.0;
  std::uint64_t seed = 1;
};

void require_valid(const SimConfig& cfg);

// Per-frame rate at 1-based (trial, frame).
double eval_rate(const RateFunctionSpec& spec, std::size_t trial, std::size_t frame);

// Independent seed for substream `stream` of `seed` (SplitMix64 mixing).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

// Thinning: S ~ Poisson(frames * f*), S uniform times on (0, frames], each
// kept with probability f(ceil(s)) / f*. Returns per-frame counts.
std::vector<int> simulate_spike_train(const RateFunctionSpec& spec,
                                      std::size_t trial, std::size_t frames,
                                      std::uint64_t seed);

// c(t) = gamma c(t-1) + amplitude * counts(t) from c(0) = 0, plus
// N(0, noise_sd^2) noise.
std::vector<double> generate_trace(std::span<const int> counts,
                                   const SimConfig& cfg, std::uint64_t seed);

struct SimulatedDataset {
  TraceSet traces;
  SpikeRaster spikes;
  RateField rates;  // ground truth, spikes/second
};

SimulatedDataset simulate_dataset(const RateFunctionSpec& spec,
                                  const SimConfig& cfg);

}  // namespace mtvpar
