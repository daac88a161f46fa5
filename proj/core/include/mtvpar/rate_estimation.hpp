// rate_estimation.hpp
// Gaussian-boxcar smoothing of spike rasters and the rate-driven penalty.

#pragma once

#include <cstddef>

#include "mtvpar/model.hpp"

namespace mtvpar {

struct KernelConfig {
  double sigma_ms = 200.0;  // within-trial Gaussian bandwidth
  int window_B = 1;         // between-trial boxcar width, in trials
  double a = 1.0;           // penalty sharpness

  // Boxcar wide enough to pool every one of `trials` trials.
  static int full_pooling_window(std::size_t trials) {
    return static_cast<int>(2 * trials) - 1;
  }
};

void require_valid(const KernelConfig& cfg);

// Gaussian support is cut off beyond this many bandwidths.
inline constexpr double kKernelTruncation = 4.0;

// G(dr, dt) with the Gaussian in seconds and the boxcar I(|dr| < B/2).
// Untruncated; estimate_firing_rate applies the 4-sigma cutoff.
double gaussian_boxcar_weight(long dr, long dt_frames, const KernelConfig& cfg,
                              double sample_rate_hz);

// Edge-normalized kernel average of per-frame rates count * sample_rate,
// in spikes/second.
RateField estimate_firing_rate(const SpikeRaster& raster,
                               const KernelConfig& cfg);

// lambda_r(t) = lambda T exp(-a f/max f) / sum_t' exp(-a f(t')/max f).
// A trial whose rates are all zero gets the constant base_lambda.
PenaltyField build_penalty(const RateField& rates, double base_lambda,
                           double a);

}  // namespace mtvpar
