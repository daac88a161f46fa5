// mtv_par.hpp
// Alternating spike detection and firing-rate estimation across trials.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mtvpar/model.hpp"
#include "mtvpar/rate_estimation.hpp"

namespace mtvpar {

inline constexpr double kGammaFloor = 0.5;
inline constexpr double kGammaCeiling = 0.999;

struct FitConfig {
  double base_lambda = 1.0;
  KernelConfig kernel;
  // One decay per trial, or nullopt to estimate each from its trace.
  std::optional<std::vector<double>> gamma;
  int max_iter = 20;
  bool record_history = false;
  std::size_t threads = 1;
};

enum class Termination { FixedPoint, Cycle, MaxIter };

std::string_view to_string(Termination termination) noexcept;

// One alternation step: the penalties fed to the solver and what it found.
struct FitIterate {
  PenaltyField penalties;
  SpikeRaster raster;
  std::vector<Segmentation> segmentations;
  double objective = 0.0;  // summed over trials
};

struct FitResult {
  SpikeRaster raster;
  RateField rates;          // smoothed from `raster`
  PenaltyField penalties;   // the penalties that produced `raster`
  std::vector<Segmentation> segmentations;
  std::vector<double> gamma;
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  std::vector<double> objective_trace;
  std::vector<FitIterate> history;  // filled when record_history is set
};

// Lag-1 sample autocorrelation clamped to [kGammaFloor, kGammaCeiling].
double estimate_gamma(std::span<const double> y);

// Runs the alternation from a constant penalty until the raster repeats.
// A raster equal to the previous one is a fixed point; equal to an older
// one is a cycle, resolved to the cycle member with the lowest objective.
FitResult fit(const TraceSet& traces, const FitConfig& cfg);

}  // namespace mtvpar
