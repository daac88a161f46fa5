#include "mtvpar/model.hpp"

#include <cmath>

namespace mtvpar {

std::optional<Error> validate_trace_set(const TraceSet& traces) {
  if (traces.trials() < 1 || traces.frames() < 2) {
    return Error(ErrorCode::EmptyTrial,
                 "need at least 1 trial and 2 frames, got " +
                     std::to_string(traces.trials()) + "x" +
                     std::to_string(traces.frames()));
  }
  if (!(traces.sample_rate_hz > 0.0) || !std::isfinite(traces.sample_rate_hz)) {
    return Error(ErrorCode::BadSampleRate,
                 "sample rate must be positive, got " +
                     std::to_string(traces.sample_rate_hz));
  }
  if (!traces.trial_ids.empty() && traces.trial_ids.size() != traces.trials()) {
    return Error(ErrorCode::DimensionMismatch,
                 "trial_ids has " + std::to_string(traces.trial_ids.size()) +
                     " labels for " + std::to_string(traces.trials()) +
                     " trials");
  }
  for (std::size_t r = 0; r < traces.trials(); ++r) {
    for (std::size_t t = 0; t < traces.frames(); ++t) {
      if (!std::isfinite(traces.values(r, t))) {
        return Error(ErrorCode::NonFiniteValue,
                     "non-finite value at trial " + std::to_string(r + 1) +
                         ", frame " + std::to_string(t + 1),
                     r + 1, t + 1);
      }
    }
  }
  return std::nullopt;
}

void require_valid(const TraceSet& traces) {
  if (auto err = validate_trace_set(traces)) throw *err;
}

void require_valid(const SpikeRaster& raster) {
  if (!(raster.sample_rate_hz > 0.0) || !std::isfinite(raster.sample_rate_hz)) {
    throw Error(ErrorCode::BadSampleRate, "raster sample rate must be positive");
  }
  for (std::size_t r = 0; r < raster.trials(); ++r) {
    for (std::size_t t = 0; t < raster.frames(); ++t) {
      if (raster.counts(r, t) < 0) {
        throw Error(ErrorCode::BadRange, "negative spike count", r + 1, t + 1);
      }
    }
  }
}

void require_valid_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::BadGamma,
                "gamma must lie in (0, 1), got " + std::to_string(gamma));
  }
}

double evaluate_objective(std::span<const double> y,
                          std::span<const double> calcium,
                          std::span<const std::size_t> changepoints,
                          std::span<const double> penalty, double gamma) {
  require_valid_gamma(gamma);
  const std::size_t n = y.size();
  if (calcium.size() != n || penalty.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "y, calcium and penalty must have equal length");
  }
  double fit = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double r = y[t] - calcium[t];
    fit += r * r;
  }
  double charged = 0.0;
  std::size_t previous = 0;
  for (std::size_t tau : changepoints) {
    if (tau < 1 || tau + 1 > n || tau <= previous) {
      throw Error(ErrorCode::BadRange,
                  "changepoints must be strictly increasing in [1, T-1]");
    }
    previous = tau;
    // 1-based spike frame tau + 1 lives at 0-based index tau.
    charged += penalty[tau];
  }
  return 0.5 * fit + charged;
}

}  // namespace mtvpar
