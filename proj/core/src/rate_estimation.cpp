#include "mtvpar/rate_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace mtvpar {

void require_valid(const KernelConfig& cfg) {
  if (!(cfg.sigma_ms > 0.0) || !std::isfinite(cfg.sigma_ms)) {
    throw Error(ErrorCode::BadConfig, "sigma_ms must be positive");
  }
  if (cfg.window_B < 1) {
    throw Error(ErrorCode::BadConfig, "window_B must be at least 1");
  }
  if (!(cfg.a >= 0.0) || !std::isfinite(cfg.a)) {
    throw Error(ErrorCode::BadConfig, "a must be nonnegative");
  }
}

double gaussian_boxcar_weight(long dr, long dt_frames, const KernelConfig& cfg,
                              double sample_rate_hz) {
  // |dr| < B/2  <=>  2|dr| < B for integer offsets.
  if (2 * std::labs(dr) >= cfg.window_B) return 0.0;
  const double sigma_s = cfg.sigma_ms / 1000.0;
  const double dt_s = static_cast<double>(dt_frames) / sample_rate_hz;
  return std::exp(-dt_s * dt_s / (2.0 * sigma_s * sigma_s)) /
         (std::sqrt(2.0 * std::numbers::pi) * sigma_s);
}

RateField estimate_firing_rate(const SpikeRaster& raster,
                               const KernelConfig& cfg) {
  require_valid(cfg);
  require_valid(raster);
  const std::size_t trials = raster.trials();
  const std::size_t frames = raster.frames();
  const double hz = raster.sample_rate_hz;
  RateField out{Matrix<double>(trials, frames, 0.0)};
  if (trials == 0 || frames == 0) return out;

  // The kernel is separable: pool counts over the trial window first, then
  // smooth each pooled row in time. Normalization constants cancel in the
  // ratio, so only the unnormalized Gaussian shape is needed.
  const double sigma_frames = cfg.sigma_ms / 1000.0 * hz;
  const long reach = static_cast<long>(std::floor(kKernelTruncation * sigma_frames));
  std::vector<double> shape(static_cast<std::size_t>(reach) + 1);
  for (long k = 0; k <= reach; ++k) {
    const double z = static_cast<double>(k) / sigma_frames;
    shape[static_cast<std::size_t>(k)] = std::exp(-0.5 * z * z);
  }

  // Kernel mass inside [0, frames) for each centre frame.
  std::vector<double> mass(frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const long lo = std::max(-reach, -static_cast<long>(t));
    const long hi = std::min(reach, static_cast<long>(frames - 1 - t));
    double m = 0.0;
    for (long k = lo; k <= hi; ++k) m += shape[static_cast<std::size_t>(std::labs(k))];
    mass[t] = m;
  }

  // Prefix sums over trials give the boxcar pool in O(1) per cell.
  const std::size_t half = static_cast<std::size_t>((cfg.window_B - 1) / 2);
  Matrix<double> prefix(trials + 1, frames, 0.0);
  for (std::size_t r = 0; r < trials; ++r) {
    for (std::size_t t = 0; t < frames; ++t) {
      prefix(r + 1, t) = prefix(r, t) + raster.counts(r, t);
    }
  }

  std::vector<double> pooled(frames);
  for (std::size_t r = 0; r < trials; ++r) {
    const std::size_t lo = r >= half ? r - half : 0;
    const std::size_t hi = std::min(trials - 1, r + half);
    const double members = static_cast<double>(hi - lo + 1);
    bool any = false;
    for (std::size_t t = 0; t < frames; ++t) {
      pooled[t] = prefix(hi + 1, t) - prefix(lo, t);
      any = any || pooled[t] != 0.0;
    }
    if (!any) continue;
    auto row = out.rates.row(r);
    for (std::size_t t = 0; t < frames; ++t) {
      const long lo_k = std::max(-reach, -static_cast<long>(t));
      const long hi_k = std::min(reach, static_cast<long>(frames - 1 - t));
      double acc = 0.0;
      for (long k = lo_k; k <= hi_k; ++k) {
        acc += shape[static_cast<std::size_t>(std::labs(k))] *
               pooled[static_cast<std::size_t>(static_cast<long>(t) + k)];
      }
      row[t] = hz * acc / (members * mass[t]);
    }
  }
  return out;
}

PenaltyField build_penalty(const RateField& rates, double base_lambda,
                           double a) {
  if (!(base_lambda > 0.0) || !std::isfinite(base_lambda)) {
    throw Error(ErrorCode::BadPenalty, "base lambda must be positive");
  }
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw Error(ErrorCode::BadConfig, "a must be nonnegative");
  }
  const std::size_t trials = rates.rates.rows();
  const std::size_t frames = rates.rates.cols();
  PenaltyField out{Matrix<double>(trials, frames, base_lambda), base_lambda};

  std::vector<double> weight(frames);
  for (std::size_t r = 0; r < trials; ++r) {
    const auto row = rates.rates.row(r);
    double peak = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      if (!(row[t] >= 0.0) || !std::isfinite(row[t])) {
        throw Error(ErrorCode::NegativeRate, "rates must be finite and >= 0",
                    r + 1, t + 1);
      }
      peak = std::max(peak, row[t]);
    }
    if (peak == 0.0 || a == 0.0) continue;

    double total = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      weight[t] = std::exp(-a * row[t] / peak);
      total += weight[t];
    }
    const double scale = base_lambda * static_cast<double>(frames) / total;
    auto dest = out.penalties.row(r);
    for (std::size_t t = 0; t < frames; ++t) dest[t] = scale * weight[t];
  }
  return out;
}

}  // namespace mtvpar
