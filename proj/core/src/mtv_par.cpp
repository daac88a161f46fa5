#include "mtvpar/mtv_par.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>

#include "mtvpar/dp_solver.hpp"
#include "parallel.hpp"

namespace mtvpar {

namespace {

std::size_t raster_hash(const SpikeRaster& raster) {
  const auto counts = raster.counts.values();
  const std::string_view bytes(reinterpret_cast<const char*>(counts.data()),
                               counts.size_bytes());
  return std::hash<std::string_view>{}(bytes);
}

void check_config(const FitConfig& cfg, std::size_t trials) {
  if (!(cfg.base_lambda > 0.0) || !std::isfinite(cfg.base_lambda)) {
    throw Error(ErrorCode::BadPenalty, "base lambda must be positive");
  }
  if (cfg.max_iter < 1) {
    throw Error(ErrorCode::BadConfig, "max_iter must be at least 1");
  }
  require_valid(cfg.kernel);
  if (cfg.gamma && cfg.gamma->size() != trials) {
    throw Error(ErrorCode::DimensionMismatch,
                "got " + std::to_string(cfg.gamma->size()) +
                    " gamma values for " + std::to_string(trials) + " trials");
  }
}

std::vector<double> resolve_gamma(const TraceSet& traces, const FitConfig& cfg) {
  std::vector<double> gamma(traces.trials());
  for (std::size_t r = 0; r < traces.trials(); ++r) {
    try {
      if (cfg.gamma) {
        gamma[r] = (*cfg.gamma)[r];
        require_valid_gamma(gamma[r]);
      } else {
        gamma[r] = estimate_gamma(traces.values.row(r));
      }
    } catch (const Error& e) {
      throw e.with_trial(r + 1);
    }
  }
  return gamma;
}

FitIterate detect_spikes(const TraceSet& traces, const std::vector<double>& gamma,
                         const PenaltyField& penalties, std::size_t threads) {
  const std::size_t trials = traces.trials();
  FitIterate step;
  step.penalties = penalties;
  step.segmentations.resize(trials);
  detail::parallel_for(trials, threads, [&](std::size_t r) {
    try {
      step.segmentations[r] = solve_l0(traces.values.row(r), gamma[r],
                                       penalties.penalties.row(r));
    } catch (const Error& e) {
      throw e.with_trial(r + 1);
    }
  });

  step.raster = SpikeRaster{Matrix<int>(trials, traces.frames(), 0),
                            traces.sample_rate_hz};
  for (std::size_t r = 0; r < trials; ++r) {
    const Segmentation& seg = step.segmentations[r];
    // Changepoint tau is a spike at 1-based frame tau + 1, 0-based tau.
    for (std::size_t tau : seg.changepoints) step.raster.counts(r, tau) = 1;
    step.objective += seg.objective;
  }
  return step;
}

}  // namespace

std::string_view to_string(Termination termination) noexcept {
  switch (termination) {
    case Termination::FixedPoint: return "fixed_point";
    case Termination::Cycle: return "cycle";
    case Termination::MaxIter: return "max_iter";
  }
  return "unknown";
}

double estimate_gamma(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3) {
    throw Error(ErrorCode::EmptyTrial, "gamma estimation needs at least 3 frames");
  }
  if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) {
    throw Error(ErrorCode::ConstantTrace, "lag-1 autocorrelation undefined");
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);

  double variance = 0.0;
  double lagged = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = y[t] - mean;
    variance += d * d;
    if (t + 1 < n) lagged += d * (y[t + 1] - mean);
  }
  if (!(variance > 0.0)) {
    throw Error(ErrorCode::ConstantTrace, "lag-1 autocorrelation undefined");
  }
  return std::clamp(lagged / variance, kGammaFloor, kGammaCeiling);
}

FitResult fit(const TraceSet& traces, const FitConfig& cfg) {
  require_valid(traces);
  check_config(cfg, traces.trials());

  const std::size_t trials = traces.trials();
  const std::size_t frames = traces.frames();

  FitResult result;
  result.gamma = resolve_gamma(traces, cfg);

  PenaltyField penalties{Matrix<double>(trials, frames, cfg.base_lambda),
                         cfg.base_lambda};

  // Entry 0 is the all-zero starting indicator; entry k is iteration k.
  std::vector<SpikeRaster> rasters{
      SpikeRaster{Matrix<int>(trials, frames, 0), traces.sample_rate_hz}};
  std::vector<std::size_t> hashes{raster_hash(rasters.front())};
  std::vector<FitIterate> iterates;

  std::size_t chosen = 0;  // index into iterates
  for (int iter = 1;; ++iter) {
    FitIterate step = detect_spikes(traces, result.gamma, penalties, cfg.threads);
    const std::size_t hash = raster_hash(step.raster);
    result.objective_trace.push_back(step.objective);

    std::optional<std::size_t> repeat;
    for (std::size_t k = rasters.size(); k-- > 0;) {
      if (hashes[k] == hash && rasters[k].counts == step.raster.counts) {
        repeat = k;
        break;
      }
    }
    rasters.push_back(step.raster);
    hashes.push_back(hash);
    iterates.push_back(std::move(step));
    result.iterations = iter;

    if (repeat) {
      const std::size_t current = static_cast<std::size_t>(iter);
      if (*repeat + 1 == current) {
        result.termination = Termination::FixedPoint;
        chosen = iterates.size() - 1;
      } else {
        // Iterations repeat+1 .. current form the cycle.
        result.termination = Termination::Cycle;
        chosen = *repeat;
        for (std::size_t k = *repeat; k < iterates.size(); ++k) {
          if (iterates[k].objective < iterates[chosen].objective) chosen = k;
        }
      }
      break;
    }
    if (iter >= cfg.max_iter) {
      result.termination = Termination::MaxIter;
      chosen = iterates.size() - 1;
      break;
    }

    const RateField rates = estimate_firing_rate(iterates.back().raster, cfg.kernel);
    penalties = build_penalty(rates, cfg.base_lambda, cfg.kernel.a);
  }

  FitIterate& best = iterates[chosen];
  result.raster = best.raster;
  result.penalties = best.penalties;
  result.segmentations = best.segmentations;
  result.rates = estimate_firing_rate(result.raster, cfg.kernel);
  if (cfg.record_history) result.history = std::move(iterates);
  return result;
}

}  // namespace mtvpar
