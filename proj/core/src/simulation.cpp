#include "mtvpar/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace mtvpar {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double bump_sum(const RateFunctionSpec& spec, double t) {
  double sum = 0.0;
  for (double t0 : spec.peak_frames) {
    const double z = (t - t0) / spec.width_d;
    sum += std::exp(-z * z);
  }
  return sum;
}

}  // namespace

RateFunctionSpec RateFunctionSpec::bimodal_constant(std::size_t trials,
                                                    std::size_t frames) {
  RateFunctionSpec spec;
  spec.kind = RateKind::BimodalConstant;
  spec.trials = trials;
  spec.frames = frames;
  spec.trial_center = static_cast<double>(trials) / 2.0;
  return spec;
}

RateFunctionSpec RateFunctionSpec::bimodal_dynamic(std::size_t trials,
                                                   std::size_t frames) {
  RateFunctionSpec spec = bimodal_constant(trials, frames);
  spec.kind = RateKind::BimodalDynamic;
  return spec;
}

RateFunctionSpec RateFunctionSpec::custom_table(Matrix<double> table) {
  for (double v : table.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::BadRange, "per-frame rates must lie in [0, 1]");
    }
  }
  RateFunctionSpec spec;
  spec.kind = RateKind::CustomTable;
  spec.trials = table.rows();
  spec.frames = table.cols();
  spec.trial_center = static_cast<double>(spec.trials) / 2.0;
  spec.table = std::move(table);
  return spec;
}

RateFunctionSpec RateFunctionSpec::zero(std::size_t trials, std::size_t frames) {
  return custom_table(Matrix<double>(trials, frames, 0.0));
}

void require_valid(const SimConfig& cfg) {
  if (cfg.trials < 1 || cfg.frames < 1) {
    throw Error(ErrorCode::EmptyTrial, "simulation needs at least 1 trial and 1 frame");
  }
  require_valid_gamma(cfg.gamma);
  if (!(cfg.noise_sd >= 0.0) || !std::isfinite(cfg.noise_sd)) {
    throw Error(ErrorCode::BadConfig, "noise_sd must be nonnegative");
  }
  if (!(cfg.sample_rate_hz > 0.0) || !std::isfinite(cfg.sample_rate_hz)) {
    throw Error(ErrorCode::BadSampleRate, "sample rate must be positive");
  }
  if (!std::isfinite(cfg.spike_amplitude)) {
    throw Error(ErrorCode::BadConfig, "spike amplitude must be finite");
  }
}

double eval_rate(const RateFunctionSpec& spec, std::size_t trial,
                 std::size_t frame) {
  if (trial < 1 || trial > spec.trials || frame < 1 || frame > spec.frames) {
    throw Error(ErrorCode::OutOfDomain,
                "(" + std::to_string(trial) + ", " + std::to_string(frame) +
                    ") outside rate domain",
                trial, frame);
  }
  const double t = static_cast<double>(frame);
  switch (spec.kind) {
    case RateKind::BimodalConstant:
      return spec.baseline + spec.amplitude * bump_sum(spec, t);
    case RateKind::BimodalDynamic: {
      const double dr = static_cast<double>(trial) - spec.trial_center;
      return spec.baseline + spec.amplitude * bump_sum(spec, t) *
                                 std::exp(-dr * dr / spec.trial_scale);
    }
    case RateKind::CustomTable:
      if (!spec.table) throw Error(ErrorCode::BadConfig, "custom_table without a table");
      return (*spec.table)(trial - 1, frame - 1);
  }
  return 0.0;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

std::vector<int> simulate_spike_train(const RateFunctionSpec& spec,
                                      std::size_t trial, std::size_t frames,
                                      std::uint64_t seed) {
  if (frames > spec.frames) {
    throw Error(ErrorCode::OutOfDomain, "requested more frames than the rate domain");
  }
  std::vector<int> counts(frames, 0);
  std::vector<double> rate(frames);
  double ceiling = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    rate[t] = eval_rate(spec, trial, t + 1);
    ceiling = std::max(ceiling, rate[t]);
  }
  if (ceiling <= 0.0) return counts;

  boost::random::mt19937_64 engine(seed);
  boost::random::uniform_01<double> uniform;
  boost::random::poisson_distribution<long, double> candidates(
      static_cast<double>(frames) * ceiling);

  const long drawn = candidates(engine);
  const double span = static_cast<double>(frames);
  for (long i = 0; i < drawn; ++i) {
    // 1 - u lies in (0, 1], so the candidate time lies in (0, frames].
    const double s = span * (1.0 - uniform(engine));
    const auto frame = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(s)), 1, frames);
    if (uniform(engine) < rate[frame - 1] / ceiling) ++counts[frame - 1];
  }
  return counts;
}

std::vector<double> generate_trace(std::span<const int> counts,
                                   const SimConfig& cfg, std::uint64_t seed) {
  require_valid_gamma(cfg.gamma);
  std::vector<double> y(counts.size());
  double calcium = 0.0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] < 0) throw Error(ErrorCode::BadRange, "negative spike count", 0, t + 1);
    calcium = cfg.gamma * calcium + cfg.spike_amplitude * counts[t];
    y[t] = calcium;
  }
  if (cfg.noise_sd > 0.0) {
    boost::random::mt19937_64 engine(seed);
    boost::random::normal_distribution<double> noise(0.0, cfg.noise_sd);
    for (double& v : y) v += noise(engine);
  }
  return y;
}

SimulatedDataset simulate_dataset(const RateFunctionSpec& spec,
                                  const SimConfig& cfg) {
  require_valid(cfg);
  if (spec.trials != cfg.trials || spec.frames != cfg.frames) {
    throw Error(ErrorCode::DimensionMismatch,
                "rate spec domain does not match the simulation size");
  }
  const std::size_t trials = cfg.trials;
  const std::size_t frames = cfg.frames;
  SimulatedDataset out;
  out.traces.values = Matrix<double>(trials, frames, 0.0);
  out.traces.sample_rate_hz = cfg.sample_rate_hz;
  out.spikes = SpikeRaster{Matrix<int>(trials, frames, 0), cfg.sample_rate_hz};
  out.rates.rates = Matrix<double>(trials, frames, 0.0);

  for (std::size_t r = 0; r < trials; ++r) {
    const std::uint64_t trial_seed = substream_seed(cfg.seed, r + 1);
    const std::vector<int> counts =
        simulate_spike_train(spec, r + 1, frames, substream_seed(trial_seed, 0));
    const std::vector<double> trace =
        generate_trace(counts, cfg, substream_seed(trial_seed, 1));
    std::copy(counts.begin(), counts.end(), out.spikes.counts.row(r).begin());
    std::copy(trace.begin(), trace.end(), out.traces.values.row(r).begin());
    for (std::size_t t = 0; t < frames; ++t) {
      out.rates.rates(r, t) = eval_rate(spec, r + 1, t + 1) * cfg.sample_rate_hz;
    }
  }
  return out;
}

}  // namespace mtvpar
