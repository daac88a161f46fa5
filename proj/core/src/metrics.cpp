#include "mtvpar/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mtvpar {

double vp_distance(std::span<const double> a, std::span<const double> b,
                   double q) {
  if (!(q >= 0.0)) throw Error(ErrorCode::BadConfig, "q must be nonnegative");
  const std::size_t m = b.size();
  // Rolling single row of the (|a|+1) x (|b|+1) edit table.
  std::vector<double> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = static_cast<double>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    double diagonal = row[0];
    row[0] = static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const double shift = diagonal + q * std::abs(a[i - 1] - b[j - 1]);
      diagonal = row[j];
      row[j] = std::min({row[j] + 1.0, row[j - 1] + 1.0, shift});
    }
  }
  return row[m];
}

double l2_rate_error(std::span<const double> f, std::span<const double> fhat,
                     std::span<const double> weights) {
  if (f.size() != fhat.size() || f.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "rate arrays differ in length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw Error(ErrorCode::ZeroWeight, "weights must be nonnegative");
    }
    const double d = f[i] - fhat[i];
    num += weights[i] * d * d;
    den += weights[i];
  }
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroWeight, "weights sum to zero");
  return std::sqrt(num / den);
}

double l2_rate_error(std::span<const double> f, std::span<const double> fhat) {
  if (f.size() != fhat.size()) {
    throw Error(ErrorCode::DimensionMismatch, "rate arrays differ in length");
  }
  if (f.empty()) throw Error(ErrorCode::ZeroWeight, "no points to weigh");
  double num = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - fhat[i];
    num += d * d;
  }
  return std::sqrt(num / static_cast<double>(f.size()));
}

double l2_rate_error(const RateField& f, const RateField& fhat) {
  if (!f.rates.same_shape(fhat.rates)) {
    throw Error(ErrorCode::DimensionMismatch, "rate fields differ in shape");
  }
  return l2_rate_error(f.rates.values(), fhat.rates.values());
}

std::vector<double> marginal_rate(const RateField& field) {
  const std::size_t trials = field.rates.rows();
  std::vector<double> mean(field.rates.cols(), 0.0);
  if (trials == 0) return mean;
  for (std::size_t r = 0; r < trials; ++r) {
    const auto row = field.rates.row(r);
    for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += row[t];
  }
  for (double& v : mean) v /= static_cast<double>(trials);
  return mean;
}

SpikeTimes raster_to_times(std::span<const int> counts, double sample_rate_hz) {
  SpikeTimes times;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    const double base = static_cast<double>(t + 1) / sample_rate_hz;
    for (int j = 0; j < counts[t]; ++j) {
      times.push_back(base + j * kCoincidentSpikeOffset);
    }
  }
  return times;
}

}  // namespace mtvpar
