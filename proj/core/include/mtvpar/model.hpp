// model.hpp
// Core domain types for multi-trial calcium traces and the AR(1) objective.
//
// Indexing: matrices and sequences are 0-based in memory. Every index that
// leaves the library (changepoints, error locations, file formats) is a
// 1-based frame or trial number.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtvpar/error.hpp"

namespace mtvpar {

// Dense row-major matrix; rows are trials, columns are frames.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const T> values() const noexcept { return data_; }
  std::span<T> values() noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Observed fluorescence y_r(t).
struct TraceSet {
  Matrix<double> values;
  double sample_rate_hz = 0.0;
  std::vector<std::string> trial_ids;  // empty, or one label per trial

  std::size_t trials() const noexcept { return values.rows(); }
  std::size_t frames() const noexcept { return values.cols(); }
};

struct ARParams {
  std::vector<double> gamma;                     // one per trial, in (0, 1)
  std::optional<std::vector<double>> noise_sd;   // simulator only
};

// Per-frame spike counts. Solver output is always 0/1; simulated ground
// truth may hold larger counts.
struct SpikeRaster {
  Matrix<int> counts;
  double sample_rate_hz = 0.0;

  std::size_t trials() const noexcept { return counts.rows(); }
  std::size_t frames() const noexcept { return counts.cols(); }
};

// Firing rates in spikes/second.
struct RateField {
  Matrix<double> rates;
};

// Per-frame spike penalties; each trial row averages to base_lambda.
struct PenaltyField {
  Matrix<double> penalties;
  double base_lambda = 0.0;
};

// Single-trial solver output.
//
// changepoints holds 1-based frames tau; each one marks a spike at frame
// tau + 1, and jumps[j] = calcium(tau_j + 1) - gamma * calcium(tau_j).
struct Segmentation {
  std::vector<std::size_t> changepoints;
  std::vector<double> calcium;
  std::vector<double> jumps;
  double objective = 0.0;
};

// First violated TraceSet invariant, or nullopt when the set is valid.
std::optional<Error> validate_trace_set(const TraceSet& traces);

// Throwing form of validate_trace_set.
void require_valid(const TraceSet& traces);

// Checks counts are nonnegative and the sample rate is positive.
void require_valid(const SpikeRaster& raster);

void require_valid_gamma(double gamma);

// 1/2 * sum (y - c)^2 plus penalty(tau + 1) for every changepoint tau.
double evaluate_objective(std::span<const double> y,
                          std::span<const double> calcium,
                          std::span<const std::size_t> changepoints,
                          std::span<const double> penalty, double gamma);

}  // namespace mtvpar
