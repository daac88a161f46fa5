// dp_solver.hpp
// Exact single-trial l0-penalized AR(1) spike detection.
//
// The problem
//
//   min_c  1/2 sum_t (y(t) - c(t))^2 + sum_{t >= 2} penalty(t) [c(t) != gamma c(t-1)]
//
// is solved as an optimal-partitioning changepoint problem. A changepoint
// tau (1-based, in [1, T-1]) starts a new exponentially decaying segment at
// frame tau + 1 and is charged penalty(tau + 1), the penalty at the spike
// frame. The recursion is
//
//   F(0) = -penalty(1)
//   F(t) = min_{tau < t} F(tau) + D(y[tau+1 .. t]) + penalty(tau + 1)
//
// where D is the residual of the best single decaying curve on a segment.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mtvpar/model.hpp"

namespace mtvpar {

// Running sums for the segment starting at frame `start`:
//   weighted_sum = sum y(t) gamma^(t - start)
//   weight_norm  = sum gamma^(2 (t - start))
//   square_sum   = sum y(t)^2
struct SegmentStats {
  double weighted_sum = 0.0;
  double weight_norm = 0.0;
  double square_sum = 0.0;
  double next_weight = 1.0;  // gamma^(length)
  std::size_t start = 0;

  static SegmentStats starting_at(std::size_t start) {
    SegmentStats s;
    s.start = start;
    return s;
  }

  void extend(double y, double gamma) {
    weighted_sum += y * next_weight;
    weight_norm += next_weight * next_weight;
    square_sum += y * y;
    next_weight *= gamma;
  }

  // Least-squares initial calcium level c(start).
  double initial_level() const { return weighted_sum / weight_norm; }

  double cost() const {
    const double d =
        0.5 * (square_sum - weighted_sum * weighted_sum / weight_norm);
    return d > 0.0 ? d : 0.0;
  }
};

// D(y[first .. last]) from the closed form, frames 1-based and inclusive.
double segment_cost(std::span<const double> y, std::size_t first,
                    std::size_t last, double gamma);

// Fitted calcium gamma^(t - first) * c_hat(first) for t in [first, last].
std::vector<double> segment_fit(std::span<const double> y, std::size_t first,
                                std::size_t last, double gamma);

// Pruned dynamic program; the production solver.
Segmentation solve_l0(std::span<const double> y, double gamma,
                      std::span<const double> penalty);

// Unpruned O(T^2) recursion over every tau < t.
Segmentation solve_l0_exact(std::span<const double> y, double gamma,
                            std::span<const double> penalty);

inline constexpr std::size_t kBruteForceMaxFrames = 16;

// Exhaustive search over all 2^(T-1) changepoint subsets (T <= 16).
Segmentation brute_force_l0(std::span<const double> y, double gamma,
                            std::span<const double> penalty);

// Builds the fitted calcium and jump sizes for a known changepoint set.
// `objective` is left for the caller to fill.
Segmentation segmentation_from_changepoints(
    std::span<const double> y, double gamma,
    std::vector<std::size_t> changepoints);

}  // namespace mtvpar
