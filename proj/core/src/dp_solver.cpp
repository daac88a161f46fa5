#include "mtvpar/dp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mtvpar {

namespace {

void check_range(std::span<const double> y, std::size_t first,
                 std::size_t last, double gamma) {
  require_valid_gamma(gamma);
  if (first < 1 || first > last || last > y.size()) {
    throw Error(ErrorCode::BadRange,
                "segment [" + std::to_string(first) + ", " +
                    std::to_string(last) + "] outside [1, " +
                    std::to_string(y.size()) + "]");
  }
}

void check_problem(std::span<const double> y, double gamma,
                   std::span<const double> penalty) {
  require_valid_gamma(gamma);
  if (y.size() < 2) {
    throw Error(ErrorCode::EmptyTrial, "need at least 2 frames");
  }
  if (penalty.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "penalty length " + std::to_string(penalty.size()) +
                    " != trace length " + std::to_string(y.size()));
  }
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (!std::isfinite(y[t])) {
      throw Error(ErrorCode::NonFiniteValue, "non-finite trace value", 0, t + 1);
    }
    if (!(penalty[t] > 0.0) || !std::isfinite(penalty[t])) {
      throw Error(ErrorCode::BadPenalty,
                  "penalty must be positive and finite at frame " +
                      std::to_string(t + 1),
                  0, t + 1);
    }
  }
}

// Closed-form initial level c_hat(first), 0-based half-open [begin, end).
double fitted_level(std::span<const double> y, std::size_t begin,
                    std::size_t end, double gamma) {
  double numerator = 0.0;
  double denominator = 0.0;
  double weight = 1.0;
  for (std::size_t t = begin; t < end; ++t) {
    numerator += y[t] * weight;
    denominator += weight * weight;
    weight *= gamma;
  }
  return numerator / denominator;
}

struct Candidate {
  std::size_t tau;  // 0 means "no changepoint yet"
  SegmentStats stats;
  double value;     // F(tau) + D(y[tau+1 .. t]) + pen(tau) at the current t
};

Segmentation run_recursion(std::span<const double> y, double gamma,
                           std::span<const double> penalty, bool prune) {
  check_problem(y, gamma, penalty);
  const std::size_t n = y.size();

  // pen(tau) = penalty(tau + 1) in 1-based frames = penalty[tau] 0-based.
  std::vector<double> best(n + 1);
  std::vector<std::size_t> argmin(n + 1, 0);
  best[0] = -penalty[0];

  std::vector<Candidate> candidates;
  candidates.reserve(prune ? 64 : n);
  candidates.push_back({0, SegmentStats::starting_at(1), 0.0});

  for (std::size_t t = 1; t <= n; ++t) {
    const double yt = y[t - 1];
    double f = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (auto& c : candidates) {
      c.stats.extend(yt, gamma);
      c.value = best[c.tau] + c.stats.cost() + penalty[c.tau];
      // Candidates are ordered by tau, so strict < keeps the smallest tau.
      if (c.value < f) {
        f = c.value;
        arg = c.tau;
      }
    }
    best[t] = f;
    argmin[t] = arg;
    if (t == n) break;

    if (prune) {
      // tau can never beat t again once
      //   F(tau) + D(tau+1 .. t) + pen(tau) > F(t) + pen(t),
      // because D is superadditive over adjacent segments. The slack keeps
      // near-ties alive so rounding in the running sums cannot prune the
      // eventual argmin.
      const double threshold = f + penalty[t];
      const double slack = 1e-9 * (1.0 + std::abs(threshold));
      std::erase_if(candidates, [&](const Candidate& c) {
        return c.value > threshold + slack;
      });
    }
    candidates.push_back({t, SegmentStats::starting_at(t + 1), 0.0});
  }

  std::vector<std::size_t> changepoints;
  for (std::size_t t = n; t > 0;) {
    const std::size_t tau = argmin[t];
    if (tau > 0) changepoints.push_back(tau);
    t = tau;
  }
  std::reverse(changepoints.begin(), changepoints.end());

  Segmentation seg = segmentation_from_changepoints(y, gamma, std::move(changepoints));
  seg.objective = best[n];
  return seg;
}

}  // namespace

double segment_cost(std::span<const double> y, std::size_t first,
                    std::size_t last, double gamma) {
  check_range(y, first, last, gamma);
  const double level = fitted_level(y, first - 1, last, gamma);
  double cost = 0.0;
  double weight = 1.0;
  for (std::size_t t = first - 1; t < last; ++t) {
    const double r = y[t] - weight * level;
    cost += r * r;
    weight *= gamma;
  }
  return 0.5 * cost;
}

std::vector<double> segment_fit(std::span<const double> y, std::size_t first,
                                std::size_t last, double gamma) {
  check_range(y, first, last, gamma);
  std::vector<double> fit(last - first + 1);
  fit[0] = fitted_level(y, first - 1, last, gamma);
  for (std::size_t k = 1; k < fit.size(); ++k) fit[k] = gamma * fit[k - 1];
  return fit;
}

Segmentation segmentation_from_changepoints(
    std::span<const double> y, double gamma,
    std::vector<std::size_t> changepoints) {
  const std::size_t n = y.size();
  Segmentation seg;
  seg.calcium.resize(n);
  std::size_t begin = 0;  // 0-based first frame of the current segment
  for (std::size_t j = 0; j <= changepoints.size(); ++j) {
    const std::size_t end = j < changepoints.size() ? changepoints[j] : n;
    if (end <= begin || end > n) {
      throw Error(ErrorCode::BadRange,
                  "changepoints must be strictly increasing in [1, T-1]");
    }
    double level = fitted_level(y, begin, end, gamma);
    for (std::size_t t = begin; t < end; ++t) {
      seg.calcium[t] = level;
      level *= gamma;
    }
    begin = end;
  }
  seg.jumps.reserve(changepoints.size());
  for (std::size_t tau : changepoints) {
    seg.jumps.push_back(seg.calcium[tau] - gamma * seg.calcium[tau - 1]);
  }
  seg.changepoints = std::move(changepoints);
  return seg;
}

Segmentation solve_l0(std::span<const double> y, double gamma,
                      std::span<const double> penalty) {
  return run_recursion(y, gamma, penalty, /*prune=*/true);
}

Segmentation solve_l0_exact(std::span<const double> y, double gamma,
                            std::span<const double> penalty) {
  return run_recursion(y, gamma, penalty, /*prune=*/false);
}

Segmentation brute_force_l0(std::span<const double> y, double gamma,
                            std::span<const double> penalty) {
  if (y.size() > kBruteForceMaxFrames) {
    throw Error(ErrorCode::TooLong,
                "brute force limited to " +
                    std::to_string(kBruteForceMaxFrames) + " frames, got " +
                    std::to_string(y.size()));
  }
  check_problem(y, gamma, penalty);
  const std::size_t n = y.size();
  const std::size_t configurations = std::size_t{1} << (n - 1);

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_set;
  std::vector<std::size_t> set;
  for (std::size_t mask = 0; mask < configurations; ++mask) {
    set.clear();
    for (std::size_t bit = 0; bit + 1 < n; ++bit) {
      if (mask & (std::size_t{1} << bit)) set.push_back(bit + 1);
    }
    double total = 0.0;
    std::size_t first = 1;
    for (std::size_t tau : set) {
      total += segment_cost(y, first, tau, gamma) + penalty[tau];
      first = tau + 1;
    }
    total += segment_cost(y, first, n, gamma);
    if (total < best) {
      best = total;
      best_set = set;
    }
  }

  Segmentation seg = segmentation_from_changepoints(y, gamma, best_set);
  seg.objective = best;
  return seg;
}

}  // namespace mtvpar
