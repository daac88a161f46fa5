// metrics.hpp
// Spike-train and firing-rate accuracy measures.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mtvpar/model.hpp"

namespace mtvpar {

// Strictly increasing spike times in seconds.
using SpikeTimes = std::vector<double>;

inline constexpr double kCoincidentSpikeOffset = 1e-9;

// Victor-Purpura distance: insert/delete cost 1, shifting by dt costs q*dt
// (q per second).
double vp_distance(std::span<const double> a, std::span<const double> b,
                   double q = 1.0);

// sqrt(sum m |f - fhat|^2 / sum m).
double l2_rate_error(std::span<const double> f, std::span<const double> fhat,
                     std::span<const double> weights);

// Constant-weight form: root-mean-square difference.
double l2_rate_error(std::span<const double> f, std::span<const double> fhat);

// Over every (trial, frame) of two fields with constant weights.
double l2_rate_error(const RateField& f, const RateField& fhat);

// Trial-averaged rate per frame.
std::vector<double> marginal_rate(const RateField& field);

// Frame t (1-based) with count k emits k times t / hz, the j-th copy
// offset by j * kCoincidentSpikeOffset.
SpikeTimes raster_to_times(std::span<const int> counts, double sample_rate_hz);

}  // namespace mtvpar
