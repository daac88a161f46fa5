// csv.hpp
// Plain-text matrix and spike-table files. Numbers are written with 17
// significant digits so that reading a file back reproduces every double.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtvpar/model.hpp"

namespace mtvpar::io {

std::string format_double(double value);

// Throws ParseError naming the 1-based line and column.
double parse_double(std::string_view text, std::size_t line, std::size_t column);
long parse_long(std::string_view text, std::size_t line, std::size_t column);

// One row per trial. An optional first line `# hz=<rate>` carries the
// sample rate; other lines starting with '#' are comments.
template <typename T>
struct MatrixFile {
  Matrix<T> values;
  std::optional<double> sample_rate_hz;
};

MatrixFile<double> read_real_matrix(const std::filesystem::path& path);
MatrixFile<int> read_count_matrix(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Matrix<double>& values,
                  std::optional<double> sample_rate_hz);
void write_matrix(const std::filesystem::path& path, const Matrix<int>& values,
                  std::optional<double> sample_rate_hz);

// traces.csv: the header rate wins; `fallback_hz` is used when absent.
TraceSet read_traces(const std::filesystem::path& path, double fallback_hz);
void write_traces(const std::filesystem::path& path, const TraceSet& traces);

// spikes.csv: header `trial,frame,time_s,jump`, one row per detected spike,
// trial and frame 1-based.
struct SpikeRow {
  std::size_t trial = 0;
  std::size_t frame = 0;
  double time_s = 0.0;
  double jump = 0.0;

  bool operator==(const SpikeRow&) const = default;
};

std::vector<SpikeRow> spike_rows(const std::vector<Segmentation>& segmentations,
                                 double sample_rate_hz);
void write_spike_rows(const std::filesystem::path& path, const std::vector<SpikeRow>& rows);
std::vector<SpikeRow> read_spike_rows(const std::filesystem::path& path);

// Dense 0/1 raster of the rows; rows outside the shape are a ParseError.
SpikeRaster raster_from_rows(const std::vector<SpikeRow>& rows, std::size_t trials,
                             std::size_t frames, double sample_rate_hz);

// Whole-file helpers raising IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mtvpar::io
