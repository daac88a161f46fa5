#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace mtvpar::io {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line,
                  std::size_t column) {
  return path.string() + ":" + std::to_string(line) + ":" + std::to_string(column);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> try_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return value;
}

std::optional<long> try_long(std::string_view text) {
  long value = 0;
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(text.data(), last, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return value;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       std::size_t column, const std::string& what) {
  throw Error(ErrorCode::ParseError, where(path, line, column) + ": " + what);
}

double field_double(const std::filesystem::path& path, std::size_t line,
                    std::string_view text, std::size_t column) {
  if (auto v = try_double(text)) return *v;
  fail(path, line, column, "not a number: '" + std::string(text) + "'");
}

long field_long(const std::filesystem::path& path, std::size_t line,
                std::string_view text, std::size_t column) {
  if (auto v = try_long(text)) return *v;
  fail(path, line, column, "not an integer: '" + std::string(text) + "'");
}

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based character position
};

std::vector<Field> split_fields(std::string_view line) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view raw =
        line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
    std::size_t lead = 0;
    while (lead < raw.size() && (raw[lead] == ' ' || raw[lead] == '\t')) ++lead;
    fields.push_back({trim(raw), start + lead + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Calls on_row(fields, line_number) for each data line; returns the
// header rate if present.
template <typename OnRow>
std::optional<double> scan_lines(const std::filesystem::path& path, OnRow on_row) {
  const std::string text = read_file(path);
  std::optional<double> hz;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      if (body.starts_with("hz=")) hz = field_double(path, line_no, trim(body.substr(3)), 1);
      continue;
    }
    on_row(split_fields(line), line_no);
  }
  return hz;
}

// parse(text, line, column) converts one field.
template <typename T, typename Parse>
MatrixFile<T> read_matrix(const std::filesystem::path& path, Parse parse) {
  std::vector<T> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  const auto hz = scan_lines(path, [&](const std::vector<Field>& fields, std::size_t line) {
    if (rows == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      fail(path, line, 1, "expected " + std::to_string(cols) + " values, found " +
                              std::to_string(fields.size()));
    }
    for (const Field& f : fields) data.push_back(parse(f.text, line, f.column));
    ++rows;
  });
  if (rows == 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": no data rows");
  }
  MatrixFile<T> out{Matrix<T>(rows, cols), hz};
  std::copy(data.begin(), data.end(), out.values.values().begin());
  return out;
}

template <typename T, typename Format>
void write_matrix_impl(const std::filesystem::path& path, const Matrix<T>& values,
                       std::optional<double> hz, Format format) {
  std::string out;
  if (hz) out += "# hz=" + format_double(*hz) + "\n";
  for (std::size_t r = 0; r < values.rows(); ++r) {
    const auto row = values.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += format(row[c]);
    }
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::size_t line, std::size_t column) {
  if (auto v = try_double(text)) return *v;
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) +
                  ": not a number: '" + std::string(text) + "'");
}

long parse_long(std::string_view text, std::size_t line, std::size_t column) {
  if (auto v = try_long(text)) return *v;
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) +
                  ": not an integer: '" + std::string(text) + "'");
}

MatrixFile<double> read_real_matrix(const std::filesystem::path& path) {
  return read_matrix<double>(path, [&](std::string_view text, std::size_t line, std::size_t col) {
    return field_double(path, line, text, col);
  });
}

MatrixFile<int> read_count_matrix(const std::filesystem::path& path) {
  return read_matrix<int>(path, [&](std::string_view text, std::size_t line, std::size_t col) {
    const long v = field_long(path, line, text, col);
    if (v < 0 || v > 1'000'000) fail(path, line, col, "bad spike count " + std::to_string(v));
    return static_cast<int>(v);
  });
}

void write_matrix(const std::filesystem::path& path, const Matrix<double>& values,
                  std::optional<double> hz) {
  write_matrix_impl(path, values, hz, format_double);
}

void write_matrix(const std::filesystem::path& path, const Matrix<int>& values,
                  std::optional<double> hz) {
  write_matrix_impl(path, values, hz, [](int v) { return std::to_string(v); });
}

TraceSet read_traces(const std::filesystem::path& path, double fallback_hz) {
  MatrixFile<double> file = read_real_matrix(path);
  TraceSet traces;
  traces.values = std::move(file.values);
  traces.sample_rate_hz = file.sample_rate_hz.value_or(fallback_hz);
  if (auto err = validate_trace_set(traces)) {
    // Drop the "Code: " prefix the original message already carries.
    std::string message = err->what();
    message.erase(0, message.find(": ") + 2);
    throw Error(err->code(), path.string() + ": " + message, err->trial(), err->frame());
  }
  return traces;
}

void write_traces(const std::filesystem::path& path, const TraceSet& traces) {
  write_matrix(path, traces.values, traces.sample_rate_hz);
}

std::vector<SpikeRow> spike_rows(const std::vector<Segmentation>& segmentations,
                                 double sample_rate_hz) {
  std::vector<SpikeRow> rows;
  for (std::size_t r = 0; r < segmentations.size(); ++r) {
    const Segmentation& seg = segmentations[r];
    for (std::size_t j = 0; j < seg.changepoints.size(); ++j) {
      const std::size_t frame = seg.changepoints[j] + 1;
      rows.push_back({r + 1, frame, static_cast<double>(frame) / sample_rate_hz, seg.jumps[j]});
    }
  }
  return rows;
}

void write_spike_rows(const std::filesystem::path& path, const std::vector<SpikeRow>& rows) {
  std::string out = "trial,frame,time_s,jump\n";
  for (const SpikeRow& row : rows) {
    out += std::to_string(row.trial) + ',' + std::to_string(row.frame) + ',' +
           format_double(row.time_s) + ',' + format_double(row.jump) + '\n';
  }
  write_file(path, out);
}

std::vector<SpikeRow> read_spike_rows(const std::filesystem::path& path) {
  std::vector<SpikeRow> rows;
  bool header_seen = false;
  scan_lines(path, [&](const std::vector<Field>& fields, std::size_t line) {
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 4 && fields[0].text == "trial") return;
    }
    if (fields.size() != 4) fail(path, line, 1, "expected trial,frame,time_s,jump");
    const long trial = field_long(path, line, fields[0].text, fields[0].column);
    const long frame = field_long(path, line, fields[1].text, fields[1].column);
    if (trial < 1) fail(path, line, fields[0].column, "trial is 1-based");
    if (frame < 1) fail(path, line, fields[1].column, "frame is 1-based");
    rows.push_back({static_cast<std::size_t>(trial), static_cast<std::size_t>(frame),
                    field_double(path, line, fields[2].text, fields[2].column),
                    field_double(path, line, fields[3].text, fields[3].column)});
  });
  return rows;
}

SpikeRaster raster_from_rows(const std::vector<SpikeRow>& rows, std::size_t trials,
                             std::size_t frames, double sample_rate_hz) {
  SpikeRaster raster{Matrix<int>(trials, frames, 0), sample_rate_hz};
  for (const SpikeRow& row : rows) {
    if (row.trial > trials || row.frame > frames) {
      throw Error(ErrorCode::ParseError,
                  "spike at trial " + std::to_string(row.trial) + ", frame " +
                      std::to_string(row.frame) + " lies outside the recording",
                  row.trial, row.frame);
    }
    raster.counts(row.trial - 1, row.frame - 1) += 1;
  }
  return raster;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace mtvpar::io
