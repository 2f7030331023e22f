#include "mscastle/csv.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include "mscastle/errors.hpp"
#include "mscastle/io.hpp"

namespace mscastle {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_number(const std::string& field, const std::string& origin,
                    size_t line_no) {
  if (field.empty()) {
    throw InvalidDataError(origin + ":" + std::to_string(line_no) +
                           ": missing value");
  }
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + field.size()) {
    throw InvalidDataError(origin + ":" + std::to_string(line_no) +
                           ": not a number: '" + field + "'");
  }
  return value;
}

long parse_int(const std::string& field, const std::string& origin,
               size_t line_no) {
  const double value = parse_number(field, origin, line_no);
  const long rounded = static_cast<long>(value);
  if (static_cast<double>(rounded) != value) {
    throw InvalidDataError(origin + ":" + std::to_string(line_no) +
                           ": expected an integer: '" + field + "'");
  }
  return rounded;
}

}  // namespace

std::string panel_to_csv(const TimeSeriesPanel& panel) {
  std::string out = "time";
  for (const auto& name : panel.series_names) out += "," + name;
  out += "\n";
  for (long t = 0; t < panel.rows(); ++t) {
    out += panel.timestamps[static_cast<size_t>(t)];
    for (long j = 0; j < panel.cols(); ++j) {
      out += "," + format_double(panel.values(t, j));
    }
    out += "\n";
  }
  return out;
}

TimeSeriesPanel panel_from_csv(const std::string& text,
                               const std::string& origin) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) {
    throw InvalidDataError(origin + ": empty file, header row required");
  }
  const std::vector<std::string> header = split_line(lines[0]);
  if (header.size() < 2) {
    throw InvalidDataError(origin + ":1: need a time column plus at least one series");
  }

  TimeSeriesPanel panel;
  panel.series_names.assign(header.begin() + 1, header.end());
  const size_t n = panel.series_names.size();
  const size_t rows = lines.size() - 1;
  panel.values.resize(static_cast<long>(rows), static_cast<long>(n));
  panel.timestamps.reserve(rows);
  for (size_t r = 0; r < rows; ++r) {
    const size_t line_no = r + 2;
    const std::vector<std::string> fields = split_line(lines[r + 1]);
    if (fields.size() != n + 1) {
      throw InvalidDataError(origin + ":" + std::to_string(line_no) +
                             ": expected " + std::to_string(n + 1) +
                             " fields, got " + std::to_string(fields.size()));
    }
    panel.timestamps.push_back(fields[0]);
    for (size_t j = 0; j < n; ++j) {
      panel.values(static_cast<long>(r), static_cast<long>(j)) =
          parse_number(fields[j + 1], origin, line_no);
    }
  }
  return panel;
}

void write_panel_csv(const std::filesystem::path& path,
                     const TimeSeriesPanel& panel) {
  atomic_write_file(path, panel_to_csv(panel));
}

TimeSeriesPanel read_panel_csv(const std::filesystem::path& path) {
  return panel_from_csv(read_file(path), path.string());
}

namespace {

std::string stack_header(const std::vector<std::string>& series_names) {
  std::string out = "scale,lag,parent";
  for (const auto& name : series_names) out += "," + name;
  out += "\n";
  return out;
}

void append_block_rows(std::string& out, const StackedCausalMatrix& stack,
                       int scale, int lag,
                       const std::vector<std::string>& series_names) {
  const int n = stack.series();
  const auto block = stack.block(scale, lag);
  for (int i = 0; i < n; ++i) {
    out += std::to_string(scale) + "," + std::to_string(lag) + "," +
           series_names[static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j) {
      out += "," + format_double(block(i, j));
    }
    out += "\n";
  }
}

}  // namespace

std::string stack_to_csv(const StackedCausalMatrix& stack,
                         const std::vector<std::string>& series_names) {
  std::string out = stack_header(series_names);
  for (int scale = 1; scale <= stack.scales(); ++scale) {
    for (int lag = 0; lag <= stack.lags(); ++lag) {
      append_block_rows(out, stack, scale, lag, series_names);
    }
  }
  return out;
}

std::string block_to_csv(const StackedCausalMatrix& stack, int scale, int lag,
                         const std::vector<std::string>& series_names) {
  std::string out = stack_header(series_names);
  append_block_rows(out, stack, scale, lag, series_names);
  return out;
}

StackedCausalMatrix stack_from_csv_files(
    const std::vector<std::filesystem::path>& paths) {
  if (paths.empty()) {
    throw std::invalid_argument("stack_from_csv_files: no input files");
  }
  struct Row {
    int scale;
    int lag;
    int parent;
    std::vector<double> weights;
  };
  std::vector<Row> rows;
  std::vector<std::string> series_names;
  std::map<std::string, int> series_index;

  for (const auto& path : paths) {
    const std::string origin = path.string();
    const std::vector<std::string> lines = split_lines(read_file(path));
    if (lines.empty()) throw InvalidDataError(origin + ": empty file");
    const std::vector<std::string> header = split_line(lines[0]);
    if (header.size() < 4 || header[0] != "scale" || header[1] != "lag" ||
        header[2] != "parent") {
      throw InvalidDataError(origin + ":1: expected header scale,lag,parent,<series...>");
    }
    if (series_names.empty()) {
      series_names.assign(header.begin() + 3, header.end());
      for (size_t j = 0; j < series_names.size(); ++j) {
        series_index[series_names[j]] = static_cast<int>(j);
      }
    } else if (!std::equal(header.begin() + 3, header.end(),
                           series_names.begin(), series_names.end())) {
      throw InvalidDataError(origin + ":1: series header differs between files");
    }
    for (size_t r = 1; r < lines.size(); ++r) {
      const size_t line_no = r + 1;
      const std::vector<std::string> fields = split_line(lines[r]);
      if (fields.size() != series_names.size() + 3) {
        throw InvalidDataError(origin + ":" + std::to_string(line_no) +
                               ": wrong field count");
      }
      Row row;
      row.scale = static_cast<int>(parse_int(fields[0], origin, line_no));
      row.lag = static_cast<int>(parse_int(fields[1], origin, line_no));
      const auto it = series_index.find(fields[2]);
      if (it == series_index.end()) {
        throw InvalidDataError(origin + ":" + std::to_string(line_no) +
                               ": unknown parent series '" + fields[2] + "'");
      }
      row.parent = it->second;
      row.weights.reserve(series_names.size());
      for (size_t j = 0; j < series_names.size(); ++j) {
        row.weights.push_back(parse_number(fields[j + 3], origin, line_no));
      }
      rows.push_back(std::move(row));
    }
  }

  int scales = 0;
  int lags = 0;
  for (const Row& row : rows) {
    scales = std::max(scales, row.scale);
    lags = std::max(lags, row.lag);
  }
  if (scales < 1) throw InvalidDataError("coefficient files carry no rows");

  StackedCausalMatrix stack = StackedCausalMatrix::zeros(
      pattern_for(lags, scales, static_cast<int>(series_names.size())));
  for (const Row& row : rows) {
    auto block = stack.block(row.scale, row.lag);
    for (size_t j = 0; j < row.weights.size(); ++j) {
      block(row.parent, static_cast<long>(j)) = row.weights[j];
    }
  }
  return stack;
}

void write_stack_csv(const std::filesystem::path& path,
                     const StackedCausalMatrix& stack,
                     const std::vector<std::string>& series_names) {
  atomic_write_file(path, stack_to_csv(stack, series_names));
}

std::vector<std::filesystem::path> write_stack_blocks(
    const std::filesystem::path& dir, const std::string& prefix,
    const StackedCausalMatrix& stack,
    const std::vector<std::string>& series_names) {
  std::vector<std::filesystem::path> paths;
  for (int scale = 1; scale <= stack.scales(); ++scale) {
    for (int lag = 0; lag <= stack.lags(); ++lag) {
      const std::filesystem::path path =
          dir / (prefix + "_s" + std::to_string(scale) + "_l" +
                 std::to_string(lag) + ".csv");
      atomic_write_file(path, block_to_csv(stack, scale, lag, series_names));
      paths.push_back(path);
    }
  }
  return paths;
}

std::vector<std::filesystem::path> stack_block_files(
    const std::filesystem::path& dir, const std::string& prefix) {
  std::vector<std::filesystem::path> paths;
  if (!std::filesystem::is_directory(dir)) return paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix + "_s", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

std::string edges_to_csv(const CausalGraphEstimate& graph,
                         const std::vector<std::string>& series_names) {
  std::string out = "source,target,scale,lag,weight\n";
  for (const CausalEdge& edge : graph.edges) {
    out += series_names[static_cast<size_t>(edge.source)] + "," +
           series_names[static_cast<size_t>(edge.target)] + "," +
           std::to_string(edge.scale) + "," + std::to_string(edge.lag) + "," +
           format_double(edge.weight) + "\n";
  }
  return out;
}

std::string augmented_to_csv(const ScaleAugmentedPanel& aug,
                             const std::vector<std::string>& timestamps) {
  const long n = aug.series_count();
  std::string out = "time";
  for (int d = 1; d <= aug.levels; ++d) {
    for (long i = 0; i < n; ++i) {
      out += "," + aug.series_names[static_cast<size_t>(i)] + "@s" +
             std::to_string(d);
    }
  }
  out += "\n";
  for (long t = 0; t < aug.rows(); ++t) {
    out += timestamps[static_cast<size_t>(t)];
    for (long c = 0; c < aug.details.cols(); ++c) {
      out += "," + format_double(aug.details(t, c));
    }
    out += "\n";
  }
  return out;
}

std::string smooth_to_csv(const ScaleAugmentedPanel& aug,
                          const std::vector<std::string>& timestamps) {
  std::string out = "time";
  for (const auto& name : aug.series_names) {
    out += "," + name + "@smooth";
  }
  out += "\n";
  for (long t = 0; t < aug.rows(); ++t) {
    out += timestamps[static_cast<size_t>(t)];
    for (long j = 0; j < aug.smooth.cols(); ++j) {
      out += "," + format_double(aug.smooth(t, j));
    }
    out += "\n";
  }
  return out;
}

std::string energy_shares_to_csv(const Matrix& shares,
                                 const std::vector<std::string>& series_names) {
  const long levels = shares.cols() - 1;
  std::string out = "series";
  for (long d = 1; d <= levels; ++d) out += ",s" + std::to_string(d);
  out += ",smooth\n";
  for (long i = 0; i < shares.rows(); ++i) {
    out += series_names[static_cast<size_t>(i)];
    for (long c = 0; c < shares.cols(); ++c) {
      out += "," + format_double(shares(i, c));
    }
    out += "\n";
  }
  return out;
}

}  // namespace mscastle
