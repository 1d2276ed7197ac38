#include "rlvi/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rlvi/errors.hpp"

namespace rlvi {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw IoError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

LabeledData ingest_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      for (auto& h : split_csv_line(line)) header.push_back(trim(h));
      break;
    }
  }
  if (header.empty()) throw IoError(source + ": empty file");

  auto column_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    fail(source, line_no, "header has no column '" + name + "'");
  };
  const std::size_t target = column_of(schema.target_column);
  std::vector<std::size_t> features;
  if (schema.feature_columns.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (k != target) features.push_back(k);
  } else {
    for (const auto& name : schema.feature_columns) features.push_back(column_of(name));
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(source, line_no,
           "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::string cell = trim(cells[k]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
        fail(source, line_no, "column '" + header[k] + "' is not a finite number: '" + cell + "'");
      }
      row[k] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(source + ": no data rows");

  LabeledData data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.features.resize(n, static_cast<Eigen::Index>(features.size()));
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < features.size(); ++j) data.features(i, static_cast<Eigen::Index>(j)) = row[features[j]];
    data.targets[i] = row[target];
  }
  return data;
}

LabeledData ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ingest_csv(in, schema, path.string());
}

void write_dataset_csv(std::ostream& out, const LabeledData& data, const std::vector<std::string>& feature_names,
                       const std::string& target_name) {
  if (!feature_names.empty() && feature_names.size() != static_cast<std::size_t>(data.dim())) {
    throw InvalidInput("feature name count does not match the data");
  }
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    out << (feature_names.empty() ? "x" + std::to_string(j) : feature_names[static_cast<std::size_t>(j)]) << ',';
  }
  out << target_name << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << format_double(data.features(i, j)) << ',';
    out << format_double(data.targets[i]) << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const LabeledData& data,
                       const std::vector<std::string>& feature_names, const std::string& target_name) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset_csv(out, data, feature_names, target_name);
  if (!out) throw IoError("write failed for " + path.string());
}

ClassificationSet to_classification(const LabeledData& data) {
  if (data.size() == 0) throw InvalidInput("empty dataset");
  ClassificationSet set;
  set.features = data.features;
  set.labels.resize(data.size());
  int top = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double y = data.targets[i];
    if (y < 0.0 || y != std::floor(y) || y > 1e6) {
      throw InvalidInput("class labels must be nonnegative integers (row " + std::to_string(i + 1) + ")");
    }
    set.labels[i] = static_cast<int>(y);
    top = std::max(top, set.labels[i]);
  }
  set.classes = std::max(2, top + 1);
  return set;
}

}  // namespace rlvi
