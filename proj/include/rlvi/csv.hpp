#pragma once

// Plain numeric CSV: comma-separated, one header line, no quoting. Doubles are
// written with 17 significant digits so a write/read cycle is exact.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rlvi/datasets.hpp"
#include "rlvi/models.hpp"

namespace rlvi {

std::string format_double(double value);

std::vector<std::string> split_csv_line(const std::string& line);

/// Which columns of a numeric CSV form the dataset. An empty feature list
/// means every column other than the target, in file order.
struct CsvSchema {
  std::string target_column = "y";
  std::vector<std::string> feature_columns;
};

/// Reads and validates a numeric CSV. Throws IoError naming the source and
/// line on a missing file, an empty file, unknown columns, rows of the wrong
/// width, or cells that are not finite numbers.
LabeledData ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
LabeledData ingest_csv(std::istream& in, const CsvSchema& schema, const std::string& source = "<stream>");

/// Writes features as x0..x{d-1} (unless names are given) followed by the
/// target column.
void write_dataset_csv(const std::filesystem::path& path, const LabeledData& data,
                       const std::vector<std::string>& feature_names = {}, const std::string& target_name = "y");
void write_dataset_csv(std::ostream& out, const LabeledData& data,
                       const std::vector<std::string>& feature_names = {}, const std::string& target_name = "y");

/// Integer class labels (0..C-1) from a labelled dataset; C is max label + 1.
ClassificationSet to_classification(const LabeledData& data);

}  // namespace rlvi
