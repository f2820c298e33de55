#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "qwitness/dataset.hpp"

namespace qwitness {

/// Reads the quadrature CSV format:
///
///   # comment lines anywhere
///   quadrature[,phase]
///   0.123[,1.57]
///
/// A `phase` column makes the dataset phase-tagged (radians). Values are
/// interpreted with vacuum variance `convention_variance`. Throws ParseError
/// with the 1-based line number on malformed input.
QuadratureDataset parse_quadrature_csv(std::istream& in,
                                       double convention_variance = kVacuumVariance);
QuadratureDataset read_quadrature_csv(const std::filesystem::path& path,
                                      double convention_variance = kVacuumVariance);

/// Provenance written as `# key: value` lines before the header.
using CsvComments = std::vector<std::pair<std::string, std::string>>;

/// Serializes raw values (and phases when tagged) using shortest round-trip
/// decimal formatting, so output bytes depend only on the data.
std::string format_quadrature_csv(const QuadratureDataset& data, const CsvComments& comments = {});

/// Writes `contents` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace qwitness
