#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace embsp {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Comma-separated file whose first row is a header. Every other row must have
/// the header's column count and finite decimal cells. Errors name the line
/// (1-based, header is line 1) and column. Blank trailing lines are ignored.
CsvTable read_csv(const std::filesystem::path& path);

CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");

/// read_csv(path).values.
Eigen::MatrixXd ingest_csv(const std::filesystem::path& path);

/// Header plus rows, each cell printed with %.{digits}g (17 round-trips exactly).
std::string format_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values, int digits = 17);

/// Writes via a temporary sibling file and rename. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const Eigen::MatrixXd& values, int digits = 17);

/// Header names prefix_1 .. prefix_n.
std::vector<std::string> numbered_header(const std::string& prefix, Eigen::Index count);

}  // namespace embsp
