#include "embsp/csv_io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "embsp/errors.hpp"

namespace embsp {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(source + ": file is empty");

  CsvTable table;
  for (const auto& cell : split(lines[0])) table.header.push_back(trim(cell));
  const auto cols = static_cast<Eigen::Index>(table.header.size());
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
  table.values.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const long line_no = static_cast<long>(r) + 2;
    const auto cells = split(lines[static_cast<std::size_t>(r) + 1]);
    if (static_cast<Eigen::Index>(cells.size()) != cols) {
      std::ostringstream os;
      os << source << ": line " << line_no << " has " << cells.size() << " fields, expected " << cols;
      throw ParseError(os.str());
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::string cell = trim(cells[static_cast<std::size_t>(c)]);
      double v = 0.0;
      const char* first = cell.data();
      if (!cell.empty() && *first == '+') ++first;
      const auto res = std::from_chars(first, cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        std::ostringstream os;
        os << source << ": line " << line_no << ", column " << (c + 1) << ": '" << cell
           << "' is not a finite number";
        throw ParseError(os.str());
      }
      table.values(r, c) = v;
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return parse_csv(buf.str(), path.string());
}

Eigen::MatrixXd ingest_csv(const std::filesystem::path& path) { return read_csv(path).values; }

std::string format_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values, int digits) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) {
    throw ConfigError("format_csv: header has " + std::to_string(header.size()) + " names for " +
                      std::to_string(values.cols()) + " columns");
  }
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      double v = values(r, c);
      if (v == 0.0) v = 0.0;  // no "-0"
      std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const Eigen::MatrixXd& values, int digits) {
  write_file_atomic(path, format_csv(header, values, digits));
}

std::vector<std::string> numbered_header(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> h;
  for (Eigen::Index i = 1; i <= count; ++i) h.push_back(prefix + "_" + std::to_string(i));
  return h;
}

}  // namespace embsp
