#include "ssglm/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ssglm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  const auto fail = [&](const char* what) {
    throw DataError("csv: " + std::string(what) + " at row " + std::to_string(row) +
                    ", column '" + column + "' (value '" + cell + "')");
  };
  if (cell.empty()) fail("empty cell");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) fail("non-numeric cell");
  if (!std::isfinite(value)) fail("non-finite cell");
  return value;
}

}  // namespace

Dataset ingest_csv(const std::string& path, const std::string& response_column, bool intercept) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  if (header.empty()) throw DataError("csv: empty header row");

  int response_idx = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == response_column) {
      if (response_idx >= 0) throw DataError("csv: duplicate response column '" + response_column + "'");
      response_idx = static_cast<int>(c);
    }
  if (response_idx < 0)
    throw DataError("csv: response column '" + response_column + "' not in header");
  if (header.size() < 2) throw DataError("csv: need at least one regressor column");

  std::vector<Vector> rows;
  Vector y;
  std::size_t row_number = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw DataError("csv: ragged row " + std::to_string(row_number) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    Vector xrow;
    xrow.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_cell(cells[c], row_number, header[c]);
      if (static_cast<int>(c) == response_idx)
        y.push_back(v);
      else
        xrow.push_back(v);
    }
    rows.push_back(std::move(xrow));
  }
  if (rows.size() < 2) throw DataError("csv: need at least 2 data rows");

  Matrix x(rows.size(), header.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = rows[i][j];
  return Dataset::make(std::move(x), std::move(y), intercept);
}

}  // namespace ssglm
