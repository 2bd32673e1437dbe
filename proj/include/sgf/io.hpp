#pragma once

#include "sgf/common.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace sgf {

using Json = nlohmann::ordered_json;

/// Shortest text with 17 significant digits ("%.17g").
std::string fmt17(double v);

/// RFC-4180 table: header row, CRLF line ends, quoted text cells when needed.
class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvTable(std::vector<std::string> columns);
  void add_row(std::vector<Cell> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const Json& j);
/// Creates the directory (and parents) if needed.
void ensure_directory(const std::string& path);

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

/// Binary payload behind a one-line JSON header.
void write_blob(const std::string& path, const Json& header, const std::vector<const Mat*>& payload);
void write_blob(const std::string& path, const Json& header, const std::vector<const Vec*>& payload);
struct Blob {
  Json header;
  std::vector<double> data;
};
Blob read_blob(const std::string& path);

/// Minimal SVG line plot.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
};
std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace sgf
