#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Deterministic table serialization: CSV and JSON renderings with full
// double round-trip precision, plus a small self-contained SVG line plot.
// No timestamps, locales or environment lookups anywhere.

namespace twistkin {

struct Cell {
  enum class Kind { number, integer, text };
  Kind kind = Kind::number;
  double num = 0.0;
  long long ival = 0;
  std::string text;

  static Cell of(double v) {
    Cell c;
    c.kind = Kind::number;
    c.num = v;
    return c;
  }
  static Cell of_int(long long v) {
    Cell c;
    c.kind = Kind::integer;
    c.ival = v;
    return c;
  }
  static Cell of_text(std::string v) {
    Cell c;
    c.kind = Kind::text;
    c.text = std::move(v);
    return c;
  }
};

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Shortest text that parses back to exactly v (printf %.17g tightened).
std::string format_double(double v);

// Header row plus data rows, ',' separator, '.' decimal, LF endings.
std::string render_csv(const Table& t);

// Array of one object per row, keys in column order.
std::string render_json_table(const Table& t);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Minimal reader for the CSV this tool writes: no quoting, one header row.
CsvTable read_csv(const std::string& path);

std::string svg_line_plot(const std::vector<double>& xs,
                          const std::vector<double>& ys,
                          const std::string& xlabel,
                          const std::string& ylabel);

}  // namespace twistkin
