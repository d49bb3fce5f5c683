#include "twistkin/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "twistkin/errors.hpp"

namespace twistkin {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::string cell_csv(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::number:
      return format_double(c.num);
    case Cell::Kind::integer:
      return std::to_string(c.ival);
    case Cell::Kind::text:
      break;
  }
  if (c.text.find_first_of(",\"\n") == std::string::npos) return c.text;
  std::string out = "\"";
  for (char ch : c.text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    if (j) out += ',';
    out += t.columns[j];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += cell_csv(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string render_json_table(const Table& t) {
  nlohmann::json root;
  root["columns"] = t.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const Cell& c : row) {
      switch (c.kind) {
        case Cell::Kind::number:
          r.push_back(c.num);
          break;
        case Cell::Kind::integer:
          r.push_back(c.ival);
          break;
        case Cell::Kind::text:
          r.push_back(c.text);
          break;
      }
    }
    rows.push_back(std::move(r));
  }
  root["rows"] = rows;
  return root.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_file(path);
  CsvTable t;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t f = 0;
    while (true) {
      const std::size_t c = line.find(',', f);
      if (c == std::string::npos) {
        fields.push_back(line.substr(f));
        break;
      }
      fields.push_back(line.substr(f, c - f));
      f = c + 1;
    }
    if (header) {
      t.columns = std::move(fields);
      header = false;
    } else {
      if (fields.size() != t.columns.size())
        throw SchemaError("ragged CSV row in " + path);
      t.rows.push_back(std::move(fields));
    }
  }
  if (header) throw SchemaError("empty CSV: " + path);
  return t;
}

namespace {

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::vector<double>& xs,
                          const std::vector<double>& ys,
                          const std::string& xlabel,
                          const std::string& ylabel) {
  const double W = 820.0, H = 460.0;
  const double L = 75.0, R = 20.0, T = 20.0, B = 50.0;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    if (first) {
      xmin = xmax = xs[i];
      ymin = ymax = ys[i];
      first = false;
    } else {
      xmin = std::min(xmin, xs[i]);
      xmax = std::max(xmax, xs[i]);
      ymin = std::min(ymin, ys[i]);
      ymax = std::max(ymax, ys[i]);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const auto px = [&](double x) {
    return L + (x - xmin) / (xmax - xmin) * (W - L - R);
  };
  const auto py = [&](double y) {
    return H - B - (y - ymin) / (ymax - ymin) * (H - T - B);
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
    << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<g stroke=\"black\" fill=\"none\">\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
    << "\" y2=\"" << H - B << "\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
    << H - B << "\"/>\n"
    << "</g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    s << "<line stroke=\"black\" x1=\"" << px(fx) << "\" y1=\"" << H - B
      << "\" x2=\"" << px(fx) << "\" y2=\"" << H - B + 5 << "\"/>\n"
      << "<text text-anchor=\"middle\" x=\"" << px(fx) << "\" y=\""
      << H - B + 18 << "\">" << tick_label(fx) << "</text>\n"
      << "<line stroke=\"black\" x1=\"" << L - 5 << "\" y1=\"" << py(fy)
      << "\" x2=\"" << L << "\" y2=\"" << py(fy) << "\"/>\n"
      << "<text text-anchor=\"end\" x=\"" << L - 8 << "\" y=\"" << py(fy) + 4
      << "\">" << tick_label(fy) << "</text>\n";
  }
  s << "<text text-anchor=\"middle\" x=\"" << (L + W - R) / 2.0 << "\" y=\""
    << H - 10 << "\">" << xlabel << "</text>\n"
    << "<text text-anchor=\"middle\" transform=\"translate(14,"
    << (T + H - B) / 2.0 << ") rotate(-90)\">" << ylabel << "</text>\n"
    << "</g>\n";
  s << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" "
       "points=\"";
  bool sep = false;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    if (sep) s << ' ';
    s << px(xs[i]) << ',' << py(ys[i]);
    sep = true;
  }
  s << "\"/>\n</svg>\n";
  return s.str();
}

}  // namespace twistkin
