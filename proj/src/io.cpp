#include "sgf/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace sgf {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw Error(ErrorKind::validation, "csv row has " + std::to_string(row.size()) +
                                           " cells, expected " + std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const CsvTable::Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return fmt17(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return quote(std::get<std::string>(c));
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + quote(columns_[i]);
  out += "\r\n";
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell_text(r[i]);
    out += "\r\n";
  }
  return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorKind::io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create directory " + path + ": " + ec.message());
}

Json to_json(const Vec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec vec_from_json(const Json& j) {
  const auto x = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(x.data(), static_cast<Index>(x.size()));
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary caches assume little-endian");

void write_blob_raw(const std::string& path, const Json& header,
                    const std::vector<std::pair<const double*, std::size_t>>& parts) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  std::size_t total = 0;
  for (const auto& p : parts) total += p.second;
  Json h = header;
  h["payload_doubles"] = total;
  const std::string line = h.dump() + "\n";
  f.write(line.data(), static_cast<std::streamsize>(line.size()));
  for (const auto& p : parts)
    f.write(reinterpret_cast<const char*>(p.first), static_cast<std::streamsize>(p.second * 8));
  if (!f) throw Error(ErrorKind::io, "write failed for " + path);
}

}  // namespace

void write_blob(const std::string& path, const Json& header, const std::vector<const Mat*>& payload) {
  std::vector<std::pair<const double*, std::size_t>> parts;
  for (const Mat* m : payload) parts.emplace_back(m->data(), static_cast<std::size_t>(m->size()));
  write_blob_raw(path, header, parts);
}

void write_blob(const std::string& path, const Json& header, const std::vector<const Vec*>& payload) {
  std::vector<std::pair<const double*, std::size_t>> parts;
  for (const Vec* v : payload) parts.emplace_back(v->data(), static_cast<std::size_t>(v->size()));
  write_blob_raw(path, header, parts);
}

Blob read_blob(const std::string& path) {
  const std::string text = read_text(path);
  const auto nl = text.find('\n');
  if (nl == std::string::npos) throw Error(ErrorKind::parse, path + ": missing header line");
  Blob b;
  try {
    b.header = Json::parse(text.substr(0, nl));
  } catch (const std::exception& e) {
    throw Error(ErrorKind::parse, path + ": bad header: " + e.what());
  }
  const std::size_t n = b.header.value("payload_doubles", std::size_t(0));
  if (text.size() - nl - 1 != n * 8) throw Error(ErrorKind::parse, path + ": payload size mismatch");
  b.data.resize(n);
  std::memcpy(b.data.data(), text.data() + nl + 1, n * 8);
  return b;
}

// ---------------------------------------------------------------- SVG plots

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;
  double map(double v) const { return log ? std::log10(v) : v; }
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::floor(lo); e <= std::ceil(hi) + 1e-9; e += 1)
        if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(std::pow(10.0, e));
      if (t.size() < 2) t = {std::pow(10.0, lo), std::pow(10.0, hi)};
    } else {
      for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * i / 4.0);
    }
    return t;
  }
};

Axis make_axis(bool log, const std::vector<PlotSeries>& series, bool xaxis) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : xaxis ? s.x : s.y) {
      if (!std::isfinite(v) || (log && v <= 0)) continue;
      lo = std::min(lo, a.map(v));
      hi = std::max(hi, a.map(v));
    }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  const double w = 640, h = 420, ml = 80, mr = 150, mt = 40, mb = 60;
  const double pw = w - ml - mr, ph = h - mt - mb;
  const Axis ax = make_axis(spec.logx, series, true), ay = make_axis(spec.logy, series, false);
  auto px = [&](double v) { return ml + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return mt + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double x = ml + (ax.map(t) - ax.lo) / (ax.hi - ax.lo) * pw;
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(x)
      << "\" y2=\"" << num(mt + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << num(mt + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = mt + ph - (ay.map(t) - ay.lo) / (ay.hi - ay.lo) * ph;
    o << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(ml)
      << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
      << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(h - 15)
    << "\" text-anchor=\"middle\">" << escape(spec.xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << num(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << num(mt + ph / 2) << ")\">" << escape(spec.ylabel) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((spec.logx && s.x[i] <= 0) || (spec.logy && s.y[i] <= 0)) continue;
      pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
      o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
        << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    }
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"" << pts
      << "\"/>\n";
    const double ly = mt + 16 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << num(ml + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(ml + pw + 32) << "\" y2=\"" << num(ly) << "\" stroke=\"" << c
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(ml + pw + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace sgf
