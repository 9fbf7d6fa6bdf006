// SPDX-License-Identifier: Apache-2.0
//
// Minimal SVG line charts for the sweep tables.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hmb/harness.hpp"

namespace hmb {

namespace {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out.push_back(c);
  }
  return out;
}

std::vector<double> ticks(double lo, double hi, bool log) {
  std::vector<double> t;
  if (log) {
    for (double e = std::floor(lo); e <= std::ceil(hi) + 1e-9; e += 1.0)
      if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(e);
    if (t.size() < 2) t = {lo, hi};
    return t;
  }
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 ? 0 : v);
  return t;
}

std::string render(const Chart& c) {
  const double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  auto tx = [&](double v) { return c.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return c.log_y ? std::log10(v) : v; };

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const Series& s : c.series)
    for (auto [x, y] : s.points) {
      if ((c.log_x && !(x > 0)) || (c.log_y && !(y > 0))) continue;
      const double a = tx(x), b = ty(y);
      if (!any) {
        x0 = x1 = a;
        y0 = y1 = b;
        any = true;
      }
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
    }
  if (x1 - x0 < 1e-12) {
    x0 -= 1;
    x1 += 1;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double a) { return left + (a - x0) / (x1 - x0) * pw; };
  auto py = [&](double b) { return top + (1.0 - (b - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(c.title)
     << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(x0, x1, c.log_x)) {
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(t)) << "\" y2=\""
       << num(top + ph) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
       << num(c.log_x ? std::pow(10.0, t) : t) << "</text>\n";
  }
  for (double t : ticks(y0, y1, c.log_y)) {
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
       << num(py(t)) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
       << num(c.log_y ? std::pow(10.0, t) : t) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\">"
     << escape(c.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << num(top + ph / 2) << ")\">" << escape(c.y_label) << "</text>\n";

  for (std::size_t i = 0; i < c.series.size(); ++i) {
    const Series& s = c.series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    std::ostringstream pts;
    for (auto [x, y] : s.points) {
      if ((c.log_x && !(x > 0)) || (c.log_y && !(y > 0))) continue;
      pts << num(px(tx(x))) << ',' << num(py(ty(y))) << ' ';
      os << "<circle cx=\"" << num(px(tx(x))) << "\" cy=\"" << num(py(ty(y))) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"" << pts.str() << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(i);
    os << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(left + pw + 34)
       << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(left + pw + 40) << "\" y=\"" << num(ly) << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// Series keyed by method in first-appearance order.
std::vector<Series> group(const std::vector<std::pair<std::string, std::pair<double, double>>>& pts) {
  std::vector<Series> out;
  for (const auto& [name, p] : pts) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Series& s) { return s.name == name; });
    if (it == out.end()) {
      out.push_back({name, {}});
      it = out.end() - 1;
    }
    it->points.push_back(p);
  }
  for (Series& s : out) std::sort(s.points.begin(), s.points.end());
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
  if (!os) throw std::runtime_error("failed while writing " + path);
}

} // namespace

std::vector<std::string> plot_names() {
  return {"accuracy_vs_snr.svg", "accuracy_vs_B.svg", "rate_vs_snr.svg", "rate_vs_distance.svg",
          "overhead_vs_codebook_size.svg"};
}

std::vector<std::string> write_plots(const ResultTable& table, const std::vector<DistanceRow>& distance,
                                     const std::vector<OverheadRow>& overhead, const std::string& dir) {
  if (table.rows.empty()) throw std::invalid_argument("cannot plot an empty table");
  const std::uint32_t B0 = table.rows.front().B;
  const int L0 = table.rows.front().L;

  // SNR closest to 10 dB for the bucket-count figure.
  double snr_b = table.rows.front().snr_db;
  for (const ResultRow& r : table.rows)
    if (std::abs(r.snr_db - 10.0) < std::abs(snr_b - 10.0)) snr_b = r.snr_db;

  std::vector<std::pair<std::string, std::pair<double, double>>> acc_snr, rate_snr, acc_b, rate_dist, ovh;
  for (const ResultRow& r : table.rows) {
    if (r.B == B0 && r.L == L0) {
      acc_snr.push_back({r.method, {r.snr_db, r.accuracy}});
      rate_snr.push_back({r.method, {r.snr_db, r.rate_bps_hz}});
    }
    if (r.L == L0 && r.snr_db == snr_b) acc_b.push_back({r.method, {static_cast<double>(r.B), r.accuracy}});
  }
  for (const DistanceRow& d : distance)
    if (d.count > 0) rate_dist.push_back({d.method, {std::sqrt(d.r_lo * d.r_hi), d.rate_bps_hz}});
  for (const OverheadRow& o : overhead)
    ovh.push_back({o.method, {static_cast<double>(o.codebook_size), static_cast<double>(o.overhead_slots)}});

  const std::string tag = " (B=" + std::to_string(B0) + ", L=" + std::to_string(L0) + ")";
  std::vector<Chart> charts{
      {"Accuracy vs SNR" + tag, "reference SNR (dB)", "accuracy", false, false, group(acc_snr)},
      {"Accuracy vs B at " + num(snr_b) + " dB", "buckets B", "accuracy", false, false, group(acc_b)},
      {"Achievable rate vs SNR" + tag, "reference SNR (dB)", "rate (bps/Hz)", false, false, group(rate_snr)},
      {"Achievable rate vs distance", "user distance (m)", "rate (bps/Hz)", true, false, group(rate_dist)},
      {"Training overhead vs codebook size", "codebook size", "overhead (slots)", true, true, group(ovh)},
  };
  if (!distance.empty()) charts[3].title += " at " + num(distance.front().snr_db) + " dB";

  std::vector<std::string> paths;
  const auto names = plot_names();
  for (std::size_t i = 0; i < charts.size(); ++i) {
    const std::string path = (dir.empty() ? std::string(".") : dir) + "/" + names[i];
    write_file(path, render(charts[i]));
    paths.push_back(path);
  }
  return paths;
}

} // namespace hmb
