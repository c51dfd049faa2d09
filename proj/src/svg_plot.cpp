#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "otdro/experiment.hpp"

namespace otdro {

namespace {

std::string f4(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

constexpr int kW = 640, kH = 420;
constexpr int kMargin = 56;

struct Canvas {
  std::string body;
  double x0, x1, y0, y1;  // data ranges

  double px(double x) const {
    return kMargin + (x - x0) / (x1 - x0) * (kW - 2 * kMargin);
  }
  double py(double y) const {
    return kH - kMargin - (y - y0) / (y1 - y0) * (kH - 2 * kMargin);
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    body += "<rect x=\"" + f4(x) + "\" y=\"" + f4(y) + "\" width=\"" + f4(w) +
            "\" height=\"" + f4(h) + "\" fill=\"" + fill + "\"/>\n";
  }
  void line(double xa, double ya, double xb, double yb, const char* stroke) {
    body += "<line x1=\"" + f4(xa) + "\" y1=\"" + f4(ya) + "\" x2=\"" + f4(xb) +
            "\" y2=\"" + f4(yb) + "\" stroke=\"" + std::string(stroke) +
            "\" stroke-width=\"1.5\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "middle") {
    body += "<text x=\"" + f4(x) + "\" y=\"" + f4(y) + "\" font-size=\"12\" text-anchor=\"" +
            anchor + "\" font-family=\"monospace\">" + s + "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
    body += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
            "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) body += f4(px(x)) + "," + f4(py(y)) + " ";
    body += "\"/>\n";
  }
  void axes(const std::string& xlabel, const std::string& ylabel) {
    line(kMargin, kH - kMargin, kW - kMargin, kH - kMargin, "black");
    line(kMargin, kMargin, kMargin, kH - kMargin, "black");
    for (int i = 0; i <= 4; ++i) {
      const double fx = x0 + (x1 - x0) * i / 4.0;
      const double fy = y0 + (y1 - y0) * i / 4.0;
      text(px(fx), kH - kMargin + 16, f4(fx));
      text(kMargin - 6, py(fy) + 4, f4(fy), "end");
    }
    text(kW / 2.0, kH - 12, xlabel);
    text(14, kH / 2.0, ylabel, "middle");
  }
  void write(const std::string& path, const std::string& title) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("svg: cannot open " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    f << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    f << "<text x=\"" << kW / 2 << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\" "
         "font-family=\"monospace\">"
      << title << "</text>\n";
    f << body;
    f << "</svg>\n";
  }
};

}  // namespace

std::vector<std::string> emit_plots(const std::string& trials_csv,
                                    const std::string& summary_csv,
                                    const std::string& out_dir) {
  const std::vector<TrialRecord> records = read_trials_csv(trials_csv);
  if (records.empty()) throw std::runtime_error("emit_plots: no trial records");
  const ExperimentSummary summary = read_summary_csv(summary_csv);
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  // Deviation histogram.
  {
    std::vector<double> devs;
    devs.reserve(records.size());
    for (const auto& r : records) devs.push_back(r.deviation);
    const auto [mn_it, mx_it] = std::minmax_element(devs.begin(), devs.end());
    double lo = *mn_it, hi = *mx_it;
    if (hi - lo < 1e-12) {
      lo -= 1e-6;
      hi += 1e-6;
    }
    const int bins = std::max(8, static_cast<int>(std::round(std::sqrt(devs.size()))));
    std::vector<int> counts(bins, 0);
    for (double d : devs) {
      int b = static_cast<int>((d - lo) / (hi - lo) * bins);
      b = std::clamp(b, 0, bins - 1);
      ++counts[b];
    }
    const int cmax = *std::max_element(counts.begin(), counts.end());
    Canvas c;
    c.x0 = lo;
    c.x1 = hi;
    c.y0 = 0;
    c.y1 = cmax * 1.05;
    for (int b = 0; b < bins; ++b) {
      const double xa = lo + (hi - lo) * b / bins;
      const double xb = lo + (hi - lo) * (b + 1) / bins;
      c.rect(c.px(xa), c.py(counts[b]), c.px(xb) - c.px(xa) - 0.5,
             c.py(0) - c.py(counts[b]), "#4477aa");
    }
    c.axes("deviation", "count");
    const std::string path = out_dir + "/deviation_hist.svg";
    c.write(path, scenario_name(summary.scenario) + " deviation histogram");
    written.push_back(path);
  }

  // Exceedance frequency vs eps, with the tail bound overlaid.
  {
    Canvas c;
    double xmax = 0.0, ymax = 0.0;
    for (const auto& r : summary.rows) {
      xmax = std::max(xmax, r.eps);
      ymax = std::max({ymax, r.tail, r.empirical_freq});
    }
    c.x0 = 0.0;
    c.x1 = xmax * 1.05 + 1e-12;
    c.y0 = 0.0;
    c.y1 = std::max(ymax * 1.1, 1e-6);
    std::vector<std::pair<double, double>> tail_pts, freq_pts;
    for (const auto& r : summary.rows) {
      tail_pts.emplace_back(r.eps, r.tail);
      freq_pts.emplace_back(r.eps, r.empirical_freq);
    }
    c.polyline(tail_pts, "#cc3311");
    c.polyline(freq_pts, "#4477aa");
    c.axes("eps", "P(exceed)");
    c.text(kW - kMargin - 8, kMargin + 14, "tail bound", "end");
    c.text(kW - kMargin - 8, kMargin + 30, "empirical", "end");
    const std::string path = out_dir + "/exceedance_curve.svg";
    c.write(path, scenario_name(summary.scenario) + " exceedance vs eps");
    written.push_back(path);
  }
  return written;
}

}  // namespace otdro
