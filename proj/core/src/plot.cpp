#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "oscbo/error.hpp"
#include "oscbo/harness.hpp"

namespace oscbo::harness {

PlotMetric parse_plot_metric(std::string_view s) {
  if (s == "simple") return PlotMetric::Simple;
  if (s == "cumulative") return PlotMetric::Cumulative;
  if (s == "coverage") return PlotMetric::Coverage;
  if (s == "lengthscale") return PlotMetric::Lengthscale;
  throw ConfigError("unknown metric '" + std::string(s) +
                    "' (expected simple|cumulative|coverage|lengthscale)");
}

namespace {

constexpr double kW = 720, kH = 440, kLeft = 70, kRight = 170, kTop = 30, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string method_of(const std::filesystem::path& f) {
  const std::string stem = f.stem().string();
  const auto a = stem.find("__");
  if (a == std::string::npos) return stem;
  const auto b = stem.find("__", a + 2);
  return stem.substr(a + 2, b == std::string::npos ? std::string::npos : b - a - 2);
}

std::vector<double> series(const RunLog& log, PlotMetric metric) {
  std::vector<double> v;
  losses::CoverageCounter cov;
  for (const auto& r : log.records) {
    switch (metric) {
      case PlotMetric::Simple: v.push_back(r.simple_regret); break;
      case PlotMetric::Cumulative: v.push_back(r.cum_regret); break;
      case PlotMetric::Coverage:
        cov.update(r.covered);
        v.push_back(cov.rate());
        break;
      case PlotMetric::Lengthscale: v.push_back(r.theta.empty() ? 0.0 : r.theta.front()); break;
    }
  }
  return v;
}

}  // namespace

std::string plot_svg(const std::vector<std::filesystem::path>& files, PlotMetric metric) {
  if (files.empty()) throw InvalidArgument("plot: no run files");
  std::map<std::string, std::vector<std::vector<double>>> by_method;
  std::size_t T = 0;
  std::filesystem::path first;
  for (const auto& f : files) {
    const auto s = series(read_run_csv(f), metric);
    if (T == 0) {
      T = s.size();
      first = f;
    } else if (s.size() != T) {
      throw InvalidArgument("plot: '" + first.string() + "' has " + std::to_string(T) +
                            " rounds but '" + f.string() + "' has " + std::to_string(s.size()));
    }
    by_method[method_of(f)].push_back(s);
  }
  if (T == 0) throw InvalidArgument("plot: run files have no rounds");

  const bool logy = metric != PlotMetric::Coverage;
  auto tf = [&](double v) { return logy ? std::log10(std::max(v, kLogFloor)) : v; };

  struct Curve {
    std::string name;
    std::vector<double> mid, lo, hi;
  };
  std::vector<Curve> curves;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const auto& [name, runs] : by_method) {
    Curve c{name, {}, {}, {}};
    const double n = static_cast<double>(runs.size());
    for (std::size_t t = 0; t < T; ++t) {
      double mean = 0.0;
      for (const auto& r : runs) mean += r[t];
      mean /= n;
      double ss = 0.0;
      for (const auto& r : runs) ss += (r[t] - mean) * (r[t] - mean);
      const double se = runs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
      c.mid.push_back(tf(mean));
      c.lo.push_back(tf(mean - se));
      c.hi.push_back(tf(mean + se));
      ymin = std::min({ymin, c.lo.back(), c.mid.back()});
      ymax = std::max({ymax, c.hi.back(), c.mid.back()});
    }
    curves.push_back(std::move(c));
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](std::size_t t) {
    return kLeft + (T == 1 ? 0.5 : static_cast<double>(t) / static_cast<double>(T - 1)) * pw;
  };
  auto py = [&](double v) { return kTop + (ymax - v) / (ymax - ymin) * ph; };

  const char* label = metric == PlotMetric::Simple       ? "log10 simple regret"
                      : metric == PlotMetric::Cumulative ? "log10 cumulative regret"
                      : metric == PlotMetric::Coverage   ? "empirical coverage"
                                                         : "log10 lengthscale";
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = ymin + (ymax - ymin) * i / 4.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(v) + 4)
       << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    const std::size_t t = (T - 1) * static_cast<std::size_t>(i) / 4;
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << kH - kBottom + 18
       << "\" text-anchor=\"middle\">" << t + 1 << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10
     << "\" text-anchor=\"middle\">round</text>\n";
  os << "<text transform=\"translate(16," << kTop + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << label << "</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    const auto& cv = curves[c];
    os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t t = 0; t < T; ++t) os << num(px(t)) << ',' << num(py(cv.hi[t])) << ' ';
    for (std::size_t t = T; t-- > 0;) os << num(px(t)) << ',' << num(py(cv.lo[t])) << ' ';
    os << "\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < T; ++t) {
      os << num(px(t)) << ',' << num(py(cv.mid[t])) << (t + 1 < T ? " " : "");
    }
    os << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(c);
    os << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 36
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kW - kRight + 42 << "\" y=\"" << ly + 4 << "\">" << cv.name
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace oscbo::harness
