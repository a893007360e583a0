#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mvcp/io.hpp"

namespace mvcp::cli::svg {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kMargin = 60;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" is not allowed inside XML comments
std::string comment_text(std::string s) {
  for (std::size_t pos; (pos = s.find("--")) != std::string::npos;) s.replace(pos, 2, "- -");
  return s;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

std::string header(const std::string& title, const std::string& comment) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<!-- " << comment_text(comment) << " -->\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n";
  return out.str();
}

std::string axes(const Range& xr, const Range& yr, const std::string& x_label, const std::string& y_label) {
  std::ostringstream out;
  const double x0 = kMargin, x1 = kWidth - kMargin, y0 = kHeight - kMargin, y1 = kMargin;
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << x0 << "\" y=\"" << y0 + 16 << "\">" << io::format_double(xr.lo) << "</text>\n"
      << "<text x=\"" << x1 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"end\">" << io::format_double(xr.hi) << "</text>\n"
      << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 << "\" text-anchor=\"end\">" << io::format_double(yr.lo) << "</text>\n"
      << "<text x=\"" << x0 - 4 << "\" y=\"" << y1 + 10 << "\" text-anchor=\"end\">" << io::format_double(yr.hi) << "</text>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 20 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  return out.str();
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& xs, const std::vector<std::optional<double>>& ys,
                      const std::string& comment) {
  Range xr, yr;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    if (!ys[n]) continue;
    xr.add(xs[n]);
    yr.add(*ys[n]);
  }
  xr.finish();
  yr.finish();

  std::ostringstream out;
  out << header(title, comment) << axes(xr, yr, x_label, y_label);
  std::ostringstream path;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    if (!ys[n]) continue;
    const double px = xr.map(xs[n], kMargin, kWidth - kMargin);
    const double py = yr.map(*ys[n], kHeight - kMargin, kMargin);
    path << (path.tellp() == 0 ? "" : " ") << px << ',' << py;
    out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << kPalette[0] << "\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"" << kPalette[0] << "\" points=\"" << path.str() << "\"/>\n</svg>\n";
  return out.str();
}

std::string scatter(const std::string& title, const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::vector<std::string>& groups, const std::string& comment) {
  Range xr, yr;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    xr.add(xs[n]);
    yr.add(ys[n]);
  }
  xr.finish();
  yr.finish();

  std::map<std::string, std::size_t> color;
  for (const auto& g : groups) color.emplace(g, 0);
  std::size_t next = 0;
  for (auto& [name, c] : color) c = next++ % std::size(kPalette);

  std::ostringstream out;
  out << header(title, comment) << axes(xr, yr, "x", "y");
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const auto c = groups.empty() ? 0 : color[groups[n]];
    out << "<circle cx=\"" << xr.map(xs[n], kMargin, kWidth - kMargin) << "\" cy=\""
        << yr.map(ys[n], kHeight - kMargin, kMargin) << "\" r=\"4\" fill=\"" << kPalette[c] << "\"/>\n";
  }
  double ly = kMargin;
  for (const auto& [name, c] : color) {
    out << "<circle cx=\"" << kWidth - kMargin + 8 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << kPalette[c]
        << "\"/><text x=\"" << kWidth - kMargin + 16 << "\" y=\"" << ly + 4 << "\" font-size=\"10\">"
        << escape(name) << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace mvcp::cli::svg
