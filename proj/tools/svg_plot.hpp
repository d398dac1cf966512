#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace refed::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal static SVG line chart, enough for metric-vs-epoch and k-vs-epoch
/// figures. No dependencies, one file per chart.
inline void write_line_chart(const std::string& path, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             const std::vector<Series>& series) {
    const double W = 640, H = 420, ml = 60, mr = 140, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) throw std::invalid_argument("write_line_chart: no data points");
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
        ymax = ymin + 1;
        ymin -= 1;
    } else {
        double pad = 0.08 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
       << "</text>\n";
    // axes
    os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        double yv = ymin + (ymax - ymin) * t / 4.0;
        double xv = xmin + (xmax - xmin) * t / 4.0;
        os << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
           << "' text-anchor='end' font-size='11'>";
        os.precision(3);
        os << yv << "</text>\n";
        os << "<text x='" << px(xv) << "' y='" << H - mb + 16
           << "' text-anchor='middle' font-size='11'>" << xv << "</text>\n";
        os << "<line x1='" << ml << "' y1='" << py(yv) << "' x2='" << W - mr << "' y2='" << py(yv)
           << "' stroke='#dddddd'/>\n";
    }
    os << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 10
       << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
    os << "<text x='16' y='" << (mt + H - mb) / 2 << "' font-size='12' transform='rotate(-90 16 "
       << (mt + H - mb) / 2 << ")' text-anchor='middle'>" << y_label << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* col = colors[s % 8];
        os << "<polyline fill='none' stroke='" << col << "' stroke-width='2' points='";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            os << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
        os << "'/>\n";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            os << "<circle cx='" << px(series[s].x[i]) << "' cy='" << py(series[s].y[i])
               << "' r='3' fill='" << col << "'/>\n";
        double ly = mt + 16 * static_cast<double>(s);
        os << "<rect x='" << W - mr + 10 << "' y='" << ly << "' width='12' height='4' fill='" << col
           << "'/>\n";
        os << "<text x='" << W - mr + 28 << "' y='" << ly + 6 << "' font-size='11'>"
           << series[s].label << "</text>\n";
    }
    os << "</svg>\n";

    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_line_chart: cannot open " + path);
    f << os.str();
}

}  // namespace refed::plot
