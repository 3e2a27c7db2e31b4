#include "fluctuon/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fluctuon {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

std::string f3(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return b;
}

std::string tick(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

}  // namespace

std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series) {
    const double W = spec.width, H = spec.height, l = 70, r = 150, t = 40, b = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto ty = [&](double y) { return spec.logy ? std::log10(y) : y; };
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            double e = i < s.err.size() ? s.err[i] : 0.0;
            double lo = s.y[i] - e, hi = s.y[i] + e;
            if (spec.logy && !(lo > 0)) lo = s.y[i];
            if (!std::isfinite(s.x[i]) || !std::isfinite(lo) || !std::isfinite(hi)) continue;
            if (spec.logy && !(lo > 0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(lo));
            y1 = std::max(y1, ty(hi));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto X = [&](double x) { return l + (x - x0) / (x1 - x0) * (W - l - r); };
    auto Y = [&](double y) { return H - b - (ty(y) - y0) / (y1 - y0) * (H - t - b); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << " " << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(spec.title)
      << "</text>\n";
    o << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << W - l - r << "\" height=\"" << H - t - b
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = x0 + i * (x1 - x0) / 4, yv = y0 + i * (y1 - y0) / 4;
        double px = X(xv), py = H - b - i * (H - t - b) / 4;
        o << "<text x=\"" << f3(px) << "\" y=\"" << H - b + 15 << "\" text-anchor=\"middle\">" << tick(xv)
          << "</text>\n";
        o << "<text x=\"" << l - 5 << "\" y=\"" << f3(py + 4) << "\" text-anchor=\"end\">"
          << tick(spec.logy ? std::pow(10.0, yv) : yv) << "</text>\n";
    }
    o << "<text x=\"" << (l + W - r) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << esc(spec.xlabel)
      << "</text>\n";
    o << "<text transform=\"translate(16," << (t + H - b) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << esc(spec.ylabel) << "</text>\n";

    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = kColors[k % 7];
        if (!s.markers) {
            o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.y[i]) && (!spec.logy || s.y[i] > 0)) o << f3(X(s.x[i])) << "," << f3(Y(s.y[i])) << " ";
            o << "\"/>\n";
        }
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (spec.logy && !(s.y[i] > 0))) continue;
            if (i < s.err.size() && s.err[i] > 0) {
                double lo = s.y[i] - s.err[i];
                if (spec.logy && !(lo > 0)) lo = s.y[i];
                o << "<line x1=\"" << f3(X(s.x[i])) << "\" x2=\"" << f3(X(s.x[i])) << "\" y1=\"" << f3(Y(lo))
                  << "\" y2=\"" << f3(Y(s.y[i] + s.err[i])) << "\" stroke=\"" << col << "\"/>\n";
            }
            if (s.markers)
                o << "<circle cx=\"" << f3(X(s.x[i])) << "\" cy=\"" << f3(Y(s.y[i])) << "\" r=\"2.5\" fill=\"" << col
                  << "\"/>\n";
        }
        double ly = t + 14 + 16 * k;
        o << "<rect x=\"" << W - r + 10 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\"" << col
          << "\"/>\n";
        o << "<text x=\"" << W - r + 25 << "\" y=\"" << ly << "\">" << esc(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace fluctuon
