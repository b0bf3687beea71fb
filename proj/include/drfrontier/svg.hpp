#pragma once

// Minimal static line charts: linear axes, polylines distinguished by dash
// pattern, point markers and horizontal reference lines. No dependencies.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace drfrontier {

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string label, std::vector<double> xs, std::vector<double> ys) {
        series_.push_back({std::move(label), std::move(xs), std::move(ys)});
    }
    void add_marker(std::string label, double x, double y) {
        markers_.push_back({std::move(label), x, y});
    }
    void add_hline(std::string label, double y) { hlines_.push_back({std::move(label), y}); }

    std::string render() const {
        double x0 = std::numeric_limits<double>::infinity();
        double x1 = -x0;
        double y0 = x0;
        double y1 = -x0;
        auto grow = [&](double x, double y) {
            if (!std::isfinite(x) || !std::isfinite(y)) return;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        };
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) grow(s.xs[i], s.ys[i]);
        }
        for (const auto& m : markers_) grow(m.x, m.y);
        for (const auto& h : hlines_) grow(std::isfinite(x0) ? x0 : 0.0, h.y);
        if (!std::isfinite(x0)) {
            x0 = 0.0;
            x1 = 1.0;
            y0 = 0.0;
            y1 = 1.0;
        }
        if (x1 - x0 <= 0.0) x1 = x0 + 1.0;
        if (y1 - y0 <= 1e-12 * std::max(1.0, std::abs(y0))) {
            const double pad = std::max(std::abs(y0) * 0.1, 1e-3);
            y0 -= pad;
            y1 += pad;
        }
        const double ypad = 0.05 * (y1 - y0);
        y0 -= ypad;
        y1 += ypad;

        const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
        const auto py = [&](double y) { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };

        std::ostringstream o;
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
          << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
        o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
          << escape(title_) << "</text>\n";
        // axes
        o << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
          << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
        o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
          << kHeight - kBottom << "\" stroke=\"black\"/>\n";
        for (double xv : ticks(x0, x1)) {
            o << "<text x=\"" << num(px(xv)) << "\" y=\"" << kHeight - kBottom + 18
              << "\" text-anchor=\"middle\" font-size=\"11\">" << tick(xv) << "</text>\n";
        }
        for (double yv : ticks(y0, y1)) {
            o << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << kLeft
              << "\" y2=\"" << num(py(yv)) << "\" stroke=\"black\"/>\n";
            o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(yv) + 4)
              << "\" text-anchor=\"end\" font-size=\"11\">" << tick(yv) << "</text>\n";
        }
        o << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
          << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label_) << "</text>\n";
        o << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
          << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << escape(y_label_) << "</text>\n";

        for (const auto& h : hlines_) {
            o << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(h.y)) << "\" x2=\"" << kWidth - kRight
              << "\" y2=\"" << num(py(h.y)) << "\" stroke=\"gray\" stroke-dasharray=\"2,2\"/>\n";
            o << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << num(py(h.y) - 4)
              << "\" text-anchor=\"end\" font-size=\"11\" fill=\"gray\">" << escape(h.label)
              << "</text>\n";
        }
        for (std::size_t k = 0; k < series_.size(); ++k) {
            const auto& s = series_[k];
            o << "<polyline fill=\"none\" stroke=\"" << kColors[k % kColors.size()]
              << "\" stroke-width=\"1.8\"";
            if (!kDashes[k % kDashes.size()].empty()) {
                o << " stroke-dasharray=\"" << kDashes[k % kDashes.size()] << "\"";
            }
            o << " points=\"";
            for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
                if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
                o << num(px(s.xs[i])) << ',' << num(py(s.ys[i])) << ' ';
            }
            o << "\"/>\n";
            const double ly = kTop + 10.0 + 18.0 * static_cast<double>(k);
            o << "<line x1=\"" << kLegend << "\" y1=\"" << num(ly) << "\" x2=\"" << kLegend + 30
              << "\" y2=\"" << num(ly) << "\" stroke=\"" << kColors[k % kColors.size()]
              << "\" stroke-width=\"1.8\"";
            if (!kDashes[k % kDashes.size()].empty()) {
                o << " stroke-dasharray=\"" << kDashes[k % kDashes.size()] << "\"";
            }
            o << "/>\n<text x=\"" << kLegend + 36 << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">"
              << escape(s.label) << "</text>\n";
        }
        for (const auto& m : markers_) {
            if (!std::isfinite(m.x) || !std::isfinite(m.y)) continue;
            o << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y))
              << "\" r=\"4\" fill=\"black\"/>\n";
            o << "<text x=\"" << num(px(m.x) + 6) << "\" y=\"" << num(py(m.y) - 6)
              << "\" font-size=\"11\">" << escape(m.label) << "</text>\n";
        }
        o << "</svg>\n";
        return o.str();
    }

private:
    struct Series {
        std::string label;
        std::vector<double> xs;
        std::vector<double> ys;
    };
    struct Marker {
        std::string label;
        double x;
        double y;
    };
    struct HLine {
        std::string label;
        double y;
    };

    static constexpr int kWidth = 900;
    static constexpr int kHeight = 480;
    static constexpr int kLeft = 70;
    static constexpr int kRight = 210; // legend column
    static constexpr int kLegend = kWidth - kRight + 16;
    static constexpr int kTop = 40;
    static constexpr int kBottom = 50;
    inline static const std::vector<std::string> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                            "#9467bd", "#ff7f0e", "#8c564b"};
    inline static const std::vector<std::string> kDashes = {"", "8,4", "2,3", "10,3,2,3", "4,4", "1,5"};

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return buf;
    }
    /// Round-number tick positions (steps of 1, 2 or 5 times a power of ten) inside [lo, hi].
    static std::vector<double> ticks(double lo, double hi) {
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = 10.0 * mag;
        for (double m : {1.0, 2.0, 5.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        std::vector<double> out;
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
            out.push_back(std::abs(t) < 1e-9 * step ? 0.0 : t);
        }
        return out;
    }
    static std::string tick(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        return buf;
    }
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
            }
        }
        return out;
    }

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    std::vector<Series> series_;
    std::vector<Marker> markers_;
    std::vector<HLine> hlines_;
};

}  // namespace drfrontier
