#include "capprice/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "capprice/common/numfmt.hpp"

namespace capprice::harness {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

std::ofstream open(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                     const std::vector<Series>& series) {
    const double W = 720, H = 420, left = 70, right = 170, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    std::size_t n = 0;
    double lo = 0.0, hi = 0.0;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    hi += 0.05 * (hi - lo);
    auto X = [&](std::size_t t) { return left + (n > 1 ? pw * static_cast<double>(t) / static_cast<double>(n - 1) : pw / 2); };
    auto Y = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

    auto out = open(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double v = lo + (hi - lo) * k / 5.0;
        out << "<line x1=\"" << left - 4 << "\" y1=\"" << fmt_fixed(Y(v), 2) << "\" x2=\"" << left + pw << "\" y2=\""
            << fmt_fixed(Y(v), 2) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << fmt_fixed(Y(v) + 4, 2) << "\" text-anchor=\"end\">"
            << fmt_fixed(v, 2) << "</text>\n";
    }
    for (std::size_t t = 0; t < n; ++t)
        out << "<text x=\"" << fmt_fixed(X(t), 2) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << t + 1
            << "</text>\n";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">period</text>\n";
    out << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << top + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
            << (series[s].dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (std::size_t t = 0; t < series[s].values.size(); ++t)
            out << (t ? " " : "") << fmt_fixed(X(t), 2) << "," << fmt_fixed(Y(series[s].values[t]), 2);
        out << "\"/>\n";
        const double ly = top + 10 + 20.0 * static_cast<double>(s);
        out << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\""
            << (series[s].dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        out << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].name) << "</text>\n";
    }
    out << "</svg>\n";
}

void write_heat_table(const std::filesystem::path& path, const std::string& title,
                      const std::vector<std::string>& row_labels, const std::vector<std::string>& col_labels,
                      const std::vector<std::vector<double>>& values) {
    const double cw = 64, ch = 28, left = 90, top = 60;
    const double W = left + cw * static_cast<double>(col_labels.size()) + 20;
    const double H = top + ch * static_cast<double>(row_labels.size()) + 20;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& row : values)
        for (double v : row)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    auto out = open(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
    for (std::size_t c = 0; c < col_labels.size(); ++c)
        out << "<text x=\"" << left + cw * (static_cast<double>(c) + 0.5) << "\" y=\"" << top - 8
            << "\" text-anchor=\"middle\">" << escape(col_labels[c]) << "</text>\n";
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        const double y = top + ch * static_cast<double>(r);
        out << "<text x=\"" << left - 8 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"end\">"
            << escape(row_labels[r]) << "</text>\n";
        for (std::size_t c = 0; c < col_labels.size(); ++c) {
            const double v = r < values.size() && c < values[r].size() ? values[r][c] : NAN;
            std::string fill = "#cccccc";
            if (std::isfinite(v)) {
                const double f = hi > lo ? (v - lo) / (hi - lo) : 0.0;
                const int red = static_cast<int>(std::lround(255 * f));
                const int blue = static_cast<int>(std::lround(255 * (1.0 - f)));
                fill = "rgb(" + std::to_string(red) + ",120," + std::to_string(blue) + ")";
            }
            const double x = left + cw * static_cast<double>(c);
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
                << fill << "\" stroke=\"white\"/>\n";
            out << "<text x=\"" << x + cw / 2 << "\" y=\"" << y + ch / 2 + 4
                << "\" text-anchor=\"middle\" fill=\"white\">" << (std::isfinite(v) ? fmt_fixed(v, 2) : "-")
                << "</text>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace capprice::harness
