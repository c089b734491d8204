#include "latentflow/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace latentflow {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string num(double v, const char* spec = "%.2f") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

struct Range {
    double lo = 0.0, hi = 1.0;

    static Range of(const std::vector<double>& v) {
        Range r{v.empty() ? 0.0 : v[0], v.empty() ? 1.0 : v[0]};
        for (double x : v) {
            r.lo = std::min(r.lo, x);
            r.hi = std::max(r.hi, x);
        }
        return r.padded();
    }

    Range padded() const {
        if (hi > lo) return *this;
        return {lo - 0.5, hi + 0.5};  // degenerate data still gets a frame
    }

    void include(const Range& other) {
        lo = std::min(lo, other.lo);
        hi = std::max(hi, other.hi);
    }

    double to_unit(double v) const { return (v - lo) / (hi - lo); }
};

// Shared axes frame: ticks, labels, title. `px`/`py` map data to pixels.
struct Frame {
    double left, top, width, height;
    Range xr, yr;

    double px(double x) const { return left + xr.to_unit(x) * width; }
    double py(double y) const { return top + (1.0 - yr.to_unit(y)) * height; }

    void draw(std::string& svg, const std::string& x_label, const std::string& y_label) const {
        svg += "<rect x='" + num(left) + "' y='" + num(top) + "' width='" + num(width) +
               "' height='" + num(height) + "' fill='none' stroke='#333'/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
            const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
            const double gx = px(fx), gy = py(fy);
            svg += "<line x1='" + num(gx) + "' y1='" + num(top + height) + "' x2='" + num(gx) +
                   "' y2='" + num(top + height + 4) + "' stroke='#333'/>\n";
            svg += "<text x='" + num(gx) + "' y='" + num(top + height + 16) +
                   "' font-size='10' text-anchor='middle'>" + num(fx, "%.4g") + "</text>\n";
            svg += "<line x1='" + num(left - 4) + "' y1='" + num(gy) + "' x2='" + num(left) +
                   "' y2='" + num(gy) + "' stroke='#333'/>\n";
            svg += "<text x='" + num(left - 6) + "' y='" + num(gy + 3) +
                   "' font-size='10' text-anchor='end'>" + num(fy, "%.4g") + "</text>\n";
        }
        svg += "<text x='" + num(left + width / 2) + "' y='" + num(top + height + 32) +
               "' font-size='12' text-anchor='middle'>" + escape(x_label) + "</text>\n";
        svg += "<text x='" + num(left - 44) + "' y='" + num(top + height / 2) +
               "' font-size='12' text-anchor='middle' transform='rotate(-90 " + num(left - 44) +
               " " + num(top + height / 2) + ")'>" + escape(y_label) + "</text>\n";
    }
};

std::string svg_open(double w, double h, const std::string& title) {
    std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='" + num(w, "%.0f") +
                      "' height='" + num(h, "%.0f") + "' viewBox='0 0 " + num(w, "%.0f") + " " +
                      num(h, "%.0f") + "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg += "<text x='" + num(w / 2) + "' y='20' font-size='14' font-weight='bold' "
           "text-anchor='middle'>" + escape(title) + "</text>\n";
    return svg;
}

// Symmetric diverging map: -1 -> blue, 0 -> near-white, +1 -> red.
std::string diverging_color(double s) {
    s = std::clamp(s, -1.0, 1.0);
    const int white[3] = {247, 247, 247};
    const int red[3] = {178, 24, 43};
    const int blue[3] = {33, 102, 172};
    const int* end = s >= 0.0 ? red : blue;
    const double f = std::abs(s);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(white[0] + f * (end[0] - white[0]))),
                  static_cast<int>(std::lround(white[1] + f * (end[1] - white[1]))),
                  static_cast<int>(std::lround(white[2] + f * (end[2] - white[2]))));
    return buf;
}

double abs_limit(const Matrix& m) {
    double limit = 0.0;
    for (double v : m.data) limit = std::max(limit, std::abs(v));
    return limit > 0.0 ? limit : 1.0;
}

void heatmap_panel(std::string& svg, const Frame& f, const Matrix& values, double limit) {
    const int nt = values.rows, nx = values.cols;
    const double cw = f.width / nt, ch = f.height / nx;
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nx; ++j) {
            svg += "<rect x='" + num(f.left + i * cw) + "' y='" +
                   num(f.top + f.height - (j + 1) * ch) + "' width='" + num(cw + 0.05) +
                   "' height='" + num(ch + 0.05) + "' fill='" +
                   diverging_color(values(i, j) / limit) + "'/>\n";
        }
    }
}

Frame heatmap_frame(double left, const std::vector<double>& times, const PeriodicGrid& grid,
                    double width, double height, double top) {
    Frame f;
    f.left = left;
    f.top = top;
    f.width = width;
    f.height = height;
    f.xr = Range{times.front(), times.back()}.padded();
    f.yr = Range{grid.x_min, grid.x_max}.padded();
    return f;
}

void check_field_shape(const char* who, const std::vector<double>& times, const PeriodicGrid& grid,
                       const Matrix& values) {
    if (times.empty() || values.rows != static_cast<int>(times.size()) ||
        values.cols != grid.n_points) {
        throw std::invalid_argument(std::string(who) + ": " + std::to_string(values.rows) + "x" +
                                    std::to_string(values.cols) + " values for " +
                                    std::to_string(times.size()) + " times x " +
                                    std::to_string(grid.n_points) + " points");
    }
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series) {
    if (series.empty()) throw std::invalid_argument("line_plot_svg: no series");
    Frame f{70.0, 40.0, 660.0, 380.0, Range::of(series[0].x), Range::of(series[0].y)};
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty()) {
            throw std::invalid_argument("line_plot_svg: series '" + s.label + "' has " +
                                        std::to_string(s.x.size()) + " x for " +
                                        std::to_string(s.y.size()) + " y values");
        }
        f.xr.include(Range::of(s.x));
        f.yr.include(Range::of(s.y));
    }

    std::string svg = svg_open(800, 500, title);
    f.draw(svg, x_label, y_label);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const PlotSeries& s = series[k];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            pts += num(f.px(s.x[i])) + "," + num(f.py(s.y[i])) + " ";
        }
        const char* color = kPalette[k % kPaletteSize];
        svg += "<polyline points='" + pts + "' fill='none' stroke='" + color +
               "' stroke-width='1.5'/>\n";
        svg += "<text x='" + num(f.left + f.width - 8) + "' y='" +
               num(f.top + 14 + 14 * static_cast<double>(k)) + "' font-size='11' fill='" + color +
               "' text-anchor='end'>" + escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string heatmap_svg(const std::string& title, const std::vector<double>& times,
                        const PeriodicGrid& grid, const Matrix& values) {
    check_field_shape("heatmap_svg", times, grid, values);
    std::string svg = svg_open(800, 500, title);
    Frame f = heatmap_frame(70.0, times, grid, 660.0, 380.0, 40.0);
    heatmap_panel(svg, f, values, abs_limit(values));
    f.draw(svg, "t", "x");
    svg += "</svg>\n";
    return svg;
}

std::string heatmap_pair_svg(const std::string& title, const std::vector<double>& times,
                             const PeriodicGrid& grid, const Matrix& left,
                             const std::string& left_label, const Matrix& right,
                             const std::string& right_label) {
    check_field_shape("heatmap_pair_svg", times, grid, left);
    check_field_shape("heatmap_pair_svg", times, grid, right);
    const double limit = std::max(abs_limit(left), abs_limit(right));

    std::string svg = svg_open(980, 500, title);
    const Matrix* panels[2] = {&left, &right};
    const std::string* labels[2] = {&left_label, &right_label};
    for (int p = 0; p < 2; ++p) {
        Frame f = heatmap_frame(70.0 + 460.0 * p, times, grid, 400.0, 360.0, 60.0);
        heatmap_panel(svg, f, *panels[p], limit);
        f.draw(svg, "t", "x");
        svg += "<text x='" + num(f.left + f.width / 2) + "' y='" + num(f.top - 8) +
               "' font-size='12' text-anchor='middle'>" + escape(*labels[p]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string trajectory_views_svg(const std::string& title, const LatentTrajectory& traj) {
    const int d = traj.coords.cols;
    const int nt = traj.coords.rows;
    if (nt < 1 || d < 1) throw std::invalid_argument("trajectory_views_svg: empty trajectory");

    auto axis_label = [&](int k) {
        return k < static_cast<int>(traj.labels.size()) ? traj.labels[k]
                                                        : "z" + std::to_string(k + 1);
    };
    auto column = [&](int k) {
        std::vector<double> v(nt);
        for (int i = 0; i < nt; ++i) v[i] = traj.coords(i, k);
        return v;
    };

    // Pairs of coordinates to project; a 1-D latent plots against time.
    std::vector<std::array<int, 2>> pairs;
    if (d == 1) pairs.push_back({-1, 0});
    else {
        for (int a = 0; a < d && a < 3; ++a) {
            for (int b = a + 1; b < d && b < 3; ++b) pairs.push_back({a, b});
        }
    }

    const double panel_w = 260.0, gap = 50.0;
    const double width = 40.0 + (panel_w + gap) * static_cast<double>(pairs.size());
    std::string svg = svg_open(width, 380, title);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const std::vector<double> xs = pairs[p][0] < 0 ? traj.times : column(pairs[p][0]);
        const std::vector<double> ys = column(pairs[p][1]);
        Frame f{60.0 + (panel_w + gap) * static_cast<double>(p), 50.0, panel_w, 260.0,
                Range::of(xs), Range::of(ys)};
        std::string pts;
        for (int i = 0; i < nt; ++i) pts += num(f.px(xs[i])) + "," + num(f.py(ys[i])) + " ";
        svg += "<polyline points='" + pts + "' fill='none' stroke='#1f77b4' stroke-width='1'/>\n";
        svg += "<circle cx='" + num(f.px(xs.front())) + "' cy='" + num(f.py(ys.front())) +
               "' r='3' fill='#2ca02c'/>\n";
        svg += "<circle cx='" + num(f.px(xs.back())) + "' cy='" + num(f.py(ys.back())) +
               "' r='3' fill='#d62728'/>\n";
        f.draw(svg, pairs[p][0] < 0 ? "t" : axis_label(pairs[p][0]), axis_label(pairs[p][1]));
    }
    svg += "</svg>\n";
    return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write_text_file: failed writing '" + path + "'");
}

}  // namespace latentflow
