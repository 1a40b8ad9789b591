#include "hlyl/data_io.hpp"
#include "hlyl/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace hlyl {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 80.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string escape(std::string_view s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string num(double v) {
    auto s = fmt::format("{:.2f}", v);
    if (s == "-0.00") {
        s = "0.00";
    }
    return s;
}

// Smallest of 1, 2, 2.5, 5, 10 times a power of ten that is >= x.
double nice_step(double x) {
    if (!(x > 0.0)) {
        return 1.0;
    }
    const double base = std::pow(10.0, std::floor(std::log10(x)));
    for (const double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (f * base >= x * (1.0 - 1e-12)) {
            return f * base;
        }
    }
    return 10.0 * base;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.2;
};

Axis value_axis(double max_value) {
    Axis a;
    a.step = nice_step(std::max(max_value, 1e-9) / 5.0);
    a.hi = std::max(a.step, std::ceil(max_value / a.step - 1e-9) * a.step);
    return a;
}

double y_pos(const Axis &a, double v) { return kTop + kPlotH * (1.0 - (v - a.lo) / (a.hi - a.lo)); }

std::string header(std::string_view title) {
    std::string out = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\">\n"
        "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
        kWidth, kHeight);
    if (!title.empty()) {
        out += fmt::format("<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                           "font-size=\"18\">{}</text>\n",
                           num(kWidth / 2), escape(title));
    }
    return out;
}

std::string y_axis(const Axis &a, std::string_view label) {
    std::string out;
    for (double v = a.lo; v <= a.hi + a.step * 1e-6; v += a.step) {
        const double y = y_pos(a, v);
        out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n", num(kLeft), num(y),
                           num(kLeft + kPlotW), num(y));
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" "
                           "font-size=\"12\">{}</text>\n",
                           num(kLeft - 8), num(y + 4), fmt::format("{:g}", v));
    }
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n", num(kLeft),
                       num(kTop), num(kTop + kPlotH));
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/>\n", num(kLeft),
                       num(kTop + kPlotH), num(kLeft + kPlotW));
    out += fmt::format("<text x=\"20\" y=\"{0}\" transform=\"rotate(-90 20 {0})\" text-anchor=\"middle\" "
                       "font-family=\"sans-serif\" font-size=\"13\">{1}</text>\n",
                       num(kTop + kPlotH / 2), escape(label));
    return out;
}

std::string legend(std::initializer_list<std::pair<std::string_view, std::string_view>> items) {
    std::string out;
    double y = kTop + 12;
    for (const auto &[colour, text] : items) {
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"10\" fill=\"{}\"/>\n", num(kLeft + 16),
                           num(y - 9), colour);
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                           num(kLeft + 36), num(y), escape(text));
        y += 18;
    }
    return out;
}

std::string polyline(const std::vector<std::pair<double, double>> &pts, std::string_view colour,
                     std::string_view css_class) {
    std::string points;
    for (const auto &[x, y] : pts) {
        if (!points.empty()) {
            points.push_back(' ');
        }
        points += num(x) + "," + num(y);
    }
    return fmt::format("<polyline class=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2.5\" points=\"{}\"/>\n",
                       css_class, colour, points);
}

} // namespace

BarChartData chart_data(const ExpenditureFit &fit) {
    BarChartData c;
    c.title = "Health expenditure per capita: data and estimates";
    c.unit = fit.currency_unit;
    c.labels = fit.labels;
    c.data = fit.data;
    c.estimates = fit.estimates;
    return c;
}

std::string render_expenditure_chart(const BarChartData &chart) {
    const std::size_t n = chart.data.size();
    if (n == 0 || chart.labels.size() != n || chart.estimates.size() != n) {
        fail(ErrorCode::invalid_argument, "chart needs matching, non-empty labels, data and estimates");
    }
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        peak = std::max({peak, chart.data[i], chart.estimates[i]});
    }
    const Axis axis = value_axis(peak);
    const double slot = kPlotW / static_cast<double>(n);
    const double bar_w = slot * 0.7;

    std::string out = header(chart.title);
    out += y_axis(axis, chart.unit.empty() ? "Expenditure per capita" : "Expenditure per capita (" + chart.unit + ")");

    std::vector<std::pair<double, double>> curve;
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
        const double top = y_pos(axis, chart.data[i]);
        out += fmt::format("<rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#d62728\"/>\n",
                           num(cx - bar_w / 2), num(top), num(bar_w), num(kTop + kPlotH - top));
        const double ly = kTop + kPlotH + 14;
        out += fmt::format("<text x=\"{0}\" y=\"{1}\" transform=\"rotate(45 {0} {1})\" font-family=\"sans-serif\" "
                           "font-size=\"11\">{2}</text>\n",
                           num(cx - 4), num(ly), escape(chart.labels[i]));
        curve.emplace_back(cx, y_pos(axis, chart.estimates[i]));
    }
    out += polyline(curve, "#17becf", "estimates");
    out += legend({{"#d62728", "Data"}, {"#17becf", "Estimates"}});
    out += "</svg>\n";
    return out;
}

std::string render_fhm_chart(const FhmCurve &from_m, const FhmCurve &from_q, std::string_view title) {
    if (from_m.empty() || from_q.empty()) {
        fail(ErrorCode::invalid_argument, "chart needs non-empty curves");
    }
    double peak = 0.0;
    int age_lo = from_m[0].age;
    int age_hi = from_m[0].age;
    for (const auto *c : {&from_m, &from_q}) {
        for (const auto &p : c->points()) {
            peak = std::max(peak, p.fhm);
            age_lo = std::min(age_lo, p.age);
            age_hi = std::max(age_hi, p.age);
        }
    }
    const Axis axis = value_axis(peak);
    const double span = std::max(1, age_hi - age_lo);
    const auto x_pos = [&](double age) { return kLeft + kPlotW * (age - age_lo) / span; };

    std::string out = header(title.empty() ? "Healthy life years lost: FHM by age" : title);
    out += y_axis(axis, "FHM (years)");

    const double age_step = nice_step(span / 10.0);
    for (double a = std::ceil(age_lo / age_step) * age_step; a <= age_hi + 1e-9; a += age_step) {
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                           "font-size=\"12\">{}</text>\n",
                           num(x_pos(a)), num(kTop + kPlotH + 18), fmt::format("{:g}", a));
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                       "font-size=\"13\">Age</text>\n",
                       num(kLeft + kPlotW / 2), num(kHeight - 24));

    const auto points = [&](const FhmCurve &c) {
        std::vector<std::pair<double, double>> pts;
        for (const auto &p : c.points()) {
            pts.emplace_back(x_pos(p.age), y_pos(axis, std::max(p.fhm, axis.lo)));
        }
        return pts;
    };
    out += polyline(points(from_m), "#1f77b4", "fhm-m");
    out += polyline(points(from_q), "#ff7f0e", "fhm-q");
    out += legend({{"#1f77b4", "FHM from mx"}, {"#ff7f0e", "FHM from qx"}});
    out += "</svg>\n";
    return out;
}

} // namespace hlyl
