#include "hlyl/parametric.hpp"

#include "hlyl/error.hpp"
#include "regression.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <vector>

namespace hlyl {

namespace {

struct WindowSample {
    AgeWindow effective;
    std::vector<double> ages;
    std::vector<double> log_m;
};

WindowSample collect(const MortalitySchedule &schedule, AgeWindow window, bool log_age) {
    if (window.lo > window.hi) {
        fail(ErrorCode::invalid_argument, fmt::format("empty window ({}, {})", window.lo, window.hi));
    }
    if (schedule.empty()) {
        fail(ErrorCode::invalid_argument, "empty schedule");
    }
    WindowSample s;
    s.effective = {std::max(window.lo, schedule[0].age_start),
                   std::min(window.hi, schedule.entries().back().age_start)};

    std::vector<int> nonpositive;
    for (const auto &e : schedule.entries()) {
        if (e.age_start < window.lo || e.age_start > window.hi) {
            continue;
        }
        if (!(e.m > 0.0)) {
            nonpositive.push_back(e.age_start);
            continue;
        }
        if (log_age && e.age_start == 0) {
            fail(ErrorCode::domain_error, "age 0 inside a Weibull fitting window");
        }
        s.ages.push_back(log_age ? std::log(static_cast<double>(e.age_start)) : e.age_start);
        s.log_m.push_back(std::log(e.m));
    }
    if (!nonpositive.empty()) {
        fail(ErrorCode::domain_error,
             fmt::format("non-positive m in fitting window at ages {}", fmt::join(nonpositive, ", ")));
    }
    if (s.ages.size() < 3) {
        fail(ErrorCode::invalid_argument,
             fmt::format("fitting window ({}, {}) holds {} rows; at least 3 required", window.lo, window.hi,
                         s.ages.size()));
    }
    return s;
}

} // namespace

GompertzParams fit_gompertz(const MortalitySchedule &schedule, AgeWindow window) {
    const auto s = collect(schedule, window, false);
    const auto line = detail::fit_line(s.ages, s.log_m);
    if (!(line.slope > 0.0)) {
        fail(ErrorCode::degenerate, fmt::format("Gompertz slope {} is not positive", line.slope));
    }
    return {std::exp(line.intercept), line.slope, s.effective, s.ages.size(), line.residual_se};
}

WeibullParams fit_weibull(const MortalitySchedule &schedule, AgeWindow window) {
    const auto s = collect(schedule, window, true);
    const auto line = detail::fit_line(s.ages, s.log_m);
    const double shape = line.slope + 1.0;
    if (!(shape > 0.0)) {
        fail(ErrorCode::degenerate, fmt::format("Weibull shape {} is not positive", shape));
    }
    // intercept = ln(shape) - shape * ln(scale)
    const double scale = std::exp((std::log(shape) - line.intercept) / shape);
    return {shape, scale, s.effective, s.ages.size(), line.residual_se};
}

double gompertz_hazard(const GompertzParams &p, double x) noexcept { return p.a * std::exp(p.b * x); }

double weibull_hazard(const WeibullParams &p, double x) noexcept {
    return (p.shape / p.scale) * std::pow(x / p.scale, p.shape - 1.0);
}

double parametric_fhm(const GompertzParams &p, double x) {
    if (!(x > 0.0)) {
        fail(ErrorCode::domain_error, fmt::format("parametric FHM needs x > 0, got {}", x));
    }
    if (p.b < 0.0) {
        fail(ErrorCode::domain_error, fmt::format("Gompertz b must be non-negative, got {}", p.b));
    }
    const double bx = p.b * x;
    if (bx == 0.0) {
        return 1.0;
    }
    // b x e^{bx} / (e^{bx} - 1) = bx / (1 - e^{-bx})
    return bx / -std::expm1(-bx);
}

double parametric_fhm(const WeibullParams &p, double x) {
    if (!(x > 0.0)) {
        fail(ErrorCode::domain_error, fmt::format("parametric FHM needs x > 0, got {}", x));
    }
    return p.shape;
}

double parametric_hlyl(const GompertzParams &p, double x_cap) { return parametric_fhm(p, x_cap); }

double parametric_hlyl(const WeibullParams &p, double x_cap) { return parametric_fhm(p, x_cap); }

} // namespace hlyl
