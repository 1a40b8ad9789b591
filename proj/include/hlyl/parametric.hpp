#pragma once

#include "hlyl/lifetable.hpp"

#include <cstddef>

namespace hlyl {

/// Inclusive age range used for fitting.
struct AgeWindow {
    int lo = 35;
    int hi = 90;
};

/// mu(x) = a * exp(b * x)
struct GompertzParams {
    double a = 0.0;
    double b = 0.0;
    AgeWindow window;             // effective window after clipping to the schedule
    std::size_t points = 0;
    double residual_se = 0.0;     // of ln m around the fitted line
};

/// mu(x) = (shape / scale) * (x / scale)^(shape - 1)
struct WeibullParams {
    double shape = 0.0;
    double scale = 0.0;
    AgeWindow window;
    std::size_t points = 0;
    double residual_se = 0.0;
};

/// Ordinary least squares of ln m on age over the rows whose age_start lies
/// in the window (clipped to the schedule). Needs at least three rows, all
/// with m > 0, and a positive fitted slope.
[[nodiscard]] GompertzParams fit_gompertz(const MortalitySchedule &schedule, AgeWindow window = {});

/// Ordinary least squares of ln m on ln age. Ages in the window must be > 0.
[[nodiscard]] WeibullParams fit_weibull(const MortalitySchedule &schedule, AgeWindow window = {});

[[nodiscard]] double gompertz_hazard(const GompertzParams &p, double x) noexcept;
[[nodiscard]] double weibull_hazard(const WeibullParams &p, double x) noexcept;

/// x * mu(x) / H(x) with the exact cumulative hazard:
/// Gompertz gives b x e^{bx} / (e^{bx} - 1), Weibull gives its shape.
[[nodiscard]] double parametric_fhm(const GompertzParams &p, double x);
[[nodiscard]] double parametric_fhm(const WeibullParams &p, double x);

/// Gompertz fractions grow without bound, so the estimate is read at
/// `x_cap` (normally the age where the empirical curve peaks).
[[nodiscard]] double parametric_hlyl(const GompertzParams &p, double x_cap);
[[nodiscard]] double parametric_hlyl(const WeibullParams &p, double x_cap);

inline constexpr double default_gompertz_cap_age = 97.0;

} // namespace hlyl
