#include "regression.hpp"

#include "hlyl/error.hpp"

#include <cmath>

namespace hlyl::detail {

Line fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) {
        fail(ErrorCode::invalid_argument, "line fit needs two or more paired points");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    // Centered sums keep the fit accurate when x sits far from zero.
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mean_x) * (x[i] - mean_x);
        sxy += (x[i] - mean_x) * (y[i] - mean_y);
    }
    if (!(sxx > 0.0)) {
        fail(ErrorCode::degenerate, "line fit needs distinct x values");
    }

    Line line;
    line.slope = sxy / sxx;
    line.intercept = mean_y - line.slope * mean_x;
    if (n > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - line.intercept - line.slope * x[i];
            sse += r * r;
        }
        line.residual_se = std::sqrt(sse / static_cast<double>(n - 2));
    }
    return line;
}

} // namespace hlyl::detail
