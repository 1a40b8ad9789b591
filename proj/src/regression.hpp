#pragma once

#include <span>

namespace hlyl::detail {

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
    double residual_se = 0.0; // sqrt(SSE / (n - 2)), 0 when n == 2
};

/// Closed-form simple linear regression y = intercept + slope * x.
/// Requires at least two points with distinct x.
Line fit_line(std::span<const double> x, std::span<const double> y);

} // namespace hlyl::detail
