#include "hlyl/expenditure.hpp"

#include "hlyl/age_token.hpp"
#include "hlyl/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <set>

namespace hlyl {

ExpenditureSeries::ExpenditureSeries(std::vector<ExpenditureGroup> groups, std::string currency_unit)
    : groups_{std::move(groups)}, currency_unit_{std::move(currency_unit)} {
    if (groups_.size() < 3) {
        fail(ErrorCode::invalid_argument,
             fmt::format("expenditure series needs at least 3 groups, got {}", groups_.size()));
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        const auto &g = groups_[i];
        (void)parse_age_token(g.label);
        if (!seen.insert(g.label).second) {
            fail(ErrorCode::invalid_argument, fmt::format("duplicate group label '{}'", g.label));
        }
        if (!(g.spend >= 0.0)) {
            fail(ErrorCode::domain_error, fmt::format("negative spend {} in group '{}'", g.spend, g.label));
        }
        if (!(g.m >= 0.0)) {
            fail(ErrorCode::domain_error, fmt::format("negative rate {} in group '{}'", g.m, g.label));
        }
        if (i > 0 && g.x_ref < groups_[i - 1].x_ref) {
            fail(ErrorCode::invalid_argument, fmt::format("x_ref decreases at group '{}'", g.label));
        }
    }
}

std::vector<double> ExpenditureSeries::spend() const {
    std::vector<double> out;
    out.reserve(groups_.size());
    for (const auto &g : groups_) {
        out.push_back(g.spend);
    }
    return out;
}

std::vector<double> ExpenditureSeries::rates() const {
    std::vector<double> out;
    out.reserve(groups_.size());
    for (const auto &g : groups_) {
        out.push_back(g.m);
    }
    return out;
}

std::vector<double> ExpenditureSeries::x_ref() const {
    std::vector<double> out;
    out.reserve(groups_.size());
    for (const auto &g : groups_) {
        out.push_back(g.x_ref);
    }
    return out;
}

double seed_mx_star(std::span<const double> spend) {
    if (spend.size() < 2) {
        fail(ErrorCode::invalid_argument, "seed rate needs at least 2 groups");
    }
    const double lowest = *std::min_element(spend.begin(), spend.end());
    const double total = std::accumulate(spend.begin(), spend.end(), 0.0);
    const double denom = total - static_cast<double>(spend.size()) * lowest;
    if (!(denom > 0.0)) {
        fail(ErrorCode::degenerate, "seed rate undefined: all spend values are equal");
    }
    return (spend.front() - lowest) / denom;
}

Features feature_vector(std::span<const double> x_ref, std::span<const double> rates, double mx_star,
                        double first_group_multiplier) {
    if (x_ref.size() != rates.size() || rates.empty()) {
        fail(ErrorCode::invalid_argument, "x_ref and rates must be non-empty and of equal length");
    }
    if (!(mx_star > 0.0)) {
        fail(ErrorCode::domain_error, fmt::format("seed rate must be positive, got {}", mx_star));
    }
    Features out;
    const std::size_t n = rates.size();
    out.m_star.assign(rates.begin(), rates.end());
    out.m_star[0] = mx_star;
    out.cum.resize(n);
    out.f.resize(n);
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(out.m_star[i] >= 0.0)) {
            fail(ErrorCode::domain_error, fmt::format("negative rate at group {}", i));
        }
        cum += out.m_star[i];
        out.cum[i] = cum;
        // cum > 0 from here on because the seed is positive.
        out.f[i] = i == 0 ? first_group_multiplier : (x_ref[i] + 2.0) * out.m_star[i] / cum;
    }
    return out;
}

double fit_k(std::span<const double> f, std::span<const double> spend, double move_up) {
    if (f.size() != spend.size() || f.empty()) {
        fail(ErrorCode::invalid_argument, "features and spend must be non-empty and of equal length");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += f[i] * (spend[i] - move_up);
        den += f[i] * f[i];
    }
    if (!(den > 0.0)) {
        fail(ErrorCode::degenerate, "all features are zero; k is undetermined");
    }
    return num / den;
}

std::vector<double> predict(std::span<const double> f, double k, double move_up) {
    std::vector<double> out;
    out.reserve(f.size());
    for (const double v : f) {
        out.push_back(move_up + k * v);
    }
    return out;
}

FitStats fit_stats(std::span<const double> estimates, std::span<const double> data, double move_up,
                   SeDivisor divisor, std::size_t parameters) {
    if (estimates.size() != data.size() || data.empty()) {
        fail(ErrorCode::invalid_argument, "estimates and data must be non-empty and of equal length");
    }
    const std::size_t n = data.size();
    FitStats s;
    s.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.residuals[i] = data[i] - estimates[i];
        s.sse += s.residuals[i] * s.residuals[i];
    }
    double dof = static_cast<double>(n);
    if (divisor == SeDivisor::n_minus_p) {
        if (parameters >= n) {
            fail(ErrorCode::invalid_argument, "no residual degrees of freedom");
        }
        dof = static_cast<double>(n - parameters);
    }
    s.se = std::sqrt(s.sse / dof);

    s.sum_estimates = std::accumulate(estimates.begin(), estimates.end(), 0.0);
    s.sum_data = std::accumulate(data.begin(), data.end(), 0.0);
    const double mean = s.sum_data / static_cast<double>(n);
    double sst = 0.0;
    for (const double v : data) {
        sst += (v - mean) * (v - mean);
    }
    if (sst > 0.0) {
        s.r2_standard = 1.0 - s.sse / sst;
    }
    const double peak = *std::max_element(data.begin(), data.end());
    s.moveup_fraction = peak > 0.0 ? move_up / peak : 0.0;
    return s;
}

ExpenditureFit fit_pipeline(const ExpenditureSeries &series, const ExpenditureOptions &options) {
    const auto spend = series.spend();

    ExpenditureFit fit;
    for (const auto &g : series.groups()) {
        fit.labels.push_back(g.label);
    }
    fit.x_ref = series.x_ref();
    fit.data = spend;
    fit.currency_unit = series.currency_unit();
    fit.first_group_multiplier = options.first_group_multiplier;
    fit.se_divisor = options.se_divisor;

    fit.mx_star = seed_mx_star(spend);
    fit.features = feature_vector(fit.x_ref, series.rates(), fit.mx_star, options.first_group_multiplier);

    fit.move_up_auto = !options.move_up.has_value();
    fit.move_up = options.move_up.value_or(*std::min_element(spend.begin(), spend.end()));

    if (options.fixed_k) {
        fit.k = *options.fixed_k;
        fit.k_source = KSource::fixed;
    } else {
        fit.k = fit_k(fit.features.f, spend, fit.move_up);
        fit.k_source = KSource::fitted;
    }

    fit.estimates = predict(fit.features.f, fit.k, fit.move_up);
    fit.stats = fit_stats(fit.estimates, spend, fit.move_up, options.se_divisor, 1);
    return fit;
}

} // namespace hlyl
