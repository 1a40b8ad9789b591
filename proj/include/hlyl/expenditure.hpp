#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hlyl {

struct ExpenditureGroup {
    std::string label; // "0--4", "15-19", "100+"
    double x_ref = 0.0; // representative age of the group
    double m = 0.0;     // group central death rate
    double spend = 0.0; // per-capita expenditure
};

/// Age-grouped per-capita spending with group death rates. Requires at
/// least three groups, unique parseable labels, spend >= 0, m >= 0 and
/// non-decreasing x_ref.
class ExpenditureSeries {
public:
    explicit ExpenditureSeries(std::vector<ExpenditureGroup> groups, std::string currency_unit = {});

    [[nodiscard]] const std::vector<ExpenditureGroup> &groups() const noexcept { return groups_; }
    [[nodiscard]] std::size_t size() const noexcept { return groups_.size(); }
    [[nodiscard]] const std::string &currency_unit() const noexcept { return currency_unit_; }

    [[nodiscard]] std::vector<double> spend() const;
    [[nodiscard]] std::vector<double> rates() const;
    [[nodiscard]] std::vector<double> x_ref() const;

private:
    std::vector<ExpenditureGroup> groups_;
    std::string currency_unit_;
};

/// Seed rate for the first group: (s_0 - min s) / (sum s - n * min s).
[[nodiscard]] double seed_mx_star(std::span<const double> spend);

struct Features {
    std::vector<double> m_star; // rates with the first one replaced by the seed
    std::vector<double> cum;    // running sum of m_star
    std::vector<double> f;      // (x + 2) m*_i / cum_i, first entry = multiplier
};

[[nodiscard]] Features feature_vector(std::span<const double> x_ref, std::span<const double> rates, double mx_star,
                                      double first_group_multiplier = 5.0);

/// Least-squares slope through the fixed intercept `move_up`:
/// sum f_i (s_i - u) / sum f_i^2.
[[nodiscard]] double fit_k(std::span<const double> f, std::span<const double> spend, double move_up);

[[nodiscard]] std::vector<double> predict(std::span<const double> f, double k, double move_up);

enum class SeDivisor { n, n_minus_p };

struct FitStats {
    std::vector<double> residuals;
    double sse = 0.0;
    double se = 0.0;
    std::optional<double> r2_standard; // empty when the data have zero variance
    double sum_estimates = 0.0;
    double sum_data = 0.0;
    double moveup_fraction = 0.0;
};

/// `parameters` is only used by SeDivisor::n_minus_p.
[[nodiscard]] FitStats fit_stats(std::span<const double> estimates, std::span<const double> data, double move_up,
                                 SeDivisor divisor = SeDivisor::n, std::size_t parameters = 1);

struct ExpenditureOptions {
    std::optional<double> move_up;  // defaults to min(spend)
    std::optional<double> fixed_k;  // skips the least-squares step
    double first_group_multiplier = 5.0;
    SeDivisor se_divisor = SeDivisor::n;
};

enum class KSource { fitted, fixed };

struct ExpenditureFit {
    std::vector<std::string> labels;
    std::vector<double> x_ref;
    std::vector<double> data;
    std::string currency_unit;

    double mx_star = 0.0;
    double move_up = 0.0;
    bool move_up_auto = true;
    double first_group_multiplier = 5.0;
    double k = 0.0;
    KSource k_source = KSource::fitted;
    SeDivisor se_divisor = SeDivisor::n;

    Features features;
    std::vector<double> estimates;
    FitStats stats;
};

/// seed -> features -> move-up -> k -> estimates -> statistics.
[[nodiscard]] ExpenditureFit fit_pipeline(const ExpenditureSeries &series, const ExpenditureOptions &options = {});

/// Figures printed alongside the Japan 2011 fit, kept for comparison in
/// reports.
namespace published {
inline constexpr double k_table = 28.657;
inline constexpr double k_text = 28.723;
inline constexpr double r2 = 0.943;
inline constexpr double sse = 13164.0;
inline constexpr double se = 25.04;
inline constexpr double mx_star = 0.01989;
} // namespace published

} // namespace hlyl
