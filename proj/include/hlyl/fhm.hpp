#pragma once

#include "hlyl/lifetable.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hlyl {

enum class RateSource { from_m, from_q };

struct FhmOptions {
    RateSource source = RateSource::from_m;
    double lambda = 1.0;
    /// Weight each rate by its interval width in the cumulative sum
    /// (abridged tables).
    bool group_width_weighting = false;
};

struct FhmPoint {
    int age = 0;
    IntervalWidth width = 1;
    double cum = 0.0; // cumulative (optionally width-weighted) rate through this row
    double xm = 0.0;  // age * rate
    double fhm = 0.0; // lambda * xm / cum
    /// False for the interval that closes the table (open "110+" or a forced
    /// q = 1 row). Such rows stay in the curve but never define its maximum.
    bool searchable = true;
};

/// Health/mortality fraction per age: lambda * x * v_x / sum_{t <= x} v_t,
/// where v is m or q and the sum starts at the first row of the schedule.
class FhmCurve {
public:
    FhmCurve() = default;
    FhmCurve(RateSource source, double lambda, bool weighted, std::vector<FhmPoint> points)
        : source_{source}, lambda_{lambda}, weighted_{weighted}, points_{std::move(points)} {}

    [[nodiscard]] RateSource source() const noexcept { return source_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] bool group_width_weighting() const noexcept { return weighted_; }
    [[nodiscard]] const std::vector<FhmPoint> &points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] const FhmPoint &operator[](std::size_t i) const { return points_[i]; }

    /// Point at `age`; throws age_mismatch if the curve does not cover it.
    [[nodiscard]] const FhmPoint &at_age(int age) const;

private:
    RateSource source_ = RateSource::from_m;
    double lambda_ = 1.0;
    bool weighted_ = false;
    std::vector<FhmPoint> points_;
};

/// From a schedule. `from_q` requires q on every entry.
[[nodiscard]] FhmCurve fhm_curve(const MortalitySchedule &schedule, const FhmOptions &options = {});

/// From the m and q columns of a built table.
[[nodiscard]] FhmCurve fhm_curve(const LifeTable &table, const FhmOptions &options = {});

/// FHM* = FHM - 1, the survival-space over mortality-space ratio.
[[nodiscard]] FhmCurve fhm_star(FhmCurve curve);

struct CurveMaximum {
    double hlyl = 0.0;
    int x_max = 0;
};

/// Maximum of the curve; ties go to the smallest age.
[[nodiscard]] CurveMaximum hlyl_from_curve(const FhmCurve &curve);

struct HealthyLifeExpectancy {
    double years = 0.0;
    bool hlyl_exceeds_e0 = false;
};

[[nodiscard]] HealthyLifeExpectancy hle_at_birth(double e0, double hlyl);

/// hlyl0 * max(0, 1 - (age / x_max)^2).
[[nodiscard]] double hlyl_at_age(double hlyl0, double x_max, double age);

struct HlylAtAge {
    double age;
    double hlyl;
};

[[nodiscard]] std::vector<HlylAtAge> hlyl_schedule(double hlyl0, double x_max, std::span<const double> ages);

struct HlylSummary {
    double hlyl_from_m = 0.0;
    double hlyl_from_q = 0.0;
    std::optional<double> hlyl_gompertz;
    std::optional<double> hlyl_weibull;
    double hlyl_average = 0.0;
    int x_max = 0;
    double e0 = 0.0;
    double hle0 = 0.0;
    bool hle_warning = false;
};

/// Averages the available estimates and derives HLE at birth. `x_max` is
/// taken from the m-based curve.
[[nodiscard]] HlylSummary summarize_hlyl(double e0, CurveMaximum from_m, CurveMaximum from_q,
                                         std::optional<double> gompertz = std::nullopt,
                                         std::optional<double> weibull = std::nullopt);

struct ExtendedRow {
    LifeTableRow base;
    double hlyl = 0.0;
    double hle = 0.0;
    double cum_m = 0.0;
    double cum_q = 0.0;
    double xm_m = 0.0;
    double xm_q = 0.0;
};

/// Life table plus per-age HLYL/HLE and the auxiliary FHM columns of both
/// curves. Every table age must be present in both curves.
[[nodiscard]] std::vector<ExtendedRow> extended_table(const LifeTable &table, const FhmCurve &curve_m,
                                                      const FhmCurve &curve_q, const HlylSummary &summary);

} // namespace hlyl
