#include "hlyl/fhm.hpp"

#include "hlyl/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace hlyl {

namespace {

struct RatePoint {
    int age;
    IntervalWidth width;
    double rate;
    bool searchable;
};

FhmCurve curve_from_rates(std::span<const RatePoint> rates, const FhmOptions &options) {
    if (!(options.lambda > 0.0)) {
        fail(ErrorCode::invalid_argument, fmt::format("lambda must be positive, got {}", options.lambda));
    }
    std::vector<FhmPoint> points;
    points.reserve(rates.size());
    double cum = 0.0;
    for (const auto &r : rates) {
        // The open interval has no width to weight by; count it once.
        const double weight = options.group_width_weighting && r.width ? *r.width : 1.0;
        cum += weight * r.rate;

        FhmPoint p;
        p.age = r.age;
        p.width = r.width;
        p.cum = cum;
        p.xm = r.age * r.rate;
        p.searchable = r.searchable;
        if (cum > 0.0) {
            p.fhm = options.lambda * p.xm / cum;
        } else if (p.xm > 0.0) {
            fail(ErrorCode::undefined_fraction,
                 fmt::format("cumulative rate is zero at age {} while x*rate is positive", r.age));
        }
        points.push_back(p);
    }
    return FhmCurve(options.source, options.lambda, options.group_width_weighting, std::move(points));
}

} // namespace

const FhmPoint &FhmCurve::at_age(int age) const {
    const auto it = std::find_if(points_.begin(), points_.end(), [age](const auto &p) { return p.age == age; });
    if (it == points_.end()) {
        fail(ErrorCode::age_mismatch, fmt::format("FHM curve has no point at age {}", age));
    }
    return *it;
}

FhmCurve fhm_curve(const MortalitySchedule &schedule, const FhmOptions &options) {
    std::vector<RatePoint> rates;
    rates.reserve(schedule.size());
    for (const auto &e : schedule.entries()) {
        double v = e.m;
        if (options.source == RateSource::from_q) {
            if (!e.q) {
                fail(ErrorCode::invalid_argument,
                     fmt::format("q missing at age {}; build a life table to derive it", e.age_start));
            }
            v = *e.q;
        }
        rates.push_back({e.age_start, e.width, v, !e.is_open()});
    }
    return curve_from_rates(rates, options);
}

FhmCurve fhm_curve(const LifeTable &table, const FhmOptions &options) {
    std::vector<RatePoint> rates;
    rates.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto &row = table[i];
        const bool closing = !row.width || (i + 1 == table.size() && row.q == 1.0);
        const double v = options.source == RateSource::from_q ? row.q : row.m;
        rates.push_back({row.age_start, row.width, v, !closing});
    }
    return curve_from_rates(rates, options);
}

FhmCurve fhm_star(FhmCurve curve) {
    auto points = curve.points();
    for (auto &p : points) {
        p.fhm -= 1.0;
    }
    return FhmCurve(curve.source(), curve.lambda(), curve.group_width_weighting(), std::move(points));
}

CurveMaximum hlyl_from_curve(const FhmCurve &curve) {
    if (curve.empty()) {
        fail(ErrorCode::invalid_argument, "empty FHM curve");
    }
    const bool any_searchable =
        std::any_of(curve.points().begin(), curve.points().end(), [](const auto &p) { return p.searchable; });

    const FhmPoint *best = nullptr;
    for (const auto &p : curve.points()) {
        if (any_searchable && !p.searchable) {
            continue;
        }
        // Relative slack keeps rounding noise on a flat curve from moving the
        // argmax away from the first age.
        if (best == nullptr || p.fhm > best->fhm + 1e-12 * std::abs(best->fhm)) {
            best = &p;
        }
    }
    return {best->fhm, best->age};
}

HealthyLifeExpectancy hle_at_birth(double e0, double hlyl) {
    if (!(e0 > 0.0)) {
        fail(ErrorCode::invalid_argument, fmt::format("e0 must be positive, got {}", e0));
    }
    return {e0 - hlyl, hlyl > e0};
}

double hlyl_at_age(double hlyl0, double x_max, double age) {
    if (!(hlyl0 >= 0.0)) {
        fail(ErrorCode::invalid_argument, fmt::format("hlyl0 must be non-negative, got {}", hlyl0));
    }
    if (!(x_max > 0.0)) {
        fail(ErrorCode::invalid_argument, fmt::format("x_max must be positive, got {}", x_max));
    }
    if (age >= x_max) {
        return 0.0;
    }
    const double r = age / x_max;
    return hlyl0 * std::max(0.0, 1.0 - r * r);
}

std::vector<HlylAtAge> hlyl_schedule(double hlyl0, double x_max, std::span<const double> ages) {
    std::vector<HlylAtAge> out;
    out.reserve(ages.size());
    for (const double x : ages) {
        out.push_back({x, hlyl_at_age(hlyl0, x_max, x)});
    }
    return out;
}

HlylSummary summarize_hlyl(double e0, CurveMaximum from_m, CurveMaximum from_q, std::optional<double> gompertz,
                           std::optional<double> weibull) {
    HlylSummary s;
    s.hlyl_from_m = from_m.hlyl;
    s.hlyl_from_q = from_q.hlyl;
    s.hlyl_gompertz = gompertz;
    s.hlyl_weibull = weibull;
    double total = from_m.hlyl + from_q.hlyl;
    int count = 2;
    for (const auto &v : {gompertz, weibull}) {
        if (v) {
            total += *v;
            ++count;
        }
    }
    s.hlyl_average = total / count;
    s.x_max = from_m.x_max;
    s.e0 = e0;
    const auto hle = hle_at_birth(e0, s.hlyl_average);
    s.hle0 = hle.years;
    s.hle_warning = hle.hlyl_exceeds_e0;
    return s;
}

std::vector<ExtendedRow> extended_table(const LifeTable &table, const FhmCurve &curve_m, const FhmCurve &curve_q,
                                        const HlylSummary &summary) {
    std::vector<ExtendedRow> rows;
    rows.reserve(table.size());
    for (const auto &base : table.rows()) {
        const auto &pm = curve_m.at_age(base.age_start);
        const auto &pq = curve_q.at_age(base.age_start);
        ExtendedRow row;
        row.base = base;
        row.hlyl = hlyl_at_age(summary.hlyl_average, summary.x_max, base.age_start);
        row.hle = base.e - row.hlyl;
        row.cum_m = pm.cum;
        row.cum_q = pq.cum;
        row.xm_m = pm.xm;
        row.xm_q = pq.xm;
        rows.push_back(row);
    }
    return rows;
}

} // namespace hlyl
