#include "hlyl/analysis.hpp"

#include "hlyl/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace hlyl {

namespace {

std::optional<double> reference_tail(const TableSource &source, const LifeTable &built) {
    if (!source.reference || source.reference->size() != built.size()) {
        return std::nullopt;
    }
    const auto &last = source.reference->rows().back();
    const double tail = last.T - last.L;
    if (!std::isfinite(tail) || tail <= 0.0) {
        return std::nullopt;
    }
    // Published values are in the reference radix.
    return tail * built.radix() / source.reference->radix();
}

} // namespace

LifeTableAnalysis analyze_life_table(const TableSource &source, const AnalysisOptions &options) {
    LifeTableAnalysis out;
    out.schedule = source.schedule;
    out.year = source.year;
    if (out.schedule.empty()) {
        fail(ErrorCode::invalid_argument, "empty schedule");
    }

    BuildOptions build = options.build;
    out.table = build_life_table(out.schedule, build);
    const auto &last = out.schedule.entries().back();
    if (!last.is_open() && !build.tail_person_years && options.seed_tail_from_reference) {
        if (const auto tail = reference_tail(source, out.table)) {
            build.tail_person_years = tail;
            out.table = build_life_table(out.schedule, build);
            out.notes.push_back(fmt::format(
                "table ends at age {} without closing; person-years above it taken from the published Tx ({:.0f})",
                last.age_start, *tail));
        }
    }

    const bool grouped = std::any_of(out.schedule.entries().begin(), out.schedule.entries().end(),
                                     [](const ScheduleEntry &e) { return e.width && *e.width > 1; });
    FhmOptions fo;
    fo.lambda = options.lambda;
    fo.group_width_weighting = options.group_width_weighting.value_or(grouped);
    fo.source = RateSource::from_m;
    out.curve_m = fhm_curve(out.table, fo);
    fo.source = RateSource::from_q;
    out.curve_q = fhm_curve(out.table, fo);

    const auto max_m = hlyl_from_curve(out.curve_m);
    const auto max_q = hlyl_from_curve(out.curve_q);
    const int cap_age = options.x_max.value_or(max_m.x_max);

    std::optional<double> g_hlyl;
    std::optional<double> w_hlyl;
    if (options.gompertz) {
        try {
            out.gompertz = fit_gompertz(out.schedule, options.gompertz_window);
            g_hlyl = options.lambda * parametric_hlyl(*out.gompertz, cap_age);
        } catch (const Error &e) {
            out.notes.push_back(fmt::format("Gompertz fit skipped: {}", e.what()));
        }
    }
    if (options.weibull) {
        try {
            out.weibull = fit_weibull(out.schedule, options.weibull_window);
            w_hlyl = options.lambda * parametric_hlyl(*out.weibull, cap_age);
        } catch (const Error &e) {
            out.notes.push_back(fmt::format("Weibull fit skipped: {}", e.what()));
        }
    }

    out.summary = summarize_hlyl(out.table.e0(), max_m, max_q, g_hlyl, w_hlyl);
    out.headline_hlyl = options.headline_hlyl.value_or(out.summary.hlyl_average);
    out.schedule_x_max = cap_age;
    const auto hle = hle_at_birth(out.summary.e0, out.headline_hlyl);
    out.hle0 = hle.years;
    if (hle.hlyl_exceeds_e0) {
        out.notes.push_back(fmt::format("HLYL {:.2f} exceeds e0 {:.2f}", out.headline_hlyl, out.summary.e0));
    }

    HlylSummary schedule_summary = out.summary;
    schedule_summary.hlyl_average = out.headline_hlyl;
    schedule_summary.x_max = cap_age;
    out.rows = extended_table(out.table, out.curve_m, out.curve_q, schedule_summary);
    return out;
}

} // namespace hlyl
