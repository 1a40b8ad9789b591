#include "hlyl/lifetable.hpp"

#include "hlyl/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace hlyl {

MortalitySchedule::MortalitySchedule(std::vector<ScheduleEntry> entries, std::string label)
    : entries_{std::move(entries)}, label_{std::move(label)} {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto &e = entries_[i];
        if (e.age_start < 0) {
            fail(ErrorCode::invalid_argument, fmt::format("negative age {}", e.age_start));
        }
        if (e.is_open() && i + 1 != entries_.size()) {
            fail(ErrorCode::invalid_argument,
                 fmt::format("open interval at age {} is not the last entry", e.age_start));
        }
        if (e.width && *e.width <= 0) {
            fail(ErrorCode::invalid_argument,
                 fmt::format("non-positive width {} at age {}", *e.width, e.age_start));
        }
        if (!(e.m >= 0.0) || !std::isfinite(e.m)) {
            fail(ErrorCode::domain_error, fmt::format("invalid m = {} at age {}", e.m, e.age_start));
        }
        if (e.q && !(*e.q >= 0.0 && *e.q <= 1.0)) {
            fail(ErrorCode::domain_error, fmt::format("q = {} outside [0,1] at age {}", *e.q, e.age_start));
        }
        if (e.a && !(*e.a >= 0.0 && *e.a <= 1.0)) {
            fail(ErrorCode::domain_error, fmt::format("a = {} outside [0,1] at age {}", *e.a, e.age_start));
        }
        if (i > 0) {
            const auto &prev = entries_[i - 1];
            const int expected = prev.age_start + *prev.width;
            if (e.age_start != expected) {
                fail(ErrorCode::invalid_argument,
                     fmt::format("ages not contiguous: expected {} after {}, got {}", expected,
                                 prev.age_start, e.age_start));
            }
        }
    }
}

bool MortalitySchedule::has_q() const noexcept {
    return !entries_.empty() &&
           std::all_of(entries_.begin(), entries_.end(), [](const auto &e) { return e.q.has_value(); });
}

double q_from_m(double m, double a, IntervalWidth width, QConversion mode) {
    if (!(m >= 0.0)) {
        fail(ErrorCode::domain_error, fmt::format("negative death rate m = {}", m));
    }
    if (!(a >= 0.0 && a <= 1.0)) {
        fail(ErrorCode::domain_error, fmt::format("a = {} outside [0,1]", a));
    }
    if (!width) {
        return 1.0;
    }
    if (*width < 1) {
        fail(ErrorCode::domain_error, fmt::format("width {} < 1", *width));
    }
    const double n = *width;
    double q = 0.0;
    switch (mode) {
    case QConversion::identity:
        q = m * n;
        break;
    case QConversion::actuarial:
        q = n * m / (1.0 + n * (1.0 - a) * m);
        break;
    }
    return std::clamp(q, 0.0, 1.0);
}

double default_ax(int age_start) noexcept { return age_start == 0 ? 0.21 : 0.5; }

double LifeTable::e0() const {
    if (rows_.empty()) {
        fail(ErrorCode::invalid_argument, "empty life table has no e0");
    }
    return rows_.front().e;
}

LifeTable build_life_table(const MortalitySchedule &schedule, const BuildOptions &options) {
    if (schedule.empty()) {
        fail(ErrorCode::invalid_argument, "empty schedule");
    }
    if (!(options.radix > 0.0)) {
        fail(ErrorCode::invalid_argument, "radix must be positive");
    }

    const auto &entries = schedule.entries();
    const bool truncated = !entries.back().is_open() && options.tail_person_years.has_value();

    std::vector<LifeTableRow> rows;
    rows.reserve(entries.size());
    double l = options.radix;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto &e = entries[i];
        const bool terminal = i + 1 == entries.size() && !truncated;

        LifeTableRow row;
        row.age_start = e.age_start;
        row.width = e.width;
        row.m = e.m;
        row.a = e.a.value_or(default_ax(e.age_start));
        row.l = l;

        if (terminal) {
            if (!(e.m > 0.0)) {
                fail(ErrorCode::domain_error,
                     fmt::format("cannot close table: m = 0 on terminal row at age {}", e.age_start));
            }
            row.q = 1.0;
            row.d = l;
            row.L = l / e.m;
        } else {
            row.q = e.q ? *e.q : q_from_m(e.m, row.a, e.width, options.qconv);
            row.d = l * row.q;
            const double next = l - row.d;
            const double n = *e.width;
            row.L = n * next + row.a * n * row.d;
            l = next;
        }
        rows.push_back(row);
    }

    double above = truncated ? *options.tail_person_years : 0.0;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        above += it->L;
        it->T = above;
        it->e = it->l > 0.0 ? it->T / it->l : 0.0;
    }
    return LifeTable(std::move(rows), options.radix);
}

double max_telescoping_residual(const LifeTable &table) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        worst = std::max(worst, std::abs(table[i].T - table[i + 1].T - table[i].L));
    }
    return worst;
}

std::string_view column_name(LifeTableColumn column) noexcept {
    switch (column) {
    case LifeTableColumn::m: return "mx";
    case LifeTableColumn::q: return "qx";
    case LifeTableColumn::a: return "ax";
    case LifeTableColumn::l: return "lx";
    case LifeTableColumn::d: return "dx";
    case LifeTableColumn::L: return "Lx";
    case LifeTableColumn::T: return "Tx";
    case LifeTableColumn::e: return "ex";
    }
    return "?";
}

double column_value(const LifeTableRow &row, LifeTableColumn column) noexcept {
    switch (column) {
    case LifeTableColumn::m: return row.m;
    case LifeTableColumn::q: return row.q;
    case LifeTableColumn::a: return row.a;
    case LifeTableColumn::l: return row.l;
    case LifeTableColumn::d: return row.d;
    case LifeTableColumn::L: return row.L;
    case LifeTableColumn::T: return row.T;
    case LifeTableColumn::e: return row.e;
    }
    return 0.0;
}

std::vector<ColumnTolerance> default_tolerances() {
    return {{LifeTableColumn::l, 1.0}, {LifeTableColumn::d, 1.0}, {LifeTableColumn::L, 1.0},
            {LifeTableColumn::e, 0.01}};
}

const ColumnDeviation &ValidationReport::column(LifeTableColumn c) const {
    for (const auto &dev : columns) {
        if (dev.column == c) {
            return dev;
        }
    }
    fail(ErrorCode::invalid_argument, fmt::format("column {} not in report", column_name(c)));
}

ValidationReport validate_against(const LifeTable &reference, const LifeTable &computed,
                                  std::span<const ColumnTolerance> tolerances) {
    std::vector<int> mismatched;
    const std::size_t n = std::max(reference.size(), computed.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= reference.size()) {
            mismatched.push_back(computed[i].age_start);
        } else if (i >= computed.size() || reference[i].age_start != computed[i].age_start) {
            mismatched.push_back(reference[i].age_start);
        }
    }
    if (!mismatched.empty()) {
        fail(ErrorCode::age_mismatch, fmt::format("tables differ at ages {}", fmt::join(mismatched, ", ")));
    }

    ValidationReport report;
    for (const auto column : all_life_table_columns) {
        ColumnDeviation dev;
        dev.column = column;
        for (const auto &tol : tolerances) {
            if (tol.column == column) {
                dev.tolerance = tol.tolerance;
            }
        }
        for (std::size_t i = 0; i < reference.size(); ++i) {
            const double ref = column_value(reference[i], column);
            if (std::isnan(ref)) {
                continue;
            }
            const double got = column_value(computed[i], column);
            const double diff = std::abs(ref - got);
            if (diff > dev.max_abs_deviation) {
                dev.max_abs_deviation = diff;
                dev.age_at_max = reference[i].age_start;
            }
            if (dev.tolerance && diff > *dev.tolerance) {
                report.flagged.push_back({reference[i].age_start, column, ref, got});
            }
        }
        dev.pass = !dev.tolerance || dev.max_abs_deviation <= *dev.tolerance;
        report.columns.push_back(dev);
    }
    return report;
}

} // namespace hlyl
