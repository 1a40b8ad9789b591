#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hlyl {

/// Interval width in whole years. An empty value marks the open terminal
/// interval ("110+", "100+").
using IntervalWidth = std::optional<int>;
inline constexpr IntervalWidth open_interval = std::nullopt;

struct ScheduleEntry {
    int age_start = 0;
    IntervalWidth width = 1;
    double m = 0.0;              // central death rate per person-year
    std::optional<double> q;     // probability of dying in the interval
    std::optional<double> a;     // fraction of the interval lived by those dying

    [[nodiscard]] bool is_open() const noexcept { return !width.has_value(); }
};

/// Ordered, contiguous age intervals with their mortality rates.
///
/// The constructor enforces the structural invariants: ages strictly
/// increasing and contiguous, positive widths, only the last interval open,
/// m >= 0, q and a in [0, 1]. An empty schedule is representable but cannot
/// be turned into a life table.
class MortalitySchedule {
public:
    MortalitySchedule() = default;
    explicit MortalitySchedule(std::vector<ScheduleEntry> entries, std::string label = {});

    [[nodiscard]] const std::vector<ScheduleEntry> &entries() const noexcept { return entries_; }
    [[nodiscard]] const ScheduleEntry &operator[](std::size_t i) const { return entries_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const std::string &label() const noexcept { return label_; }

    /// True when every entry carries an explicit q.
    [[nodiscard]] bool has_q() const noexcept;

private:
    std::vector<ScheduleEntry> entries_;
    std::string label_;
};

enum class QConversion { actuarial, identity };

/// Converts a central death rate into a probability of dying in the interval.
/// identity: min(m * width, 1); actuarial: n*m / (1 + n*(1 - a)*m). The open
/// interval always yields 1.
[[nodiscard]] double q_from_m(double m, double a, IntervalWidth width,
                              QConversion mode = QConversion::actuarial);

/// HMD convention: 0.21 for the interval starting at age 0, 0.5 elsewhere.
[[nodiscard]] double default_ax(int age_start) noexcept;

struct LifeTableRow {
    int age_start = 0;
    IntervalWidth width = 1;
    double m = 0.0;
    double q = 0.0;
    double a = 0.0;
    double l = 0.0; // survivors at exact age
    double d = 0.0; // deaths in interval
    double L = 0.0; // person-years lived in interval
    double T = 0.0; // person-years lived above age
    double e = 0.0; // expectation of life at age
};

class LifeTable {
public:
    LifeTable() = default;
    LifeTable(std::vector<LifeTableRow> rows, double radix) : rows_{std::move(rows)}, radix_{radix} {}

    [[nodiscard]] const std::vector<LifeTableRow> &rows() const noexcept { return rows_; }
    [[nodiscard]] const LifeTableRow &operator[](std::size_t i) const { return rows_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }
    [[nodiscard]] double radix() const noexcept { return radix_; }
    [[nodiscard]] double e0() const;

private:
    std::vector<LifeTableRow> rows_;
    double radix_ = 100000.0;
};

struct BuildOptions {
    double radix = 100000.0;
    QConversion qconv = QConversion::actuarial;
    /// Person-years lived above the last row. Only meaningful when the last
    /// interval is closed: the schedule is then treated as an excerpt of a
    /// longer table rather than closed at its final row.
    std::optional<double> tail_person_years;
};

/// Builds every life-table column from a schedule. Explicit q values are
/// used verbatim; otherwise q is derived with `options.qconv`. Missing a
/// values take `default_ax`. No rounding is applied.
[[nodiscard]] LifeTable build_life_table(const MortalitySchedule &schedule,
                                         const BuildOptions &options = {});

/// Largest |T[i] - T[i+1] - L[i]| over non-terminal rows.
[[nodiscard]] double max_telescoping_residual(const LifeTable &table);

enum class LifeTableColumn { m, q, a, l, d, L, T, e };

inline constexpr LifeTableColumn all_life_table_columns[] = {
    LifeTableColumn::m, LifeTableColumn::q, LifeTableColumn::a, LifeTableColumn::l,
    LifeTableColumn::d, LifeTableColumn::L, LifeTableColumn::T, LifeTableColumn::e};

[[nodiscard]] std::string_view column_name(LifeTableColumn column) noexcept;
[[nodiscard]] double column_value(const LifeTableRow &row, LifeTableColumn column) noexcept;

struct ColumnTolerance {
    LifeTableColumn column;
    double tolerance;
};

/// l, d, L within one person; e within 0.01 years.
[[nodiscard]] std::vector<ColumnTolerance> default_tolerances();

struct ColumnDeviation {
    LifeTableColumn column;
    double max_abs_deviation = 0.0;
    int age_at_max = 0;
    std::optional<double> tolerance; // unchecked when empty
    bool pass = true;
};

struct FlaggedCell {
    int age;
    LifeTableColumn column;
    double reference;
    double computed;
};

struct ValidationReport {
    std::vector<ColumnDeviation> columns;
    std::vector<FlaggedCell> flagged;

    [[nodiscard]] bool pass() const noexcept { return flagged.empty(); }
    [[nodiscard]] const ColumnDeviation &column(LifeTableColumn c) const;
};

/// Compares two tables row by row. Reference cells holding NaN are skipped.
/// Throws age_mismatch when the two tables do not cover the same ages.
[[nodiscard]] ValidationReport validate_against(const LifeTable &reference, const LifeTable &computed,
                                                std::span<const ColumnTolerance> tolerances);

} // namespace hlyl
