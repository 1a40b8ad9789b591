#pragma once

#include "hlyl/expenditure.hpp"
#include "hlyl/fhm.hpp"
#include "hlyl/lifetable.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hlyl {

enum class TableFormat {
    hmd_full,     // single-year ages, open terminal interval allowed
    hmd_abridged, // grouped ages ("0", "1-4", "5--9", ..., "110+")
    minimal_m,    // only Age and mx required
};

struct ParseOptions {
    /// Selects one year when the file holds several (HMD downloads do).
    std::optional<int> year;
};

using OptionalColumn = std::vector<std::optional<double>>;

/// A parsed life-table file: the schedule to build from plus whatever
/// published columns came with it.
struct TableSource {
    TableFormat format = TableFormat::minimal_m;
    MortalitySchedule schedule;
    std::optional<int> year;
    /// Present when lx, dx, Lx, Tx and ex are given on every row. Missing
    /// qx/ax cells are NaN.
    std::optional<LifeTable> reference;
    /// Numeric columns with unrecognized headers, in file order.
    std::vector<std::pair<std::string, OptionalColumn>> extra_columns;

    [[nodiscard]] const OptionalColumn *extra(std::string_view name) const noexcept;
};

/// minimal_m when there is no qx column, hmd_abridged when any age is a
/// range, hmd_full otherwise.
[[nodiscard]] TableFormat detect_table_format(std::string_view text);

/// Tab-, comma- or whitespace-separated text with a header row. Header
/// names match case-insensitively and ignore underscores, except that a
/// leading lowercase l means survivors (lx) and uppercase L person-years (Lx).
/// Lines before the header and lines starting with '#' are skipped.
/// ax is read in years, as HMD prints it, and stored as a fraction of the width.
[[nodiscard]] TableSource parse_life_table(std::string_view text, TableFormat format, const ParseOptions &options = {});
[[nodiscard]] TableSource parse_life_table(std::string_view text, const ParseOptions &options = {});

/// CSV with columns group, x_ref, mx, spend in any order and an optional
/// "# unit: <text>" line.
[[nodiscard]] ExpenditureSeries parse_expenditure(std::string_view text);

/// Columns: Year, Age, mx, qx, ax, lx, dx, Lx, Tx, ex, HLYL, HLE, cum_mx,
/// cum_qx, x_mx, x_qx. Printed precision: rates 5 decimals, ax 2, lx..Tx
/// integers, ex 2, HLYL 1, HLE 2.
[[nodiscard]] std::string write_extended_table(std::span<const ExtendedRow> rows, std::optional<int> year);

/// JSON document with the fit, per-group detail and the published reference
/// values.
[[nodiscard]] std::string write_fit_report(const ExpenditureFit &fit);

/// Reads back what `write_fit_report` produced.
[[nodiscard]] ExpenditureFit read_fit_report(std::string_view json_text);

struct BarChartData {
    std::string title;
    std::string unit;
    std::vector<std::string> labels;
    std::vector<double> data;
    std::vector<double> estimates;
};

[[nodiscard]] BarChartData chart_data(const ExpenditureFit &fit);

/// 960x540 SVG: data as bars, estimates as an overlaid polyline.
[[nodiscard]] std::string render_expenditure_chart(const BarChartData &chart);

/// 960x540 SVG: FHM polylines from m and from q against age.
[[nodiscard]] std::string render_fhm_chart(const FhmCurve &from_m, const FhmCurve &from_q, std::string_view title = {});

[[nodiscard]] std::string read_text_file(const std::filesystem::path &path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_text_file_atomic(const std::filesystem::path &path, std::string_view contents);

} // namespace hlyl
