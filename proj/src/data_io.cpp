#include "hlyl/data_io.hpp"

#include "hlyl/age_token.hpp"
#include "hlyl/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace hlyl {

namespace {

enum class Field { year, age, mx, qx, ax, lx, dx, Lx, Tx, ex, other };

struct Line {
    std::size_t number; // 1-based
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty()) {
        ++number;
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back({number, line});
        if (nl == std::string_view::npos) {
            break;
        }
        text.remove_prefix(nl + 1);
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

bool is_comment(std::string_view s) {
    const auto t = trim(s);
    return !t.empty() && t.front() == '#';
}

enum class Delimiter { comma, tab, whitespace };

Delimiter detect_delimiter(std::string_view header) {
    if (header.find(',') != std::string_view::npos) {
        return Delimiter::comma;
    }
    if (header.find('\t') != std::string_view::npos) {
        return Delimiter::tab;
    }
    return Delimiter::whitespace;
}

std::vector<std::string_view> split_fields(std::string_view line, Delimiter delim) {
    std::vector<std::string_view> out;
    if (delim == Delimiter::whitespace) {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
                ++i;
            }
            const std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
                ++i;
            }
            if (i > start) {
                out.push_back(line.substr(start, i - start));
            }
        }
        return out;
    }
    const char sep = delim == Delimiter::comma ? ',' : '\t';
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

std::string normalize(std::string_view name) {
    std::string out;
    for (const char c : trim(name)) {
        if (c != '_') {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

Field classify(std::string_view raw) {
    const auto name = normalize(raw);
    const auto t = trim(raw);
    if (name == "year") return Field::year;
    if (name == "age") return Field::age;
    if (name == "mx") return Field::mx;
    if (name == "qx") return Field::qx;
    if (name == "ax") return Field::ax;
    if (name == "lx") return t.front() == 'L' ? Field::Lx : Field::lx;
    if (name == "dx") return Field::dx;
    if (name == "tx") return Field::Tx;
    if (name == "ex") return Field::ex;
    return Field::other;
}

std::optional<double> parse_number(std::string_view cell, std::size_t line_no, std::string_view column) {
    cell = trim(cell);
    if (cell.empty() || cell == ".") {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto *end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        fail(ErrorCode::parse_error,
             fmt::format("line {}: cannot parse '{}' in column {} as a number", line_no, cell, column));
    }
    return value;
}

struct HeaderLayout {
    std::size_t line_index = 0;
    Delimiter delim = Delimiter::tab;
    std::vector<std::string> names;
    std::vector<Field> fields;

    [[nodiscard]] std::optional<std::size_t> find(Field f) const {
        const auto it = std::find(fields.begin(), fields.end(), f);
        if (it == fields.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - fields.begin());
    }
};

HeaderLayout locate_header(const std::vector<Line> &lines) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_blank(lines[i].text) || is_comment(lines[i].text)) {
            continue;
        }
        const auto delim = detect_delimiter(lines[i].text);
        const auto cells = split_fields(lines[i].text, delim);
        const bool has_age =
            std::any_of(cells.begin(), cells.end(), [](auto c) { return classify(c) == Field::age; });
        if (!has_age) {
            continue;
        }
        HeaderLayout h;
        h.line_index = i;
        h.delim = delim;
        for (const auto c : cells) {
            h.names.emplace_back(trim(c));
            h.fields.push_back(classify(c));
        }
        return h;
    }
    fail(ErrorCode::parse_error, "no header row with an Age column");
}

struct RawRow {
    std::size_t line_no;
    std::optional<double> year;
    AgeSpan age;
    std::optional<double> values[static_cast<int>(Field::other)];
    std::vector<std::optional<double>> extra;
};

} // namespace

const OptionalColumn *TableSource::extra(std::string_view name) const noexcept {
    for (const auto &[n, col] : extra_columns) {
        if (n == name) {
            return &col;
        }
    }
    return nullptr;
}

TableFormat detect_table_format(std::string_view text) {
    const auto lines = split_lines(text);
    const auto header = locate_header(lines);
    const auto age_col = *header.find(Field::age);
    for (std::size_t i = header.line_index + 1; i < lines.size(); ++i) {
        if (is_blank(lines[i].text) || is_comment(lines[i].text)) {
            continue;
        }
        const auto cells = split_fields(lines[i].text, header.delim);
        if (age_col < cells.size() && cells[age_col].find('-') != std::string_view::npos) {
            return TableFormat::hmd_abridged;
        }
    }
    return header.find(Field::qx) ? TableFormat::hmd_full : TableFormat::minimal_m;
}

TableSource parse_life_table(std::string_view text, const ParseOptions &options) {
    return parse_life_table(text, detect_table_format(text), options);
}

TableSource parse_life_table(std::string_view text, TableFormat format, const ParseOptions &options) {
    const auto lines = split_lines(text);
    if (std::all_of(lines.begin(), lines.end(), [](const Line &l) { return is_blank(l.text); })) {
        fail(ErrorCode::parse_error, "empty input");
    }
    const auto header = locate_header(lines);
    const auto age_col = *header.find(Field::age);
    if (!header.find(Field::mx)) {
        fail(ErrorCode::parse_error, "missing required column mx");
    }
    std::vector<std::size_t> extra_cols;
    for (std::size_t c = 0; c < header.fields.size(); ++c) {
        if (header.fields[c] == Field::other) {
            extra_cols.push_back(c);
        }
    }

    std::vector<RawRow> rows;
    for (std::size_t i = header.line_index + 1; i < lines.size(); ++i) {
        const auto &line = lines[i];
        if (is_blank(line.text) || is_comment(line.text)) {
            continue;
        }
        const auto cells = split_fields(line.text, header.delim);
        if (cells.size() > header.fields.size()) {
            fail(ErrorCode::parse_error, fmt::format("line {}: {} fields but the header has {}", line.number,
                                                     cells.size(), header.fields.size()));
        }
        if (age_col >= cells.size() || trim(cells[age_col]).empty()) {
            fail(ErrorCode::parse_error, fmt::format("line {}: missing Age", line.number));
        }
        RawRow row;
        row.line_no = line.number;
        try {
            row.age = parse_age_token(cells[age_col]);
        } catch (const Error &e) {
            fail(ErrorCode::parse_error, fmt::format("line {}: {}", line.number, e.what()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto f = header.fields[c];
            if (f == Field::age || f == Field::other) {
                continue;
            }
            const auto v = parse_number(cells[c], line.number, header.names[c]);
            if (f == Field::year) {
                row.year = v;
            } else {
                row.values[static_cast<int>(f)] = v;
            }
        }
        for (const auto c : extra_cols) {
            row.extra.push_back(c < cells.size() ? parse_number(cells[c], line.number, header.names[c])
                                                 : std::nullopt);
        }
        rows.push_back(std::move(row));
    }

    // Multi-year files need an explicit selection.
    std::set<double> years;
    for (const auto &r : rows) {
        if (r.year) {
            years.insert(*r.year);
        }
    }
    std::optional<int> year;
    if (options.year) {
        std::erase_if(rows, [&](const RawRow &r) { return r.year && *r.year != *options.year; });
        if (!years.empty() && !years.contains(*options.year)) {
            fail(ErrorCode::parse_error, fmt::format("year {} not present in input", *options.year));
        }
        year = options.year;
    } else if (years.size() > 1) {
        fail(ErrorCode::parse_error,
             fmt::format("input holds {} years ({}..{}); select one", years.size(), *years.begin(), *years.rbegin()));
    } else if (years.size() == 1) {
        year = static_cast<int>(*years.begin());
    }
    if (rows.empty()) {
        fail(ErrorCode::parse_error, "no data rows");
    }

    const auto value = [](const RawRow &r, Field f) { return r.values[static_cast<int>(f)]; };
    // ax is printed in years; the open interval's value is not used.
    const auto ax_fraction = [&](const RawRow &r) -> std::optional<double> {
        const auto ax = value(r, Field::ax);
        if (!ax || !r.age.width) {
            return std::nullopt;
        }
        return *ax / *r.age.width;
    };

    std::vector<ScheduleEntry> entries;
    entries.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        if (i > 0) {
            const auto &prev = rows[i - 1].age;
            if (!prev.width) {
                fail(ErrorCode::parse_error,
                     fmt::format("line {}: row follows the open interval {}+", r.line_no, prev.start));
            }
            if (r.age.start != prev.start + *prev.width) {
                fail(ErrorCode::parse_error, fmt::format("line {}: ages not contiguous, gap between {} and {}",
                                                         r.line_no, prev.start + *prev.width - 1, r.age.start));
            }
        }
        if (format == TableFormat::hmd_full && r.age.width && *r.age.width != 1) {
            fail(ErrorCode::parse_error,
                 fmt::format("line {}: grouped age in a single-year table; use the abridged format", r.line_no));
        }
        const auto m = value(r, Field::mx);
        if (!m) {
            fail(ErrorCode::parse_error, fmt::format("line {}: missing mx", r.line_no));
        }
        entries.push_back({r.age.start, r.age.width, *m, value(r, Field::qx), ax_fraction(r)});
    }

    TableSource source;
    source.format = format;
    source.year = year;
    try {
        source.schedule = MortalitySchedule(std::move(entries), year ? std::to_string(*year) : std::string{});
    } catch (const Error &e) {
        fail(ErrorCode::parse_error, e.what());
    }

    const Field ref_fields[] = {Field::lx, Field::dx, Field::Lx, Field::Tx, Field::ex};
    const bool has_reference = std::all_of(rows.begin(), rows.end(), [&](const RawRow &r) {
        return std::all_of(std::begin(ref_fields), std::end(ref_fields),
                           [&](Field f) { return value(r, f).has_value(); });
    });
    if (has_reference) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<LifeTableRow> ref;
        ref.reserve(rows.size());
        for (const auto &r : rows) {
            LifeTableRow row;
            row.age_start = r.age.start;
            row.width = r.age.width;
            row.m = *value(r, Field::mx);
            row.q = value(r, Field::qx).value_or(nan);
            row.a = ax_fraction(r).value_or(nan);
            row.l = *value(r, Field::lx);
            row.d = *value(r, Field::dx);
            row.L = *value(r, Field::Lx);
            row.T = *value(r, Field::Tx);
            row.e = *value(r, Field::ex);
            ref.push_back(row);
        }
        const double radix = ref.front().l;
        source.reference = LifeTable(std::move(ref), radix);
    }

    for (std::size_t k = 0; k < extra_cols.size(); ++k) {
        OptionalColumn col;
        col.reserve(rows.size());
        for (const auto &r : rows) {
            col.push_back(r.extra[k]);
        }
        source.extra_columns.emplace_back(header.names[extra_cols[k]], std::move(col));
    }
    return source;
}

ExpenditureSeries parse_expenditure(std::string_view text) {
    const auto lines = split_lines(text);
    std::string unit;
    std::optional<std::size_t> header_index;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto t = trim(lines[i].text);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '#') {
            auto body = trim(t.substr(1));
            constexpr std::string_view key = "unit:";
            if (body.size() >= key.size() && normalize(body.substr(0, key.size())) == key) {
                unit = std::string(trim(body.substr(key.size())));
            }
            continue;
        }
        header_index = i;
        break;
    }
    if (!header_index) {
        fail(ErrorCode::parse_error, "empty input");
    }

    const auto delim = detect_delimiter(lines[*header_index].text);
    const auto header = split_fields(lines[*header_index].text, delim);
    std::map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < header.size(); ++c) {
        index.emplace(normalize(header[c]), c);
    }
    const auto column = [&](std::string_view name) {
        const auto it = index.find(normalize(name));
        if (it == index.end()) {
            fail(ErrorCode::parse_error, fmt::format("missing column {}", name));
        }
        return it->second;
    };
    const std::size_t c_group = column("group");
    const std::size_t c_x = column("x_ref");
    const std::size_t c_m = column("mx");
    const std::size_t c_spend = column("spend");

    std::vector<ExpenditureGroup> groups;
    for (std::size_t i = *header_index + 1; i < lines.size(); ++i) {
        const auto &line = lines[i];
        if (is_blank(line.text) || is_comment(line.text)) {
            continue;
        }
        const auto cells = split_fields(line.text, delim);
        const auto cell = [&](std::size_t c, std::string_view name) -> std::string_view {
            if (c >= cells.size() || cells[c].empty()) {
                fail(ErrorCode::parse_error, fmt::format("line {}: missing {}", line.number, name));
            }
            return cells[c];
        };
        ExpenditureGroup g;
        g.label = std::string(cell(c_group, "group"));
        try {
            (void)parse_age_token(g.label);
        } catch (const Error &e) {
            fail(ErrorCode::parse_error, fmt::format("line {}: {}", line.number, e.what()));
        }
        g.x_ref = *parse_number(cell(c_x, "x_ref"), line.number, "x_ref");
        g.m = *parse_number(cell(c_m, "mx"), line.number, "mx");
        g.spend = *parse_number(cell(c_spend, "spend"), line.number, "spend");
        if (g.spend < 0.0) {
            fail(ErrorCode::parse_error, fmt::format("line {}: negative spend {}", line.number, g.spend));
        }
        groups.push_back(std::move(g));
    }
    if (groups.empty()) {
        fail(ErrorCode::parse_error, "no data rows");
    }
    return ExpenditureSeries(std::move(groups), std::move(unit));
}

namespace {

// Fixed-point text without a "-0" artefact.
std::string fixed(double v, int decimals) {
    auto s = fmt::format("{:.{}f}", v, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1);
    }
    return s;
}

std::string age_label(int start, IntervalWidth width) {
    if (!width) {
        return fmt::format("{}+", start);
    }
    if (*width == 1) {
        return std::to_string(start);
    }
    return fmt::format("{}-{}", start, start + *width - 1);
}

} // namespace

std::string write_extended_table(std::span<const ExtendedRow> rows, std::optional<int> year) {
    std::string out = "Year,Age,mx,qx,ax,lx,dx,Lx,Tx,ex,HLYL,HLE,cum_mx,cum_qx,x_mx,x_qx\n";
    const std::string year_cell = year ? std::to_string(*year) : std::string{};
    for (const auto &r : rows) {
        const auto &b = r.base;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", year_cell,
                           age_label(b.age_start, b.width), fixed(b.m, 5), fixed(b.q, 5), fixed(b.a, 2),
                           fixed(b.l, 0), fixed(b.d, 0), fixed(b.L, 0), fixed(b.T, 0), fixed(b.e, 2),
                           fixed(r.hlyl, 1), fixed(r.hle, 2), fixed(r.cum_m, 5), fixed(r.cum_q, 5),
                           fixed(r.xm_m, 5), fixed(r.xm_q, 5));
    }
    return out;
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io_error, fmt::format("cannot open {}", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        fail(ErrorCode::io_error, fmt::format("read failed for {}", path.string()));
    }
    return ss.str();
}

void write_text_file_atomic(const std::filesystem::path &path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::io_error, fmt::format("cannot write {}", tmp.string()));
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            fail(ErrorCode::io_error, fmt::format("write failed for {}", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::io_error, fmt::format("cannot move output into place at {}", path.string()));
    }
}

} // namespace hlyl
