// hlyl command-line front end. Talks to the library only through hlyl.h.
#include "hlyl/hlyl.h"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TableDeleter {
    void operator()(hlyl_table *p) const { hlyl_table_free(p); }
};
struct AnalysisDeleter {
    void operator()(hlyl_analysis *p) const { hlyl_analysis_free(p); }
};
struct SeriesDeleter {
    void operator()(hlyl_expenditure *p) const { hlyl_expenditure_free(p); }
};
struct FitDeleter {
    void operator()(hlyl_fit *p) const { hlyl_fit_free(p); }
};
using TablePtr = std::unique_ptr<hlyl_table, TableDeleter>;
using AnalysisPtr = std::unique_ptr<hlyl_analysis, AnalysisDeleter>;
using SeriesPtr = std::unique_ptr<hlyl_expenditure, SeriesDeleter>;
using FitPtr = std::unique_ptr<hlyl_fit, FitDeleter>;

struct Failure {
    std::string message;
};

void check(hlyl_status status, const std::string &context) {
    if (status != HLYL_OK) {
        throw Failure{fmt::format("{}: {}", context, hlyl_last_error())};
    }
}

struct LifeTableConfig {
    std::string in;
    std::string out;
    std::string chart;
    std::string chart_title;
    std::string format = "auto";
    double lambda = 1.0;
    std::string qconv = "actuarial";
    std::string source = "both";
    std::string window;
    std::string models = "all";
    double radix = 100000.0;
    std::optional<int> year;
    std::optional<double> hlyl_ref;
    std::optional<int> x_max;
    std::string weighting = "auto";
    bool no_tail_seed = false;
};

struct SpendConfig {
    std::string in;
    std::string lifetable;
    std::string out;
    std::string chart;
    double first_group_multiplier = 5.0;
    std::string moveup = "auto";
    std::optional<double> k;
    std::string se_divisor = "n";
};

std::pair<int, int> parse_window(const std::string &text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw Failure{fmt::format("--window expects lo,hi, got '{}'", text)};
    }
    int lo = 0;
    int hi = 0;
    const auto *b = text.data();
    const auto r1 = std::from_chars(b, b + comma, lo);
    const auto r2 = std::from_chars(b + comma + 1, b + text.size(), hi);
    if (r1.ec != std::errc{} || r1.ptr != b + comma || r2.ec != std::errc{} || r2.ptr != b + text.size() || lo > hi) {
        throw Failure{fmt::format("--window expects lo,hi with lo <= hi, got '{}'", text)};
    }
    return {lo, hi};
}

int parse_models(const std::string &text) {
    int mask = 0;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "all") {
            mask |= HLYL_MODEL_GOMPERTZ | HLYL_MODEL_WEIBULL;
        } else if (item == "gompertz") {
            mask |= HLYL_MODEL_GOMPERTZ;
        } else if (item == "weibull") {
            mask |= HLYL_MODEL_WEIBULL;
        } else if (item != "empirical") {
            throw Failure{fmt::format("unknown model '{}' (empirical, gompertz, weibull, all)", item)};
        }
    }
    return mask;
}

hlyl_table_format parse_format(const std::string &text) {
    if (text == "auto") {
        return HLYL_FORMAT_AUTO;
    }
    if (text == "full") {
        return HLYL_FORMAT_HMD_FULL;
    }
    if (text == "abridged") {
        return HLYL_FORMAT_HMD_ABRIDGED;
    }
    return HLYL_FORMAT_MINIMAL_M;
}

/// Inputs named on the command line: a file, or every visible regular file
/// of a directory in name order.
std::vector<fs::path> expand_inputs(const std::string &in) {
    const fs::path p(in);
    std::error_code ec;
    if (!fs::exists(p, ec)) {
        throw Failure{fmt::format("input not found: {}", in)};
    }
    if (!fs::is_directory(p, ec)) {
        return {p};
    }
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(p)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && !name.empty() && name.front() != '.') {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw Failure{fmt::format("no input files in directory {}", in)};
    }
    return files;
}

/// Output path for one input. In batch mode `target` is a directory and the
/// file is named after the input stem.
std::string output_for(const std::string &target, const fs::path &input, bool batch, const char *extension) {
    if (target.empty()) {
        return {};
    }
    if (!batch) {
        return target;
    }
    fs::create_directories(target);
    return (fs::path(target) / input.stem()).string() + extension;
}

hlyl_analysis_options analysis_options(const LifeTableConfig &c) {
    hlyl_analysis_options o;
    hlyl_analysis_options_init(&o);
    o.radix = c.radix;
    o.qconv = c.qconv == "identity" ? HLYL_QCONV_IDENTITY : HLYL_QCONV_ACTUARIAL;
    o.lambda = c.lambda;
    o.group_width_weighting = c.weighting == "auto" ? -1 : (c.weighting == "on" ? 1 : 0);
    if (!c.window.empty()) {
        const auto [lo, hi] = parse_window(c.window);
        o.gompertz_lo = o.weibull_lo = lo;
        o.gompertz_hi = o.weibull_hi = hi;
    }
    o.models = parse_models(c.models);
    if (c.hlyl_ref) {
        o.has_headline_hlyl = 1;
        o.headline_hlyl = *c.hlyl_ref;
    }
    o.x_max = c.x_max.value_or(-1);
    o.seed_tail_from_reference = c.no_tail_seed ? 0 : 1;
    return o;
}

AnalysisPtr analyze(const LifeTableConfig &c, const fs::path &input, hlyl_summary &summary) {
    hlyl_table *raw_table = nullptr;
    check(hlyl_table_load(input.string().c_str(), parse_format(c.format), c.year.value_or(-1), &raw_table),
          input.string());
    const TablePtr table(raw_table);
    const auto opts = analysis_options(c);
    hlyl_analysis *raw = nullptr;
    check(hlyl_analyze(table.get(), &opts, &raw), input.string());
    AnalysisPtr analysis(raw);
    check(hlyl_analysis_summary(analysis.get(), &summary), input.string());
    for (std::size_t i = 0; i < hlyl_analysis_note_count(analysis.get()); ++i) {
        fmt::print(stderr, "{}: note: {}\n", input.string(), hlyl_analysis_note(analysis.get(), i));
    }
    return analysis;
}

std::string estimates_line(const hlyl_summary &s, const std::string &source) {
    std::string line;
    const auto add = [&](const std::string &item) {
        if (!line.empty()) {
            line.push_back(' ');
        }
        line += item;
    };
    if (source != "q") {
        add(fmt::format("from_m={:.2f}", s.hlyl_from_m));
    }
    if (source != "m") {
        add(fmt::format("from_q={:.2f}", s.hlyl_from_q));
    }
    if (s.has_gompertz) {
        add(fmt::format("gompertz={:.2f}", s.hlyl_gompertz));
    }
    if (s.has_weibull) {
        add(fmt::format("weibull={:.2f}", s.hlyl_weibull));
    }
    add(fmt::format("average={:.2f}", s.hlyl_average));
    add(fmt::format("x_max={}", s.x_max));
    return line;
}

void run_lifetable(const LifeTableConfig &c, const fs::path &input, bool batch) {
    hlyl_summary s{};
    const auto analysis = analyze(c, input, s);
    const auto out = output_for(c.out, input, batch, ".csv");
    if (!out.empty()) {
        check(hlyl_analysis_write_extended(analysis.get(), out.c_str()), out);
    }
    const auto chart = output_for(c.chart, input, batch, ".svg");
    if (!chart.empty()) {
        check(hlyl_analysis_write_fhm_chart(analysis.get(), chart.c_str(), c.chart_title.c_str()), chart);
    }
    if (batch) {
        fmt::print("file={}\n", input.string());
    }
    fmt::print("e0={:.2f}\n", s.e0);
    fmt::print("HLYL {} headline={:.2f} schedule_x_max={}\n", estimates_line(s, c.source), s.headline_hlyl,
               s.schedule_x_max);
    fmt::print("HLE={:.2f}\n", s.hle0);
    if (s.hle_warning) {
        fmt::print(stderr, "{}: warning: HLYL exceeds life expectancy at birth\n", input.string());
    }
}

void run_hlyl(const LifeTableConfig &c, const fs::path &input, bool batch) {
    hlyl_summary s{};
    const auto analysis = analyze(c, input, s);
    const auto chart = output_for(c.chart, input, batch, ".svg");
    if (!chart.empty()) {
        check(hlyl_analysis_write_fhm_chart(analysis.get(), chart.c_str(), c.chart_title.c_str()), chart);
    }
    if (batch) {
        fmt::print("file={}\n", input.string());
    }
    fmt::print("{}\n", estimates_line(s, c.source));
    if (s.has_gompertz) {
        fmt::print("gompertz a={:.6g} b={:.6g}\n", s.gompertz_a, s.gompertz_b);
    }
    if (s.has_weibull) {
        fmt::print("weibull shape={:.6g} scale={:.6g}\n", s.weibull_shape, s.weibull_scale);
    }
}

void run_spend_fit(const SpendConfig &c, const fs::path &input, bool batch) {
    hlyl_expenditure *raw_series = nullptr;
    check(hlyl_expenditure_load(input.string().c_str(), &raw_series), input.string());
    const SeriesPtr series(raw_series);
    if (!c.lifetable.empty()) {
        if (!fs::exists(c.lifetable)) {
            throw Failure{fmt::format("input not found: {}", c.lifetable)};
        }
        hlyl_table *raw_table = nullptr;
        check(hlyl_table_load(c.lifetable.c_str(), HLYL_FORMAT_AUTO, -1, &raw_table), c.lifetable);
        const TablePtr table(raw_table);
        check(hlyl_expenditure_use_table_rates(series.get(), table.get()), c.lifetable);
    }

    hlyl_fit_options o;
    hlyl_fit_options_init(&o);
    o.first_group_multiplier = c.first_group_multiplier;
    if (c.moveup != "auto") {
        double v = 0.0;
        const auto *b = c.moveup.data();
        const auto r = std::from_chars(b, b + c.moveup.size(), v);
        if (r.ec != std::errc{} || r.ptr != b + c.moveup.size()) {
            throw Failure{fmt::format("--moveup expects 'auto' or a number, got '{}'", c.moveup)};
        }
        o.move_up_auto = 0;
        o.move_up = v;
    }
    if (c.k) {
        o.has_fixed_k = 1;
        o.fixed_k = *c.k;
    }
    o.se_divisor = c.se_divisor == "n-p" ? HLYL_SE_N_MINUS_P : HLYL_SE_N;

    hlyl_fit *raw_fit = nullptr;
    check(hlyl_fit_run(series.get(), &o, &raw_fit), input.string());
    const FitPtr fit(raw_fit);
    hlyl_fit_summary s{};
    check(hlyl_fit_summary_get(fit.get(), &s), input.string());

    const auto out = output_for(c.out, input, batch, ".json");
    if (!out.empty()) {
        check(hlyl_fit_write_report(fit.get(), out.c_str()), out);
    }
    const auto chart = output_for(c.chart, input, batch, ".svg");
    if (!chart.empty()) {
        check(hlyl_fit_write_chart(fit.get(), chart.c_str()), chart);
    }

    if (batch) {
        fmt::print("file={}\n", input.string());
    }
    fmt::print("mx_star={:.5f} move_up={:g} k={:.3f} ({})\n", s.mx_star, s.move_up, s.k,
               s.k_fixed ? "fixed" : "fitted");
    std::string r2 = s.has_r2_standard ? fmt::format("{:.4f}", s.r2_standard) : "undefined";
    fmt::print("k={:.3f} sse={:.0f} se={:.2f} r2_standard={} moveup={:.2f}%\n", s.k, s.sse, s.se, r2,
               100.0 * s.moveup_fraction);
    fmt::print("sum_estimates={:.1f} sum_data={:.1f}\n", s.sum_estimates, s.sum_data);
    for (std::size_t i = 0; i < s.n; ++i) {
        double est = 0.0;
        check(hlyl_fit_estimate(fit.get(), i, &est), input.string());
        fmt::print("estimate[{}]={:.2f}\n", i, est);
    }
}

template <class Config, class Run>
int run_batch(const Config &config, Run run) {
    const auto inputs = expand_inputs(config.in);
    const bool batch = fs::is_directory(config.in);
    int status = 0;
    for (const auto &input : inputs) {
        try {
            run(config, input, batch);
        } catch (const Failure &f) {
            fmt::print(stderr, "hlyl: {}\n", f.message);
            status = 1;
        } catch (const std::exception &e) {
            fmt::print(stderr, "hlyl: {}: {}\n", input.string(), e.what());
            status = 1;
        }
    }
    return status;
}

void add_table_options(CLI::App *cmd, LifeTableConfig &c) {
    cmd->add_option("--in", c.in, "Life-table file or directory")->required();
    cmd->add_option("--chart", c.chart, "Write the FHM chart (SVG)");
    cmd->add_option("--chart-title", c.chart_title, "Chart title");
    cmd->add_option("--format", c.format, "Input layout")
        ->check(CLI::IsMember({"auto", "full", "abridged", "minimal"}));
    cmd->add_option("--lambda", c.lambda, "Scale factor applied to the FHM fraction")->check(CLI::PositiveNumber);
    cmd->add_option("--qconv", c.qconv, "m to q conversion when qx is absent")
        ->check(CLI::IsMember({"actuarial", "identity"}));
    cmd->add_option("--source", c.source, "Empirical estimates to print")->check(CLI::IsMember({"m", "q", "both"}));
    cmd->add_option("--window", c.window, "Parametric fitting window lo,hi (default 35,90)");
    cmd->add_option("--models", c.models, "Comma list of empirical, gompertz, weibull, all");
    cmd->add_option("--radix", c.radix, "Survivors at the first age")->check(CLI::PositiveNumber);
    cmd->add_option("--year", c.year, "Year to select from a multi-year file");
    cmd->add_option("--hlyl-ref", c.hlyl_ref, "HLYL at birth for the HLE column (default: average estimate)");
    cmd->add_option("--xmax", c.x_max, "Age where HLYL reaches zero (default: empirical x_max)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--weighting", c.weighting, "Width-weighted cumulative rates")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    cmd->add_flag("--no-tail-seed", c.no_tail_seed, "Close truncated tables at their last row");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Life tables, healthy life years lost and health expenditure fits"};
    app.set_version_flag("--version", std::string(hlyl_version()));
    app.require_subcommand(1);

    LifeTableConfig table_cfg;
    SpendConfig spend_cfg;

    auto *lifetable = app.add_subcommand("lifetable", "Extended life table with HLYL and HLE columns");
    add_table_options(lifetable, table_cfg);
    lifetable->add_option("--out", table_cfg.out, "Write the extended table (CSV)");

    auto *hlyl_cmd = app.add_subcommand("hlyl", "HLYL estimates from the FHM curve and parametric fits");
    add_table_options(hlyl_cmd, table_cfg);

    auto *spend = app.add_subcommand("spend", "Health expenditure model");
    spend->require_subcommand(1);
    auto *fit = spend->add_subcommand("fit", "Fit expenditure per capita by age group");
    fit->add_option("--in", spend_cfg.in, "Expenditure CSV or directory")->required();
    fit->add_option("--lifetable", spend_cfg.lifetable, "Abridged life table supplying the group rates");
    fit->add_option("--out", spend_cfg.out, "Write the fit report (JSON)");
    fit->add_option("--chart", spend_cfg.chart, "Write the data/estimates chart (SVG)");
    fit->add_option("--first-group-multiplier", spend_cfg.first_group_multiplier, "Feature value of the first group");
    fit->add_option("--moveup", spend_cfg.moveup, "Constant floor: 'auto' (minimum spend) or a value");
    fit->add_option("--k", spend_cfg.k, "Use this k instead of fitting it");
    fit->add_option("--se-divisor", spend_cfg.se_divisor, "Standard error divisor")
        ->check(CLI::IsMember({"n", "n-p"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*lifetable) {
            return run_batch(table_cfg, run_lifetable);
        }
        if (*hlyl_cmd) {
            return run_batch(table_cfg, run_hlyl);
        }
        return run_batch(spend_cfg, run_spend_fit);
    } catch (const Failure &f) {
        fmt::print(stderr, "hlyl: {}\n", f.message);
    } catch (const std::exception &e) {
        fmt::print(stderr, "hlyl: {}\n", e.what());
    }
    return 1;
}
