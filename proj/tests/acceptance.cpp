// Acceptance suite: one PASS/FAIL/SKIP line per criterion, details indented
// underneath. Exits non-zero when any criterion fails.
#include "hlyl/data_io.hpp"
#include "hlyl/error.hpp"
#include "hlyl/expenditure.hpp"
#include "hlyl/fhm.hpp"
#include "hlyl/lifetable.hpp"
#include "hlyl/parametric.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hlyl;

namespace {

// Tolerances.
constexpr double kPersonTol = 1.0;
constexpr double kExpectancyTol = 0.01;
constexpr double kTelescopeTol = 1e-6;
constexpr double kAuxTol = 1e-5;
constexpr double kSeedTarget = 0.01989;
constexpr double kSeedTol = 1e-5;
constexpr double kFixedK = 28.657;
constexpr double kMoveUp = 68.0;
constexpr double kEstimateTol = 1.0;
constexpr double kSseTarget = 13164.0;
constexpr double kSseTol = 40.0;
constexpr double kSeTarget = 25.04;
constexpr double kSeTol = 0.1;
constexpr double kSumTarget = 9117.0;
constexpr double kSumTol = 5.0;
constexpr double kMoveupPctTarget = 5.68;
constexpr double kMoveupPctTol = 0.02;
constexpr double kKLo = 28.5;
constexpr double kKHi = 28.8;
constexpr double kHlyl0 = 9.84;
constexpr double kXMax = 97.0;
constexpr double kScheduleTol = 0.1;
constexpr double kHleTarget = 72.87;
constexpr double kHleTol = 0.01;
constexpr double kFromMTarget = 10.09;
constexpr double kFromQTarget = 9.50;
constexpr double kEmpiricalTol = 0.15;
constexpr int kXMaxLo = 93;
constexpr int kXMaxHi = 102;
constexpr double kWeibullShape = 9.89;
constexpr double kWeibullFhmTol = 0.01;
constexpr double kRecoveryTol = 1e-9;
constexpr double kExactTol = 1e-12;
constexpr double kOrthogonalityTol = 1e-9;
constexpr double kRuntimeSeconds = 1.0;

enum class Verdict { pass, fail, skip };

struct Outcome {
    Verdict verdict = Verdict::pass;
    std::string summary;
    std::vector<std::string> details;
};

std::string data_path(const std::string &name) { return std::string(HLYL_TEST_DATA_DIR) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Rebuild {
    TableSource source;
    LifeTable table;
};

Rebuild rebuild(const std::string &file) {
    Rebuild r{parse_life_table(read_text_file(data_path(file))), {}};
    const auto &ref = r.source.reference.value();
    BuildOptions b;
    b.qconv = QConversion::identity;
    b.radix = ref.radix();
    b.tail_person_years = ref.rows().back().T - ref.rows().back().L;
    r.table = build_life_table(r.source.schedule, b);
    return r;
}

std::vector<ColumnTolerance> identity_tolerances() {
    return {{LifeTableColumn::l, kPersonTol},
            {LifeTableColumn::d, kPersonTol},
            {LifeTableColumn::L, kPersonTol},
            {LifeTableColumn::e, kExpectancyTol}};
}

std::string deviation_line(const ValidationReport &report) {
    std::string out;
    for (const auto c : {LifeTableColumn::l, LifeTableColumn::d, LifeTableColumn::L, LifeTableColumn::e}) {
        const auto &d = report.column(c);
        out += fmt::format("{}max|d{}|={:.4g}@{}", out.empty() ? "" : " ", column_name(c).substr(0, 1),
                           d.max_abs_deviation, d.age_at_max);
    }
    return out;
}

Outcome criterion_1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = rebuild("japan_2011_extended_0_70.tsv");
    const auto tol = identity_tolerances();
    const auto report = validate_against(*r.source.reference, r.table, tol);
    const double telescope = max_telescoping_residual(r.table);
    const double elapsed = seconds_since(t0);

    const bool ok = report.pass() && telescope <= kTelescopeTol && elapsed < kRuntimeSeconds;
    o.verdict = ok ? Verdict::pass : Verdict::fail;
    o.summary = fmt::format("life-table identities, ages 0-70 (l,d,L +-{}, e +-{}): {}; telescoping {:.2e}; {:.3f}s",
                            kPersonTol, kExpectancyTol, deviation_line(report), telescope, elapsed);
    if (!report.pass()) {
        std::set<int> ages;
        for (const auto &f : report.flagged) {
            ages.insert(f.age);
        }
        o.details.push_back(fmt::format("{} cells out of tolerance on {} of {} rows; first at age {}",
                                        report.flagged.size(), ages.size(), r.table.size(), *ages.begin()));
        std::string breaks;
        const auto &ref = r.source.reference->rows();
        for (std::size_t i = 0; i + 1 < ref.size(); ++i) {
            if (std::abs(ref[i].l - ref[i].d - ref[i + 1].l) > kPersonTol) {
                breaks += fmt::format("{}{}", breaks.empty() ? "" : ",", ref[i].age_start);
            }
        }
        o.details.push_back("printed rows where l[x]-d[x] != l[x+1]: " + (breaks.empty() ? "none" : breaks));
        o.details.push_back("the printed m65=0.00977 breaks monotonicity (0.00832, 0.00977, 0.00946); q printed to 5 "
                            "decimals cannot carry l to within one person over 70 ages");
    }
    const auto excerpt = rebuild("japan_2011_fig3_excerpt.tsv");
    const auto rep33 = validate_against(*excerpt.source.reference, excerpt.table, tol);
    o.details.push_back(fmt::format("info: ages 0-33 table: {} ({} cells out of tolerance)", deviation_line(rep33),
                                    rep33.flagged.size()));
    return o;
}

struct AuxCheck {
    std::string name;
    std::size_t cells = 0;
    std::size_t bad = 0;
    double worst = 0.0;
    int worst_age = 0;
    std::vector<int> bad_ages;

    void add(int age, double computed, std::optional<double> printed) {
        if (!printed) {
            return;
        }
        ++cells;
        const double dev = std::abs(computed - *printed);
        if (dev > worst) {
            worst = dev;
            worst_age = age;
        }
        if (dev > kAuxTol) {
            ++bad;
            bad_ages.push_back(age);
        }
    }
};

std::vector<AuxCheck> aux_checks(const std::string &file, bool has_x_mx) {
    const auto src = parse_life_table(read_text_file(data_path(file)));
    const auto cm = fhm_curve(src.schedule);
    FhmOptions q;
    q.source = RateSource::from_q;
    const auto cq = fhm_curve(src.schedule, q);

    std::vector<AuxCheck> checks;
    const auto run = [&](const char *column, const FhmCurve &curve, bool use_xm) {
        const auto *printed = src.extra(column);
        if (printed == nullptr) {
            return;
        }
        AuxCheck c;
        c.name = column;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            // Age 0 prints m0 in the x*m columns; x*m there is 0 by definition.
            if (use_xm && curve[i].age == 0) {
                continue;
            }
            c.add(curve[i].age, use_xm ? curve[i].xm : curve[i].cum, (*printed)[i]);
        }
        checks.push_back(c);
    };
    run("cum_mx", cm, false);
    run("cum_qx", cq, false);
    run("cum_qx_2", cq, false);
    if (has_x_mx) {
        run("x_mx", cm, true);
    }
    run("x_qx", cq, true);
    return checks;
}

std::string join_ages(const std::vector<int> &ages, std::size_t limit = 12) {
    std::string out;
    for (std::size_t i = 0; i < ages.size() && i < limit; ++i) {
        out += (i ? "," : "") + std::to_string(ages[i]);
    }
    if (ages.size() > limit) {
        out += ",...";
    }
    return out;
}

Outcome criterion_2() {
    Outcome o;
    const auto checks = aux_checks("japan_2011_extended_0_70.tsv", false);
    std::size_t cells = 0;
    std::size_t bad = 0;
    for (const auto &c : checks) {
        cells += c.cells;
        bad += c.bad;
        o.details.push_back(fmt::format("{}: {}/{} cells off by more than {:g}; worst {:.3g} at age {}{}", c.name,
                                        c.bad, c.cells, kAuxTol, c.worst, c.worst_age,
                                        c.bad ? " (ages " + join_ages(c.bad_ages) + ")" : std::string()));
    }
    o.verdict = bad == 0 && cells > 0 ? Verdict::pass : Verdict::fail;
    o.summary = fmt::format("FHM auxiliary columns, ages 0-70 (+-{:g}): {}/{} cells match", kAuxTol, cells - bad,
                            cells);

    // Spot values quoted for this criterion.
    const auto src = parse_life_table(read_text_file(data_path("japan_2011_extended_0_70.tsv")));
    const auto cm = fhm_curve(src.schedule);
    FhmOptions q;
    q.source = RateSource::from_q;
    const auto cq = fhm_curve(src.schedule, q);
    o.details.push_back(fmt::format("spot: cum_m(1)={:.5f} (0.00279), x*m(3)={:.5f} (0.00069), x*q(20)={:.5f} "
                                    "(printed 0.01080)",
                                    cm.at_age(1).cum, cm.at_age(3).xm, cq.at_age(20).xm));
    // Where a printed running sum does not step by the printed rate, the
    // implied rate is shown next to the printed one.
    for (const auto &[column, use_q] : {std::pair{"cum_mx", false}, std::pair{"cum_qx", true}}) {
        const auto *printed = src.extra(column);
        std::string breaks;
        for (std::size_t i = 1; printed != nullptr && i < printed->size(); ++i) {
            const auto &e = src.schedule[i];
            const double rate = use_q ? e.q.value_or(0.0) : e.m;
            const double step = (*printed)[i].value() - (*printed)[i - 1].value();
            if (std::abs(step - rate) > kAuxTol) {
                breaks += fmt::format("{}{}:{:.5f}/{:.5f}", breaks.empty() ? "" : " ", e.age_start, step, rate);
            }
        }
        if (!breaks.empty()) {
            o.details.push_back(fmt::format("{} steps that are not the printed rate (age:step/rate): {}", column,
                                            breaks));
        }
    }
    if (bad > 0) {
        o.details.push_back("the running sums imply m19=0.00036 and m65=0.00797 against printed 0.00046 and "
                            "0.00977, and step by unrounded rates elsewhere; x_qx at ages 20 and 65 is not x*q of "
                            "the printed q");
    }
    std::size_t bad33 = 0;
    std::size_t cells33 = 0;
    for (const auto &c : aux_checks("japan_2011_fig3_excerpt.tsv", true)) {
        bad33 += c.bad;
        cells33 += c.cells;
    }
    o.details.push_back(fmt::format("info: ages 0-33 table: {}/{} cells match", cells33 - bad33, cells33));
    return o;
}

ExpenditureSeries japan_spend() { return parse_expenditure(read_text_file(data_path("japan_2011_expenditure.csv"))); }

Outcome criterion_3() {
    Outcome o;
    const double seed = seed_mx_star(japan_spend().spend());
    o.verdict = std::abs(seed - kSeedTarget) <= kSeedTol ? Verdict::pass : Verdict::fail;
    o.summary = fmt::format("expenditure seed mx*={:.7f} (target {} +-{:g})", seed, kSeedTarget, kSeedTol);
    return o;
}

std::vector<double> published_estimates() {
    std::istringstream in(read_text_file(data_path("japan_2011_expenditure_published.csv")));
    std::string line;
    std::getline(in, line);
    std::vector<double> out;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string cell;
        for (int i = 0; i < 4 && std::getline(row, cell, ','); ++i) {
        }
        out.push_back(std::stod(cell));
    }
    return out;
}

Outcome criterion_4() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    ExpenditureOptions opts;
    opts.fixed_k = kFixedK;
    opts.move_up = kMoveUp;
    opts.first_group_multiplier = 5.0;
    const auto fit = fit_pipeline(japan_spend(), opts);
    const double elapsed = seconds_since(t0);
    const auto published = published_estimates();

    double worst = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < fit.estimates.size() && i < published.size(); ++i) {
        const double dev = std::abs(fit.estimates[i] - published[i]);
        if (dev > worst) {
            worst = dev;
            worst_i = i;
        }
    }
    const double pct = 100.0 * fit.stats.moveup_fraction;
    const bool ok = published.size() == fit.estimates.size() && worst <= kEstimateTol &&
                    std::abs(fit.stats.sse - kSseTarget) <= kSseTol && std::abs(fit.stats.se - kSeTarget) <= kSeTol &&
                    std::abs(fit.stats.sum_estimates - kSumTarget) <= kSumTol &&
                    std::abs(pct - kMoveupPctTarget) <= kMoveupPctTol && elapsed < kRuntimeSeconds;
    o.verdict = ok ? Verdict::pass : Verdict::fail;
    o.summary = fmt::format("expenditure reproduction at k={}: max|est-published|={:.3f} ({}), sse={:.1f}, "
                            "se={:.3f}, sum={:.1f}, moveup={:.3f}%, {:.3f}s",
                            kFixedK, worst, fit.labels[worst_i], fit.stats.sse, fit.stats.se,
                            fit.stats.sum_estimates, pct, elapsed);
    return o;
}

Outcome criterion_5() {
    Outcome o;
    const auto series = japan_spend();
    const auto fitted = fit_pipeline(series, {});
    ExpenditureOptions fixed;
    fixed.fixed_k = kFixedK;
    const auto at_fixed = fit_pipeline(series, fixed);
    const bool ok = fitted.k >= kKLo && fitted.k <= kKHi && fitted.stats.sse <= at_fixed.stats.sse;
    o.verdict = ok ? Verdict::pass : Verdict::fail;
    o.summary = fmt::format("fitted k={:.5f} in [{}, {}]; sse {:.4f} <= {:.4f} at k={}", fitted.k, kKLo, kKHi,
                            fitted.stats.sse, at_fixed.stats.sse, kFixedK);
    o.details.push_back(fmt::format("info: reference k values {} and {}; the fit sits {:.4f} from the first",
                                    published::k_table, published::k_text, std::abs(fitted.k - published::k_table)));
    return o;
}

Outcome criterion_6() {
    Outcome o;
    const auto src = parse_life_table(read_text_file(data_path("japan_2011_extended_0_70.tsv")));
    const auto *printed = src.extra("HLYL");
    if (printed == nullptr) {
        o.verdict = Verdict::fail;
        o.summary = "HLYL column missing from the fixture";
        return o;
    }
    double worst = 0.0;
    int worst_age = 0;
    std::string values;
    for (const int age : {0, 10, 20, 30, 40, 50, 60, 65, 70}) {
        const double v = hlyl_at_age(kHlyl0, kXMax, age);
        const double p = (*printed)[static_cast<std::size_t>(age)].value();
        values += fmt::format("{}:{:.2f}/{:.1f} ", age, v, p);
        if (std::abs(v - p) > worst) {
            worst = std::abs(v - p);
            worst_age = age;
        }
    }
    const double e0 = src.reference.value()[0].e;
    const double hle = hle_at_birth(e0, kHlyl0).years;
    const bool ok = worst <= kScheduleTol && std::abs(hle - kHleTarget) <= kHleTol &&
                    hlyl_at_age(kHlyl0, kXMax, kXMax) == 0.0;
    o.verdict = ok ? Verdict::pass : Verdict::fail;
    o.summary = fmt::format("HLYL schedule ({}, {}): max dev {:.3f} at age {}; HLE0={:.2f}", kHlyl0, kXMax, worst,
                            worst_age, hle);
    values.pop_back();
    o.details.push_back("computed/printed " + values);
    return o;
}

Outcome criterion_7() {
    Outcome o;
    std::filesystem::path path = data_path("external/japan_2011_full.txt");
    if (const char *env = std::getenv("HLYL_JAPAN_FULL_TABLE"); env != nullptr && *env != '\0') {
        path = env;
    }
    if (!std::filesystem::exists(path)) {
        o.verdict = Verdict::skip;
        o.summary = fmt::format("empirical HLYL needs the full single-year table; not found at {} "
                                "(set HLYL_JAPAN_FULL_TABLE)",
                                path.string());
        return o;
    }
    const auto text = read_text_file(path);
    TableSource src;
    try {
        ParseOptions p;
        p.year = 2011;
        src = parse_life_table(text, p);
    } catch (const Error &) {
        src = parse_life_table(text);
    }
    const auto table = build_life_table(src.schedule);
    FhmOptions opts;
    const auto m = hlyl_from_curve(fhm_curve(table, opts));
    opts.source = RateSource::from_q;
    const auto q = hlyl_from_curve(fhm_curve(table, opts));
    const bool ok = std::abs(m.hlyl - kFromMTarget) <= kEmpiricalTol && std::abs(q.hlyl - kFromQTarget) <= kEmpiricalTol &&
                    m.x_max >= kXMaxLo && m.x_max <= kXMaxHi;
    o.verdict = ok ? Verdict::pass : Verdict::fail;
    o.summary = fmt::format("empirical HLYL from {}: from_m={:.3f} (x_max {}), from_q={:.3f} (x_max {})",
                            path.filename().string(), m.hlyl, m.x_max, q.hlyl, q.x_max);
    return o;
}

MortalitySchedule single_year(int first, int last, const std::function<double(int)> &rate) {
    std::vector<ScheduleEntry> e;
    for (int x = first; x <= last; ++x) {
        ScheduleEntry s;
        s.age_start = x;
        s.m = rate(x);
        e.push_back(s);
    }
    return MortalitySchedule(std::move(e));
}

Outcome criterion_8() {
    Outcome o;
    bool ok = true;
    const auto record = [&](bool pass, const std::string &what) {
        ok = ok && pass;
        o.details.push_back(fmt::format("{} {}", pass ? "ok  " : "FAIL", what));
    };

    {
        const auto c = fhm_curve(single_year(1, 110, [](int) { return 0.02; }));
        double worst = 0.0;
        for (const auto &p : c.points()) {
            worst = std::max(worst, std::abs(p.fhm - 1.0));
        }
        record(worst <= kExactTol, fmt::format("constant hazard: max|FHM-1|={:.2e}", worst));
    }
    {
        const auto c = fhm_curve(single_year(1, 110, [](int x) { return 0.001 * x; }));
        double worst = 0.0;
        for (const auto &p : c.points()) {
            const double expect = 2.0 * p.age / (p.age + 1.0);
            worst = std::max(worst, std::abs(p.fhm - expect) / expect);
        }
        record(worst <= kExactTol, fmt::format("linear hazard: max rel|FHM-2x/(x+1)|={:.2e}", worst));
    }
    {
        // Rates whose running sum is the falling factorial power x^(k): the
        // discrete counterpart of a Weibull cumulative hazard.
        const double k = kWeibullShape;
        const auto H = [&](double x) { return std::exp(std::lgamma(x + 1.0) - std::lgamma(x + 1.0 - k)); };
        const auto c = fhm_curve(single_year(9, 110, [&](int x) { return x == 9 ? H(9) : H(x) - H(x - 1); }));
        double worst = 0.0;
        for (const auto &p : c.points()) {
            if (p.age >= 10) {
                worst = std::max(worst, std::abs(p.fhm - k));
            }
        }
        record(worst <= kWeibullFhmTol,
               fmt::format("Weibull (shape {}) discrete schedule: max|FHM-shape| over ages 10-110 = {:.2e}", k, worst));

        const double scale = 95.0;
        const auto sampled =
            single_year(1, 110, [&](int x) { return (k / scale) * std::pow(x / scale, k - 1.0); });
        const auto w = fit_weibull(sampled);
        record(std::abs(w.shape - k) <= kRecoveryTol && std::abs(w.scale - scale) <= kRecoveryTol * scale,
               fmt::format("fit_weibull on sampled hazard: shape {:.12f}, scale {:.9f}", w.shape, w.scale));
        const auto cs = fhm_curve(sampled);
        o.details.push_back(fmt::format("info: sampling the continuous hazard at integer ages gives FHM {:.3f} at 97 "
                                        "(sum of rates is not the integral)",
                                        cs.at_age(97).fhm));
    }
    {
        const auto g = fit_gompertz(single_year(0, 110, [](int x) { return 1e-4 * std::exp(0.1 * x); }));
        const bool pass =
            std::abs(g.a / 1e-4 - 1.0) <= kRecoveryTol && std::abs(g.b / 0.1 - 1.0) <= kRecoveryTol;
        record(pass, fmt::format("Gompertz recovery: a={:.12g}, b={:.12g}", g.a, g.b));
    }
    {
        const auto src = parse_life_table(read_text_file(data_path("japan_2011_extended_0_70.tsv")));
        auto scaled = src.schedule.entries();
        for (auto &e : scaled) {
            e.m *= 7.3;
            e.q.reset();
        }
        const auto a = fhm_curve(src.schedule);
        const auto b = fhm_curve(MortalitySchedule(scaled));
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].fhm > 0.0) {
                worst = std::max(worst, std::abs(b[i].fhm / a[i].fhm - 1.0));
            }
        }
        record(worst <= kExactTol, fmt::format("scale invariance m -> 7.3m: max rel diff {:.2e}", worst));
    }
    {
        const auto fit = fit_pipeline(japan_spend(), {});
        double dot = 0.0;
        double mag = 0.0;
        for (std::size_t i = 0; i < fit.data.size(); ++i) {
            dot += fit.features.f[i] * fit.stats.residuals[i];
            mag += std::abs(fit.features.f[i] * fit.stats.residuals[i]);
        }
        record(std::abs(dot) <= kOrthogonalityTol * mag,
               fmt::format("normal equation: |sum f*r| / sum|f*r| = {:.2e}", std::abs(dot) / mag));
        o.details.push_back(fmt::format("info: r2_standard={:.4f}; the published 0.943 is not a target",
                                        fit.stats.r2_standard.value_or(std::nan(""))));
    }
    {
        const auto make = [] {
            const auto fit = fit_pipeline(japan_spend(), {});
            const auto src = parse_life_table(read_text_file(data_path("japan_2011_extended_0_70.tsv")));
            const auto t = build_life_table(src.schedule);
            FhmOptions f;
            const auto cm = fhm_curve(t, f);
            f.source = RateSource::from_q;
            const auto cq = fhm_curve(t, f);
            const auto rows = extended_table(t, cm, cq, summarize_hlyl(t.e0(), hlyl_from_curve(cm), hlyl_from_curve(cq)));
            return render_expenditure_chart(chart_data(fit)) + write_fit_report(fit) + render_fhm_chart(cm, cq) +
                   write_extended_table(rows, src.year);
        };
        const auto first = make();
        record(first == make(), fmt::format("determinism: charts, report and table identical across runs ({} bytes)",
                                            first.size()));
    }
    o.verdict = ok ? Verdict::pass : Verdict::fail;
    o.summary = "property suite";
    return o;
}

} // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                         criterion_5, criterion_6, criterion_7, criterion_8};
    int passed = 0;
    int failed = 0;
    int skipped = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception &e) {
            o.verdict = Verdict::fail;
            o.summary = fmt::format("error: {}", e.what());
        }
        const char *tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
        (o.verdict == Verdict::pass ? passed : o.verdict == Verdict::fail ? failed : skipped)++;
        fmt::print("{} [{}] {}\n", tag, i + 1, o.summary);
        for (const auto &d : o.details) {
            fmt::print("       {}\n", d);
        }
    }
    fmt::print("acceptance: {} passed, {} failed, {} skipped\n", passed, failed, skipped);
    return failed == 0 ? 0 : 1;
}
