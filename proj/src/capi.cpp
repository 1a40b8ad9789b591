#include "hlyl/hlyl.h"

#include "hlyl/age_token.hpp"
#include "hlyl/analysis.hpp"
#include "hlyl/data_io.hpp"
#include "hlyl/error.hpp"
#include "hlyl/expenditure.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

struct hlyl_table {
    hlyl::TableSource source;
};

struct hlyl_analysis {
    hlyl::LifeTableAnalysis result;
};

struct hlyl_expenditure {
    hlyl::ExpenditureSeries series;
};

struct hlyl_fit {
    hlyl::ExpenditureFit fit;
};

namespace {

thread_local std::string last_error;

hlyl_status set_error(hlyl_status status, const char *message) {
    last_error = message;
    return status;
}

template <class F>
hlyl_status guarded(F &&body) noexcept {
    try {
        last_error.clear();
        body();
        return HLYL_OK;
    } catch (const hlyl::Error &e) {
        return set_error(static_cast<hlyl_status>(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return set_error(HLYL_E_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return set_error(HLYL_E_INTERNAL, e.what());
    } catch (...) {
        return set_error(HLYL_E_INTERNAL, "unknown error");
    }
}

void require(const void *p, const char *name) {
    if (p == nullptr) {
        hlyl::fail(hlyl::ErrorCode::invalid_argument, std::string(name) + " is null");
    }
}

char *dup_string(const std::string &s) {
    auto *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

hlyl::TableSource parse_source(std::string_view text, hlyl_table_format format, int year) {
    hlyl::ParseOptions opts;
    if (year >= 0) {
        opts.year = year;
    }
    switch (format) {
    case HLYL_FORMAT_AUTO: return hlyl::parse_life_table(text, opts);
    case HLYL_FORMAT_HMD_FULL: return hlyl::parse_life_table(text, hlyl::TableFormat::hmd_full, opts);
    case HLYL_FORMAT_HMD_ABRIDGED: return hlyl::parse_life_table(text, hlyl::TableFormat::hmd_abridged, opts);
    case HLYL_FORMAT_MINIMAL_M: return hlyl::parse_life_table(text, hlyl::TableFormat::minimal_m, opts);
    }
    hlyl::fail(hlyl::ErrorCode::invalid_argument, "unknown table format");
}

const hlyl::FhmCurve &curve_of(const hlyl_analysis *a, hlyl_rate_source source) {
    return source == HLYL_SOURCE_Q ? a->result.curve_q : a->result.curve_m;
}

} // namespace

extern "C" {

const char *hlyl_version(void) { return HLYL_VERSION; }

const char *hlyl_last_error(void) { return last_error.c_str(); }

void hlyl_string_free(char *s) { std::free(s); }

hlyl_status hlyl_table_load(const char *path, hlyl_table_format format, int year, hlyl_table **out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        const auto text = hlyl::read_text_file(path);
        *out = new hlyl_table{parse_source(text, format, year)};
    });
}

hlyl_status hlyl_table_parse(const char *text, size_t length, hlyl_table_format format, int year, hlyl_table **out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = nullptr;
        *out = new hlyl_table{parse_source(std::string_view(text, length), format, year)};
    });
}

void hlyl_table_free(hlyl_table *table) { delete table; }

size_t hlyl_table_rows(const hlyl_table *table) { return table == nullptr ? 0 : table->source.schedule.size(); }

hlyl_table_format hlyl_table_detected_format(const hlyl_table *table) {
    if (table == nullptr) {
        return HLYL_FORMAT_AUTO;
    }
    switch (table->source.format) {
    case hlyl::TableFormat::hmd_full: return HLYL_FORMAT_HMD_FULL;
    case hlyl::TableFormat::hmd_abridged: return HLYL_FORMAT_HMD_ABRIDGED;
    case hlyl::TableFormat::minimal_m: return HLYL_FORMAT_MINIMAL_M;
    }
    return HLYL_FORMAT_AUTO;
}

int hlyl_table_has_reference(const hlyl_table *table) {
    return table != nullptr && table->source.reference.has_value() ? 1 : 0;
}

void hlyl_analysis_options_init(hlyl_analysis_options *options) {
    if (options == nullptr) {
        return;
    }
    const hlyl::AnalysisOptions defaults;
    options->radix = defaults.build.radix;
    options->qconv = HLYL_QCONV_ACTUARIAL;
    options->lambda = defaults.lambda;
    options->group_width_weighting = -1;
    options->gompertz_lo = defaults.gompertz_window.lo;
    options->gompertz_hi = defaults.gompertz_window.hi;
    options->weibull_lo = defaults.weibull_window.lo;
    options->weibull_hi = defaults.weibull_window.hi;
    options->models = HLYL_MODEL_GOMPERTZ | HLYL_MODEL_WEIBULL;
    options->has_headline_hlyl = 0;
    options->headline_hlyl = 0.0;
    options->x_max = -1;
    options->seed_tail_from_reference = 1;
}

hlyl_status hlyl_analyze(const hlyl_table *table, const hlyl_analysis_options *options, hlyl_analysis **out) {
    return guarded([&] {
        require(table, "table");
        require(out, "out");
        *out = nullptr;
        hlyl_analysis_options o;
        hlyl_analysis_options_init(&o);
        if (options != nullptr) {
            o = *options;
        }
        hlyl::AnalysisOptions a;
        a.build.radix = o.radix;
        a.build.qconv = o.qconv == HLYL_QCONV_IDENTITY ? hlyl::QConversion::identity : hlyl::QConversion::actuarial;
        a.lambda = o.lambda;
        if (o.group_width_weighting >= 0) {
            a.group_width_weighting = o.group_width_weighting != 0;
        }
        a.gompertz_window = {o.gompertz_lo, o.gompertz_hi};
        a.weibull_window = {o.weibull_lo, o.weibull_hi};
        a.gompertz = (o.models & HLYL_MODEL_GOMPERTZ) != 0;
        a.weibull = (o.models & HLYL_MODEL_WEIBULL) != 0;
        if (o.has_headline_hlyl != 0) {
            a.headline_hlyl = o.headline_hlyl;
        }
        if (o.x_max >= 0) {
            a.x_max = o.x_max;
        }
        a.seed_tail_from_reference = o.seed_tail_from_reference != 0;
        if (!(a.build.radix > 0.0)) {
            hlyl::fail(hlyl::ErrorCode::invalid_argument, "radix must be positive");
        }
        *out = new hlyl_analysis{hlyl::analyze_life_table(table->source, a)};
    });
}

void hlyl_analysis_free(hlyl_analysis *analysis) { delete analysis; }

hlyl_status hlyl_analysis_summary(const hlyl_analysis *analysis, hlyl_summary *out) {
    return guarded([&] {
        require(analysis, "analysis");
        require(out, "out");
        const auto &r = analysis->result;
        const auto &s = r.summary;
        *out = hlyl_summary{};
        out->e0 = s.e0;
        out->hle0 = r.hle0;
        out->hlyl_from_m = s.hlyl_from_m;
        out->hlyl_from_q = s.hlyl_from_q;
        if (s.hlyl_gompertz && r.gompertz) {
            out->has_gompertz = 1;
            out->hlyl_gompertz = *s.hlyl_gompertz;
            out->gompertz_a = r.gompertz->a;
            out->gompertz_b = r.gompertz->b;
        }
        if (s.hlyl_weibull && r.weibull) {
            out->has_weibull = 1;
            out->hlyl_weibull = *s.hlyl_weibull;
            out->weibull_shape = r.weibull->shape;
            out->weibull_scale = r.weibull->scale;
        }
        out->hlyl_average = s.hlyl_average;
        out->headline_hlyl = r.headline_hlyl;
        out->x_max = s.x_max;
        out->schedule_x_max = r.schedule_x_max;
        out->x_max_q = hlyl::hlyl_from_curve(r.curve_q).x_max;
        out->hle_warning = r.hle0 < 0.0 || s.hle_warning ? 1 : 0;
        if (r.year) {
            out->has_year = 1;
            out->year = *r.year;
        }
    });
}

size_t hlyl_analysis_note_count(const hlyl_analysis *analysis) {
    return analysis == nullptr ? 0 : analysis->result.notes.size();
}

const char *hlyl_analysis_note(const hlyl_analysis *analysis, size_t index) {
    if (analysis == nullptr || index >= analysis->result.notes.size()) {
        return nullptr;
    }
    return analysis->result.notes[index].c_str();
}

size_t hlyl_analysis_rows(const hlyl_analysis *analysis) {
    return analysis == nullptr ? 0 : analysis->result.rows.size();
}

hlyl_status hlyl_analysis_fhm_point(const hlyl_analysis *analysis, hlyl_rate_source source, size_t index,
                                    hlyl_fhm_point *out) {
    return guarded([&] {
        require(analysis, "analysis");
        require(out, "out");
        const auto &curve = curve_of(analysis, source);
        if (index >= curve.size()) {
            hlyl::fail(hlyl::ErrorCode::invalid_argument, "index out of range");
        }
        const auto &p = curve[index];
        *out = hlyl_fhm_point{p.age, p.cum, p.xm, p.fhm, p.searchable ? 1 : 0};
    });
}

hlyl_status hlyl_analysis_row(const hlyl_analysis *analysis, size_t index, hlyl_row *out) {
    return guarded([&] {
        require(analysis, "analysis");
        require(out, "out");
        const auto &rows = analysis->result.rows;
        if (index >= rows.size()) {
            hlyl::fail(hlyl::ErrorCode::invalid_argument, "index out of range");
        }
        const auto &r = rows[index];
        const auto &b = r.base;
        *out = hlyl_row{b.age_start, b.width.value_or(0), b.m, b.q, b.a, b.l, b.d, b.L, b.T, b.e, r.hlyl, r.hle};
    });
}

hlyl_status hlyl_analysis_extended_csv(const hlyl_analysis *analysis, char **out) {
    return guarded([&] {
        require(analysis, "analysis");
        require(out, "out");
        *out = dup_string(hlyl::write_extended_table(analysis->result.rows, analysis->result.year));
    });
}

hlyl_status hlyl_analysis_write_extended(const hlyl_analysis *analysis, const char *path) {
    return guarded([&] {
        require(analysis, "analysis");
        require(path, "path");
        hlyl::write_text_file_atomic(path, hlyl::write_extended_table(analysis->result.rows, analysis->result.year));
    });
}

hlyl_status hlyl_analysis_fhm_svg(const hlyl_analysis *analysis, const char *title, char **out) {
    return guarded([&] {
        require(analysis, "analysis");
        require(out, "out");
        *out = dup_string(hlyl::render_fhm_chart(analysis->result.curve_m, analysis->result.curve_q,
                                                 title == nullptr ? "" : title));
    });
}

hlyl_status hlyl_analysis_write_fhm_chart(const hlyl_analysis *analysis, const char *path, const char *title) {
    return guarded([&] {
        require(analysis, "analysis");
        require(path, "path");
        hlyl::write_text_file_atomic(path, hlyl::render_fhm_chart(analysis->result.curve_m, analysis->result.curve_q,
                                                                  title == nullptr ? "" : title));
    });
}

hlyl_status hlyl_expenditure_load(const char *path, hlyl_expenditure **out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        *out = new hlyl_expenditure{hlyl::parse_expenditure(hlyl::read_text_file(path))};
    });
}

hlyl_status hlyl_expenditure_parse(const char *text, size_t length, hlyl_expenditure **out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = nullptr;
        *out = new hlyl_expenditure{hlyl::parse_expenditure(std::string_view(text, length))};
    });
}

void hlyl_expenditure_free(hlyl_expenditure *series) { delete series; }

size_t hlyl_expenditure_groups(const hlyl_expenditure *series) {
    return series == nullptr ? 0 : series->series.size();
}

hlyl_status hlyl_expenditure_use_table_rates(hlyl_expenditure *series, const hlyl_table *table) {
    return guarded([&] {
        require(series, "series");
        require(table, "table");
        auto groups = series->series.groups();
        const auto &entries = table->source.schedule.entries();
        for (auto &g : groups) {
            const int start = hlyl::parse_age_token(g.label).start;
            const auto it = std::find_if(entries.begin(), entries.end(),
                                         [&](const hlyl::ScheduleEntry &e) { return e.age_start == start; });
            if (it == entries.end()) {
                hlyl::fail(hlyl::ErrorCode::age_mismatch,
                           "life table has no row starting at age " + std::to_string(start) + " (group " + g.label +
                               ")");
            }
            g.m = it->m;
        }
        series->series = hlyl::ExpenditureSeries(std::move(groups), series->series.currency_unit());
    });
}

void hlyl_fit_options_init(hlyl_fit_options *options) {
    if (options == nullptr) {
        return;
    }
    const hlyl::ExpenditureOptions defaults;
    options->move_up_auto = 1;
    options->move_up = 0.0;
    options->has_fixed_k = 0;
    options->fixed_k = 0.0;
    options->first_group_multiplier = defaults.first_group_multiplier;
    options->se_divisor = defaults.se_divisor == hlyl::SeDivisor::n ? HLYL_SE_N : HLYL_SE_N_MINUS_P;
}

hlyl_status hlyl_fit_run(const hlyl_expenditure *series, const hlyl_fit_options *options, hlyl_fit **out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        *out = nullptr;
        hlyl_fit_options o;
        hlyl_fit_options_init(&o);
        if (options != nullptr) {
            o = *options;
        }
        hlyl::ExpenditureOptions e;
        if (o.move_up_auto == 0) {
            e.move_up = o.move_up;
        }
        if (o.has_fixed_k != 0) {
            e.fixed_k = o.fixed_k;
        }
        e.first_group_multiplier = o.first_group_multiplier;
        e.se_divisor = o.se_divisor == HLYL_SE_N_MINUS_P ? hlyl::SeDivisor::n_minus_p : hlyl::SeDivisor::n;
        *out = new hlyl_fit{hlyl::fit_pipeline(series->series, e)};
    });
}

void hlyl_fit_free(hlyl_fit *fit) { delete fit; }

hlyl_status hlyl_fit_summary_get(const hlyl_fit *fit, hlyl_fit_summary *out) {
    return guarded([&] {
        require(fit, "fit");
        require(out, "out");
        const auto &f = fit->fit;
        *out = hlyl_fit_summary{};
        out->n = f.data.size();
        out->mx_star = f.mx_star;
        out->move_up = f.move_up;
        out->k = f.k;
        out->k_fixed = f.k_source == hlyl::KSource::fixed ? 1 : 0;
        out->sse = f.stats.sse;
        out->se = f.stats.se;
        if (f.stats.r2_standard) {
            out->has_r2_standard = 1;
            out->r2_standard = *f.stats.r2_standard;
        }
        out->sum_estimates = f.stats.sum_estimates;
        out->sum_data = f.stats.sum_data;
        out->moveup_fraction = f.stats.moveup_fraction;
    });
}

hlyl_status hlyl_fit_estimate(const hlyl_fit *fit, size_t index, double *out) {
    return guarded([&] {
        require(fit, "fit");
        require(out, "out");
        if (index >= fit->fit.estimates.size()) {
            hlyl::fail(hlyl::ErrorCode::invalid_argument, "index out of range");
        }
        *out = fit->fit.estimates[index];
    });
}

hlyl_status hlyl_fit_feature(const hlyl_fit *fit, size_t index, double *out) {
    return guarded([&] {
        require(fit, "fit");
        require(out, "out");
        if (index >= fit->fit.features.f.size()) {
            hlyl::fail(hlyl::ErrorCode::invalid_argument, "index out of range");
        }
        *out = fit->fit.features.f[index];
    });
}

hlyl_status hlyl_fit_report_json(const hlyl_fit *fit, char **out) {
    return guarded([&] {
        require(fit, "fit");
        require(out, "out");
        *out = dup_string(hlyl::write_fit_report(fit->fit));
    });
}

hlyl_status hlyl_fit_write_report(const hlyl_fit *fit, const char *path) {
    return guarded([&] {
        require(fit, "fit");
        require(path, "path");
        hlyl::write_text_file_atomic(path, hlyl::write_fit_report(fit->fit));
    });
}

hlyl_status hlyl_fit_chart_svg(const hlyl_fit *fit, char **out) {
    return guarded([&] {
        require(fit, "fit");
        require(out, "out");
        *out = dup_string(hlyl::render_expenditure_chart(hlyl::chart_data(fit->fit)));
    });
}

hlyl_status hlyl_fit_write_chart(const hlyl_fit *fit, const char *path) {
    return guarded([&] {
        require(fit, "fit");
        require(path, "path");
        hlyl::write_text_file_atomic(path, hlyl::render_expenditure_chart(hlyl::chart_data(fit->fit)));
    });
}

} // extern "C"
