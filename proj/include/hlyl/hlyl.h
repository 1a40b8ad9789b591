/* C interface to the hlyl library. */
#ifndef HLYL_HLYL_H
#define HLYL_HLYL_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(HLYL_BUILDING)
#define HLYL_API __declspec(dllexport)
#else
#define HLYL_API __declspec(dllimport)
#endif
#else
#define HLYL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hlyl_status {
    HLYL_OK = 0,
    HLYL_E_INVALID_ARGUMENT = 1,
    HLYL_E_DOMAIN = 2,
    HLYL_E_PARSE = 3,
    HLYL_E_IO = 4,
    HLYL_E_UNDEFINED_FRACTION = 5,
    HLYL_E_AGE_MISMATCH = 6,
    HLYL_E_DEGENERATE = 7,
    HLYL_E_INTERNAL = 99
} hlyl_status;

/* Library version, e.g. "0.1.0". */
HLYL_API const char *hlyl_version(void);

/* Message for the last failing call on this thread; "" when none. */
HLYL_API const char *hlyl_last_error(void);

/* Releases strings returned through char** out-parameters. */
HLYL_API void hlyl_string_free(char *s);

/* ---- life tables ---- */

typedef enum hlyl_table_format {
    HLYL_FORMAT_AUTO = 0,
    HLYL_FORMAT_HMD_FULL = 1,
    HLYL_FORMAT_HMD_ABRIDGED = 2,
    HLYL_FORMAT_MINIMAL_M = 3
} hlyl_table_format;

typedef struct hlyl_table hlyl_table;

/* year < 0 accepts a single-year file only. */
HLYL_API hlyl_status hlyl_table_load(const char *path, hlyl_table_format format, int year, hlyl_table **out);
HLYL_API hlyl_status hlyl_table_parse(const char *text, size_t length, hlyl_table_format format, int year,
                                      hlyl_table **out);
HLYL_API void hlyl_table_free(hlyl_table *table);
HLYL_API size_t hlyl_table_rows(const hlyl_table *table);
HLYL_API hlyl_table_format hlyl_table_detected_format(const hlyl_table *table);
/* 1 when the file carried published lx, dx, Lx, Tx and ex columns. */
HLYL_API int hlyl_table_has_reference(const hlyl_table *table);

typedef enum hlyl_qconv { HLYL_QCONV_ACTUARIAL = 0, HLYL_QCONV_IDENTITY = 1 } hlyl_qconv;

enum { HLYL_MODEL_GOMPERTZ = 1, HLYL_MODEL_WEIBULL = 2 };

typedef struct hlyl_analysis_options {
    double radix;
    hlyl_qconv qconv;
    double lambda;
    int group_width_weighting; /* -1 automatic, 0 off, 1 on */
    int gompertz_lo, gompertz_hi;
    int weibull_lo, weibull_hi;
    int models; /* bitmask of HLYL_MODEL_* */
    int has_headline_hlyl;
    double headline_hlyl;
    int x_max; /* < 0: empirical */
    int seed_tail_from_reference;
} hlyl_analysis_options;

HLYL_API void hlyl_analysis_options_init(hlyl_analysis_options *options);

typedef struct hlyl_analysis hlyl_analysis;

HLYL_API hlyl_status hlyl_analyze(const hlyl_table *table, const hlyl_analysis_options *options,
                                  hlyl_analysis **out);
HLYL_API void hlyl_analysis_free(hlyl_analysis *analysis);

typedef struct hlyl_summary {
    double e0;
    double hle0;
    double hlyl_from_m;
    double hlyl_from_q;
    int has_gompertz;
    double hlyl_gompertz;
    double gompertz_a, gompertz_b;
    int has_weibull;
    double hlyl_weibull;
    double weibull_shape, weibull_scale;
    double hlyl_average;
    double headline_hlyl;
    int x_max;          /* empirical, from the m-based curve */
    int schedule_x_max; /* used for the per-age HLYL column */
    int x_max_q;        /* empirical, from the q-based curve */
    int hle_warning;
    int has_year;
    int year;
} hlyl_summary;

HLYL_API hlyl_status hlyl_analysis_summary(const hlyl_analysis *analysis, hlyl_summary *out);
HLYL_API size_t hlyl_analysis_note_count(const hlyl_analysis *analysis);
/* Borrowed pointer, valid while the analysis lives. */
HLYL_API const char *hlyl_analysis_note(const hlyl_analysis *analysis, size_t index);

typedef enum hlyl_rate_source { HLYL_SOURCE_M = 0, HLYL_SOURCE_Q = 1 } hlyl_rate_source;

typedef struct hlyl_fhm_point {
    int age;
    double cum;
    double xm;
    double fhm;
    int searchable;
} hlyl_fhm_point;

HLYL_API size_t hlyl_analysis_rows(const hlyl_analysis *analysis);
HLYL_API hlyl_status hlyl_analysis_fhm_point(const hlyl_analysis *analysis, hlyl_rate_source source, size_t index,
                                             hlyl_fhm_point *out);

typedef struct hlyl_row {
    int age_start;
    int width; /* 0 for the open interval */
    double m, q, a, l, d, L, T, e;
    double hlyl, hle;
} hlyl_row;

HLYL_API hlyl_status hlyl_analysis_row(const hlyl_analysis *analysis, size_t index, hlyl_row *out);

/* Extended table as CSV. Free with hlyl_string_free. */
HLYL_API hlyl_status hlyl_analysis_extended_csv(const hlyl_analysis *analysis, char **out);
HLYL_API hlyl_status hlyl_analysis_write_extended(const hlyl_analysis *analysis, const char *path);
HLYL_API hlyl_status hlyl_analysis_fhm_svg(const hlyl_analysis *analysis, const char *title, char **out);
HLYL_API hlyl_status hlyl_analysis_write_fhm_chart(const hlyl_analysis *analysis, const char *path,
                                                   const char *title);

/* ---- expenditure ---- */

typedef struct hlyl_expenditure hlyl_expenditure;

HLYL_API hlyl_status hlyl_expenditure_load(const char *path, hlyl_expenditure **out);
HLYL_API hlyl_status hlyl_expenditure_parse(const char *text, size_t length, hlyl_expenditure **out);
HLYL_API void hlyl_expenditure_free(hlyl_expenditure *series);
HLYL_API size_t hlyl_expenditure_groups(const hlyl_expenditure *series);
/* Replaces each group's rate with the table's m at the same starting age.
   Every group must have a matching row. */
HLYL_API hlyl_status hlyl_expenditure_use_table_rates(hlyl_expenditure *series, const hlyl_table *table);

typedef enum hlyl_se_divisor { HLYL_SE_N = 0, HLYL_SE_N_MINUS_P = 1 } hlyl_se_divisor;

typedef struct hlyl_fit_options {
    int move_up_auto; /* 1: minimum observed spend */
    double move_up;
    int has_fixed_k;
    double fixed_k;
    double first_group_multiplier;
    hlyl_se_divisor se_divisor;
} hlyl_fit_options;

HLYL_API void hlyl_fit_options_init(hlyl_fit_options *options);

typedef struct hlyl_fit hlyl_fit;

HLYL_API hlyl_status hlyl_fit_run(const hlyl_expenditure *series, const hlyl_fit_options *options, hlyl_fit **out);
HLYL_API void hlyl_fit_free(hlyl_fit *fit);

typedef struct hlyl_fit_summary {
    size_t n;
    double mx_star;
    double move_up;
    double k;
    int k_fixed;
    double sse;
    double se;
    int has_r2_standard;
    double r2_standard;
    double sum_estimates;
    double sum_data;
    double moveup_fraction;
} hlyl_fit_summary;

HLYL_API hlyl_status hlyl_fit_summary_get(const hlyl_fit *fit, hlyl_fit_summary *out);
HLYL_API hlyl_status hlyl_fit_estimate(const hlyl_fit *fit, size_t index, double *out);
HLYL_API hlyl_status hlyl_fit_feature(const hlyl_fit *fit, size_t index, double *out);
HLYL_API hlyl_status hlyl_fit_report_json(const hlyl_fit *fit, char **out);
HLYL_API hlyl_status hlyl_fit_write_report(const hlyl_fit *fit, const char *path);
HLYL_API hlyl_status hlyl_fit_chart_svg(const hlyl_fit *fit, char **out);
HLYL_API hlyl_status hlyl_fit_write_chart(const hlyl_fit *fit, const char *path);

#ifdef __cplusplus
}
#endif

#endif
