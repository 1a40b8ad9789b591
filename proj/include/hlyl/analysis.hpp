#pragma once

#include "hlyl/data_io.hpp"
#include "hlyl/fhm.hpp"
#include "hlyl/lifetable.hpp"
#include "hlyl/parametric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hlyl {

struct AnalysisOptions {
    BuildOptions build;
    double lambda = 1.0;
    /// Unset: on when any interval is wider than one year.
    std::optional<bool> group_width_weighting;
    AgeWindow gompertz_window;
    AgeWindow weibull_window;
    bool gompertz = true;
    bool weibull = true;
    /// HLYL at birth used for the HLE column instead of the average estimate.
    std::optional<double> headline_hlyl;
    /// Replaces the empirical x_max in the HLYL schedule and the Gompertz cap.
    std::optional<int> x_max;
    /// Seed the person-years above a closed final row from a published Tx.
    bool seed_tail_from_reference = true;
};

struct LifeTableAnalysis {
    MortalitySchedule schedule;
    LifeTable table;
    FhmCurve curve_m;
    FhmCurve curve_q;
    std::optional<GompertzParams> gompertz;
    std::optional<WeibullParams> weibull;
    HlylSummary summary;
    double headline_hlyl = 0.0;
    int schedule_x_max = 0;
    double hle0 = 0.0;
    std::vector<ExtendedRow> rows;
    std::optional<int> year;
    /// Non-fatal conditions worth reporting (failed parametric fits, tail
    /// seeding, HLYL above e0).
    std::vector<std::string> notes;
};

[[nodiscard]] LifeTableAnalysis analyze_life_table(const TableSource &source, const AnalysisOptions &options = {});

} // namespace hlyl
