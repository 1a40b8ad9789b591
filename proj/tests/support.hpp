#pragma once

#include "hlyl/data_io.hpp"
#include "hlyl/lifetable.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace hlyl::test {

inline std::string data_path(const std::string &name) { return std::string(HLYL_TEST_DATA_DIR) + "/" + name; }

inline TableSource load_table(const std::string &name, const ParseOptions &opts = {}) {
    return parse_life_table(read_text_file(data_path(name)), opts);
}

/// Single-year schedule over [first, last] with m = rate(age). The last row is
/// open when `open_last` is set.
inline MortalitySchedule single_year(int first, int last, const std::function<double(int)> &rate,
                                     bool open_last = false) {
    std::vector<ScheduleEntry> entries;
    for (int x = first; x <= last; ++x) {
        ScheduleEntry e;
        e.age_start = x;
        e.width = (open_last && x == last) ? open_interval : IntervalWidth{1};
        e.m = rate(x);
        entries.push_back(e);
    }
    return MortalitySchedule(std::move(entries));
}

/// Random single-year schedule from age 0 with a rising hazard and an open
/// final interval.
inline MortalitySchedule random_schedule(std::mt19937 &rng, int last_age = 100) {
    std::uniform_real_distribution<double> base(1e-5, 5e-3);
    std::uniform_real_distribution<double> slope(0.05, 0.12);
    std::uniform_real_distribution<double> noise(0.8, 1.25);
    const double a = base(rng);
    const double b = slope(rng);
    return single_year(
        0, last_age, [&](int x) { return std::min(0.9, a * std::exp(b * x) * noise(rng)); }, true);
}

} // namespace hlyl::test
