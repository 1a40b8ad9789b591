#pragma once

#include "hlyl/lifetable.hpp"

#include <string_view>

namespace hlyl {

struct AgeSpan {
    int start = 0;
    IntervalWidth width = 1;
};

/// Parses "0", "110+", "0--4", "0-4" and "1-4" style age labels.
/// "lo-hi" covers hi - lo + 1 years; "lo+" is open-ended.
[[nodiscard]] AgeSpan parse_age_token(std::string_view token);

} // namespace hlyl
