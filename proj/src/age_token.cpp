#include "hlyl/age_token.hpp"

#include "hlyl/error.hpp"

#include <charconv>
#include <fmt/format.h>
#include <string>

namespace hlyl {

namespace {

int parse_int(std::string_view s, std::string_view token) {
    int value = 0;
    const auto *end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        fail(ErrorCode::parse_error, fmt::format("unrecognized age token '{}'", token));
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

AgeSpan parse_age_token(std::string_view token) {
    const auto t = trim(token);
    if (t.empty()) {
        fail(ErrorCode::parse_error, "empty age token");
    }
    if (t.back() == '+') {
        return {parse_int(t.substr(0, t.size() - 1), token), open_interval};
    }
    const auto dash = t.find('-');
    if (dash == std::string_view::npos) {
        return {parse_int(t, token), 1};
    }
    auto hi_part = t.substr(dash + 1);
    if (!hi_part.empty() && hi_part.front() == '-') {
        hi_part.remove_prefix(1);
    }
    const int lo = parse_int(t.substr(0, dash), token);
    const int hi = parse_int(hi_part, token);
    if (hi < lo) {
        fail(ErrorCode::parse_error, fmt::format("age range '{}' ends before it starts", token));
    }
    return {lo, hi - lo + 1};
}

} // namespace hlyl
