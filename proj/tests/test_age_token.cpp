#include "hlyl/age_token.hpp"
#include "hlyl/error.hpp"

#include <doctest.h>

using namespace hlyl;

TEST_CASE("age tokens") {
    CHECK(parse_age_token("0").start == 0);
    CHECK(parse_age_token("0").width == IntervalWidth{1});
    CHECK(parse_age_token("110+").start == 110);
    CHECK_FALSE(parse_age_token("110+").width.has_value());
    CHECK(parse_age_token("0--4").width == IntervalWidth{5});
    CHECK(parse_age_token("0-4").width == IntervalWidth{5});
    CHECK(parse_age_token("1-4").start == 1);
    CHECK(parse_age_token("1-4").width == IntervalWidth{4});
    CHECK(parse_age_token("100+").start == 100);
    CHECK(parse_age_token(" 15-19 ").start == 15);
}

TEST_CASE("malformed age tokens") {
    for (const char *bad : {"", "x", "4-0", "-4", "5--", "1.5", "3+4", "+"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS((void)parse_age_token(bad), Error);
    }
}
