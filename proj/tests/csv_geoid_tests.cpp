#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "tract_equity/csv.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/geoid.hpp"

namespace te = tract_equity;
namespace csv = tract_equity::csv;

TEST_CASE("geoid accepts exactly 11 digits with a nonzero state") {
    auto g = te::GeoId::parse("36047034901");
    REQUIRE(g.has_value());
    CHECK(g->value() == "36047034901");
    CHECK(g->state() == "36");
    CHECK(g->county() == "047");
    CHECK(g->tract() == "034901");
}

TEST_CASE("geoid trims surrounding whitespace") {
    auto g = te::GeoId::parse("  36005027900\t");
    REQUIRE(g.has_value());
    CHECK(g->value() == "36005027900");
}

TEST_CASE("geoid rejects malformed input") {
    CHECK_FALSE(te::GeoId::parse("").has_value());
    CHECK_FALSE(te::GeoId::parse("3604703490").has_value());    // 10 digits
    CHECK_FALSE(te::GeoId::parse("360470349012").has_value());  // 12 digits
    CHECK_FALSE(te::GeoId::parse("36047O34901").has_value());   // letter O
    CHECK_FALSE(te::GeoId::parse("36047 34901").has_value());   // inner space
    CHECK_FALSE(te::GeoId::parse("00047034901").has_value());   // state 00
    CHECK_FALSE(te::GeoId::parse("-6047034901").has_value());
}

TEST_CASE("geoid ordering follows the string value") {
    auto a = te::GeoId::parse("36001000100");
    auto b = te::GeoId::parse("36001000200");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(*a < *b);
    CHECK(*a == *a);
    CHECK(*a != *b);
}

TEST_CASE("split_fields honors quoting only at field start") {
    auto f = csv::split_fields("a,\"b,c\",d", ',');
    REQUIRE(f.size() == 3);
    CHECK(f[1] == "b,c");

    // Mid-field quotes are literal characters, not quoting.
    f = csv::split_fields("5'6\" TALL,x", ',');
    REQUIRE(f.size() == 2);
    CHECK(f[0] == "5'6\" TALL");

    f = csv::split_fields("\"he said \"\"hi\"\"\",y", ',');
    REQUIRE(f.size() == 2);
    CHECK(f[0] == "he said \"hi\"");
}

TEST_CASE("split_fields keeps empty fields") {
    auto f = csv::split_fields(",,x,", ',');
    REQUIRE(f.size() == 4);
    CHECK(f[0].empty());
    CHECK(f[1].empty());
    CHECK(f[2] == "x");
    CHECK(f[3].empty());
}

TEST_CASE("reader exposes header and counts physical lines") {
    std::istringstream in("id,name\r\n1,alpha\n\n2,beta\n");
    csv::Reader r(in);
    CHECK(r.header() == std::vector<std::string>{"id", "name"});
    CHECK(r.require_column("name") == 1);
    CHECK_FALSE(r.find_column("missing").has_value());
    CHECK_THROWS_AS((void)r.require_column("missing"), te::MissingColumnError);

    csv::Row row;
    REQUIRE(r.next(row));
    CHECK(row.fields == std::vector<std::string>{"1", "alpha"});
    CHECK(row.line_number == 2);
    REQUIRE(r.next(row));  // blank line 3 skipped
    CHECK(row.fields[1] == "beta");
    CHECK(row.line_number == 4);
    CHECK_FALSE(r.next(row));
}

TEST_CASE("writer quotes what the reader needs quoted") {
    std::ostringstream out;
    csv::Writer w(out);
    w.write_row({"plain", "with,comma", "with \"quote\"", " leading", "trailing "});

    std::istringstream in("a,b,c,d,e\n" + out.str());
    csv::Reader r(in);
    csv::Row row;
    REQUIRE(r.next(row));
    CHECK(row.fields[0] == "plain");
    CHECK(row.fields[1] == "with,comma");
    CHECK(row.fields[2] == "with \"quote\"");
    CHECK(row.fields[3] == " leading");
    CHECK(row.fields[4] == "trailing ");
}

TEST_CASE("writer quotes embedded newlines even though the reader is line-oriented") {
    // The reader treats input as one record per line, so a newline field
    // cannot round-trip through it; the writer still quotes per RFC4180 so
    // other consumers stay safe.
    std::ostringstream out;
    csv::Writer w(out);
    w.write_row({"a", "nl\nend"});
    CHECK(out.str() == "a,\"nl\nend\"\n");
}

TEST_CASE("format_double writes integral values as integers") {
    CHECK(csv::format_double(0.0) == "0");
    CHECK(csv::format_double(25348000.0) == "25348000");
    CHECK(csv::format_double(-42.0) == "-42");
    CHECK(csv::format_double(9007199254740992.0) == "9007199254740992");  // 2^53
    CHECK(csv::format_double(0.5) == "0.5");
    CHECK(csv::format_double(-0.125) == "-0.125");
}

TEST_CASE("format_double round-trips random doubles exactly") {
    std::mt19937_64 rng(7);
    int checked = 0;
    while (checked < 5000) {
        std::uint64_t bits = rng();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        auto back = csv::parse_double(csv::format_double(v));
        REQUIRE(back.has_value());
        CHECK(*back == v);
        ++checked;
    }
    // Uniform-unit values too: the common case in share columns.
    for (int i = 0; i < 5000; ++i) {
        double v = std::ldexp(static_cast<double>(rng() >> 11), -53);
        auto back = csv::parse_double(csv::format_double(v));
        REQUIRE(back.has_value());
        CHECK(*back == v);
    }
}

TEST_CASE("parse_double requires full consumption") {
    CHECK(csv::parse_double("12.5") == 12.5);
    CHECK(csv::parse_double("  12.5 ") == 12.5);
    CHECK(csv::parse_double("1e3") == 1000.0);
    CHECK_FALSE(csv::parse_double("12.5x").has_value());
    CHECK_FALSE(csv::parse_double("").has_value());
    CHECK_FALSE(csv::parse_double("one").has_value());
}

TEST_CASE("parse_int rejects fractions and garbage") {
    CHECK(csv::parse_int("42") == 42);
    CHECK(csv::parse_int("-17") == -17);
    CHECK_FALSE(csv::parse_int("12.5").has_value());
    CHECK_FALSE(csv::parse_int("42x").has_value());
    CHECK_FALSE(csv::parse_int("").has_value());
}

TEST_CASE("parse_bool accepts the usual spellings") {
    for (const char* t : {"1", "true", "TRUE", "Yes", "y"}) CHECK(csv::parse_bool(t) == true);
    for (const char* f : {"0", "false", "No", "n", "FALSE"}) CHECK(csv::parse_bool(f) == false);
    CHECK_FALSE(csv::parse_bool("maybe").has_value());
    CHECK_FALSE(csv::parse_bool("").has_value());
}

TEST_CASE("trim strips ascii whitespace from both ends") {
    CHECK(csv::trim("  x y  ") == "x y");
    CHECK(csv::trim("\t\r\n") == "");
    CHECK(csv::trim("z") == "z");
}
