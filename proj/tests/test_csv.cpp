#include "mbsed/csv.hpp"

#include <doctest.h>

#include <cmath>

using namespace mbsed;

TEST_CASE("numbers round-trip through text") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123456789, 0.0}) {
        CHECK(std::stod(format_number(v)) == v);
    }
}

TEST_CASE("csv parse") {
    const CsvTable t = parse_csv("# comment\na,b , c\n1,2,3\n\n4, 5 ,6\n");
    REQUIRE(t.header.size() == 3);
    CHECK(t.column("b") == 1);
    CHECK(t.find_column("zz") == -1);
    CHECK_THROWS_AS(t.column("zz"), CsvError);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.number(1, 1) == 5.0);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n").number(0, 1), CsvError);
    CHECK_THROWS_AS(parse_csv("a\nxyz\n").number(0, 0), CsvError);
}

TEST_CASE("writers") {
    Spectrum s{{-0.1, 0.0, 0.1}, {0.2, 0.3, 0.2}, {0.01, 0.01, 0.01}, 40};
    const std::string text = spectrum_csv(s).str();
    CHECK(text.rfind("delta_hz,pe_mean,pe_stderr\n", 0) == 0);
    const CsvTable back = parse_csv(text);
    CHECK(back.number(1, back.column("pe_mean")) == 0.3);

    ShiftResult r;
    r.protocol = Protocol::Rabi;
    r.shift_hz = 0.05;
    r.n_samples = 40;
    const std::string rows = shift_csv({r}, {5, 3, 3}).str();
    CHECK(rows.rfind("protocol,N,T_z_uK,T_r_uK,t_s,tau_s,shift_hz,shift_stderr_hz,pe_op,n_samples,converged\n", 0) == 0);
    CHECK(rows.find("rabi,5,3,3,") != std::string::npos);
}
