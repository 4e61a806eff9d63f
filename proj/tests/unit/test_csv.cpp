#include <doctest.h>

#include "excitrans/csv.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace excitrans;

namespace {

CsvRow sample_row(int i) {
    CsvRow r;
    r.scenario = "fig3a";
    r.seed = std::to_string(100 + i);
    r.N = 25 * (i + 1);
    r.M = 50;
    r.g = 0.1 * i;
    r.Jprime = 13.76 + i;
    r.Delta = -1.0 / 3.0;
    r.kappa = 0.0;
    r.gamma_P = 0.5;
    r.gamma_out = 2.0;
    r.gamma_sp = 0.04;
    r.gamma_deph = 0.9;
    r.deltaJ = 0.2;
    r.observable = i % 2 ? "T_ts" : "T_tl|series=LR";
    if (i % 3) r.t = 30.0 + i;
    r.value = std::exp(-3.7 * i);
    return r;
}

}  // namespace

TEST_CASE("header is the documented column list") {
    CHECK(csv_header() ==
          "scenario,seed,N,M,g,Jprime,Delta,kappa,gamma_P,gamma_out,gamma_sp,gamma_deph,deltaJ,observable_name,"
          "t_or_none,value");
}

TEST_CASE("rows round-trip bit for bit") {
    std::vector<CsvRow> rows;
    for (int i = 0; i < 12; ++i) rows.push_back(sample_row(i));
    rows.back().seed = "mean";
    std::stringstream buffer;
    write_csv(buffer, rows);
    const auto back = read_csv(buffer);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rows[i]);
}

TEST_CASE("number formatting round-trips random doubles") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::ldexp(mantissa(rng), exponent(rng));
        CHECK(parse_number(format_number(x)) == x);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(std::isnan(parse_number(format_number(std::numeric_limits<double>::quiet_NaN()))));
    CHECK(parse_number(format_number(-std::numeric_limits<double>::infinity())) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("missing time is written as none") {
    CsvRow r = sample_row(0);
    r.t.reset();
    CHECK(csv_line(r).find(",none,") != std::string::npos);
}

TEST_CASE("schema drift is reported with the column name") {
    std::stringstream missing("scenario,seed,N\nfig1b,1,50\n");
    try {
        (void)read_csv(missing);
        FAIL("expected CsvSchemaError");
    } catch (const CsvSchemaError& e) {
        CHECK(std::string(e.what()).find("missing column M") != std::string::npos);
    }

    std::stringstream extra(csv_header() + ",bonus\n");
    CHECK_THROWS_WITH_AS((void)read_csv(extra), doctest::Contains("unexpected column bonus"), CsvSchemaError);

    std::stringstream empty("");
    CHECK_THROWS_AS((void)read_csv(empty), CsvSchemaError);

    std::stringstream short_line(csv_header() + "\nfig1b,1,50\n");
    CHECK_THROWS_AS((void)read_csv(short_line), CsvSchemaError);
}

TEST_CASE("separators inside text fields are rejected") {
    CsvRow r = sample_row(1);
    r.observable = "a,b";
    CHECK_THROWS_AS((void)csv_line(r), CsvSchemaError);
}
