#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "spreadq/marketdata.hpp"

using namespace spreadq;
using testing::error_code_of;

TEST_SUITE("marketdata") {

TEST_CASE("dates parse strictly") {
    CHECK(parse_date("2015-01-02") == make_date(2015, 1, 2));
    CHECK_FALSE(parse_date("2015-1-02"));
    CHECK_FALSE(parse_date("2015-02-30"));
    CHECK_FALSE(parse_date("20150102"));
    CHECK(format_date(make_date(2018, 12, 31)) == "2018-12-31");
}

TEST_CASE("load_eod_csv parses a two-row file") {
    testing::TempDir dir("csv");
    const auto p = dir.path() / "AAA.csv";
    testing::write_text(p, "date,open,close,volume\n2015-01-02,10.5,11,100\n2015-01-05,11,12.25,0\n");
    const AssetSeries s = load_eod_csv(p);
    CHECK(s.symbol() == "AAA");
    REQUIRE(s.size() == 2);
    CHECK(s[0].date == make_date(2015, 1, 2));
    CHECK(s[0].open == 10.5);
    CHECK(s[0].close == 11.0);
    CHECK(s[0].volume == 100.0);
    CHECK(s[1].close == 12.25);
    CHECK(s[1].volume == 0.0);
}

TEST_CASE("load_eod_csv sorts out-of-order rows") {
    testing::TempDir dir("csv");
    const auto sorted = dir.path() / "S.csv";
    const auto shuffled = dir.path() / "U.csv";
    testing::write_text(sorted, "date,open,close,volume\n2015-01-02,1,2,3\n2015-01-05,4,5,6\n2015-01-06,7,8,9\n");
    testing::write_text(shuffled, "date,open,close,volume\n2015-01-06,7,8,9\n2015-01-02,1,2,3\n2015-01-05,4,5,6\n");
    const auto a = load_eod_csv(sorted);
    const auto b = load_eod_csv(shuffled);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].date == b[i].date);
        CHECK(a[i].close == b[i].close);
    }
}

TEST_CASE("load_eod_csv error cases") {
    testing::TempDir dir("csv");
    CHECK(error_code_of([&] { load_eod_csv(dir.path() / "nope.csv"); }) == ErrorCode::MissingFile);

    const auto zero = dir.path() / "Z.csv";
    testing::write_text(zero, "date,open,close,volume\n2015-01-02,1,0,3\n");
    CHECK(error_code_of([&] { load_eod_csv(zero); }) == ErrorCode::NonPositivePrice);

    const auto dup = dir.path() / "D.csv";
    testing::write_text(dup, "date,open,close,volume\n2015-01-02,1,2,3\n2015-01-02,1,2,3\n");
    CHECK(error_code_of([&] { load_eod_csv(dup); }) == ErrorCode::DuplicateDate);

    const auto bad = dir.path() / "B.csv";
    testing::write_text(bad, "date,open,close,volume\n2015-01-02,1,2,3\n2015-01-05,1,abc,3\n");
    try {
        load_eod_csv(bad);
        FAIL("expected MalformedRow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedRow);
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }

    const auto header = dir.path() / "H.csv";
    testing::write_text(header, "day,open,close,volume\n2015-01-02,1,2,3\n");
    CHECK(error_code_of([&] { load_eod_csv(header); }) == ErrorCode::MalformedRow);
}

TEST_CASE("write and reload round-trips exactly") {
    testing::TempDir dir("csv");
    const auto s = testing::series("RT", {10.1, 10.2, 9.87654321, 11.0});
    write_eod_csv(dir.path() / "RT.csv", s);
    const auto back = load_eod_csv(dir.path() / "RT.csv");
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(back[i].open == s[i].open);
        CHECK(back[i].close == s[i].close);
        CHECK(back[i].volume == s[i].volume);
    }
}

TEST_CASE("align_pair intersects dates") {
    const auto x = testing::series("X", std::vector<double>(10, 5.0));
    const auto y = testing::series("Y", std::vector<double>(10, 7.0));
    CHECK(align_pair(x, y).size() == 10);

    auto rows = x.rows();
    const auto extra = business_days(make_date(2015, 1, 1), 11).back();
    rows.push_back(Bar{extra, 5.0, 5.0, 1.0});
    const AssetSeries longer("X", rows);
    const PairSeries p = align_pair(longer, y);
    CHECK(p.size() == 10);
    CHECK(p.date(9) != extra);

    const auto late = testing::series("L", std::vector<double>(10, 5.0), make_date(2016, 1, 1));
    CHECK(error_code_of([&] { align_pair(x, late); }) == ErrorCode::InsufficientOverlap);
}

TEST_CASE("align_pair is commutative in dates") {
    std::mt19937_64 rng(3);
    auto [x, y] = independent_walks(30, 0.01, rng);
    auto rows = y.rows();
    rows.erase(rows.begin() + 4);
    rows.erase(rows.begin() + 17);
    const AssetSeries gappy("G", rows);
    const PairSeries a = align_pair(x, gappy);
    const PairSeries b = align_pair(gappy, x);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.date(i) == b.date(i));
}

TEST_CASE("simple_return") {
    const auto s = testing::series("R", {100, 110, 110, 99});
    CHECK(simple_return(s, 1) == doctest::Approx(0.10).epsilon(1e-15));
    CHECK(simple_return(s, 2) == 0.0);
    CHECK(simple_return(s, 3) == doctest::Approx(-0.10).epsilon(1e-15));
    CHECK(error_code_of([&] { simple_return(s, 0); }) == ErrorCode::IndexOutOfRange);
    CHECK(error_code_of([&] { simple_return(s, 4); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("simple_return is scale invariant") {
    const std::vector<double> c = {1.5, 3.0, 2.25, 4.5};
    std::vector<double> scaled;
    for (double v : c) scaled.push_back(v * 4.0);
    const auto a = testing::series("A", c);
    const auto b = testing::series("B", scaled);
    for (std::size_t t = 1; t < c.size(); ++t) CHECK(simple_return(a, t) == simple_return(b, t));
}

TEST_CASE("log_normalize standardizes on the fit range") {
    const double e = std::exp(1.0);
    const auto x = testing::series("X", {e, e * e});
    const auto y = testing::series("Y", {2.0, 3.0});
    const PairSeries p(x, y);
    const NormalizedPrices n = log_normalize(p, testing::full_range(p));
    CHECK(n.rows[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(n.rows[1][1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.mean[1] == doctest::Approx(1.5));
    CHECK(n.stdev[1] == doctest::Approx(0.5));

    std::mt19937_64 rng(9);
    auto [a, b] = independent_walks(120, 0.02, rng);
    const PairSeries q(a, b);
    const NormalizedPrices m = log_normalize(q, testing::full_range(q));
    for (std::size_t c = 0; c < kPriceChannels; ++c) {
        double mean = 0.0, ss = 0.0;
        for (const auto& r : m.rows) mean += r[c];
        mean /= static_cast<double>(m.rows.size());
        for (const auto& r : m.rows) ss += (r[c] - mean) * (r[c] - mean);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::sqrt(ss / static_cast<double>(m.rows.size())) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("log_normalize rejects constant channels") {
    const auto x = testing::series("X", {5.0, 5.0, 5.0});
    const auto y = testing::series("Y", {2.0, 3.0, 4.0});
    const PairSeries p(x, y);
    CHECK(error_code_of([&] { log_normalize(p, testing::full_range(p)); }) == ErrorCode::ZeroVariance);
}

TEST_CASE("log_normalize ignores prices outside the fit range") {
    std::mt19937_64 rng(4);
    auto [a, b] = independent_walks(80, 0.02, rng);
    const PairSeries p(a, b);
    const DateRange fit{p.date(0), p.date(49)};
    const NormalizedPrices before = log_normalize(p, fit);
    auto rows = a.rows();
    for (std::size_t i = 50; i < rows.size(); ++i) rows[i].close *= 3.0;
    const PairSeries mutated(AssetSeries("X", rows), b);
    const NormalizedPrices after = log_normalize(mutated, fit);
    CHECK(before.mean == after.mean);
    CHECK(before.stdev == after.stdev);
    for (std::size_t i = 0; i < 50; ++i) CHECK(before.rows[i] == after.rows[i]);
}

TEST_CASE("rolling protocol") {
    const auto r = make_rollings(make_date(2015, 1, 2), make_date(2018, 12, 31));
    REQUIRE(r.size() == 11);
    CHECK(r[0].train == DateRange{make_date(2015, 1, 2), make_date(2015, 12, 31)});
    CHECK(r[0].validation == DateRange{make_date(2016, 1, 1), make_date(2016, 3, 31)});
    CHECK(r[0].test == DateRange{make_date(2016, 4, 1), make_date(2016, 6, 30)});
    CHECK(r[10].test == DateRange{make_date(2018, 10, 1), make_date(2018, 12, 31)});
    for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(r[k].index == static_cast<int>(k));
        CHECK(month_index(r[k].validation.first) == month_index(r[k].train.last) + 1);
        CHECK(month_index(r[k].test.first) == month_index(r[k].validation.last) + 1);
        CHECK(month_index(r[k].test.last) - month_index(r[k].train.first) + 1 == 18);
        if (k > 0) CHECK(month_index(r[k].test.first) == month_index(r[k - 1].test.first) + 3);
    }
    CHECK(make_rollings(make_date(2015, 1, 1), make_date(2016, 12, 31)).size() == 3);
    CHECK(error_code_of([] { make_rollings(make_date(2015, 1, 1), make_date(2015, 12, 31)); }) ==
          ErrorCode::SampleTooShort);
}

}
