#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "selpat/dataset.hpp"
#include "selpat/error.hpp"
#include "support.hpp"

using namespace selpat;

namespace {

TransactionDatabase parse(const std::string& text, FileFormat format = FileFormat::ItemLines, bool center = true) {
    std::istringstream in(text);
    LoadOptions opts;
    opts.format = format;
    opts.db.center = center;
    opts.db.sigma = 1.0;
    return read_database(in, opts);
}

} // namespace

TEST_CASE("pattern validation") {
    CHECK_THROWS_AS(Pattern(std::vector<Item>{}), ValidationError);
    CHECK_THROWS_AS(Pattern({2, 1}), ValidationError);
    CHECK_THROWS_AS(Pattern({1, 1}), ValidationError);
    const Pattern p({0, 3});
    CHECK(p.to_string() == "{0,3}");
    CHECK(Pattern({0}).is_subset_of(p));
    CHECK_FALSE(Pattern({1}).is_subset_of(p));
    CHECK(Pattern({0, 3}) < Pattern({1}));
}

TEST_CASE("item-lines parsing with comments, blank lines and empty transactions") {
    const auto db = parse("# header comment\n1.0\t0 2\n\n-1.0\t\n2.5\t2 1\n", FileFormat::ItemLines, false);
    REQUIRE(db.n() == 3);
    CHECK(db.d() == 3);
    CHECK(db.transaction(1).empty());
    const std::vector<Item> sorted{1, 2};
    CHECK(std::vector<Item>(db.transaction(2).begin(), db.transaction(2).end()) == sorted);
    CHECK(db.y()[2] == 2.5);
    CHECK_FALSE(db.centered());
}

TEST_CASE("parse errors carry the line number") {
    try {
        parse("1.0\t0 1\n2.0\t3 3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse("abc\t0\n1\t1\n"), ParseError);
    CHECK_THROWS_AS(parse("1\t0  1\n2\t1\n"), ParseError);
    CHECK_THROWS_AS(parse("1\t-1\n2\t1\n"), ParseError);
}

TEST_CASE("binary csv parsing") {
    const auto db = parse("y,f0,f1,f2\n1.5,1,0,1\n-1.5,0,0,0\n", FileFormat::BinaryCsv, false);
    CHECK(db.n() == 2);
    CHECK(db.d() == 3);
    CHECK(db.transaction(0).size() == 2);
    CHECK(db.transaction(1).empty());
    CHECK_THROWS_AS(parse("y,f0\n1,2\n2,0\n", FileFormat::BinaryCsv), ParseError);
    CHECK_THROWS_AS(parse("y,f1\n1,1\n2,0\n", FileFormat::BinaryCsv), ParseError);
    CHECK_THROWS_AS(parse("y,f0\n1,1,0\n2,0\n", FileFormat::BinaryCsv), ParseError);
    CHECK_THROWS_AS(parse("", FileFormat::BinaryCsv), ParseError);
}

TEST_CASE("validation of the database contract") {
    TransactionDatabase::Options opts;
    CHECK_THROWS_AS(TransactionDatabase({{0}}, {1.0}, opts), ValidationError);
    CHECK_THROWS_AS(TransactionDatabase({{0}, {1}}, {1.0}, opts), ValidationError);
    opts.num_items = 1;
    CHECK_THROWS_AS(TransactionDatabase({{0}, {1}}, {1.0, 2.0}, opts), ValidationError);
    opts.num_items.reset();
    opts.sigma = -1.0;
    CHECK_THROWS_AS(TransactionDatabase({{0}, {1}}, {1.0, 2.0}, opts), ValidationError);
    opts.sigma.reset();
    CHECK_THROWS_AS(TransactionDatabase({{0}, {1}}, {1.0, 1.0}, opts), ValidationError);
}

TEST_CASE("centering and sample sigma") {
    TransactionDatabase::Options opts;
    const TransactionDatabase db({{0}, {1}, {0, 1}}, {1.0, 2.0, 6.0}, opts);
    CHECK(db.y()[0] == doctest::Approx(-2.0));
    CHECK(db.y()[2] == doctest::Approx(3.0));
    // sample sd of {1, 2, 6}: mean 3, squared deviations 4 + 1 + 9 = 14, 14 / 2 = 7.
    CHECK(db.sigma() == doctest::Approx(std::sqrt(7.0)));
    CHECK(db.sigma_estimated());
    opts.sigma = 0.5;
    const TransactionDatabase known({{0}, {1}}, {1.0, 2.0}, opts);
    CHECK(known.sigma() == 0.5);
    CHECK_FALSE(known.sigma_estimated());
}

TEST_CASE("occurrence vectors and scores match a dense recomputation") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto db = oracle::random_db(70, 6, 0.5, seed);
        for (const auto& p : oracle::all_patterns(6, 3)) {
            const auto tau = occurrence(db, p);
            const auto dense = oracle::dense_occurrence(db, p);
            CHECK(tau.to_dense() == dense);
            CHECK(score(db, tau) == oracle::dense_score(dense, db.y()));
        }
    }
}

TEST_CASE("an item beyond d never occurs") {
    const auto db = oracle::random_db(10, 3, 0.5, 3);
    CHECK(occurrence(db, Pattern({5})).none());
}

TEST_CASE("writing and reloading round-trips exactly") {
    const auto db = oracle::random_db(25, 7, 0.4, 11);
    for (auto format : {FileFormat::ItemLines, FileFormat::BinaryCsv}) {
        std::stringstream buf;
        write_database(db, buf, format);
        LoadOptions opts;
        opts.format = format;
        opts.db.center = false;
        opts.db.num_items = db.d();
        opts.db.sigma = db.sigma();
        const auto back = read_database(buf, opts);
        REQUIRE(back.n() == db.n());
        for (std::size_t i = 0; i < db.n(); ++i) {
            CHECK(back.y()[i] == db.y()[i]);
            CHECK(std::vector<Item>(back.transaction(i).begin(), back.transaction(i).end()) ==
                  std::vector<Item>(db.transaction(i).begin(), db.transaction(i).end()));
        }
    }
}

TEST_CASE("subsets re-center within the kept rows") {
    const auto db = oracle::random_db(20, 4, 0.5, 4);
    const std::vector<std::size_t> rows{0, 3, 5, 8, 13};
    const auto sub = db.subset(rows, true);
    CHECK(sub.n() == rows.size());
    CHECK(sub.d() == db.d());
    double sum = 0.0;
    for (double v : sub.y()) sum += v;
    CHECK(std::abs(sum) < 1e-12);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(sub.transaction(i).size() == db.transaction(rows[i]).size());
    }
}

TEST_CASE("the shipped example file loads") {
    LoadOptions opts;
    const auto db = load_database(SELPAT_TEST_DATA "/toy.txt", opts);
    CHECK(db.n() == 2);
    CHECK_THROWS_AS(load_database(SELPAT_TEST_DATA "/missing.txt", opts), ValidationError);
}
