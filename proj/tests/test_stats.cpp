#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "selpat/error.hpp"
#include "selpat/stats.hpp"
#include "selpat/truncated_normal.hpp"
#include "support.hpp"

using namespace selpat;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool rel_close(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

TransactionDatabase toy() {
    TransactionDatabase::Options opts;
    opts.center = false;
    opts.sigma = 1.0;
    return TransactionDatabase({{0}, {1}}, {-1.5, 1.8}, opts);
}

} // namespace

TEST_CASE("standard normal tails") {
    CHECK(normal_sf(0.0) == 0.5);
    CHECK(rel_close(normal_sf(1.8), 0.0359303191129258, 1e-13));
    CHECK(rel_close(normal_sf(37.0), 5.7255712225246e-300, 1e-10));
    CHECK(normal_sf(-kInf) == 1.0);
    CHECK(normal_sf(kInf) == 0.0);
    CHECK(std::isfinite(log_normal_sf(100.0)));
    CHECK(rel_close(log_normal_sf(100.0), -5005.5242086942, 1e-12));
    CHECK(normal_cdf(-1.8) == normal_sf(1.8));
}

TEST_CASE("untruncated distribution is the plain normal") {
    for (double x : {-5.0, -1.0, 0.0, 0.3, 2.0, 7.5}) {
        const TruncatedNormal tn(0.4, 1.7, -kInf, kInf);
        const double z = (x - 0.4) / 1.7;
        CHECK(std::abs(tn.sf(x) - normal_sf(z)) <= 1e-12);
        CHECK(std::abs(tn.cdf(x) - normal_cdf(z)) <= 1e-12);
    }
}

TEST_CASE("truncated survival values against high-precision references") {
    CHECK(rel_close(TruncatedNormal(0, 1, 0, kInf).sf(1.8), 0.071860638225851601, 1e-12));
    CHECK(rel_close(TruncatedNormal(0, 1, -1, 2).sf(0.5), 0.34911957866337287, 1e-12));
    CHECK(rel_close(TruncatedNormal(1, 2, -3, -0.5).sf(-2), 0.78390391418893761, 1e-12));
    CHECK(rel_close(TruncatedNormal(0, 1, 8, kInf).sf(9), 0.00018141706453202389, 1e-10));
    CHECK(rel_close(TruncatedNormal(0, 1, 8, kInf).sf(38), 4.6382360499150857e-301, 1e-8));
    CHECK(rel_close(TruncatedNormal(0, 1, -kInf, -8).sf(-9), 0.99981858293546798, 1e-12));
    CHECK(rel_close(TruncatedNormal(0, 1, 35, kInf).sf(35.2), 0.00088875512676796183, 1e-9));
    CHECK(rel_close(TruncatedNormal(0, 1, -40, -39).sf(-39.5), 0.9999999970389519, 1e-12));
}

TEST_CASE("clamping and bounds") {
    const TruncatedNormal tn(0, 1, -1, 2);
    CHECK(tn.sf(-5) == 1.0);
    CHECK(tn.sf(5) == 0.0);
    CHECK(tn.cdf(-5) == 0.0);
    CHECK(tn.cdf(5) == 1.0);
    CHECK(std::abs(tn.sf(0.7) + tn.cdf(0.7) - 1.0) < 1e-14);
    CHECK_THROWS_AS(TruncatedNormal(0, 1, 1, 1), InvalidIntervalError);
    CHECK_THROWS_AS(TruncatedNormal(0, 1, 2, 1), InvalidIntervalError);
    CHECK_THROWS_AS(TruncatedNormal(0, 0, 0, 1), ValidationError);
}

TEST_CASE("deep truncation stays finite and monotone") {
    for (double m : {-3.0, 0.0, 2.5}) {
        for (double s : {0.1, 1.0, 4.0}) {
            const double lower = m + 8 * s;
            const TruncatedNormal tn(m, s, lower, kInf);
            double prev = 1.0;
            for (double k = 0.0; k <= 30.0; k += 0.25) {
                const double v = tn.sf(lower + k * s);
                REQUIRE_FALSE(std::isnan(v));
                CHECK(v >= 0.0);
                CHECK(v <= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("Monte-Carlo agreement on random truncations") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        const double m = -1.0 + 2.0 * unif(rng);
        const double s = 0.5 + unif(rng);
        const double lower = m - 1.5 * s * unif(rng);
        const double upper = m + s * (0.2 + 1.5 * unif(rng));
        const double x = lower + (upper - lower) * unif(rng);
        std::normal_distribution<double> draw(m, s);
        std::size_t kept = 0;
        std::size_t above = 0;
        while (kept < 1'000'000) {
            const double v = draw(rng);
            if (v < lower || v > upper) continue;
            ++kept;
            if (v > x) ++above;
        }
        const double est = static_cast<double>(above) / static_cast<double>(kept);
        const double p = TruncatedNormal(m, s, lower, upper).sf(x);
        CHECK(std::abs(est - p) <= 4.0 * std::sqrt(p * (1 - p) / static_cast<double>(kept)) + 1e-12);
    }
}

TEST_CASE("toy p-values") {
    const auto db = toy();
    const auto disc = mine(db, 2, 1, Mode::Positive);
    const EventSpec spec(disc, 2);
    const auto rep = report(db, disc, spec, 0.05);
    REQUIRE(rep.records.size() == 1);
    const auto& rec = rep.records.front();
    CHECK(rec.naive_p == doctest::Approx(0.0359303191129258).epsilon(1e-10));
    CHECK(*rec.selective_p == doctest::Approx(0.071860638225851601).epsilon(1e-10));
    CHECK(rec.interval->lower == doctest::Approx(0.0));
    CHECK(rec.interval->upper == kInf);
    CHECK_FALSE(rec.positive);
    const auto naive = naive_report(db, disc, 0.05);
    CHECK(naive.records.front().positive);
}

TEST_CASE("Bonferroni boundary is strict") {
    CHECK(bonferroni(0.01, 5) == doctest::Approx(0.05));
    CHECK(bonferroni(0.5, 5) == 1.0);
    // A record with adjusted p exactly alpha is negative.
    InferenceReport rep;
    rep.alpha = 0.05;
    rep.k = 5;
    InferenceRecord rec;
    rec.adjusted_p = 0.05;
    rec.positive = rec.adjusted_p < rep.alpha;
    CHECK_FALSE(rec.positive);
}

TEST_CASE("directions follow the mode and sign") {
    const auto db = oracle::random_db(30, 6, 0.5, 12);
    const auto signed_disc = mine(db, 2, 4, Mode::Signed);
    for (std::size_t i = 0; i < signed_disc.selected.size(); ++i) {
        CHECK((test_direction(signed_disc, i) == Direction::Lower) == (signed_disc.selected[i].sign < 0));
    }
    const auto pos = mine(db, 2, 4, Mode::Positive);
    for (std::size_t i = 0; i < pos.selected.size(); ++i) CHECK(test_direction(pos, i) == Direction::Upper);
}

TEST_CASE("selective p-values are exact uniform under the null given the event") {
    // With an unconstrained event (k equals every pattern) selective and naive agree.
    const auto db = oracle::random_db(12, 2, 0.6, 4);
    const auto disc = mine(db, 2, pattern_count(2, 2), Mode::Positive);
    const EventSpec spec(disc, 2);
    const auto rep = report(db, disc, spec, 0.05);
    for (const auto& rec : rep.records) {
        if (!rec.interval) continue;
        CHECK(rec.interval->lower == -kInf);
        CHECK(rec.interval->upper == kInf);
        CHECK(std::abs(*rec.selective_p - rec.naive_p) <= 1e-12);
    }
}

TEST_CASE("a lone signed pattern is conditioned on its sign only") {
    // One item: the event is the sign of the score, so the one-sided p-value doubles.
    const auto db = oracle::random_db(15, 1, 0.5, 6);
    const auto disc = mine(db, 1, 1, Mode::Signed);
    const EventSpec spec(disc, 1);
    const auto rec = report(db, disc, spec, 0.05).records.front();
    REQUIRE(rec.interval);
    CHECK(std::abs(*rec.selective_p - std::min(1.0, 2.0 * rec.naive_p)) <= 1e-12);
}

TEST_CASE("reports are sorted and decisions consistent") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto db = oracle::random_db(40, 8, 0.5, seed);
        for (auto mode : {Mode::Positive, Mode::Signed, Mode::Sequential}) {
            InferenceOptions opts;
            opts.mode = mode;
            opts.k = 3;
            opts.max_size = 2;
            const auto rep = infer(db, opts);
            CHECK(rep.records.size() == 3);
            for (std::size_t i = 1; i < rep.records.size(); ++i) {
                CHECK(rep.records[i - 1].adjusted_p <= rep.records[i].adjusted_p);
            }
            for (const auto& rec : rep.records) {
                CHECK(rec.positive == (rec.adjusted_p < opts.alpha));
                CHECK(rec.adjusted_p == bonferroni(*rec.selective_p, 3));
                CHECK(*rec.selective_p >= 0.0);
                CHECK(*rec.selective_p <= 1.0);
            }
        }
    }
}

TEST_CASE("sequential statistic is the least-squares coefficient") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto db = oracle::random_db(30, 8, 0.5, 300 + seed);
        const auto disc = mine(db, 2, 3, Mode::Sequential);
        std::vector<std::vector<double>> cols;
        for (const auto& s : disc.selected) cols.push_back(s.occurrence.to_dense());
        const Eigen::VectorXd beta = oracle::svd_pinv(oracle::to_matrix(cols, db.n())) * oracle::as_vector(db.y());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const auto q = sequential_line_query(db, disc, j);
            CHECK(std::abs(q.statistic() - beta(static_cast<Eigen::Index>(j))) <= 1e-9);
        }
    }
}

TEST_CASE("split inference is deterministic in the seed") {
    const auto db = oracle::random_db(60, 8, 0.5, 99);
    const auto a = split_inference(db, 2, 3, Mode::Signed, 0.05, 7);
    const auto b = split_inference(db, 2, 3, Mode::Signed, 0.05, 7);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].pattern == b.records[i].pattern);
        CHECK(a.records[i].naive_p == b.records[i].naive_p);
    }
    const auto c = split_inference(db, 2, 3, Mode::Sequential, 0.05, 8);
    CHECK(c.records.size() == 3);
    CHECK(c.method == Method::Split);
    CHECK_THROWS_AS(split_inference(oracle::random_db(3, 3, 0.5, 1), 1, 1, Mode::Signed, 0.05, 1), ValidationError);
}

TEST_CASE("method names") {
    CHECK(parse_method("naive") == Method::Naive);
    CHECK(parse_method("split") == Method::Split);
    CHECK(parse_method("select") == Method::Select);
    CHECK(to_string(Method::Select) == "select");
    CHECK_THROWS_AS(parse_method("holdout"), ValidationError);
}
