#include "selpat/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "selpat/error.hpp"
#include "selpat/linalg.hpp"

namespace selpat {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// One query per discovered pattern; empty where eta vanishes (a pattern that
// occurs nowhere), whose p-values are reported as 1.
std::vector<std::optional<LineQuery>> line_queries(std::span<const double> y, const DiscoveryResult& discovery) {
    std::vector<std::vector<double>> etas;
    if (discovery.mode != Mode::Sequential) {
        for (const auto& d : discovery.selected) etas.push_back(d.occurrence.to_dense());
    } else {
        std::vector<std::vector<double>> columns;
        for (const auto& d : discovery.selected) columns.push_back(d.occurrence.to_dense());
        etas = pseudo_inverse_rows(columns);
    }
    std::vector<std::optional<LineQuery>> out;
    for (auto& eta : etas) {
        if (eta.size() != y.size()) throw ValidationError("occurrence length does not match n");
        if (norm2(eta) == 0.0) {
            out.emplace_back();
        } else {
            out.emplace_back(LineQuery(std::vector<double>(y.begin(), y.end()), std::move(eta), discovery.rank_deficient));
        }
    }
    return out;
}

void finalize(InferenceReport& rep) {
    for (auto& rec : rep.records) rec.positive = rec.adjusted_p < rep.alpha;
    std::stable_sort(rep.records.begin(), rep.records.end(),
                     [](const InferenceRecord& a, const InferenceRecord& b) { return a.adjusted_p < b.adjusted_p; });
}

InferenceReport make_header(const TransactionDatabase& db, const DiscoveryResult& discovery, std::size_t max_size,
                            double alpha, Method method) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    InferenceReport rep;
    rep.mode = discovery.mode;
    rep.method = method;
    rep.k = discovery.selected.size();
    rep.max_size = max_size;
    rep.alpha = alpha;
    rep.sigma = db.sigma();
    rep.sigma_estimated = db.sigma_estimated();
    rep.rank_deficient = discovery.rank_deficient;
    rep.mining_stats = discovery.stats;
    return rep;
}

InferenceRecord base_record(const Discovery& d) {
    InferenceRecord rec;
    rec.pattern = d.pattern;
    rec.score = d.score;
    rec.sign = d.sign;
    return rec;
}

} // namespace

Direction test_direction(const DiscoveryResult& discovery, std::size_t index) {
    if (discovery.mode == Mode::Positive) return Direction::Upper;
    return discovery.selected.at(index).sign < 0 ? Direction::Lower : Direction::Upper;
}

double naive_p_value(const LineQuery& q, double sigma, Direction direction) {
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    const double z = q.statistic() / (sigma * std::sqrt(q.eta_norm2()));
    return direction == Direction::Upper ? normal_sf(z) : normal_cdf(z);
}

SelectivePValue selective_p_value(const LineQuery& q, const TruncationInterval& interval, double sigma,
                                  Direction direction) {
    const TruncatedNormal tn(0.0, sigma * std::sqrt(q.eta_norm2()), interval.lower, interval.upper);
    const double x = q.statistic();
    const bool clamped = !tn.contains(x);
    const double p = direction == Direction::Upper ? tn.sf(x) : tn.cdf(x);
    return {p, clamped};
}

Method parse_method(const std::string& name) {
    if (name == "naive") return Method::Naive;
    if (name == "split") return Method::Split;
    if (name == "select") return Method::Select;
    throw ValidationError("unknown baseline '" + name + "' (expected naive, split or select)");
}

std::string to_string(Method method) {
    switch (method) {
    case Method::Naive: return "naive";
    case Method::Split: return "split";
    case Method::Select: return "select";
    }
    return "?";
}

std::size_t InferenceReport::num_positive() const noexcept {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.positive; }));
}

double bonferroni(double p, std::size_t k) noexcept { return std::min(1.0, static_cast<double>(k) * p); }

InferenceReport report(const TransactionDatabase& db, const DiscoveryResult& discovery, const EventSpec& spec,
                       double alpha, const SearchOptions& search) {
    const auto start = Clock::now();
    InferenceReport rep = make_header(db, discovery, spec.max_size(), alpha, Method::Select);
    const ItemsetTree tree(db, spec.max_size());
    const auto queries = line_queries(db.y(), discovery);
    for (std::size_t i = 0; i < discovery.selected.size(); ++i) {
        InferenceRecord rec = base_record(discovery.selected[i]);
        if (!queries[i]) {
            rec.selective_p = 1.0;
            rep.records.push_back(std::move(rec));
            continue;
        }
        const auto& q = *queries[i];
        const Direction dir = test_direction(discovery, i);
        auto found = search_interval(tree, spec, q, search);
        const auto sp = selective_p_value(q, found.interval, db.sigma(), dir);

        rec.statistic = q.statistic();
        rec.selective_p = sp.p;
        rec.clamped = sp.clamped;
        rec.naive_p = naive_p_value(q, db.sigma(), dir);
        rec.adjusted_p = bonferroni(sp.p, rep.k);
        rec.interval = std::move(found.interval);
        rec.search_stats = std::move(found.stats);
        rep.records.push_back(std::move(rec));
    }
    finalize(rep);
    rep.inference_seconds = seconds_since(start);
    return rep;
}

InferenceReport naive_report(const TransactionDatabase& db, const DiscoveryResult& discovery, double alpha) {
    const auto start = Clock::now();
    InferenceReport rep = make_header(db, discovery, 0, alpha, Method::Naive);
    const auto queries = line_queries(db.y(), discovery);
    for (std::size_t i = 0; i < discovery.selected.size(); ++i) {
        InferenceRecord rec = base_record(discovery.selected[i]);
        if (queries[i]) {
            rec.statistic = queries[i]->statistic();
            rec.naive_p = naive_p_value(*queries[i], db.sigma(), test_direction(discovery, i));
        }
        rec.adjusted_p = bonferroni(rec.naive_p, rep.k);
        rep.records.push_back(std::move(rec));
    }
    finalize(rep);
    rep.inference_seconds = seconds_since(start);
    return rep;
}

InferenceReport split_inference(const TransactionDatabase& db, std::size_t max_size, std::size_t k, Mode mode,
                                double alpha, std::uint64_t seed) {
    if (db.n() < 4) throw ValidationError("data splitting needs at least 4 transactions");
    std::vector<std::size_t> order(db.n());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t half = db.n() / 2;
    std::vector<std::size_t> rows_a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<std::size_t> rows_b(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
    std::sort(rows_a.begin(), rows_a.end());
    std::sort(rows_b.begin(), rows_b.end());

    const auto mine_start = Clock::now();
    const TransactionDatabase part_a = db.subset(rows_a, true);
    const TransactionDatabase part_b = db.subset(rows_b, true);
    const DiscoveryResult discovery = mine(part_a, max_size, k, mode);
    const double mining_seconds = seconds_since(mine_start);

    const auto start = Clock::now();
    InferenceReport rep = make_header(db, discovery, max_size, alpha, Method::Split);
    rep.mining_seconds = mining_seconds;

    std::vector<BitVec> holdout;
    for (const auto& d : discovery.selected) holdout.push_back(occurrence(part_b, d.pattern));

    std::vector<std::vector<double>> etas(holdout.size());
    if (mode == Mode::Sequential) {
        // Coefficients of the model refitted on the holdout half; absent columns are left out.
        std::vector<std::vector<double>> columns;
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < holdout.size(); ++i) {
            if (holdout[i].none()) continue;
            columns.push_back(holdout[i].to_dense());
            present.push_back(i);
        }
        auto rows = pseudo_inverse_rows(columns);
        for (std::size_t j = 0; j < present.size(); ++j) etas[present[j]] = std::move(rows[j]);
    } else {
        for (std::size_t i = 0; i < holdout.size(); ++i) {
            if (!holdout[i].none()) etas[i] = holdout[i].to_dense();
        }
    }

    for (std::size_t i = 0; i < discovery.selected.size(); ++i) {
        InferenceRecord rec = base_record(discovery.selected[i]);
        if (etas[i].empty() || norm2(etas[i]) == 0.0) {
            rec.absent_in_holdout = true;
            rec.naive_p = 1.0;
        } else {
            const LineQuery q({part_b.y().begin(), part_b.y().end()}, std::move(etas[i]));
            rec.statistic = q.statistic();
            rec.naive_p = naive_p_value(q, db.sigma(), test_direction(discovery, i));
        }
        rec.adjusted_p = bonferroni(rec.naive_p, rep.k);
        rep.records.push_back(std::move(rec));
    }
    finalize(rep);
    rep.inference_seconds = seconds_since(start);
    return rep;
}

InferenceReport infer(const TransactionDatabase& db, const InferenceOptions& options) {
    if (options.method == Method::Split) {
        return split_inference(db, options.max_size, options.k, options.mode, options.alpha, options.seed);
    }
    const auto start = Clock::now();
    const DiscoveryResult discovery = mine(db, options.max_size, options.k, options.mode);
    const double mining_seconds = seconds_since(start);
    InferenceReport rep;
    if (options.method == Method::Naive) {
        rep = naive_report(db, discovery, options.alpha);
        rep.max_size = options.max_size;
    } else {
        const EventSpec spec(discovery, options.max_size);
        rep = report(db, discovery, spec, options.alpha, SearchOptions{options.pruning, std::nullopt});
    }
    rep.mining_seconds = mining_seconds;
    return rep;
}

} // namespace selpat
