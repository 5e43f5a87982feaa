#include "selpat/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "selpat/error.hpp"
#include "selpat/linalg.hpp"
#include "selpat/pattern_tree.hpp"
#include "selpat/selection_event.hpp"
#include "selpat/truncation_search.hpp"

namespace selpat {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Independent streams per (seed, trial, purpose).
enum class Stream : std::uint32_t { Data = 0, Split = 1 };

std::uint64_t stream_seed(std::uint64_t seed, std::size_t trial, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(std::uint64_t{trial} >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (std::uint64_t{out[1]} << 32) | out[0];
}

std::size_t method_index(Method m) {
    for (std::size_t i = 0; i < kAllMethods.size(); ++i) {
        if (kAllMethods[i] == m) return i;
    }
    throw ValidationError("unknown method");
}

MethodOutcome outcome_from(const InferenceReport& rep, const std::vector<Pattern>& truth) {
    MethodOutcome out;
    out.method = rep.method;
    out.seconds = rep.inference_seconds;
    // Records come sorted by adjusted p; keep them in that order.
    for (const auto& rec : rep.records) {
        out.discovered.push_back(rec.pattern);
        out.positive.push_back(rec.positive);
        out.p_values.push_back(rep.method == Method::Select ? rec.selective_p.value_or(1.0) : rec.naive_p);
        out.any_positive = out.any_positive || rec.positive;
    }
    for (const auto& t : truth) {
        for (std::size_t i = 0; i < out.discovered.size(); ++i) {
            if (out.discovered[i] != t) continue;
            ++out.truth_discovered;
            if (out.positive[i]) ++out.truth_positive;
            break;
        }
    }
    return out;
}

// Fewer selectable patterns than k (for instance when no item ever occurs):
// nothing is discovered and nothing is declared.
bool too_few_patterns(const ValidationError& e) {
    return std::string(e.what()).find("exceeds the number of") != std::string::npos;
}

std::vector<double> with_timeouts(const std::vector<TimingRow>& rows, double timeout) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.unpruned_seconds.value_or(timeout));
    return v;
}

bool same_bound(double a, double b) {
    if (a == b) return true;
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<std::size_t> dedupe(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

Scenario parse_scenario(const std::string& name) {
    if (name == "individual") return Scenario::Individual;
    if (name == "sequential") return Scenario::Sequential;
    throw ValidationError("unknown scenario '" + name + "' (expected individual or sequential)");
}

std::string to_string(Scenario scenario) {
    return scenario == Scenario::Individual ? "individual" : "sequential";
}

std::string to_string(Truth truth) { return truth == Truth::Null ? "null" : "signal"; }

Mode mode_for(Scenario scenario) noexcept {
    return scenario == Scenario::Individual ? Mode::Signed : Mode::Sequential;
}

void SyntheticConfig::validate() const {
    if (n < 4) throw ValidationError("n must be at least 4");
    if (d == 0) throw ValidationError("d must be at least 1");
    if (k == 0 || r == 0) throw ValidationError("k and r must be at least 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive");
    if (!(zeta >= 0.0 && zeta <= 1.0)) throw ValidationError("zeta must lie in [0, 1]");
    if (!(timeout_secs > 0.0)) throw ValidationError("timeout must be positive");
    if (truth == Truth::Signal) {
        const std::size_t needed = scenario == Scenario::Individual ? 3 : 6;
        if (d < needed) throw ValidationError("the signal scenario needs d >= " + std::to_string(needed));
    }
}

std::vector<Pattern> truth_patterns(Scenario scenario) {
    if (scenario == Scenario::Individual) return {Pattern({0, 1, 2})};
    return {Pattern({0}), Pattern({1, 2}), Pattern({3, 4, 5})};
}

SyntheticData generate(const SyntheticConfig& config, std::size_t trial) {
    config.validate();
    std::mt19937_64 rng(stream_seed(config.seed, trial, Stream::Data));
    std::bernoulli_distribution include(1.0 - config.zeta);
    std::normal_distribution<double> noise(0.0, config.sigma);

    std::vector<std::vector<Item>> transactions(config.n);
    for (auto& t : transactions) {
        for (std::size_t j = 0; j < config.d; ++j) {
            if (include(rng)) t.push_back(static_cast<Item>(j));
        }
    }

    std::vector<Pattern> truth;
    std::vector<double> weights;
    if (config.truth == Truth::Signal) {
        truth = truth_patterns(config.scenario);
        weights = config.scenario == Scenario::Individual ? std::vector<double>{2.0}
                                                          : std::vector<double>{0.5, -2.0, 3.0};
    }

    std::vector<double> y(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        double mu = 0.0;
        for (std::size_t p = 0; p < truth.size(); ++p) {
            const auto items = truth[p].items();
            if (std::includes(transactions[i].begin(), transactions[i].end(), items.begin(), items.end())) {
                mu += weights[p];
            }
        }
        y[i] = mu + noise(rng);
    }

    TransactionDatabase::Options opts;
    opts.center = true;
    opts.num_items = config.d;
    opts.sigma = config.sigma;
    return {TransactionDatabase(std::move(transactions), std::move(y), opts), std::move(truth)};
}

const MethodOutcome& TrialOutcome::outcome(Method m) const { return methods[method_index(m)]; }

TrialOutcome run_trial(const SyntheticConfig& config, std::size_t trial) {
    const SyntheticData data = generate(config, trial);
    const Mode mode = mode_for(config.scenario);

    TrialOutcome out;
    out.trial = trial;
    out.num_truth = data.truth.size();
    for (std::size_t i = 0; i < kAllMethods.size(); ++i) out.methods[i].method = kAllMethods[i];

    try {
        const auto start = Clock::now();
        const DiscoveryResult discovery = mine(data.db, config.r, config.k, mode);
        out.mining_seconds = seconds_since(start);
        out.mining_stats = discovery.stats;

        const InferenceReport naive = naive_report(data.db, discovery, config.alpha);
        out.methods[method_index(Method::Naive)] = outcome_from(naive, data.truth);

        const EventSpec spec(discovery, config.r);
        const InferenceReport select = report(data.db, discovery, spec, config.alpha);
        out.methods[method_index(Method::Select)] = outcome_from(select, data.truth);
        for (const auto& rec : select.records) {
            if (rec.search_stats) out.search_stats += rec.search_stats->traversal;
        }
    } catch (const ValidationError& e) {
        if (!too_few_patterns(e)) throw;
    }

    try {
        const InferenceReport split = split_inference(data.db, config.r, config.k, mode, config.alpha,
                                                      stream_seed(config.seed, trial, Stream::Split));
        out.methods[method_index(Method::Split)] = outcome_from(split, data.truth);
    } catch (const ValidationError& e) {
        if (!too_few_patterns(e)) throw;
    }
    return out;
}

std::vector<TrialOutcome> run_trials(const SyntheticConfig& config) {
    config.validate();
    std::vector<TrialOutcome> outcomes(config.trials);
    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(config.trials, 1));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= config.trials) return;
            try {
                outcomes[t] = run_trial(config, t);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(config.trials);
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return outcomes;
}

double Proportion::rate() const noexcept {
    return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

double Proportion::se() const noexcept {
    if (!total) return 0.0;
    const double p = rate();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(total));
}

std::pair<double, double> Proportion::ci95() const noexcept {
    if (!total) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double m = static_cast<double>(total);
    const double p = rate();
    const double denom = 1.0 + z * z / m;
    const double centre = (p + z * z / (2.0 * m)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / m + z * z / (4.0 * m * m)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

FprSummary summarize_fpr(const SyntheticConfig& config, const std::vector<TrialOutcome>& trials) {
    FprSummary s;
    s.config = config;
    for (Method m : kAllMethods) {
        FprRow row{m, {}};
        for (const auto& t : trials) {
            ++row.fwer.total;
            if (t.outcome(m).any_positive) ++row.fwer.hits;
        }
        s.rows.push_back(row);
    }
    for (const auto& t : trials) {
        for (double p : t.outcome(Method::Select).p_values) {
            ++s.pooled_selective.total;
            if (p < config.alpha) ++s.pooled_selective.hits;
        }
    }
    return s;
}

FprSummary run_fpr(const SyntheticConfig& config) {
    if (config.truth != Truth::Null) throw ValidationError("false positive rates need null data");
    const auto start = Clock::now();
    FprSummary s = summarize_fpr(config, run_trials(config));
    s.seconds = seconds_since(start);
    return s;
}

TprSummary summarize_tpr(const SyntheticConfig& config, const std::vector<TrialOutcome>& trials) {
    TprSummary s;
    s.config = config;
    for (Method m : kAllMethods) {
        TprRow row{m};
        double sum = 0.0;
        double sum_sq = 0.0;
        double found = 0.0;
        for (const auto& t : trials) {
            const auto& o = t.outcome(m);
            const double frac = t.num_truth ? static_cast<double>(o.truth_positive) / t.num_truth : 0.0;
            sum += frac;
            sum_sq += frac * frac;
            found += t.num_truth ? static_cast<double>(o.truth_discovered) / t.num_truth : 0.0;
        }
        const double m_trials = static_cast<double>(trials.size());
        if (!trials.empty()) {
            row.tpr = sum / m_trials;
            row.discovery_rate = found / m_trials;
            const double var = std::max(0.0, sum_sq / m_trials - row.tpr * row.tpr);
            row.tpr_se = std::sqrt(var / m_trials);
        }
        s.rows.push_back(row);
    }
    return s;
}

TprSummary run_tpr(const SyntheticConfig& config) {
    if (config.truth != Truth::Signal) throw ValidationError("true positive rates need signal data");
    const auto start = Clock::now();
    TprSummary s = summarize_tpr(config, run_trials(config));
    s.seconds = seconds_since(start);
    return s;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double TimingSummary::speedup() const noexcept {
    return pruned_median > 0.0 ? unpruned_median / pruned_median : 0.0;
}

TimingSummary run_timing(const SyntheticConfig& config, bool run_unpruned) {
    config.validate();
    TimingSummary s;
    s.config = config;
    const Mode mode = mode_for(config.scenario);

    for (std::size_t trial = 0; trial < config.trials; ++trial) {
        const SyntheticData data = generate(config, trial);
        const DiscoveryResult discovery = mine(data.db, config.r, config.k, mode);
        const EventSpec spec(discovery, config.r);
        const ItemsetTree tree(data.db, config.r);

        std::vector<LineQuery> queries;
        std::vector<std::vector<double>> etas;
        if (mode == Mode::Sequential) {
            std::vector<std::vector<double>> columns;
            for (const auto& d : discovery.selected) columns.push_back(d.occurrence.to_dense());
            etas = pseudo_inverse_rows(columns);
        } else {
            for (const auto& d : discovery.selected) etas.push_back(d.occurrence.to_dense());
        }
        const auto y = data.db.y();
        for (auto& eta : etas) {
            if (norm2(eta) > 0.0) queries.emplace_back(std::vector<double>(y.begin(), y.end()), std::move(eta));
        }

        TimingRow row;
        row.trial = trial;
        std::vector<TruncationInterval> pruned;
        auto start = Clock::now();
        for (const auto& q : queries) {
            auto res = search_interval(tree, spec, q);
            row.pruned_visited += res.stats.traversal.visited;
            pruned.push_back(std::move(res.interval));
        }
        row.pruned_seconds = seconds_since(start);

        if (run_unpruned) {
            // Keep materialized constraints within roughly 512 MB of doubles.
            const std::uint64_t per_pattern = spec.n() * spec.num_trees() * spec.constraint_signs().size();
            MaterializeOptions cap;
            cap.cap = std::min<std::uint64_t>(cap.cap, 64'000'000 / std::max<std::uint64_t>(per_pattern, 1));

            start = Clock::now();
            const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                              std::chrono::duration<double>(config.timeout_secs));
            try {
                for (std::size_t i = 0; i < queries.size(); ++i) {
                    const auto full = unpruned_interval(tree, spec, queries[i], cap, deadline);
                    row.agree = row.agree && same_bound(full.theta_min, pruned[i].theta_min) &&
                                same_bound(full.theta_max, pruned[i].theta_max);
                }
                row.unpruned_seconds = seconds_since(start);
                row.unpruned_visited = pattern_count(config.d, config.r) * queries.size();
            } catch (const TimeoutError&) {
                ++s.timeouts;
            }
        }
        s.rows.push_back(row);
    }

    std::vector<double> pruned_times;
    for (const auto& r : s.rows) pruned_times.push_back(r.pruned_seconds);
    s.pruned_median = median(pruned_times);
    s.pruned_max = pruned_times.empty() ? 0.0 : *std::max_element(pruned_times.begin(), pruned_times.end());
    if (run_unpruned) {
        const auto unpruned_times = with_timeouts(s.rows, config.timeout_secs);
        s.unpruned_median = median(unpruned_times);
        s.unpruned_max = unpruned_times.empty() ? 0.0 : *std::max_element(unpruned_times.begin(), unpruned_times.end());
    }
    return s;
}

std::vector<SyntheticConfig> fpr_tpr_grid(const SyntheticConfig& base, bool full) {
    // The full grid sweeps n and d over {50, ..., 250} around n = d = 100; the
    // scaled grid sweeps {1/2, 1, 3/2} of the given n and d.
    std::vector<std::size_t> ns;
    std::vector<std::size_t> ds;
    std::size_t n0 = base.n;
    std::size_t d0 = base.d;
    if (full) {
        ns = {50, 100, 150, 200, 250};
        ds = ns;
        n0 = 100;
        d0 = 100;
    } else {
        ns = dedupe({std::max<std::size_t>(base.n / 2, 4), base.n, base.n * 3 / 2});
        ds = dedupe({std::max<std::size_t>(base.d / 2, 1), base.d, base.d * 3 / 2});
    }
    std::vector<SyntheticConfig> out;
    for (std::size_t n : ns) {
        SyntheticConfig c = base;
        c.n = n;
        c.d = d0;
        out.push_back(c);
    }
    for (std::size_t d : ds) {
        if (d == d0) continue;
        SyntheticConfig c = base;
        c.n = n0;
        c.d = d;
        out.push_back(c);
    }
    return out;
}

std::vector<SyntheticConfig> timing_grid(const SyntheticConfig& base, bool full) {
    // The full grid sweeps n and d over {100, 500, 1000, 5000, 10000} at zeta 0.8 and 0.9.
    std::vector<std::size_t> ns;
    std::vector<std::size_t> ds;
    std::size_t n0 = base.n;
    std::size_t d0 = base.d;
    if (full) {
        ns = {100, 500, 1000, 5000, 10000};
        ds = ns;
        n0 = 100;
        d0 = 100;
    } else {
        ns = dedupe({base.n, base.n * 5, base.n * 10});
        ds = dedupe({base.d, base.d * 2});
    }
    std::vector<SyntheticConfig> out;
    for (double zeta : {0.8, 0.9}) {
        for (std::size_t n : ns) {
            SyntheticConfig c = base;
            c.n = n;
            c.d = d0;
            c.zeta = zeta;
            out.push_back(c);
        }
        for (std::size_t d : ds) {
            if (d == d0) continue;
            SyntheticConfig c = base;
            c.n = n0;
            c.d = d;
            c.zeta = zeta;
            out.push_back(c);
        }
    }
    return out;
}

} // namespace selpat
