#include "selpat/report_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace selpat {

namespace {

using nlohmann::json;

json stats_json(const TraversalStats& s) { return {{"visited", s.visited}, {"pruned", s.pruned}}; }

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string optional_fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

// Patterns are written as "{0,1}"; quoted so the comma survives CSV parsing.
std::string csv_pattern(const Pattern& p) { return "\"" + p.to_string() + "\""; }

std::string config_columns(const SyntheticConfig& c) {
    std::ostringstream os;
    os << to_string(c.scenario) << ',' << to_string(c.truth) << ',' << c.n << ',' << c.d << ',' << c.k << ','
       << c.r << ',' << fmt(c.alpha) << ',' << fmt(c.sigma) << ',' << fmt(c.zeta) << ',' << c.trials << ','
       << c.seed;
    return os.str();
}

constexpr const char* kConfigHeader = "scenario,truth,n,d,k,r,alpha,sigma,zeta,trials,seed";

json constraint_json(const std::optional<ConstraintId>& id) {
    if (!id) return nullptr;
    return {{"tree", id->tree}, {"compared", id->compared}, {"sign", id->sign}};
}

} // namespace

json number_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json to_json(const DiscoveryResult& discovery) {
    json out;
    out["mode"] = to_string(discovery.mode);
    json patterns = json::array();
    for (std::size_t i = 0; i < discovery.selected.size(); ++i) {
        const auto& d = discovery.selected[i];
        json p{{"rank", i + 1},
               {"items", std::vector<Item>(d.pattern.items().begin(), d.pattern.items().end())},
               {"score", number_json(d.score)},
               {"sign", d.sign},
               {"support", d.occurrence.count()}};
        if (discovery.mode == Mode::Sequential && i < discovery.residual_norms.size()) {
            p["residual_norm"] = number_json(discovery.residual_norms[i]);
        }
        patterns.push_back(std::move(p));
    }
    out["patterns"] = std::move(patterns);
    if (discovery.mode == Mode::Sequential && !discovery.coefficients.empty()) {
        out["coefficients"] = discovery.coefficients.back();
        out["rank_deficient"] = discovery.rank_deficient;
    }
    out["nodes"] = stats_json(discovery.stats);
    return out;
}

json to_json(const InferenceReport& report) {
    json out{{"mode", to_string(report.mode)},
             {"method", to_string(report.method)},
             {"k", report.k},
             {"max_pattern_size", report.max_size},
             {"alpha", report.alpha},
             {"sigma", report.sigma},
             {"sigma_estimated", report.sigma_estimated},
             {"rank_deficient", report.rank_deficient},
             {"num_positive", report.num_positive()},
             {"mining_nodes", stats_json(report.mining_stats)},
             {"mining_seconds", report.mining_seconds},
             {"inference_seconds", report.inference_seconds}};
    json records = json::array();
    for (const auto& rec : report.records) {
        json r{{"pattern", std::vector<Item>(rec.pattern.items().begin(), rec.pattern.items().end())},
               {"score", number_json(rec.score)},
               {"sign", rec.sign},
               {"statistic", number_json(rec.statistic)},
               {"naive_p", number_json(rec.naive_p)},
               {"adjusted_p", number_json(rec.adjusted_p)},
               {"decision", rec.positive ? "positive" : "negative"}};
        r["selective_p"] = rec.selective_p ? number_json(*rec.selective_p) : json(nullptr);
        if (rec.interval) {
            r["truncation"] = {{"lower", number_json(rec.interval->lower)},
                               {"upper", number_json(rec.interval->upper)},
                               {"theta_min", number_json(rec.interval->theta_min)},
                               {"theta_max", number_json(rec.interval->theta_max)},
                               {"argmin", constraint_json(rec.interval->argmin)},
                               {"argmax", constraint_json(rec.interval->argmax)}};
        }
        if (rec.search_stats) {
            r["search"] = {{"nodes", stats_json(rec.search_stats->traversal)},
                           {"evaluated_per_tree", rec.search_stats->evaluated_per_tree},
                           {"closed_per_tree", rec.search_stats->closed_per_tree}};
        }
        if (rec.absent_in_holdout) r["absent_in_holdout"] = true;
        if (rec.clamped) r["clamped"] = true;
        records.push_back(std::move(r));
    }
    out["records"] = std::move(records);
    return out;
}

json to_json(const SyntheticConfig& c) {
    return {{"scenario", to_string(c.scenario)},
            {"truth", to_string(c.truth)},
            {"n", c.n},
            {"d", c.d},
            {"k", c.k},
            {"r", c.r},
            {"alpha", c.alpha},
            {"sigma", c.sigma},
            {"zeta", c.zeta},
            {"trials", c.trials},
            {"seed", c.seed},
            {"timeout_secs", c.timeout_secs}};
}

json to_json(const FprSummary& s) {
    json rows = json::array();
    for (const auto& row : s.rows) {
        const auto [lo, hi] = row.fwer.ci95();
        rows.push_back({{"method", to_string(row.method)},
                        {"fw_fpr", row.fwer.rate()},
                        {"se", row.fwer.se()},
                        {"ci95", {lo, hi}},
                        {"trials_with_positive", row.fwer.hits},
                        {"trials", row.fwer.total}});
    }
    return {{"config", to_json(s.config)},
            {"methods", std::move(rows)},
            {"pooled_selective", {{"rate", s.pooled_selective.rate()},
                                  {"se", s.pooled_selective.se()},
                                  {"rejections", s.pooled_selective.hits},
                                  {"patterns", s.pooled_selective.total}}},
            {"seconds", s.seconds}};
}

json to_json(const TprSummary& s) {
    json rows = json::array();
    for (const auto& row : s.rows) {
        rows.push_back({{"method", to_string(row.method)},
                        {"tpr", row.tpr},
                        {"se", row.tpr_se},
                        {"discovery_rate", row.discovery_rate}});
    }
    return {{"config", to_json(s.config)}, {"methods", std::move(rows)}, {"seconds", s.seconds}};
}

json to_json(const TimingSummary& s) {
    json rows = json::array();
    for (const auto& r : s.rows) {
        rows.push_back({{"trial", r.trial},
                        {"pruned_seconds", r.pruned_seconds},
                        {"unpruned_seconds", r.unpruned_seconds ? json(*r.unpruned_seconds) : json(nullptr)},
                        {"timed_out", !r.unpruned_seconds.has_value()},
                        {"pruned_nodes", r.pruned_visited},
                        {"agree", r.agree}});
    }
    return {{"config", to_json(s.config)},
            {"pruned", {{"median", s.pruned_median}, {"max", s.pruned_max}}},
            {"unpruned", {{"median", s.unpruned_median}, {"max", s.unpruned_max}, {"timeouts", s.timeouts}}},
            {"speedup", s.speedup()},
            {"trials", std::move(rows)}};
}

void write_csv(const InferenceReport& report, std::ostream& out) {
    out << "pattern,score,selective_p,naive_p,adjusted_p,decision\n";
    for (const auto& rec : report.records) {
        out << csv_pattern(rec.pattern) << ',' << fmt(rec.score) << ',' << optional_fmt(rec.selective_p) << ','
            << fmt(rec.naive_p) << ',' << fmt(rec.adjusted_p) << ',' << (rec.positive ? "positive" : "negative")
            << '\n';
    }
}

void write_fpr_csv(const std::vector<FprSummary>& summaries, std::ostream& out) {
    out << kConfigHeader << ",method,fw_fpr,se,ci_low,ci_high,pooled_selective_rate,pooled_patterns\n";
    for (const auto& s : summaries) {
        for (const auto& row : s.rows) {
            const auto [lo, hi] = row.fwer.ci95();
            out << config_columns(s.config) << ',' << to_string(row.method) << ',' << fmt(row.fwer.rate()) << ','
                << fmt(row.fwer.se()) << ',' << fmt(lo) << ',' << fmt(hi) << ',';
            if (row.method == Method::Select) {
                out << fmt(s.pooled_selective.rate()) << ',' << s.pooled_selective.total;
            } else {
                out << ',';
            }
            out << '\n';
        }
    }
}

void write_tpr_csv(const std::vector<TprSummary>& summaries, std::ostream& out) {
    out << kConfigHeader << ",method,tpr,se,discovery_rate\n";
    for (const auto& s : summaries) {
        for (const auto& row : s.rows) {
            out << config_columns(s.config) << ',' << to_string(row.method) << ',' << fmt(row.tpr) << ','
                << fmt(row.tpr_se) << ',' << fmt(row.discovery_rate) << '\n';
        }
    }
}

void write_timing_csv(const std::vector<TimingSummary>& summaries, std::ostream& out) {
    out << kConfigHeader << ",pruning,median_seconds,max_seconds,timeouts\n";
    for (const auto& s : summaries) {
        out << config_columns(s.config) << ",on," << fmt(s.pruned_median) << ',' << fmt(s.pruned_max) << ",0\n";
        const std::string prefix = s.timeouts ? ">=" : "";
        out << config_columns(s.config) << ",off," << (2 * s.timeouts > s.rows.size() ? ">=" : "")
            << fmt(s.unpruned_median) << ',' << prefix << fmt(s.unpruned_max) << ',' << s.timeouts << '\n';
    }
}

} // namespace selpat
