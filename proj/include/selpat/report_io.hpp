#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "selpat/experiments.hpp"
#include "selpat/miner.hpp"
#include "selpat/stats.hpp"

namespace selpat {

/// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
nlohmann::json number_json(double v);

nlohmann::json to_json(const DiscoveryResult& discovery);
nlohmann::json to_json(const InferenceReport& report);
nlohmann::json to_json(const SyntheticConfig& config);
nlohmann::json to_json(const FprSummary& summary);
nlohmann::json to_json(const TprSummary& summary);
nlohmann::json to_json(const TimingSummary& summary);

/// Columns: pattern, score, selective_p, naive_p, adjusted_p, decision.
void write_csv(const InferenceReport& report, std::ostream& out);

/// One row per configuration and method.
void write_fpr_csv(const std::vector<FprSummary>& summaries, std::ostream& out);
void write_tpr_csv(const std::vector<TprSummary>& summaries, std::ostream& out);
/// One row per configuration and pruning setting; timed-out maxima read ">=<timeout>".
void write_timing_csv(const std::vector<TimingSummary>& summaries, std::ostream& out);

} // namespace selpat
