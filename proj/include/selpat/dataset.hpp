#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selpat/bitvec.hpp"

namespace selpat {

using Item = std::uint32_t;

/// A non-empty itemset, stored as strictly increasing item ids.
class Pattern {
public:
    Pattern() = default;
    /// Throws ValidationError unless items is non-empty and strictly increasing.
    explicit Pattern(std::vector<Item> items);

    std::span<const Item> items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    bool is_subset_of(const Pattern& other) const;

    std::string to_string() const;

    friend bool operator==(const Pattern&, const Pattern&) = default;
    friend auto operator<=>(const Pattern& a, const Pattern& b) { return a.items_ <=> b.items_; }

private:
    std::vector<Item> items_;
};

/// n transactions over d items with (by default centered) responses and a
/// known noise standard deviation. Immutable after construction.
class TransactionDatabase {
public:
    struct Options {
        bool center = true;
        /// Number of items; inferred as max id + 1 when absent.
        std::optional<std::size_t> num_items;
        /// Noise sd; the sample sd of the responses when absent.
        std::optional<double> sigma;
    };

    TransactionDatabase(std::vector<std::vector<Item>> transactions, std::vector<double> y,
                        const Options& options);

    std::size_t n() const noexcept { return y_.size(); }
    std::size_t d() const noexcept { return d_; }
    std::span<const Item> transaction(std::size_t i) const noexcept { return transactions_[i]; }
    std::span<const double> y() const noexcept { return y_; }
    double sigma() const noexcept { return sigma_; }
    bool sigma_estimated() const noexcept { return sigma_estimated_; }
    bool centered() const noexcept { return centered_; }

    /// Occurrence vector of the single item {i}.
    const BitVec& item_column(Item i) const noexcept { return columns_[i]; }

    /// Copy of this database with responses replaced. Items and sigma are kept.
    TransactionDatabase with_responses(std::vector<double> y, bool center) const;
    /// Sub-database restricted to the given transaction rows.
    TransactionDatabase subset(std::span<const std::size_t> rows, bool center) const;

private:
    TransactionDatabase() = default;
    void build_columns();

    std::size_t d_ = 0;
    std::vector<std::vector<Item>> transactions_;
    std::vector<double> y_;
    double sigma_ = 1.0;
    bool sigma_estimated_ = false;
    bool centered_ = false;
    std::vector<BitVec> columns_;
};

enum class FileFormat { ItemLines, BinaryCsv };

FileFormat parse_file_format(const std::string& name);

struct LoadOptions {
    FileFormat format = FileFormat::ItemLines;
    TransactionDatabase::Options db;
};

TransactionDatabase read_database(std::istream& in, const LoadOptions& options);
TransactionDatabase load_database(const std::filesystem::path& path, const LoadOptions& options);

/// Writes responses with round-trip precision.
void write_database(const TransactionDatabase& db, std::ostream& out, FileFormat format);

/// tau[i] = 1 iff p is a subset of transaction i.
BitVec occurrence(const TransactionDatabase& db, const Pattern& p);

/// s = tau^T y.
double score(const TransactionDatabase& db, const BitVec& tau);

/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> v);

void center_in_place(std::vector<double>& v);

} // namespace selpat
