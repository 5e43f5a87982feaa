#include "selpat/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>
#include <utility>

#include "selpat/error.hpp"

namespace selpat {

Pattern::Pattern(std::vector<Item> items) : items_(std::move(items)) {
    if (items_.empty()) throw ValidationError("pattern must contain at least one item");
    for (std::size_t i = 1; i < items_.size(); ++i) {
        if (items_[i - 1] >= items_[i]) {
            throw ValidationError("pattern items must be strictly increasing");
        }
    }
}

bool Pattern::is_subset_of(const Pattern& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
}

std::string Pattern::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(items_[i]);
    }
    return s + "}";
}

double sample_sd(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void center_in_place(std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

TransactionDatabase::TransactionDatabase(std::vector<std::vector<Item>> transactions,
                                         std::vector<double> y, const Options& options)
    : transactions_(std::move(transactions)), y_(std::move(y)) {
    if (transactions_.size() != y_.size()) {
        throw ValidationError("transaction count does not match response count");
    }
    if (y_.size() < 2) throw ValidationError("a database needs at least 2 transactions");

    Item max_item = 0;
    bool any_item = false;
    for (std::size_t i = 0; i < transactions_.size(); ++i) {
        const auto& t = transactions_[i];
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (k > 0 && t[k - 1] >= t[k]) {
                throw ValidationError("transaction " + std::to_string(i) +
                                      " is not strictly increasing");
            }
            max_item = std::max(max_item, t[k]);
            any_item = true;
        }
    }
    const std::size_t inferred = any_item ? static_cast<std::size_t>(max_item) + 1 : 0;
    if (options.num_items) {
        if (inferred > *options.num_items) {
            throw ValidationError("item id " + std::to_string(max_item) +
                                  " is out of range for d = " + std::to_string(*options.num_items));
        }
        d_ = *options.num_items;
    } else {
        d_ = inferred;
    }

    for (double v : y_) {
        if (!std::isfinite(v)) throw ValidationError("responses must be finite");
    }
    if (options.center) center_in_place(y_);
    centered_ = options.center;

    if (options.sigma) {
        if (!(*options.sigma > 0.0) || !std::isfinite(*options.sigma)) {
            throw ValidationError("sigma must be a positive finite number");
        }
        sigma_ = *options.sigma;
    } else {
        sigma_ = sample_sd(y_);
        sigma_estimated_ = true;
        if (!(sigma_ > 0.0)) throw ValidationError("sample sigma is zero; responses are constant");
    }
    build_columns();
}

void TransactionDatabase::build_columns() {
    columns_.assign(d_, BitVec(y_.size()));
    for (std::size_t i = 0; i < transactions_.size(); ++i) {
        for (Item it : transactions_[i]) columns_[it].set(i);
    }
}

TransactionDatabase TransactionDatabase::with_responses(std::vector<double> y, bool center) const {
    if (y.size() != y_.size()) throw ValidationError("response length mismatch");
    TransactionDatabase out = *this;
    out.y_ = std::move(y);
    if (center) center_in_place(out.y_);
    out.centered_ = center;
    return out;
}

TransactionDatabase TransactionDatabase::subset(std::span<const std::size_t> rows, bool center) const {
    if (rows.size() < 2) throw ValidationError("a database needs at least 2 transactions");
    TransactionDatabase out;
    out.d_ = d_;
    out.sigma_ = sigma_;
    out.sigma_estimated_ = sigma_estimated_;
    out.transactions_.reserve(rows.size());
    out.y_.reserve(rows.size());
    for (std::size_t r : rows) {
        out.transactions_.push_back(transactions_.at(r));
        out.y_.push_back(y_.at(r));
    }
    if (center) center_in_place(out.y_);
    out.centered_ = center;
    out.build_columns();
    return out;
}

FileFormat parse_file_format(const std::string& name) {
    if (name == "item-lines") return FileFormat::ItemLines;
    if (name == "binary-csv") return FileFormat::BinaryCsv;
    throw ValidationError("unknown format '" + name + "' (expected item-lines or binary-csv)");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s, std::size_t line) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError(line, "invalid response '" + std::string(s) + "'");
    }
    return v;
}

Item parse_item(std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() ||
        v > std::numeric_limits<Item>::max()) {
        throw ParseError(line, "invalid item id '" + std::string(s) + "'");
    }
    return static_cast<Item>(v);
}

void read_item_lines(std::istream& in, std::vector<std::vector<Item>>& tx, std::vector<double>& y) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
        if (trim(s).empty() || trim(s).front() == '#') continue;

        const auto tab = s.find('\t');
        const std::string_view resp = tab == std::string_view::npos ? s : s.substr(0, tab);
        std::string_view rest = tab == std::string_view::npos ? std::string_view{} : s.substr(tab + 1);
        y.push_back(parse_double(resp, line));

        std::vector<Item> items;
        rest = trim(rest);
        while (!rest.empty()) {
            const auto sp = rest.find(' ');
            const std::string_view tok = rest.substr(0, sp);
            if (tok.empty()) throw ParseError(line, "items must be separated by single spaces");
            items.push_back(parse_item(tok, line));
            if (sp == std::string_view::npos) break;
            rest = rest.substr(sp + 1);
            if (rest.empty()) throw ParseError(line, "trailing separator in item list");
        }
        std::sort(items.begin(), items.end());
        if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
            throw ParseError(line, "duplicate item in transaction");
        }
        tx.push_back(std::move(items));
    }
}

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto c = s.find(',', start);
        out.push_back(trim(s.substr(start, c == std::string_view::npos ? s.npos : c - start)));
        if (c == std::string_view::npos) break;
        start = c + 1;
    }
    return out;
}

void read_binary_csv(std::istream& in, std::vector<std::vector<Item>>& tx, std::vector<double>& y,
                     std::size_t& width) {
    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = trim(raw);
        if (s.empty() || s.front() == '#') continue;
        const auto cells = split_commas(s);
        if (!header_seen) {
            if (cells.empty() || cells[0] != "y") throw ParseError(line, "header must start with 'y'");
            for (std::size_t f = 1; f < cells.size(); ++f) {
                if (cells[f] != "f" + std::to_string(f - 1)) {
                    throw ParseError(line, "expected header column f" + std::to_string(f - 1));
                }
            }
            width = cells.size() - 1;
            header_seen = true;
            continue;
        }
        if (cells.size() != width + 1) {
            throw ParseError(line, "expected " + std::to_string(width + 1) + " columns, got " +
                                       std::to_string(cells.size()));
        }
        y.push_back(parse_double(cells[0], line));
        std::vector<Item> items;
        for (std::size_t f = 0; f < width; ++f) {
            if (cells[f + 1] == "1") {
                items.push_back(static_cast<Item>(f));
            } else if (cells[f + 1] != "0") {
                throw ParseError(line, "feature values must be 0 or 1");
            }
        }
        tx.push_back(std::move(items));
    }
    if (!header_seen) throw ParseError(line, "missing header row");
}

} // namespace

TransactionDatabase read_database(std::istream& in, const LoadOptions& options) {
    std::vector<std::vector<Item>> tx;
    std::vector<double> y;
    TransactionDatabase::Options db_options = options.db;
    if (options.format == FileFormat::ItemLines) {
        read_item_lines(in, tx, y);
    } else {
        std::size_t width = 0;
        read_binary_csv(in, tx, y, width);
        if (!db_options.num_items) db_options.num_items = width;
    }
    return TransactionDatabase(std::move(tx), std::move(y), db_options);
}

TransactionDatabase load_database(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return read_database(in, options);
}

void write_database(const TransactionDatabase& db, std::ostream& out, FileFormat format) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    if (format == FileFormat::ItemLines) {
        for (std::size_t i = 0; i < db.n(); ++i) {
            out << db.y()[i] << '\t';
            const auto t = db.transaction(i);
            for (std::size_t k = 0; k < t.size(); ++k) {
                if (k) out << ' ';
                out << t[k];
            }
            out << '\n';
        }
    } else {
        out << 'y';
        for (std::size_t f = 0; f < db.d(); ++f) out << ",f" << f;
        out << '\n';
        for (std::size_t i = 0; i < db.n(); ++i) {
            out << db.y()[i];
            const auto t = db.transaction(i);
            std::size_t k = 0;
            for (std::size_t f = 0; f < db.d(); ++f) {
                const bool on = k < t.size() && t[k] == f;
                if (on) ++k;
                out << (on ? ",1" : ",0");
            }
            out << '\n';
        }
    }
    out.precision(old_precision);
}

BitVec occurrence(const TransactionDatabase& db, const Pattern& p) {
    BitVec tau(db.n(), true);
    for (Item it : p.items()) {
        if (it >= db.d()) return BitVec(db.n());
        tau.assign_and(tau, db.item_column(it));
    }
    return tau;
}

double score(const TransactionDatabase& db, const BitVec& tau) {
    if (tau.size() != db.n()) throw ValidationError("occurrence length does not match n");
    return dot(tau, db.y());
}

} // namespace selpat
