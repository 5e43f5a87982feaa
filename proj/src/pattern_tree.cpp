#include "selpat/pattern_tree.hpp"

#include <algorithm>
#include <limits>

#include "selpat/error.hpp"

namespace selpat {

ItemsetTree::ItemsetTree(const TransactionDatabase& db, std::size_t max_size)
    : db_(&db), max_size_(max_size) {
    if (max_size == 0) throw ValidationError("maximum pattern size must be at least 1");
}

TraversalStats ItemsetTree::traverse(VisitorRef visit) const {
    TraversalStats stats;
    const std::size_t d = db_->d();
    const std::size_t depth_limit = std::min(max_size_, d);
    if (depth_limit == 0) return stats;

    // occ[t] is the occurrence of the current prefix of length t; occ[0] is all ones.
    std::vector<BitVec> occ(depth_limit + 1, BitVec(db_->n()));
    occ[0] = BitVec(db_->n(), true);
    std::vector<Item> items(depth_limit);
    std::vector<std::size_t> next(depth_limit);

    std::size_t depth = 0;
    next[0] = 0;
    while (true) {
        if (next[depth] >= d) {
            if (depth == 0) break;
            --depth;
            continue;
        }
        const auto item = static_cast<Item>(next[depth]++);
        items[depth] = item;
        occ[depth + 1].assign_and(occ[depth], db_->item_column(item));

        ++stats.visited;
        const NodeView node{std::span<const Item>(items.data(), depth + 1), occ[depth + 1]};
        if (visit(node) == Visit::Prune) {
            ++stats.pruned;
            continue;
        }
        if (depth + 1 < depth_limit && item + 1 < d) {
            ++depth;
            next[depth] = static_cast<std::size_t>(item) + 1;
        }
    }
    return stats;
}

std::uint64_t pattern_count(std::size_t d, std::size_t r) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 0;
    // C(d, rho) built incrementally in 128-bit to detect overflow.
    unsigned __int128 c = 1;
    for (std::size_t rho = 1; rho <= std::min(r, d); ++rho) {
        c = c * (d - rho + 1) / rho;
        if (c > kMax || total > kMax - static_cast<std::uint64_t>(c)) return kMax;
        total += static_cast<std::uint64_t>(c);
    }
    return total;
}

} // namespace selpat
