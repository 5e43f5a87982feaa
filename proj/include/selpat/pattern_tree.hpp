#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "selpat/bitvec.hpp"
#include "selpat/dataset.hpp"

namespace selpat {

enum class Visit { Continue, Prune };

/// A node of the enumeration tree as seen by a visitor. Both views are only
/// valid for the duration of the callback.
struct NodeView {
    std::span<const Item> items;
    const BitVec& occurrence;

    std::size_t depth() const noexcept { return items.size(); }
    Pattern pattern() const { return Pattern({items.begin(), items.end()}); }
};

struct TraversalStats {
    std::uint64_t visited = 0;
    std::uint64_t pruned = 0;

    TraversalStats& operator+=(const TraversalStats& o) noexcept {
        visited += o.visited;
        pruned += o.pruned;
        return *this;
    }
};

/// Non-owning reference to a callable `Visit(const NodeView&)`.
class VisitorRef {
public:
    template <typename F>
        requires(!std::is_same_v<std::remove_cvref_t<F>, VisitorRef>)
    VisitorRef(F&& f) noexcept // NOLINT(google-explicit-constructor)
        : object_(const_cast<void*>(static_cast<const void*>(&f))),
          call_([](void* o, const NodeView& node) -> Visit {
              return (*static_cast<std::remove_reference_t<F>*>(o))(node);
          }) {}

    Visit operator()(const NodeView& node) const { return call_(object_, node); }

private:
    void* object_;
    Visit (*call_)(void*, const NodeView&);
};

/// Depth-first enumeration of patterns with their occurrence vectors. Every
/// pattern is yielded at most once; returning Visit::Prune from the visitor
/// skips the subtree below the current node. Implementations must yield a
/// node after its ancestors and before any node outside its subtree, so that
/// per-depth visitor state stays valid.
class PatternEnumerator {
public:
    virtual ~PatternEnumerator() = default;
    virtual std::size_t num_transactions() const = 0;
    virtual TraversalStats traverse(VisitorRef visit) const = 0;
};

/// Set-enumeration tree over itemsets of size <= max_size. Children of a node
/// extend it with a single item larger than its largest item.
class ItemsetTree final : public PatternEnumerator {
public:
    ItemsetTree(const TransactionDatabase& db, std::size_t max_size);

    std::size_t num_transactions() const override { return db_->n(); }
    std::size_t max_size() const noexcept { return max_size_; }
    TraversalStats traverse(VisitorRef visit) const override;

    template <typename F>
    TraversalStats for_each(F&& visit) const {
        return traverse(VisitorRef(visit));
    }

private:
    const TransactionDatabase* db_;
    std::size_t max_size_;
};

/// Sum over rho = 1..min(r, d) of C(d, rho), saturating at UINT64_MAX.
std::uint64_t pattern_count(std::size_t d, std::size_t r);

} // namespace selpat
