#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace selpat {

/// Fixed-length packed bit vector. Occurrence vectors are stored this way so
/// that extending a pattern is a word-wise AND and dot products with a real
/// vector only touch set bits.
class BitVec {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    BitVec() = default;
    explicit BitVec(std::size_t size, bool value = false)
        : size_(size), words_((size + kWordBits - 1) / kWordBits, value ? ~Word{0} : Word{0}) {
        trim();
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t num_words() const noexcept { return words_.size(); }
    std::span<const Word> words() const noexcept { return words_; }
    std::span<Word> words() noexcept { return words_; }

    bool test(std::size_t i) const noexcept {
        return (words_[i / kWordBits] >> (i % kWordBits)) & Word{1};
    }
    void set(std::size_t i, bool value = true) noexcept {
        const Word mask = Word{1} << (i % kWordBits);
        if (value) {
            words_[i / kWordBits] |= mask;
        } else {
            words_[i / kWordBits] &= ~mask;
        }
    }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool none() const noexcept {
        for (Word w : words_) {
            if (w != 0) return false;
        }
        return true;
    }

    /// this := a & b. All three must share the same length.
    void assign_and(const BitVec& a, const BitVec& b) noexcept {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] = a.words_[w] & b.words_[w];
    }

    /// True iff every set bit of this is also set in other.
    bool is_subset_of(const BitVec& other) const noexcept {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            if (words_[w] & ~other.words_[w]) return false;
        }
        return true;
    }

    template <typename F>
    void for_each_set(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word bits = words_[w];
            while (bits) {
                const std::size_t i = w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
                f(i);
                bits &= bits - 1;
            }
        }
    }

    std::vector<double> to_dense() const {
        std::vector<double> out(size_, 0.0);
        for_each_set([&](std::size_t i) { out[i] = 1.0; });
        return out;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) noexcept {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

private:
    void trim() noexcept {
        if (size_ % kWordBits != 0 && !words_.empty()) {
            words_.back() &= (Word{1} << (size_ % kWordBits)) - 1;
        }
    }

    std::size_t size_ = 0;
    std::vector<Word> words_;
};

/// Sum of z[i] over the set bits of tau, in increasing index order.
inline double dot(const BitVec& tau, std::span<const double> z) noexcept {
    double s = 0.0;
    tau.for_each_set([&](std::size_t i) { s += z[i]; });
    return s;
}

/// Split dot product: sums of the positive and of the negative entries of z
/// over the set bits of tau. Anti-monotone bounds for every superset pattern.
struct SignedSums {
    double pos = 0.0;
    double neg = 0.0;
    double total = 0.0;
};

inline SignedSums signed_sums(const BitVec& tau, std::span<const double> z) noexcept {
    SignedSums s;
    tau.for_each_set([&](std::size_t i) {
        const double v = z[i];
        s.total += v;
        if (v > 0.0) {
            s.pos += v;
        } else if (v < 0.0) {
            s.neg += v;
        }
    });
    return s;
}

} // namespace selpat
