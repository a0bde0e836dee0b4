#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

namespace pgcap {

// Dense bitset sized at runtime. Only the operations the coverage walks need:
// test/set, popcount, and rank/select over the zero bits (used to draw
// uniform uncovered points). Bits past size() are kept at 1 in the last word
// so the zero-side queries never have to special-case the tail.
class Bitset {
public:
    static constexpr std::uint64_t npos = ~std::uint64_t{0};

    Bitset() = default;

    explicit Bitset(std::uint64_t n) : n_(n), w_((n + 63) / 64, 0) {
        mask_tail();
    }

    std::uint64_t size() const { return n_; }

    bool test(std::uint64_t i) const {
        return (w_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::uint64_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }

    void reset(std::uint64_t i) {
        w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    // All bits to zero (tail padding stays 1).
    void clear() {
        std::memset(w_.data(), 0, w_.size() * sizeof(std::uint64_t));
        mask_tail();
    }

    // Number of set bits in [0, n).
    std::uint64_t count() const {
        std::uint64_t c = 0;
        for (std::uint64_t w : w_) c += std::uint64_t(std::popcount(w));
        return c - tail_padding();
    }

    std::uint64_t count_unset() const { return n_ - count(); }

    std::uint64_t find_first_unset() const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            if (w_[k] != ~std::uint64_t{0}) {
                std::uint64_t i = k * 64 +
                    std::uint64_t(std::countr_one(w_[k]));
                return i < n_ ? i : npos;
            }
        }
        return npos;
    }

    // Index of the rank-th zero bit (rank 0-based); throws if out of range.
    std::uint64_t select_unset(std::uint64_t rank) const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t zeros = 64 - std::uint64_t(std::popcount(w_[k]));
            if (rank >= zeros) {
                rank -= zeros;
                continue;
            }
            std::uint64_t w = ~w_[k];
            while (rank--) w &= w - 1;  // drop lowest zero
            return k * 64 + std::uint64_t(std::countr_zero(w));
        }
        throw std::out_of_range("Bitset::select_unset: rank past last zero");
    }

    std::span<const std::uint64_t> words() const { return w_; }

    bool operator==(const Bitset&) const = default;

private:
    void mask_tail() {
        if (n_ & 63) w_.back() |= ~std::uint64_t{0} << (n_ & 63);
    }

    std::uint64_t tail_padding() const {
        return (n_ & 63) ? (64 - (n_ & 63)) : 0;
    }

    std::uint64_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace pgcap
