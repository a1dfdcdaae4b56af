#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace toricgap {

/// Fixed-length bit vector. Used for edge sets, Pauli masks and face syndromes.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
    BitVec(std::size_t n, std::initializer_list<std::size_t> bits) : BitVec(n) {
        for (auto b : bits) set(b);
    }

    static BitVec from_word(std::size_t n, std::uint64_t w) {
        BitVec v(n);
        if (!v.words_.empty()) v.words_[0] = w;
        v.trim();
        return v;
    }

    std::size_t size() const noexcept { return n_; }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool value = true) {
        std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= m;
        else
            words_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool none() const noexcept {
        for (auto w : words_)
            if (w) return false;
        return true;
    }
    bool any() const noexcept { return !none(); }

    /// Low 64 bits; callers check size() <= 64 when that matters.
    std::uint64_t word0() const noexcept { return words_.empty() ? 0 : words_[0]; }
    const std::vector<std::uint64_t> &words() const noexcept { return words_; }

    BitVec &operator^=(const BitVec &o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
        return *this;
    }
    BitVec &operator&=(const BitVec &o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    BitVec &operator|=(const BitVec &o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec &b) { return a ^= b; }
    friend BitVec operator&(BitVec a, const BitVec &b) { return a &= b; }
    friend BitVec operator|(BitVec a, const BitVec &b) { return a |= b; }
    friend bool operator==(const BitVec &a, const BitVec &b) = default;

    /// Parity of |a & b|.
    friend bool overlap_parity(const BitVec &a, const BitVec &b) {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k) acc ^= a.words_[k] & b.words_[k];
        return std::popcount(acc) & 1;
    }
    friend std::size_t overlap_count(const BitVec &a, const BitVec &b) {
        std::size_t c = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k)
            c += static_cast<std::size_t>(std::popcount(a.words_[k] & b.words_[k]));
        return c;
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    /// Lexicographic on (size, words from most significant).
    friend bool operator<(const BitVec &a, const BitVec &b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        for (std::size_t k = a.words_.size(); k-- > 0;)
            if (a.words_[k] != b.words_[k]) return a.words_[k] < b.words_[k];
        return false;
    }

    std::size_t hash() const noexcept {
        std::size_t h = std::hash<std::size_t>{}(n_);
        for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

  private:
    void trim() {
        if (n_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

using EdgeSet = BitVec;

}  // namespace toricgap
