#ifndef QSAT_EDGESET_HPP
#define QSAT_EDGESET_HPP

#include <cstdint>
#include <vector>

#include "qsat/cube.hpp"

namespace qsat {

// Bitset over edge indices of one Q_d.
class EdgeSet {
public:
    EdgeSet() : nbits_(0), count_(0) {}

    explicit EdgeSet(Dim d) : EdgeSet(d.edge_count()) {}

    explicit EdgeSet(uint64_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0), count_(0) {}

    uint64_t universe_size() const { return nbits_; }
    uint64_t count() const { return count_; }

    bool test(EdgeIndex i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(EdgeIndex i) {
        uint64_t& w = words_[i >> 6];
        uint64_t bit = uint64_t(1) << (i & 63);
        count_ += !(w & bit);
        w |= bit;
    }

    void reset(EdgeIndex i) {
        uint64_t& w = words_[i >> 6];
        uint64_t bit = uint64_t(1) << (i & 63);
        count_ -= !!(w & bit);
        w &= ~bit;
    }

    // True iff every member of this set is also in `other`.
    bool is_subset_of(const EdgeSet& other) const {
        for (size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & ~other.words_[k]) return false;
        return true;
    }

    template <class F>
    void for_each(F&& fn) const {
        for (size_t k = 0; k < words_.size(); ++k) {
            uint64_t w = words_[k];
            while (w) {
                fn(EdgeIndex(k * 64 + __builtin_ctzll(w)));
                w &= w - 1;
            }
        }
    }

    friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

private:
    uint64_t nbits_;
    std::vector<uint64_t> words_;
    uint64_t count_;
};

} // namespace qsat

#endif
