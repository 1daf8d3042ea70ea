#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtb {

// Packed GF(2) vector, 64 bits per word. Bits past size() are kept zero so
// popcount/equality can work on whole words.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(int nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {
        if (nbits < 0) throw std::invalid_argument("BitVec: negative size");
    }

    int size() const { return nbits_; }

    bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }

    void set(int i, bool v) {
        uint64_t m = uint64_t(1) << (i & 63);
        if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
    }

    void flip(int i) { w_[i >> 6] ^= uint64_t(1) << (i & 63); }

    void clear() { std::fill(w_.begin(), w_.end(), uint64_t(0)); }

    BitVec& operator^=(const BitVec& o) {
        if (o.nbits_ != nbits_) throw std::invalid_argument("BitVec: size mismatch in xor");
        for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }

    friend BitVec operator^(BitVec a, const BitVec& b) { a ^= b; return a; }

    int popcount() const {
        int n = 0;
        for (uint64_t x : w_) n += std::popcount(x);
        return n;
    }

    bool any() const {
        for (uint64_t x : w_) if (x) return true;
        return false;
    }

    // parity of <this, o> over GF(2): AND the words, popcount, reduce mod 2
    bool parity_and(const BitVec& o) const {
        if (o.nbits_ != nbits_) throw std::invalid_argument("BitVec: size mismatch in dot");
        uint64_t acc = 0;
        for (size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
        return std::popcount(acc) & 1;
    }

    bool operator==(const BitVec& o) const = default;

    std::string to_string() const {
        std::string s(nbits_, '0');
        for (int i = 0; i < nbits_; ++i) if (get(i)) s[i] = '1';
        return s;
    }

    const std::vector<uint64_t>& words() const { return w_; }

private:
    int nbits_ = 0;
    std::vector<uint64_t> w_;
};

struct BitMatrix {
    int rows = 0, cols = 0;
    std::vector<BitVec> row;

    BitMatrix() = default;
    BitMatrix(int r, int c) : rows(r), cols(c), row(r, BitVec(c)) {}

    // y = M v over GF(2); y_i = parity(row_i AND v)
    BitVec mul(const BitVec& v) const {
        if (v.size() != cols) throw std::invalid_argument("BitMatrix: dimension mismatch");
        BitVec y(rows);
        for (int i = 0; i < rows; ++i)
            if (row[i].parity_and(v)) y.set(i, true);
        return y;
    }
};

} // namespace qtb
