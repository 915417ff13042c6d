#include "marc/bitmat.hpp"

#include <bit>
#include <stdexcept>

namespace marc {

std::vector<int> BitMatrix::row_support(int r) const {
    std::vector<int> idx;
    const std::uint64_t* row = row_ptr(r);
    for (int w = 0; w < words_per_row_; ++w) {
        std::uint64_t v = row[w];
        while (v) {
            int b = std::countr_zero(v);
            idx.push_back(w * 64 + b);
            v &= v - 1;
        }
    }
    return idx;
}

std::vector<std::uint8_t> BitMatrix::mul_vec(const std::vector<std::uint8_t>& x) const {
    if (static_cast<int>(x.size()) != cols_)
        throw std::invalid_argument("BitMatrix::mul_vec: size mismatch");
    // Pack x once, then each output bit is a popcount parity of an AND.
    std::vector<std::uint64_t> xv(words_per_row_, 0);
    for (int c = 0; c < cols_; ++c)
        if (x[c]) xv[c / 64] |= 1ull << (c % 64);
    std::vector<std::uint8_t> out(rows_);
    for (int r = 0; r < rows_; ++r) {
        const std::uint64_t* row = row_ptr(r);
        int par = 0;
        for (int w = 0; w < words_per_row_; ++w) par ^= std::popcount(row[w] & xv[w]) & 1;
        out[r] = static_cast<std::uint8_t>(par);
    }
    return out;
}

bool BitMatrix::mul_vec_is_zero(const std::vector<std::uint8_t>& x) const {
    auto s = mul_vec(x);
    for (auto b : s)
        if (b) return false;
    return true;
}

int BitMatrix::rank() const {
    BitMatrix a = *this;
    int rank = 0;
    for (int c = 0; c < cols_ && rank < rows_; ++c) {
        int pivot = -1;
        for (int r = rank; r < rows_; ++r) {
            if (a.get(r, c)) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != rank) {
            for (int w = 0; w < words_per_row_; ++w)
                std::swap(a.row_ptr(pivot)[w], a.row_ptr(rank)[w]);
        }
        for (int r = 0; r < rows_; ++r)
            if (r != rank && a.get(r, c)) a.row_xor(r, rank);
        ++rank;
    }
    return rank;
}

} // namespace marc
