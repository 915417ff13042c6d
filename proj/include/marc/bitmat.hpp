#ifndef MARC_BITMAT_HPP
#define MARC_BITMAT_HPP

#include <cstdint>
#include <vector>

namespace marc {

// Dense bit matrix over GF(2), rows packed into 64-bit words.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
          data_(static_cast<size_t>(rows) * words_per_row_, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool get(int r, int c) const {
        return (data_[static_cast<size_t>(r) * words_per_row_ + c / 64] >> (c % 64)) & 1u;
    }
    void set(int r, int c, bool v) {
        std::uint64_t& w = data_[static_cast<size_t>(r) * words_per_row_ + c / 64];
        std::uint64_t mask = 1ull << (c % 64);
        w = v ? (w | mask) : (w & ~mask);
    }
    void flip(int r, int c) {
        data_[static_cast<size_t>(r) * words_per_row_ + c / 64] ^= 1ull << (c % 64);
    }

    // dst_row ^= src_row
    void row_xor(int dst, int src) {
        std::uint64_t* d = row_ptr(dst);
        const std::uint64_t* s = row_ptr(src);
        for (int w = 0; w < words_per_row_; ++w) d[w] ^= s[w];
    }

    std::uint64_t* row_ptr(int r) { return data_.data() + static_cast<size_t>(r) * words_per_row_; }
    const std::uint64_t* row_ptr(int r) const {
        return data_.data() + static_cast<size_t>(r) * words_per_row_;
    }
    int words_per_row() const { return words_per_row_; }

    // Column indices of set bits in a row, ascending.
    std::vector<int> row_support(int r) const;

    // H * x over GF(2); x.size() == cols. Returns one bit per row.
    std::vector<std::uint8_t> mul_vec(const std::vector<std::uint8_t>& x) const;

    bool mul_vec_is_zero(const std::vector<std::uint8_t>& x) const;

    // Rank by Gaussian elimination on a scratch copy.
    int rank() const;

  private:
    int rows_ = 0, cols_ = 0, words_per_row_ = 0;
    std::vector<std::uint64_t> data_;
};

} // namespace marc

#endif
