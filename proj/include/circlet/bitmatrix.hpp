#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace circlet {

// N x V binary dataset, packed column-major into 64-bit words so pairwise
// statistics reduce to AND + popcount over whole columns. Padding bits beyond
// row N are kept at zero, so popcounts never need masking.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_col() const { return words_per_col_; }

  bool get(std::size_t r, std::size_t c) const {
    return (words_[c * words_per_col_ + (r >> 6)] >> (r & 63)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool value);

  std::span<const std::uint64_t> column(std::size_t c) const {
    return {words_.data() + c * words_per_col_, words_per_col_};
  }
  std::size_t column_ones(std::size_t c) const;

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_col_ = 0;
  std::vector<std::uint64_t> words_;
};

// Headerless CSV of comma-separated 0/1 tokens, LF or CRLF line endings.
BitMatrix load_binary_csv(const std::filesystem::path& path);
void save_binary_csv(const BitMatrix& data, const std::filesystem::path& path);

}  // namespace circlet
