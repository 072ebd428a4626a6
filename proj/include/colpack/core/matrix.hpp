// matrix.hpp - dense row-major matrix used for filter matrices, masks,
// accumulator outputs and float master weights.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "colpack/core/error.hpp"

namespace colpack {

template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      std::ostringstream msg;
      msg << "matrix storage holds " << values_.size() << " values, expected "
          << rows_ << "x" << cols_;
      throw InvariantError(msg.str());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  const T& at(std::size_t r, std::size_t c) const {
    check(r, c);
    return values_[r * cols_ + c];
  }
  T& at(std::size_t r, std::size_t c) {
    check(r, c);
    return values_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  // Number of entries that compare unequal to zero.
  std::size_t nnz() const {
    return static_cast<std::size_t>(std::count_if(
        values_.begin(), values_.end(), [](const T& v) { return v != T{}; }));
  }

  double density() const {
    return values_.empty() ? 0.0
                           : static_cast<double>(nnz()) /
                                 static_cast<double>(values_.size());
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

 private:
  void check(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) {
      std::ostringstream msg;
      msg << "index (" << r << ", " << c << ") outside " << rows_ << "x"
          << cols_ << " matrix";
      throw InvariantError(msg.str());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> values_;
};

// Per-layer N x MWH filter matrix of quantized weights; zero = pruned.
using SparseFilterMatrix = Matrix<std::int8_t>;
// Float master copy kept by the trainer.
using FloatMatrix = Matrix<float>;
// 1 = weight permanently pruned.
using MaskMatrix = Matrix<std::uint8_t>;
// Integer accumulator outputs (k-bit values widened to 64).
using AccMatrix = Matrix<std::int64_t>;

// Magnitude used by the pruning routines; exact for int8 (|-128| = 128).
template <typename T>
inline auto magnitude(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    return v < 0 ? -v : v;
  } else {
    const int w = static_cast<int>(v);
    return w < 0 ? -w : w;
  }
}

}  // namespace colpack
