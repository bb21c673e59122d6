#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "koszul/field.hpp"

namespace koszul {

/// Small row-major dense matrix of raw F_p representatives. The field is
/// passed to the operations that need it rather than stored.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint32_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::uint32_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<std::uint32_t> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const std::uint32_t> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<std::uint32_t> column(std::size_t j) const;

  Matrix transposed() const;
  Matrix multiply(const Matrix& rhs, const PrimeField& field) const;
  /// Keeps only the listed columns, in the given order.
  Matrix select_columns(std::span<const std::size_t> cols) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> data_;
};

inline constexpr std::size_t kAllColumns = std::numeric_limits<std::size_t>::max();

/// Reduced row echelon form in place. Pivots are only taken from columns
/// [0, pivot_limit); the remaining columns ride along (augmented part).
/// Returns the pivot columns in order; rows past their count are zero in the
/// pivot region.
std::vector<std::size_t> rref(Matrix& m, const PrimeField& field, std::size_t pivot_limit = kAllColumns);

std::size_t dense_rank(Matrix m, const PrimeField& field);

/// Basis of the right null space, returned as the columns of a cols x k matrix.
Matrix kernel(const Matrix& m, const PrimeField& field);

}  // namespace koszul
