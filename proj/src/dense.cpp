#include "koszul/dense.hpp"

#include <algorithm>

namespace koszul {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::vector<std::uint32_t> Matrix::column(std::size_t j) const {
  std::vector<std::uint32_t> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::multiply(const Matrix& rhs, const PrimeField& field) const {
  if (cols_ != rhs.rows_) throw InvalidArgument("matrix product: shape mismatch");
  const std::uint64_t p = field.prime();
  Matrix out(rows_, rhs.cols_);
  std::vector<std::uint64_t> acc(rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t k = 0; k < cols_; ++k) {
      const std::uint64_t a = (*this)(i, k);
      if (a == 0) continue;
      auto r = rhs.row(k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) acc[j] = (acc[j] + a * r[j]) % p;
    }
    for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) = static_cast<std::uint32_t>(acc[j]);
  }
  return out;
}

Matrix Matrix::select_columns(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(i, cols[j]);
  return out;
}

std::vector<std::size_t> rref(Matrix& m, const PrimeField& field, std::size_t pivot_limit) {
  const std::size_t limit = std::min(pivot_limit, m.cols());
  const std::uint64_t p = field.prime();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < limit && r < m.rows(); ++c) {
    std::size_t sel = r;
    while (sel < m.rows() && m(sel, c) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != r) std::swap_ranges(m.row(sel).begin(), m.row(sel).end(), m.row(r).begin());
    const std::uint64_t inv = field.invr(m(r, c));
    auto pivot_row = m.row(r);
    for (std::size_t j = c; j < m.cols(); ++j)
      pivot_row[j] = static_cast<std::uint32_t>(pivot_row[j] * inv % p);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const std::uint64_t f = p - m(i, c);
      auto row = m.row(i);
      for (std::size_t j = c; j < m.cols(); ++j)
        row[j] = static_cast<std::uint32_t>((row[j] + f * pivot_row[j]) % p);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::size_t dense_rank(Matrix m, const PrimeField& field) { return rref(m, field).size(); }

Matrix kernel(const Matrix& m, const PrimeField& field) {
  Matrix reduced = m;
  const auto pivots = rref(reduced, field);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix basis(m.cols(), free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const std::size_t fc = free_cols[k];
    basis(fc, k) = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i)
      basis(pivots[i], k) = field.negr(reduced(i, fc));
  }
  return basis;
}

}  // namespace koszul
