#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wmr/errors.hpp"

namespace wmr {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Small and square in practice, but rectangular
/// shapes are allowed so that bra/ket projections can be written as products.
class CMatrix {
public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit CMatrix(std::size_t dim) : CMatrix(dim, dim) {}

  static CMatrix identity(std::size_t dim) {
    CMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    CMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      detail::require(row.size() == c, "CMatrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  static CMatrix diagonal(const std::vector<cplx>& d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::vector<cplx>& data() noexcept { return data_; }
  const std::vector<cplx>& data() const noexcept { return data_; }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  CMatrix conjugate() const {
    CMatrix out = *this;
    for (auto& v : out.data_) v = std::conj(v);
    return out;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  CMatrix& operator+=(const CMatrix& o) {
    detail::require(rows_ == o.rows_ && cols_ == o.cols_, "CMatrix: shape mismatch in +=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    detail::require(rows_ == o.rows_ && cols_ == o.cols_, "CMatrix: shape mismatch in -=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

  /// Matrix product. Zero entries of the left factor are skipped, which keeps
  /// products of the nearly diagonal GHZ-family matrices cheap.
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    detail::require(a.cols_ == b.rows_, "CMatrix: shape mismatch in product");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx(0.0)) continue;
        const cplx* brow = &b.data_[k * b.cols_];
        cplx* orow = &out.data_[i * out.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
      }
    }
    return out;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

inline double hermiticity_defect(const CMatrix& a) {
  if (!a.square()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

inline double frobenius_norm(const CMatrix& a) {
  double s = 0.0;
  for (const auto& v : a.data()) s += std::norm(v);
  return std::sqrt(s);
}

struct HermEigResult {
  std::vector<double> eigenvalues;    // descending
  std::optional<CMatrix> eigenvectors; // columns, ordered like eigenvalues
};

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot a_pq and then applies the
/// classic real Jacobi rotation. Sweeps stop once the off-diagonal Frobenius
/// norm drops below 1e-12 * max(1, ||A||_F). Pivots that are already exactly
/// zero are skipped, so sparse inputs converge in very few rotations.
inline HermEigResult herm_eigen(const CMatrix& input, bool want_vectors = false, int max_sweeps = 100) {
  detail::require(input.square(), "herm_eigen: matrix must be square");
  const double defect = hermiticity_defect(input);
  if (!(defect <= 1e-10)) throw DomainError("herm_eigen: matrix is not Hermitian (defect " + std::to_string(defect) + ")");

  const std::size_t dim = input.rows();
  CMatrix a = input;
  for (std::size_t i = 0; i < dim; ++i) a(i, i) = a(i, i).real();
  std::optional<CMatrix> v;
  if (want_vectors) v = CMatrix::identity(dim);

  const double tol = 1e-12 * std::max(1.0, frobenius_norm(input));
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  for (; off_norm() > tol; ++sweep) {
    if (sweep >= max_sweeps) throw NumericalError("herm_eigen: no convergence after " + std::to_string(max_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < dim; ++p) {
      for (std::size_t q = p + 1; q < dim; ++q) {
        const cplx apq = a(p, q);
        const double g = std::abs(apq);
        if (g == 0.0) continue;
        const cplx phase = apq / g; // a_pq = g * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx phase_c = std::conj(phase);

        for (std::size_t k = 0; k < dim; ++k) {
          if (k == p || k == q) continue;
          const cplx akp = a(k, p);
          const cplx akq = a(k, q) * phase_c;
          const cplx nkp = c * akp - s * akq;
          const cplx nkq = s * akp + c * akq;
          a(k, p) = nkp;
          a(p, k) = std::conj(nkp);
          a(k, q) = nkq;
          a(q, k) = std::conj(nkq);
        }
        a(p, p) = app - t * g;
        a(q, q) = aqq + t * g;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (v) {
          CMatrix& vm = *v;
          for (std::size_t k = 0; k < dim; ++k) {
            const cplx vkp = vm(k, p);
            const cplx vkq = vm(k, q) * phase_c;
            vm(k, p) = c * vkp - s * vkq;
            vm(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  HermEigResult out;
  out.eigenvalues.reserve(dim);
  for (auto i : order) out.eigenvalues.push_back(a(i, i).real());
  if (v) {
    CMatrix sorted(dim);
    for (std::size_t col = 0; col < dim; ++col)
      for (std::size_t k = 0; k < dim; ++k) sorted(k, col) = (*v)(k, order[col]);
    out.eigenvectors = std::move(sorted);
  }
  return out;
}

inline HermEigResult herm_eigenvalues(const CMatrix& m) { return herm_eigen(m, false); }

/// Singular values (descending) by one-sided Jacobi orthogonalization of the
/// columns. Each value carries an absolute error of order eps * ||M||, without
/// the square-root amplification of eigenvalues of M M^dagger. Column pairs
/// with disjoint row support are skipped.
inline std::vector<double> singular_values(const CMatrix& m, int max_sweeps = 60) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::size_t words = (rows + 63) / 64;
  std::vector<std::vector<cplx>> col(cols, std::vector<cplx>(rows));
  std::vector<std::vector<std::uint64_t>> support(cols, std::vector<std::uint64_t>(words, 0));
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) {
      col[j][i] = m(i, j);
      if (m(i, j) != cplx(0.0)) support[j][i / 64] |= std::uint64_t{1} << (i % 64);
    }
  auto overlaps = [&](std::size_t p, std::size_t q) {
    for (std::size_t w = 0; w < words; ++w)
      if (support[p][w] & support[q][w]) return true;
    return false;
  };

  constexpr double kTol = 1e-15;
  for (int sweep = 0;; ++sweep) {
    if (sweep >= max_sweeps) throw NumericalError("singular_values: no convergence after " + std::to_string(max_sweeps) + " sweeps");
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p)
      for (std::size_t q = p + 1; q < cols; ++q) {
        if (!overlaps(p, q)) continue;
        double alpha = 0.0, beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += std::norm(col[p][i]);
          beta += std::norm(col[q][i]);
          gamma += std::conj(col[p][i]) * col[q][i];
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx phase_c = std::conj(gamma / g);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const cplx xp = col[p][i];
          const cplx xq = col[q][i] * phase_c;
          col[p][i] = c * xp - s * xq;
          col[q][i] = s * xp + c * xq;
        }
        for (std::size_t w = 0; w < words; ++w) support[p][w] = support[q][w] = support[p][w] | support[q][w];
      }
    if (!rotated) break;
  }

  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (const auto& x : col[j]) s += std::norm(x);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

} // namespace wmr
