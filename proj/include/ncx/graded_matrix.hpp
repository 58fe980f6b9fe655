#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ncx/scalar.hpp"

namespace ncx {

using CMat = Eigen::MatrixXcd;

enum class MatParity { Even, Odd, Mixed };

// Dense matrix over Scalar whose rows/cols are partitioned into an even block
// of size p followed by an odd block of size q. Parity of an entry position
// (i,j) is block(i)+block(j) mod 2.
class GradedMatrix {
 public:
  GradedMatrix() : p_(0), q_(0), rows_(0), cols_(0) {}
  GradedMatrix(int p, int q, Mode m = Mode::Exact)
      : p_(p), q_(q), rows_(p + q), cols_(p + q), mode_(m),
        a_(static_cast<size_t>(rows_) * cols_, Scalar::zero(m)) {}

  static GradedMatrix identity(int p, int q, Mode m = Mode::Exact) {
    GradedMatrix r(p, q, m);
    for (int i = 0; i < p + q; ++i) r.at(i, i) = Scalar::one(m);
    return r;
  }

  int p() const { return p_; }
  int q() const { return q_; }
  int n() const { return rows_; }
  Mode mode() const { return mode_; }
  int block(int i) const { return i < p_ ? 0 : 1; }

  Scalar& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const Scalar& at(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  MatParity parity() const {
    bool even_ok = true, odd_ok = true;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) {
        if (at(i, j).is_zero()) continue;
        if ((block(i) + block(j)) % 2 == 0) odd_ok = false;
        else even_ok = false;
      }
    if (even_ok) return MatParity::Even;  // zero matrix counts as even
    if (odd_ok) return MatParity::Odd;
    return MatParity::Mixed;
  }

  bool is_zero() const {
    for (const auto& s : a_)
      if (!s.is_zero()) return false;
    return true;
  }

  friend GradedMatrix operator+(const GradedMatrix& x, const GradedMatrix& y) {
    require(x.p_ == y.p_ && x.q_ == y.q_, ErrorCode::DimensionMismatch, "matrix sum shape");
    GradedMatrix r = x;
    for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += y.a_[k];
    return r;
  }
  friend GradedMatrix operator-(const GradedMatrix& x) {
    GradedMatrix r = x;
    for (auto& v : r.a_) v = -v;
    return r;
  }
  friend GradedMatrix operator-(const GradedMatrix& x, const GradedMatrix& y) { return x + (-y); }
  friend GradedMatrix operator*(const Scalar& s, const GradedMatrix& x) {
    GradedMatrix r = x;
    for (auto& v : r.a_) v *= s;
    return r;
  }
  friend GradedMatrix operator*(const GradedMatrix& x, const GradedMatrix& y) {
    require(x.cols_ == y.rows_ && x.p_ == y.p_ && x.q_ == y.q_, ErrorCode::DimensionMismatch, "matrix product shape");
    GradedMatrix r(x.p_, x.q_, x.mode_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        if (x.at(i, k).is_zero()) continue;
        for (int j = 0; j < y.cols_; ++j) {
          if (y.at(k, j).is_zero()) continue;
          r.at(i, j) += x.at(i, k) * y.at(k, j);
        }
      }
    return r;
  }
  friend bool operator==(const GradedMatrix& x, const GradedMatrix& y) {
    return x.p_ == y.p_ && x.q_ == y.q_ && x.a_ == y.a_;
  }

  CMat lower(double pi_val = M_PI, double lambda_val = 1.0) const {
    CMat m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = at(i, j).lower(pi_val, lambda_val);
    return m;
  }

 private:
  int p_, q_, rows_, cols_;
  Mode mode_ = Mode::Exact;
  std::vector<Scalar> a_;
};

// Supertrace: trace over the even block minus trace over the odd block.
inline Scalar supertrace(const GradedMatrix& m) {
  Scalar s = Scalar::zero(m.mode());
  for (int i = 0; i < m.n(); ++i) s += (m.block(i) == 0 ? m.at(i, i) : -m.at(i, i));
  return s;
}

// Graded commutator [X,Y] = XY - (-)^{|X||Y|} YX for homogeneous X, Y.
inline GradedMatrix graded_commutator(const GradedMatrix& x, const GradedMatrix& y) {
  MatParity px = x.parity(), py = y.parity();
  require(px != MatParity::Mixed && py != MatParity::Mixed, ErrorCode::ParityMismatch,
          "graded commutator needs homogeneous arguments");
  GradedMatrix yx = y * x;
  if (px == MatParity::Odd && py == MatParity::Odd) return x * y + yx;
  return x * y - yx;
}

// Exact rank over the scalar field (Exact mode only).
inline int exact_rank(std::vector<std::vector<Scalar>> rows) {
  if (rows.empty()) return 0;
  size_t ncols = rows[0].size();
  int rank = 0;
  size_t col = 0;
  for (size_t r = 0; r < rows.size() && col < ncols; ++col) {
    size_t piv = r;
    while (piv < rows.size() && rows[piv][col].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[r]);
    Scalar inv = Scalar::one(rows[r][col].mode()) / rows[r][col];
    for (size_t j = col; j < ncols; ++j) rows[r][j] *= inv;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col].is_zero()) continue;
      Scalar f = rows[i][col];
      for (size_t j = col; j < ncols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

}  // namespace ncx
