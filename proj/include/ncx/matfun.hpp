#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <random>
#include <vector>

#include "ncx/errors.hpp"

namespace ncx {

using CMat = Eigen::MatrixXcd;

inline CMat matrix_exp(const CMat& m) { return m.exp(); }

// exp(-t D^2) for an odd matrix D given as a full square matrix.
inline CMat heat_kernel_matrix(const CMat& d, double t) {
  require(t >= 0, ErrorCode::NegativeTime, "heat kernel needs t >= 0");
  require(d.rows() == d.cols(), ErrorCode::DimensionMismatch, "D must be square");
  CMat d2 = d * d;
  return CMat((-t * d2).exp());
}

// Simplex-ordered product integral over the scaled simplex {s_i >= 0, sum = t}:
//
//   int e^{-s0 D2} A1 e^{-s1 D2} ... An e^{-sn D2} ds
//
// computed with one exponential of the (n+1)x(n+1) block upper bidiagonal
// matrix with -D2 on the diagonal and the A_i above it (Van Loan). The n = 0
// case is e^{-t D2}; for D2 = 0 the value is t^n A1...An / n!.
inline CMat duhamel_integral(const CMat& d2, const std::vector<CMat>& factors, double t) {
  require(d2.rows() == d2.cols(), ErrorCode::DimensionMismatch, "D2 must be square");
  const long k = d2.rows();
  const long n = static_cast<long>(factors.size());
  for (const auto& a : factors)
    require(a.rows() == k && a.cols() == k, ErrorCode::DimensionMismatch, "factor dimension mismatch");
  if (n == 0) return CMat((-t * d2).exp());
  CMat big = CMat::Zero(k * (n + 1), k * (n + 1));
  for (long b = 0; b <= n; ++b) big.block(b * k, b * k, k, k) = -d2;
  for (long b = 0; b < n; ++b) big.block(b * k, (b + 1) * k, k, k) = factors[b];
  CMat e = (t * big).exp();
  return e.block(0, n * k, k, k);
}

// Monte-Carlo evaluation of the same integral; test oracle. Samples the
// scaled simplex via sorted uniforms.
template <typename Rng>
CMat duhamel_monte_carlo(const CMat& d2, const std::vector<CMat>& factors, double t, int samples, Rng& rng) {
  const long k = d2.rows();
  const long n = static_cast<long>(factors.size());
  if (n == 0) return CMat((-t * d2).exp());
  Eigen::SelfAdjointEigenSolver<CMat> es;
  bool hermitian = (d2 - d2.adjoint()).norm() < 1e-12 * (1.0 + d2.norm());
  CMat evecs;
  Eigen::VectorXd evals;
  if (hermitian) {
    es.compute(d2);
    evecs = es.eigenvectors();
    evals = es.eigenvalues();
  }
  auto heat = [&](double s) -> CMat {
    if (hermitian) {
      Eigen::VectorXcd d(k);
      for (long i = 0; i < k; ++i) d(i) = std::exp(-s * evals(i));
      return evecs * d.asDiagonal() * evecs.adjoint();
    }
    return CMat((-s * d2).exp());
  };
  CMat acc = CMat::Zero(k, k);
  std::vector<double> cuts(n);
  for (int it = 0; it < samples; ++it) {
    for (long i = 0; i < n; ++i) cuts[i] = t * std::uniform_real_distribution<double>(0, 1)(rng);
    std::sort(cuts.begin(), cuts.end());
    double prev = 0;
    CMat prod = CMat::Identity(k, k);
    for (long i = 0; i < n; ++i) {
      prod = prod * heat(cuts[i] - prev) * factors[i];
      prev = cuts[i];
    }
    prod = prod * heat(t - prev);
    acc += prod;
  }
  // simplex volume t^n / n!
  double vol = 1;
  for (long i = 1; i <= n; ++i) vol *= t / i;
  return acc * (vol / samples);
}

}  // namespace ncx
