#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncx/scalar.hpp"

namespace ncx {

// One term of a product expansion: coefficient times a basis element.
struct ExpTerm {
  int index;
  Scalar coeff;
};
using Expansion = std::vector<ExpTerm>;

// Abstract basis-indexed associative algebra. NCForm and the word operators
// are generic over this interface, so the same code runs over a finite
// structure-constant algebra and over the truncated tensor algebra (whose
// product is the Fedosov product and may drop terms past the cutoff).
class BasisAlgebra {
 public:
  virtual ~BasisAlgebra() = default;
  virtual int dim() const = 0;
  virtual std::optional<int> unit() const = 0;
  // e_i * e_j expanded over the basis; sets `truncated` if terms were dropped.
  virtual Expansion product(int i, int j, bool& truncated) const = 0;
  virtual std::string label(int i) const = 0;
  virtual int parity(int i) const { return 0; }
  virtual bool graded() const { return false; }
  virtual Mode mode() const { return Mode::Exact; }
};

// Associative algebra given by a dense structure-constant table
// e_i e_j = sum_k c[i][j][k] e_k. Optionally unital and/or Z2-graded.
class FiniteAlgebra : public BasisAlgebra {
 public:
  FiniteAlgebra(int dim, std::vector<Scalar> constants, std::optional<int> unit_index = std::nullopt,
                std::optional<std::vector<int>> grading = std::nullopt,
                std::vector<std::string> labels = {}, bool validate_axioms = true)
      : dim_(dim), c_(std::move(constants)), unit_(unit_index), grading_(std::move(grading)),
        labels_(std::move(labels)) {
    require(dim_ > 0 && c_.size() == static_cast<size_t>(dim_) * dim_ * dim_, ErrorCode::SchemaError,
            "structure constant array has wrong shape");
    if (labels_.empty()) {
      for (int i = 0; i < dim_; ++i) labels_.push_back("e" + std::to_string(i));
    }
    mode_ = c_.empty() ? Mode::Exact : c_[0].mode();
    if (validate_axioms) validate();
  }

  int dim() const override { return dim_; }
  std::optional<int> unit() const override { return unit_; }
  std::string label(int i) const override { return labels_[i]; }
  int parity(int i) const override { return grading_ ? (*grading_)[i] : 0; }
  bool graded() const override { return grading_.has_value(); }
  Mode mode() const override { return mode_; }

  const Scalar& c(int i, int j, int k) const { return c_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k]; }

  Expansion product(int i, int j, bool& /*truncated*/) const override {
    Expansion out;
    for (int k = 0; k < dim_; ++k) {
      const Scalar& s = c(i, j, k);
      if (!s.is_zero()) out.push_back({k, s});
    }
    return out;
  }

  // Multiply two coefficient vectors.
  std::vector<Scalar> mul_vec(const std::vector<Scalar>& x, const std::vector<Scalar>& y) const {
    std::vector<Scalar> out(dim_, Scalar::zero(mode_));
    for (int i = 0; i < dim_; ++i) {
      if (x[i].is_zero()) continue;
      for (int j = 0; j < dim_; ++j) {
        if (y[j].is_zero()) continue;
        for (int k = 0; k < dim_; ++k) {
          const Scalar& s = c(i, j, k);
          if (!s.is_zero()) out[k] += x[i] * y[j] * s;
        }
      }
    }
    return out;
  }

 private:
  void validate() {
    bool tr = false;
    // associativity on all basis triples
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          std::vector<Scalar> lhs(dim_, Scalar::zero(mode_)), rhs(dim_, Scalar::zero(mode_));
          for (const auto& t : product(i, j, tr))
            for (const auto& u : product(t.index, k, tr)) lhs[u.index] += t.coeff * u.coeff;
          for (const auto& t : product(j, k, tr))
            for (const auto& u : product(i, t.index, tr)) rhs[u.index] += t.coeff * u.coeff;
          for (int m = 0; m < dim_; ++m)
            require(lhs[m] == rhs[m], ErrorCode::NonAssociative,
                    "(e" + std::to_string(i) + " e" + std::to_string(j) + ") e" + std::to_string(k) +
                        " != e" + std::to_string(i) + " (e" + std::to_string(j) + " e" + std::to_string(k) + ")");
        }
    if (unit_) {
      require(*unit_ >= 0 && *unit_ < dim_, ErrorCode::BadUnit, "unit index out of range");
      for (int i = 0; i < dim_; ++i) {
        auto check = [&](const Expansion& e) {
          std::vector<Scalar> v(dim_, Scalar::zero(mode_));
          for (const auto& t : e) v[t.index] += t.coeff;
          for (int m = 0; m < dim_; ++m)
            require(v[m] == (m == i ? Scalar::one(mode_) : Scalar::zero(mode_)), ErrorCode::BadUnit,
                    "unit axiom fails on e" + std::to_string(i));
        };
        check(product(*unit_, i, tr));
        check(product(i, *unit_, tr));
      }
    }
    if (grading_) {
      require(static_cast<int>(grading_->size()) == dim_, ErrorCode::SchemaError, "grading has wrong length");
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          for (int k = 0; k < dim_; ++k)
            require(c(i, j, k).is_zero() || ((parity(i) + parity(j)) % 2 == parity(k) % 2),
                    ErrorCode::SchemaError, "structure constants do not respect the grading");
    }
  }

  int dim_;
  std::vector<Scalar> c_;
  std::optional<int> unit_;
  std::optional<std::vector<int>> grading_;
  std::vector<std::string> labels_;
  Mode mode_;
};

using AlgebraPtr = std::shared_ptr<const FiniteAlgebra>;

inline AlgebraPtr make_algebra(int dim, std::vector<Scalar> constants,
                               std::optional<int> unit_index = std::nullopt,
                               std::optional<std::vector<int>> grading = std::nullopt,
                               std::vector<std::string> labels = {}) {
  return std::make_shared<FiniteAlgebra>(dim, std::move(constants), unit_index, std::move(grading),
                                         std::move(labels));
}

// --- standard algebras (cached: same instance per process) ----------------

// The ground field C as a one-dimensional unital algebra.
inline AlgebraPtr algebra_C() {
  static AlgebraPtr a = make_algebra(1, {Scalar::one(Mode::Exact)}, 0, std::nullopt, {"e"});
  return a;
}

// One-dimensional complex Clifford algebra C_1 = C + eps C, eps^2 = 1,
// graded (even, odd).
inline AlgebraPtr algebra_C1() {
  static AlgebraPtr a = [] {
    int d = 2;
    std::vector<Scalar> c(d * d * d, Scalar::zero(Mode::Exact));
    auto set = [&](int i, int j, int k) { c[(static_cast<size_t>(i) * d + j) * d + k] = Scalar::one(Mode::Exact); };
    set(0, 0, 0);
    set(0, 1, 1);
    set(1, 0, 1);
    set(1, 1, 0);  // eps^2 = 1
    return make_algebra(d, std::move(c), 0, std::vector<int>{0, 1}, {"1", "eps"});
  }();
  return a;
}

// Full matrix algebra M_n via matrix units E_ij E_kl = delta_jk E_il.
inline AlgebraPtr algebra_Mn(int n) {
  static std::map<int, AlgebraPtr> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  int d = n * n;
  std::vector<Scalar> c(static_cast<size_t>(d) * d * d, Scalar::zero(Mode::Exact));
  auto idx = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          if (j == k)
            c[(static_cast<size_t>(idx(i, j)) * d + idx(k, l)) * d + idx(i, l)] = Scalar::one(Mode::Exact);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) labels.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
  std::optional<int> unit;
  if (n == 1) unit = 0;
  return cache.emplace(n, make_algebra(d, std::move(c), unit, std::nullopt, std::move(labels))).first->second;
}

// Truncated polynomial algebra x C[x] / (x^{k+1}): non-unital, nilpotent,
// basis {x, x^2, ..., x^k}.
inline AlgebraPtr algebra_nilpotent_poly(int k) {
  static std::map<int, AlgebraPtr> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  std::vector<Scalar> c(static_cast<size_t>(k) * k * k, Scalar::zero(Mode::Exact));
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j)
      if (i + j <= k) c[(static_cast<size_t>(i - 1) * k + (j - 1)) * k + (i + j - 1)] = Scalar::one(Mode::Exact);
  std::vector<std::string> labels;
  for (int i = 1; i <= k; ++i) labels.push_back("x^" + std::to_string(i));
  return cache.emplace(k, make_algebra(k, std::move(c), std::nullopt, std::nullopt, std::move(labels)))
      .first->second;
}

// Three-dimensional noncommutative nilpotent algebra {u, v, w} with
// u v = w and all other basis products zero (so v u = 0 != u v).
inline AlgebraPtr algebra_nc3() {
  static AlgebraPtr a = [] {
    std::vector<Scalar> c(27, Scalar::zero(Mode::Exact));
    c[(0 * 3 + 1) * 3 + 2] = Scalar::one(Mode::Exact);
    return make_algebra(3, std::move(c), std::nullopt, std::nullopt, {"u", "v", "w"});
  }();
  return a;
}

// Unitalization A~ = A + C 1~: a new unit is adjoined even if A is unital.
// Index 0 is the new unit; the embedding of A shifts indices by one.
inline AlgebraPtr unitalize(const AlgebraPtr& a) {
  int d = a->dim() + 1;
  Mode m = a->mode();
  std::vector<Scalar> c(static_cast<size_t>(d) * d * d, Scalar::zero(m));
  auto set = [&](int i, int j, int k, const Scalar& s) { c[(static_cast<size_t>(i) * d + j) * d + k] = s; };
  set(0, 0, 0, Scalar::one(m));
  bool tr = false;
  for (int i = 0; i < a->dim(); ++i) {
    set(0, i + 1, i + 1, Scalar::one(m));
    set(i + 1, 0, i + 1, Scalar::one(m));
    for (int j = 0; j < a->dim(); ++j)
      for (const auto& t : a->product(i, j, tr)) set(i + 1, j + 1, t.index + 1, t.coeff);
  }
  std::vector<std::string> labels{"1~"};
  for (int i = 0; i < a->dim(); ++i) labels.push_back(a->label(i));
  std::optional<std::vector<int>> grading;
  if (a->graded()) {
    std::vector<int> g{0};  // adjoined unit is even
    for (int i = 0; i < a->dim(); ++i) g.push_back(a->parity(i));
    grading = std::move(g);
  }
  return make_algebra(d, std::move(c), 0, std::move(grading), std::move(labels));
}

// Element of a FiniteAlgebra as a coefficient vector.
struct AlgElem {
  AlgebraPtr algebra;
  std::vector<Scalar> coeffs;

  static AlgElem zero(const AlgebraPtr& a) {
    return {a, std::vector<Scalar>(a->dim(), Scalar::zero(a->mode()))};
  }
  static AlgElem basis(const AlgebraPtr& a, int i) {
    AlgElem e = zero(a);
    e.coeffs[i] = Scalar::one(a->mode());
    return e;
  }
  bool is_zero() const {
    for (const auto& s : coeffs)
      if (!s.is_zero()) return false;
    return true;
  }
  friend AlgElem operator+(const AlgElem& x, const AlgElem& y) {
    require(x.algebra == y.algebra, ErrorCode::AlgebraMismatch, "element sum across algebras");
    AlgElem r = x;
    for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += y.coeffs[i];
    return r;
  }
  friend AlgElem operator*(const AlgElem& x, const AlgElem& y) {
    require(x.algebra == y.algebra, ErrorCode::AlgebraMismatch, "element product across algebras");
    return {x.algebra, x.algebra->mul_vec(x.coeffs, y.coeffs)};
  }
  friend AlgElem operator*(const Scalar& s, const AlgElem& x) {
    AlgElem r = x;
    for (auto& cc : r.coeffs) cc *= s;
    return r;
  }
  friend bool operator==(const AlgElem& x, const AlgElem& y) {
    return x.algebra == y.algebra && x.coeffs == y.coeffs;
  }
};

}  // namespace ncx
