#pragma once

#include <map>
#include <vector>

#include "ncx/matfun.hpp"
#include "ncx/ncform.hpp"

namespace ncx {

// Lower an exact algebra's structure constants to Complex64.
inline AlgebraPtr lower_algebra(const AlgebraPtr& a) {
  int d = a->dim();
  std::vector<Scalar> c;
  c.reserve(static_cast<size_t>(d) * d * d);
  bool tr = false;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<Cplx> row(d, Cplx(0, 0));
      for (const auto& t : a->product(i, j, tr)) row[t.index] += t.coeff.lower();
      for (int k = 0; k < d; ++k) c.push_back(Scalar::flt(row[k]));
    }
  std::vector<std::string> labels;
  for (int i = 0; i < d; ++i) labels.push_back(a->label(i));
  std::optional<std::vector<int>> grading;
  if (a->graded()) {
    std::vector<int> g(d);
    for (int i = 0; i < d; ++i) g[i] = a->parity(i);
    grading = std::move(g);
  }
  return std::make_shared<FiniteAlgebra>(d, std::move(c), a->unit(), std::move(grading), std::move(labels),
                                         /*validate=*/false);
}

// The unitalized truncated form algebra over a finite algebra B: basis words
// a~0 d b1 ... d bk of degree <= cap plus the adjoined unit (the degree-0
// unit word). Elements are NCForms over B; this class adds the basis
// enumeration and the left regular representation used to evaluate matrix
// functions over the ring.
class FormRing {
 public:
  FormRing(AlgebraPtr b, int cap, Mode mode = Mode::Float)
      : exact_b_(std::move(b)), cap_(cap), mode_(mode) {
    b_ = mode == Mode::Float ? lower_algebra(exact_b_) : exact_b_;
    int db = b_->dim();
    // enumerate: unit word first, then all words by degree
    push_word(FWord{-1, {}});
    for (int deg = 0; deg <= cap_; ++deg) {
      std::vector<int> letters(deg, 0);
      for (int t0 = (deg == 0 ? 0 : -1); t0 < db; ++t0) {
        std::fill(letters.begin(), letters.end(), 0);
        while (true) {
          push_word(FWord{t0, letters});
          int pos = deg - 1;
          while (pos >= 0 && ++letters[pos] == db) letters[pos--] = 0;
          if (pos < 0) break;
        }
      }
    }
  }

  const AlgebraPtr& base() const { return b_; }
  const AlgebraPtr& exact_base() const { return exact_b_; }
  int cap() const { return cap_; }
  Mode mode() const { return mode_; }
  int dim() const { return static_cast<int>(words_.size()); }
  int unit_index() const { return 0; }
  const FWord& word_at(int i) const { return words_[i]; }

  int index_of(const FWord& w) const {
    auto it = index_.find(w);
    require(it != index_.end(), ErrorCode::ResolutionError, "word outside the form ring basis");
    return it->second;
  }

  NCForm zero() const { return NCForm(b_, cap_); }
  NCForm unit() const { return NCForm::unit_word(b_, cap_); }
  NCForm scalar(const Scalar& s) const { return s * unit(); }

  // coefficient vector of an element in the ring basis
  std::vector<Cplx> coords(const NCForm& f) const {
    std::vector<Cplx> v(words_.size(), Cplx(0, 0));
    for (const auto& [w, c] : f.terms()) v[index_of(w)] += c.lower();
    return v;
  }

  NCForm from_coords(const std::vector<Cplx>& v, double drop = 0.0) const {
    NCForm f(b_, cap_);
    for (size_t i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > drop) f.add(words_[i], Scalar::flt(v[i]));
    return f;
  }

  // left regular representation of a basis word, cached
  const CMat& left_regular(int i) const {
    auto it = lreg_.find(i);
    if (it != lreg_.end()) return it->second;
    int n = dim();
    CMat m = CMat::Zero(n, n);
    NCForm wi = NCForm::word(b_, cap_, words_[i], Scalar::one(mode_));
    for (int j = 0; j < n; ++j) {
      NCForm wj = NCForm::word(b_, cap_, words_[j], Scalar::one(mode_));
      auto v = coords(form_product(wi, wj));
      for (int r = 0; r < n; ++r) m(r, j) = v[r];
    }
    return lreg_.emplace(i, std::move(m)).first->second;
  }

  CMat lower_elem(const NCForm& f) const {
    int n = dim();
    CMat m = CMat::Zero(n, n);
    for (const auto& [w, c] : f.terms()) m += c.lower() * left_regular(index_of(w));
    return m;
  }

 private:
  void push_word(FWord w) {
    index_.emplace(w, static_cast<int>(words_.size()));
    words_.push_back(std::move(w));
  }

  AlgebraPtr exact_b_, b_;
  int cap_;
  Mode mode_;
  std::vector<FWord> words_;
  std::map<FWord, int> index_;
  mutable std::map<int, CMat> lreg_;
};

// Matrix over a FormRing acting on the right module H (x) Omega~B, H graded
// of dimension p|q. Ordinary matrix multiplication realizes composition of
// right-module endomorphisms; the differential twists entries by the row
// block parity.
class FormMatrix {
 public:
  FormMatrix() = default;
  FormMatrix(const FormRing* ring, int p, int q)
      : ring_(ring), p_(p), q_(q), a_(static_cast<size_t>(p + q) * (p + q), ring->zero()) {}

  static FormMatrix identity(const FormRing* ring, int p, int q) {
    FormMatrix m(ring, p, q);
    for (int i = 0; i < p + q; ++i) m.at(i, i) = ring->unit();
    return m;
  }

  const FormRing* ring() const { return ring_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int n() const { return p_ + q_; }
  int block(int i) const { return i < p_ ? 0 : 1; }

  NCForm& at(int i, int j) { return a_[static_cast<size_t>(i) * n() + j]; }
  const NCForm& at(int i, int j) const { return a_[static_cast<size_t>(i) * n() + j]; }

  bool is_zero() const {
    for (const auto& f : a_)
      if (!f.is_zero()) return false;
    return true;
  }

  friend FormMatrix operator+(const FormMatrix& x, const FormMatrix& y) {
    FormMatrix r = x;
    for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] + y.a_[k];
    return r;
  }
  friend FormMatrix operator-(const FormMatrix& x, const FormMatrix& y) {
    FormMatrix r = x;
    for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] - y.a_[k];
    return r;
  }
  friend FormMatrix operator*(const Scalar& s, const FormMatrix& x) {
    FormMatrix r = x;
    for (auto& f : r.a_) f = s * f;
    return r;
  }
  friend FormMatrix operator*(const FormMatrix& x, const FormMatrix& y) {
    FormMatrix r(x.ring_, x.p_, x.q_);
    for (int i = 0; i < x.n(); ++i)
      for (int k = 0; k < x.n(); ++k) {
        if (x.at(i, k).is_zero()) continue;
        for (int j = 0; j < y.n(); ++j) {
          if (y.at(k, j).is_zero()) continue;
          r.at(i, j) = r.at(i, j) + form_product(x.at(i, k), y.at(k, j));
        }
      }
    return r;
  }

  friend FormMatrix commutator(const FormMatrix& x, const FormMatrix& y) { return x * y - y * x; }

  // differential of the right-module endomorphism: entrywise d with the sign
  // of the row block
  friend FormMatrix dmat(const FormMatrix& x) {
    FormMatrix r(x.ring_, x.p_, x.q_);
    for (int i = 0; i < x.n(); ++i)
      for (int j = 0; j < x.n(); ++j) {
        NCForm df = differential_d(x.at(i, j));
        r.at(i, j) = x.block(i) == 0 ? df : (-Scalar::one(df.mode())) * df;
      }
    return r;
  }

  // Fedosov product of matrices over even forms
  friend FormMatrix fedosov(const FormMatrix& x, const FormMatrix& y) { return x * y - dmat(x) * dmat(y); }

  // Graded trace into the ring. Odd-block diagonal entries pick up an extra
  // sign per form degree: this is the unique diagonal trace that both kills
  // graded commutators after the one-form quotient and commutes with dmat.
  // On degree-0 entries (and for q = 0) it is the ordinary supertrace.
  NCForm supertrace() const {
    NCForm s = ring_->zero();
    for (int i = 0; i < n(); ++i) {
      if (block(i) == 0) {
        s = s + at(i, i);
        continue;
      }
      for (const auto& [w, c] : at(i, i).terms()) s.add(w, w.degree() % 2 == 0 ? -c : c);
    }
    return s;
  }

  // degree <= 1 parts of all entries vanish iff ...; helper for residues
  double max_abs() const {
    double m = 0;
    for (const auto& f : a_) m = std::max(m, f.max_abs());
    return m;
  }

  CMat lower() const {
    int nr = ring_->dim();
    CMat big = CMat::Zero(static_cast<long>(n()) * nr, static_cast<long>(n()) * nr);
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j)
        if (!at(i, j).is_zero()) big.block(static_cast<long>(i) * nr, static_cast<long>(j) * nr, nr, nr) =
            ring_->lower_elem(at(i, j));
    return big;
  }

  static FormMatrix from_lowered(const FormRing* ring, int p, int q, const CMat& big, double drop = 0.0) {
    FormMatrix m(ring, p, q);
    int nr = ring->dim();
    int u = ring->unit_index();
    for (int i = 0; i < p + q; ++i)
      for (int j = 0; j < p + q; ++j) {
        std::vector<Cplx> v(nr);
        for (int r = 0; r < nr; ++r) v[r] = big(static_cast<long>(i) * nr + r, static_cast<long>(j) * nr + u);
        m.at(i, j) = ring->from_coords(v, drop);
      }
    return m;
  }

 private:
  const FormRing* ring_ = nullptr;
  int p_ = 0, q_ = 0;
  std::vector<NCForm> a_;
};

// Simplex-ordered Duhamel integral over the form ring, evaluated through the
// left regular representation (Float mode).
inline FormMatrix duhamel_form(const FormMatrix& d2, const std::vector<FormMatrix>& factors, double t) {
  const FormRing* ring = d2.ring();
  require(ring->mode() == Mode::Float, ErrorCode::ModeError, "duhamel over a form ring runs in float mode");
  std::vector<CMat> lows;
  lows.reserve(factors.size());
  for (const auto& f : factors) lows.push_back(f.lower());
  CMat res = duhamel_integral(d2.lower(), lows, t);
  return FormMatrix::from_lowered(ring, d2.p(), d2.q(), res, 1e-300);
}

// Fedosov exponential of an even form-valued operator H, by the merged
// Duhamel series
//   exp_o(H) = sum_n (-)^n int_{Delta_{2n}} e^{t0 H} dH e^{t1 H} ... dH e^{t2n H},
// which terminates because dH raises form degree. Float mode.
inline FormMatrix fedosov_exp(const FormMatrix& h) {
  const FormRing* ring = h.ring();
  FormMatrix dh = dmat(h);
  FormMatrix minus_h = Scalar::flt(-1.0) * h;
  FormMatrix acc(ring, h.p(), h.q());
  int max_n = ring->cap() / 2 + 1;
  for (int n = 0; n <= max_n; ++n) {
    std::vector<FormMatrix> factors(2 * n, dh);
    FormMatrix term = duhamel_form(minus_h, factors, 1.0);
    if (n % 2 == 1) term = Scalar::flt(-1.0) * term;
    acc = acc + term;
    if (n > 0 && term.max_abs() == 0) break;
  }
  return acc;
}

}  // namespace ncx
