#pragma once

#include <map>
#include <vector>

#include "ncx/scalar.hpp"
#include "ncx/spectral.hpp"

namespace ncx {

// De Rham form on R^n with coefficients (monomial in x) e^{-g lambda x^2},
// scalars in the symbolic monomial field Q(i) pi^{p/2} lambda^{q/2}. The
// gaussian multiplicity g is tracked per term; only g = 1 terms are
// integrable within the scalar field.
class GaussianForm {
 public:
  struct Key {
    std::vector<int> alpha;  // monomial exponents, length n
    int g = 0;               // gaussian multiplicity
    uint32_t mask = 0;       // wedge factors, bit u = dx_{u+1}, stored sorted

    friend bool operator<(const Key& x, const Key& y) {
      if (x.mask != y.mask) return x.mask < y.mask;
      if (x.g != y.g) return x.g < y.g;
      return x.alpha < y.alpha;
    }
    friend bool operator==(const Key& x, const Key& y) {
      return x.mask == y.mask && x.g == y.g && x.alpha == y.alpha;
    }
  };

  GaussianForm() : n_(0) {}
  explicit GaussianForm(int n) : n_(n) {}

  static GaussianForm one(int n) {
    GaussianForm f(n);
    f.add(Key{std::vector<int>(n, 0), 0, 0}, Scalar::one(Mode::Symbolic));
    return f;
  }
  static GaussianForm gaussian(int n) {  // e^{-lambda x^2}
    GaussianForm f(n);
    f.add(Key{std::vector<int>(n, 0), 1, 0}, Scalar::one(Mode::Symbolic));
    return f;
  }
  static GaussianForm coordinate(int n, int u) {  // x_{u+1}
    GaussianForm f(n);
    Key k{std::vector<int>(n, 0), 0, 0};
    k.alpha[u] = 1;
    f.add(k, Scalar::one(Mode::Symbolic));
    return f;
  }
  static GaussianForm dx(int n, int u) {
    GaussianForm f(n);
    f.add(Key{std::vector<int>(n, 0), 0, 1u << u}, Scalar::one(Mode::Symbolic));
    return f;
  }

  int n() const { return n_; }
  const std::map<Key, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(Key k, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) terms_.emplace(std::move(k), c);
    else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  void add_form(const GaussianForm& o, const Scalar& s) {
    for (const auto& [k, c] : o.terms_) add(k, c * s);
  }

  friend GaussianForm operator+(const GaussianForm& x, const GaussianForm& y) {
    GaussianForm r = x;
    r.add_form(y, Scalar::one(Mode::Symbolic));
    return r;
  }
  friend GaussianForm operator-(const GaussianForm& x, const GaussianForm& y) {
    GaussianForm r = x;
    r.add_form(y, -Scalar::one(Mode::Symbolic));
    return r;
  }
  friend GaussianForm operator*(const Scalar& s, const GaussianForm& x) {
    GaussianForm r(x.n_);
    for (const auto& [k, c] : x.terms_) r.add(k, c * s);
    return r;
  }
  friend bool operator==(const GaussianForm& x, const GaussianForm& y) {
    return x.n_ == y.n_ && x.terms_ == y.terms_;
  }

  bool is_homogeneous(int deg) const {
    for (const auto& [k, c] : terms_)
      if (__builtin_popcount(k.mask) != deg) return false;
    return true;
  }
  int parity() const {  // 0 even, 1 odd, -1 mixed
    int par = -2;
    for (const auto& [k, c] : terms_) {
      int p = __builtin_popcount(k.mask) % 2;
      if (par == -2) par = p;
      else if (par != p) return -1;
    }
    return par == -2 ? 0 : par;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      if (!first) s += " + ";
      first = false;
      s += "[" + c.str() + "]";
      for (int u = 0; u < n_; ++u)
        if (k.alpha[u] > 0) s += " x" + std::to_string(u + 1) + (k.alpha[u] > 1 ? "^" + std::to_string(k.alpha[u]) : "");
      if (k.g > 0) s += " exp(-" + (k.g > 1 ? std::to_string(k.g) : std::string()) + "lam x^2)";
      for (int u = 0; u < n_; ++u)
        if (k.mask & (1u << u)) s += " dx" + std::to_string(u + 1);
    }
    return s;
  }

 private:
  int n_;
  std::map<Key, Scalar> terms_;
};

namespace detail {

// sign of merging two sorted index masks (counts crossings)
inline int merge_sign(uint32_t a, uint32_t b) {
  int sign = 1;
  while (b) {
    uint32_t low = b & (~b + 1);
    uint32_t above = a & ~(low | (low - 1));
    if (__builtin_popcount(above) % 2 == 1) sign = -sign;
    b ^= low;
  }
  return sign;
}

}  // namespace detail

inline GaussianForm wedge(const GaussianForm& x, const GaussianForm& y) {
  require(x.n() == y.n(), ErrorCode::DimensionMismatch, "wedge across dimensions");
  GaussianForm r(x.n());
  for (const auto& [kx, cx] : x.terms())
    for (const auto& [ky, cy] : y.terms()) {
      if (kx.mask & ky.mask) continue;
      GaussianForm::Key k;
      k.alpha.resize(x.n());
      for (int u = 0; u < x.n(); ++u) k.alpha[u] = kx.alpha[u] + ky.alpha[u];
      k.g = kx.g + ky.g;
      k.mask = kx.mask | ky.mask;
      int sign = detail::merge_sign(kx.mask, ky.mask);
      Scalar c = cx * cy;
      r.add(k, sign > 0 ? c : -c);
    }
  return r;
}

// d(x^a e^{-g lam x^2} dx_I) =
//   sum_u (a_u x^{a - e_u} - 2 g lam x^{a + e_u}) e^{-g lam x^2} dx_u dx_I
inline GaussianForm deRham_d(const GaussianForm& x) {
  GaussianForm r(x.n());
  for (const auto& [k, c] : x.terms()) {
    for (int u = 0; u < x.n(); ++u) {
      uint32_t du = 1u << u;
      if (k.mask & du) continue;
      int sign = detail::merge_sign(du, k.mask);  // dx_u in front of dx_I
      Scalar front = sign > 0 ? c : -c;
      if (k.alpha[u] > 0) {
        GaussianForm::Key nk = k;
        nk.alpha[u] -= 1;
        nk.mask |= du;
        r.add(nk, Scalar::sym_monomial({rat(k.alpha[u]), rat(0)}, 0, 0) * front);
      }
      if (k.g > 0) {
        GaussianForm::Key nk = k;
        nk.alpha[u] += 1;
        nk.mask |= du;
        r.add(nk, Scalar::sym_monomial({rat(-2 * k.g), rat(0)}, 0, 2) * front);
      }
    }
  }
  return r;
}

// Fedosov product on even forms: w1 w2 - d w1 /\ d w2.
inline GaussianForm fedosov_T(const GaussianForm& x, const GaussianForm& y) {
  require(x.parity() == 0 && y.parity() == 0, ErrorCode::ParityMismatch, "fedosov_T needs even forms");
  return wedge(x, y) - wedge(deRham_d(x), deRham_d(y));
}

// Exact integral of a top-degree gaussian-damped form, using the per-axis
// moments int x^{2m} e^{-lam x^2} dx = (2m-1)!!/(2 lam)^m (pi/lam)^{1/2}.
inline Scalar integrate_top(const GaussianForm& x) {
  Scalar acc = Scalar::zero(Mode::Symbolic);
  uint32_t full = x.n() >= 32 ? ~0u : ((1u << x.n()) - 1);
  for (const auto& [k, c] : x.terms()) {
    require(k.mask == full, ErrorCode::NotTopDegree, "integrand must be a top-degree form");
    require(k.g >= 1, ErrorCode::NotIntegrable, "integrand lacks the gaussian damping");
    require(k.g == 1, ErrorCode::NotIntegrable,
            "multi-gaussian integrals leave the symbolic scalar field");
    Scalar val = c;
    bool zero = false;
    for (int u = 0; u < x.n(); ++u) {
      int a = k.alpha[u];
      if (a % 2 == 1) {
        zero = true;
        break;
      }
      int m = a / 2;
      Rat dblfac(1);
      for (int j = 2 * m - 1; j >= 1; j -= 2) dblfac *= j;
      Rat two_m(1);
      for (int j = 0; j < m; ++j) two_m *= 2;
      Rat coeff = dblfac / two_m;
      // (2m-1)!!/2^m * lam^{-m} * pi^{1/2} lam^{-1/2}
      val = val * Scalar::sym_monomial({coeff, rat(0)}, 1, -2 * m - 1);
    }
    if (!zero) acc += val;
  }
  return acc;
}

// --- matrices of gaussian forms over the graded spinor space ---------------

// Right-module matrices over the gaussian-form algebra; same conventions as
// FormMatrix (ordinary matrix product, row-twisted differential, graded
// trace with the form-degree correction on odd rows).
class SpinorForm {
 public:
  SpinorForm() = default;
  SpinorForm(int n, int p, int q) : n_(n), p_(p), q_(q), a_(static_cast<size_t>(p + q) * (p + q), GaussianForm(n)) {}

  static SpinorForm identity(int n, int p, int q) {
    SpinorForm m(n, p, q);
    for (int i = 0; i < p + q; ++i) m.at(i, i) = GaussianForm::one(n);
    return m;
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int dim() const { return p_ + q_; }
  int block(int i) const { return i < p_ ? 0 : 1; }

  GaussianForm& at(int i, int j) { return a_[static_cast<size_t>(i) * dim() + j]; }
  const GaussianForm& at(int i, int j) const { return a_[static_cast<size_t>(i) * dim() + j]; }

  bool is_zero() const {
    for (const auto& f : a_)
      if (!f.is_zero()) return false;
    return true;
  }

  friend SpinorForm operator+(const SpinorForm& x, const SpinorForm& y) {
    SpinorForm r = x;
    for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] + y.a_[i];
    return r;
  }
  friend SpinorForm operator-(const SpinorForm& x, const SpinorForm& y) {
    SpinorForm r = x;
    for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = r.a_[i] - y.a_[i];
    return r;
  }
  friend SpinorForm operator*(const Scalar& s, const SpinorForm& x) {
    SpinorForm r = x;
    for (auto& f : r.a_) f = s * f;
    return r;
  }
  friend SpinorForm operator*(const SpinorForm& x, const SpinorForm& y) {
    SpinorForm r(x.n_, x.p_, x.q_);
    for (int i = 0; i < x.dim(); ++i)
      for (int k = 0; k < x.dim(); ++k) {
        if (x.at(i, k).is_zero()) continue;
        for (int j = 0; j < y.dim(); ++j) {
          if (y.at(k, j).is_zero()) continue;
          r.at(i, j) = r.at(i, j) + wedge(x.at(i, k), y.at(k, j));
        }
      }
    return r;
  }

  friend SpinorForm dmat(const SpinorForm& x) {
    SpinorForm r(x.n_, x.p_, x.q_);
    for (int i = 0; i < x.dim(); ++i)
      for (int j = 0; j < x.dim(); ++j) {
        GaussianForm df = deRham_d(x.at(i, j));
        r.at(i, j) = x.block(i) == 0 ? df : (-Scalar::one(Mode::Symbolic)) * df;
      }
    return r;
  }

  GaussianForm supertrace() const {
    GaussianForm s(n_);
    for (int i = 0; i < dim(); ++i) {
      if (block(i) == 0) {
        s.add_form(at(i, i), Scalar::one(Mode::Symbolic));
        continue;
      }
      for (const auto& [k, c] : at(i, i).terms())
        s.add(k, __builtin_popcount(k.mask) % 2 == 0 ? -c : c);
    }
    return s;
  }

  GaussianForm trace() const {
    GaussianForm s(n_);
    for (int i = 0; i < dim(); ++i) s.add_form(at(i, i), Scalar::one(Mode::Symbolic));
    return s;
  }

 private:
  int n_ = 0, p_ = 0, q_ = 0;
  std::vector<GaussianForm> a_;
};

// Fedosov exponential of H = -lam x^2 Id + N by the merged Duhamel series
//   sum_m (-)^m int_{Delta_2m} e^{t0 H} dH e^{t1 H} dH ... e^{t2m H},
// with e^{t H} = e^{-t lam x^2} sum_k t^k N^k / k! and the gaussian factors
// recombining to e^{-lam x^2}; simplex moments are evaluated exactly. The
// series is computed literally (no commutativity shortcuts), so agreement
// with the collapsed closed form is a genuine check.
inline SpinorForm fedosov_exp_gaussian(const SpinorForm& nil, const SpinorForm& dh) {
  int n = nil.n(), p = nil.p(), q = nil.q();
  // nilpotency bounds
  std::vector<SpinorForm> npow = {SpinorForm::identity(n, p, q)};
  while (!npow.back().is_zero() && static_cast<int>(npow.size()) <= n + 1)
    npow.push_back(npow.back() * nil);
  int kmax = static_cast<int>(npow.size()) - 1;
  SpinorForm acc(n, p, q);
  for (int m = 0;; ++m) {
    // dH-power dies beyond degree n
    if (2 * m > n + 1) break;
    SpinorForm msum(n, p, q);
    bool any = false;
    // enumerate exponent tuples (k_0..k_{2m}) with k_i < kmax
    std::vector<int> ks(2 * m + 1, 0);
    while (true) {
      int total = 0;
      for (int v : ks) total += v;
      // term: N^{k0} dH N^{k1} dH ... N^{k_{2m}} / (2m + total)!
      SpinorForm term = npow[ks[0]];
      bool dead = npow[ks[0]].is_zero();
      for (int j = 1; j <= 2 * m && !dead; ++j) {
        term = term * dh;
        term = term * npow[ks[j]];
        if (term.is_zero()) dead = true;
      }
      if (!dead) {
        Rat fct = factorial(2 * m + total);
        term = Scalar::sym_monomial({Rat(1) / fct, rat(0)}, 0, 0) * term;
        msum = msum + term;
        any = true;
      }
      int pos = 2 * m;
      while (pos >= 0 && ++ks[pos] >= kmax) ks[pos--] = 0;
      if (pos < 0) break;
    }
    if (m % 2 == 1) msum = (-Scalar::one(Mode::Symbolic)) * msum;
    acc = acc + msum;
    if (!any && m > 0) break;
  }
  // attach the gaussian marker e^{-lam x^2}
  SpinorForm out(n, p, q);
  for (int i = 0; i < acc.dim(); ++i)
    for (int j = 0; j < acc.dim(); ++j) {
      for (const auto& [k, c] : acc.at(i, j).terms()) {
        GaussianForm::Key nk = k;
        nk.g += 1;
        out.at(i, j).add(nk, c);
      }
    }
  return out;
}

}  // namespace ncx
