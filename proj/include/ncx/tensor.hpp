#pragma once

#include <map>
#include <vector>

#include "ncx/formring.hpp"
#include "ncx/ncform.hpp"

namespace ncx {

// A TensorElem is an even noncommutative form interpreted in the Fedosov
// algebra (Omega^+ A, o). Words with a unit coefficient live in the
// unitalized T~A.
inline void require_even(const NCForm& f, const char* who) {
  for (const auto& [w, c] : f.terms())
    require(w.degree() % 2 == 0, ErrorCode::ParityMismatch, std::string(who) + " needs an even form");
}

// Fedosov product x o y = x y - dx dy.
inline NCForm fedosov_product(const NCForm& x, const NCForm& y) {
  require_even(x, "fedosov_product");
  require_even(y, "fedosov_product");
  return form_product(x, y) - form_product(differential_d(x), differential_d(y));
}

// Multiplication map m: TA -> A, the degree-zero component. An algebra
// homomorphism from the Fedosov product to A.
inline AlgElem mult_map(const NCForm& x, const AlgebraPtr& a) {
  AlgElem e = AlgElem::zero(a);
  for (const auto& [w, c] : x.terms()) {
    if (w.degree() != 0) continue;
    require(w.tilde0 >= 0, ErrorCode::ResolutionError, "degree-0 unit word has no image in A");
    e.coeffs[w.tilde0] += c;
  }
  return e;
}

// --- tensor word view ----------------------------------------------------

// Expansion of a form word into tensor words of TA under the correspondence
// a0 da1 ... da2n <-> a0 (x) w(a1,a2) (x) ... with w(a,b) = ab - a(x)b.
// Tensor letters are A-basis indices. A leading unit coefficient is absorbed.
struct TensorWordTerm {
  std::vector<int> letters;
  Scalar coeff;
};

inline std::vector<TensorWordTerm> to_tensor_words(const BasisAlgebraPtr& alg, const FWord& w,
                                                   const Scalar& c0) {
  require(w.degree() % 2 == 0, ErrorCode::ParityMismatch, "tensor view needs an even word");
  std::vector<TensorWordTerm> acc;
  if (w.tilde0 >= 0)
    acc.push_back({{w.tilde0}, c0});
  else
    acc.push_back({{}, c0});
  bool tr = false;
  for (size_t i = 0; i + 1 < w.letters.size(); i += 2) {
    int a = w.letters[i], b = w.letters[i + 1];
    std::vector<TensorWordTerm> next;
    for (const auto& t : acc) {
      // w(a,b) = ab - a (x) b
      for (const auto& p : alg->product(a, b, tr)) {
        TensorWordTerm u = t;
        u.letters.push_back(p.index);
        u.coeff = u.coeff * p.coeff;
        next.push_back(std::move(u));
      }
      TensorWordTerm v = t;
      v.letters.push_back(a);
      v.letters.push_back(b);
      v.coeff = -v.coeff;
      next.push_back(std::move(v));
    }
    acc = std::move(next);
  }
  // merge duplicates
  std::map<std::vector<int>, Scalar> merged;
  for (auto& t : acc) {
    auto it = merged.find(t.letters);
    if (it == merged.end())
      merged.emplace(std::move(t.letters), t.coeff);
    else
      it->second += t.coeff;
  }
  std::vector<TensorWordTerm> out;
  for (auto& [l, c] : merged)
    if (!c.is_zero()) out.push_back({l, c});
  return out;
}

// Inverse: a tensor word b1 (x) ... (x) bm as the Fedosov product of the
// degree-zero letters. Empty words give the unit word of T~A.
inline NCForm from_tensor_word(const BasisAlgebraPtr& alg, int trunc, const std::vector<int>& letters,
                               const Scalar& c) {
  if (letters.empty()) return c * NCForm::unit_word(alg, trunc);
  NCForm f = NCForm::basis_elem(alg, trunc, letters[0]);
  for (size_t i = 1; i < letters.size(); ++i)
    f = fedosov_product(f, NCForm::basis_elem(alg, trunc, letters[i]));
  return c * f;
}

// --- X(TA) boundaries realized on Omega A --------------------------------

enum class OverflowPolicy { Strict, Drop };

// nat d = sum_{i=0}^{2n} kappa^i d - sum_{i=0}^{n-1} kappa^{2i} b on
// Omega^{2n}; maps X0 = TA into X1 = Omega^1 TA_nat identified with odd
// forms.
inline NCForm x_boundary_d(const NCForm& x, OverflowPolicy policy = OverflowPolicy::Strict) {
  require_even(x, "x_boundary_d");
  NCForm r(x.algebra(), x.trunc());
  if (x.truncated()) r.mark_truncated();
  for (int n2 = 0; n2 <= x.top_degree(); n2 += 2) {
    NCForm comp = x.component(n2);
    if (comp.is_zero()) continue;
    if (n2 + 1 > x.trunc()) {
      // the d-part overflows; the b-part of this component still contributes
      require(policy == OverflowPolicy::Drop, ErrorCode::TruncationOverflow,
              "nat d needs degree " + std::to_string(n2 + 1));
      r.mark_truncated();
    } else {
      NCForm dpart = differential_d(comp);
      NCForm acc = dpart;
      for (int i = 1; i <= n2; ++i) {
        dpart = karoubi_kappa(dpart);
        acc = acc + dpart;
      }
      r = r + acc;
    }
    int n = n2 / 2;
    NCForm bpart = hochschild_b(comp);
    for (int i = 0; i < n; ++i) {
      r = r - bpart;
      bpart = kappa_power(bpart, 2);
    }
  }
  return r;
}

// bbar = b - (1 + kappa) d on Omega^{2n+1}: X1 -> X0.
inline NCForm x_boundary_b(const NCForm& xi, OverflowPolicy policy = OverflowPolicy::Strict) {
  for (const auto& [w, c] : xi.terms())
    require(w.degree() % 2 == 1, ErrorCode::ParityMismatch, "x_boundary_b needs an odd form");
  NCForm r(xi.algebra(), xi.trunc());
  if (xi.truncated()) r.mark_truncated();
  for (int n2 = 1; n2 <= xi.top_degree(); n2 += 2) {
    NCForm comp = xi.component(n2);
    if (comp.is_zero()) continue;
    if (n2 + 1 > xi.trunc()) {
      require(policy == OverflowPolicy::Drop, ErrorCode::TruncationOverflow,
              "bbar needs degree " + std::to_string(n2 + 1));
      r.mark_truncated();
      continue;
    }
    NCForm dc = differential_d(comp);
    r = r + hochschild_b(comp) - dc - karoubi_kappa(dc);
  }
  return r;
}

// --- the canonical idempotent over C --------------------------------------

// e_hat = e + sum_{n>=1} (2n)!/(n!)^2 (e - 1/2)(de de)^n, truncated.
inline NCForm idempotent_e_hat(int trunc) {
  auto c = algebra_C();
  NCForm f = NCForm::basis_elem(c, trunc, 0);
  for (int n = 1; 2 * n <= trunc; ++n) {
    Scalar coeff = Scalar::exact(binomial_2n_n(n));
    FWord we{0, std::vector<int>(2 * n, 0)};
    FWord wu{-1, std::vector<int>(2 * n, 0)};
    f.add(we, coeff);
    f.add(wu, coeff * Scalar::exact(rat(-1, 2)));
  }
  return f;
}

// --- Fedosov lift of a representation --------------------------------------

// rho maps A-basis elements to degree-0 FormMatrices over B~. The lift sends
// a tensor element x to the matrix-valued even form
//   omega_rho(x) = sum rho(a0) d rho(a1) ... d rho(a2n),
// whose Fedosov-type action on Omega^+ E implements rho_*(x). It is
// multiplicative for the Fedosov product of matrices.
class RepLift {
 public:
  RepLift(BasisAlgebraPtr a, const FormRing* ring, std::vector<FormMatrix> rho_basis)
      : a_(std::move(a)), ring_(ring), rho_(std::move(rho_basis)) {
    require(static_cast<int>(rho_.size()) == a_->dim(), ErrorCode::DimensionMismatch,
            "need one matrix per basis element");
  }

  const FormRing* ring() const { return ring_; }
  int p() const { return rho_[0].p(); }
  int q() const { return rho_[0].q(); }

  FormMatrix rho(int i) const { return rho_[i]; }

  FormMatrix lift(const NCForm& x) const {
    FormMatrix acc(ring_, p(), q());
    for (const auto& [w, c] : x.terms()) {
      require(w.degree() % 2 == 0, ErrorCode::ParityMismatch, "lift needs an even form");
      FormMatrix m = w.tilde0 >= 0 ? rho_[w.tilde0] : FormMatrix::identity(ring_, p(), q());
      for (int l : w.letters) m = m * dmat(rho_[l]);
      Scalar cc = ring_->mode() == Mode::Float ? Scalar::flt(c.lower()) : c;
      acc = acc + cc * m;
    }
    return acc;
  }

  // action on a module vector xi in H (x) T~B represented as a FormMatrix
  // column (n x 1 is modeled as a matrix with one nonzero column): the
  // Fedosov-type action rho_*(x) . xi = m xi - d m d xi.
  FormMatrix act(const NCForm& x, const FormMatrix& xi) const {
    FormMatrix m = lift(x);
    return m * xi - dmat(m) * dmat(xi);
  }

 private:
  BasisAlgebraPtr a_;
  const FormRing* ring_;
  std::vector<FormMatrix> rho_;
};

}  // namespace ncx
