#pragma once

#include <map>
#include <memory>
#include <vector>

#include "ncx/tensor.hpp"

namespace ncx {

// The truncated tensor algebra TA of A presented as even forms with the
// Fedosov product. Letter indices are interned lazily: the table grows as
// words appear, so large inner caps only cost what a computation touches.
// Non-unital; the adjoined unit of T~A is the NCForm unit word.
class TensorAlgebraTrunc : public BasisAlgebra {
 public:
  TensorAlgebraTrunc(AlgebraPtr a, int inner_cap) : a_(std::move(a)), cap_(inner_cap) {
    // seed the degree-0 letters so A-basis indices coincide with letter indices
    for (int i = 0; i < a_->dim(); ++i) index_of(FWord{i, {}});
  }

  const AlgebraPtr& base() const { return a_; }
  int inner_cap() const { return cap_; }
  int dim() const override { return static_cast<int>(words_.size()); }
  std::optional<int> unit() const override { return std::nullopt; }
  Mode mode() const override { return a_->mode(); }
  const FWord& word_at(int i) const { return words_[i]; }
  int index_of(const FWord& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) {
      require(w.degree() % 2 == 0 && w.degree() <= cap_, ErrorCode::TruncationOverflow,
              "word outside the tensor algebra truncation");
      it = index_.emplace(w, static_cast<int>(words_.size())).first;
      words_.push_back(w);
    }
    return it->second;
  }

  std::string label(int i) const override {
    const FWord& w = word_at(i);
    std::string s = "(";
    s += w.tilde0 < 0 ? "1~" : a_->label(w.tilde0);
    for (int l : w.letters) s += " d[" + a_->label(l) + "]";
    return s + ")";
  }

  // Fedosov product of basis words, memoized; sets `truncated` when the
  // product overflows the inner cap.
  Expansion product(int i, int j, bool& truncated) const override {
    auto key = std::make_pair(i, j);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      NCForm x = NCForm::word(a_, cap_, word_at(i), Scalar::one(mode()));
      NCForm y = NCForm::word(a_, cap_, word_at(j), Scalar::one(mode()));
      NCForm p = fedosov_product(x, y);
      Expansion e;
      for (const auto& [w, c] : p.terms()) e.push_back({index_of(w), c});
      it = cache_.emplace(key, std::make_pair(std::move(e), p.truncated())).first;
    }
    truncated = truncated || it->second.second;
    return it->second.first;
  }

  // lift an even form over A into an element of this algebra (a degree-0
  // form over TA)
  NCForm embed(const NCForm& x, int outer_trunc, const std::shared_ptr<const TensorAlgebraTrunc>& self) const {
    NCForm r(self, outer_trunc);
    for (const auto& [w, c] : x.terms()) {
      require(w.degree() % 2 == 0, ErrorCode::ParityMismatch, "TA elements are even forms");
      r.add(FWord{index_of(w), {}}, c);
    }
    if (x.truncated()) r.mark_truncated();
    return r;
  }

 private:
  AlgebraPtr a_;
  int cap_;
  mutable std::vector<FWord> words_;
  mutable std::map<FWord, int> index_;
  mutable std::map<std::pair<int, int>, std::pair<Expansion, bool>> cache_;
};

// X(TA) chain realized on forms over A: even part in TA = Omega^+ A, odd
// part in Omega^1 TA_nat identified with odd forms Omega^- A.
struct XChainA {
  NCForm even;
  NCForm odd;
};

// The Goodwillie equivalence data: the right connection nabla, the map phi
// and its geometric-series inverse, the chain map gamma, the projection pi
// and the contracting homotopy h, all on the doubly truncated Omega TA.
class Goodwillie {
 public:
  Goodwillie(AlgebraPtr a, int inner_cap, int outer_cap)
      : a_(std::move(a)), outer_(outer_cap),
        ta_(std::make_shared<TensorAlgebraTrunc>(a_, inner_cap)) {}

  const AlgebraPtr& base() const { return a_; }
  const std::shared_ptr<const TensorAlgebraTrunc>& ta() const { return ta_; }
  int outer_cap() const { return outer_; }

  NCForm zero() const { return NCForm(std::static_pointer_cast<const BasisAlgebra>(ta_), outer_); }

  // phi on a TA basis letter: recursion over the Fedosov factorization
  //   phi(a~0 o r) = a~0 phi(r) + d a~0 d r,  phi(da da') = -d a d a',
  // with phi = 0 on A and on the unit.
  const NCForm& phi_letter(int letter) const {
    auto it = phi_cache_.find(letter);
    if (it != phi_cache_.end()) return it->second;
    const FWord& w = ta_->word_at(letter);
    NCForm r = zero();
    if (w.degree() >= 2) {
      if (w.tilde0 >= 0) {
        // w = a0 o rest, rest = 1~ da1 ... da2k
        FWord rest{-1, w.letters};
        int rest_idx = ta_->index_of(rest);
        int a0_idx = ta_->index_of(FWord{w.tilde0, {}});
        r.add_form(lmul(ta_cast(), a0_idx, phi_letter(rest_idx)), one());
        r.add(FWord{-1, {a0_idx, rest_idx}}, one());
      } else {
        // w = (da1 da2) o rest
        FWord head{-1, {w.letters[0], w.letters[1]}};
        int head_idx = ta_->index_of(head);
        int l1 = ta_->index_of(FWord{w.letters[0], {}});
        int l2 = ta_->index_of(FWord{w.letters[1], {}});
        if (w.degree() == 2) {
          r.add(FWord{-1, {l1, l2}}, -one());
        } else {
          FWord rest{-1, std::vector<int>(w.letters.begin() + 2, w.letters.end())};
          int rest_idx = ta_->index_of(rest);
          // phi(head) rest + head phi(rest) + d head d rest
          NCForm ph = zero();
          ph.add(FWord{-1, {l1, l2}}, -one());
          r.add_form(rmul_ta(ph, rest_idx), one());
          r.add_form(lmul(ta_cast(), head_idx, phi_letter(rest_idx)), one());
          r.add(FWord{-1, {head_idx, rest_idx}}, one());
        }
      }
    }
    return phi_cache_.emplace(letter, std::move(r)).first->second;
  }

  // phi = nabla B on forms: phi(x0 d x1 ... d xn) =
  //   sum_i (-)^{ni} phi(x_i) d x_{i+1} ... d x_{i-1}  (cyclic, d x0 included)
  NCForm phi(const NCForm& f) const {
    NCForm r = zero();
    if (f.truncated()) r.mark_truncated();
    for (const auto& [w, c] : f.terms()) {
      int n = w.degree();
      // i = 0 term: phi(x0) d x1 ... d xn, zero when x0 is the unit
      if (w.tilde0 >= 0) append_tail(r, phi_letter(w.tilde0), w.letters, 0, n, c);
      for (int i = 1; i <= n; ++i) {
        if (w.tilde0 < 0) break;  // d(unit) = 0 kills all wrapped terms
        Scalar sign = (static_cast<long>(n) * i) % 2 == 0 ? c : -c;
        // tail: x_{i+1} ... x_n, x0, x_1 ... x_{i-1}
        std::vector<int> tail;
        for (int j = i; j < n; ++j) tail.push_back(w.letters[j]);
        tail.push_back(w.tilde0);
        for (int j = 0; j + 1 < i; ++j) tail.push_back(w.letters[j]);
        append_tail(r, phi_letter(w.letters[i - 1]), tail, 0, static_cast<int>(tail.size()), sign);
      }
    }
    return r;
  }

  // right connection: nabla(x0 d x1 d x2 ... d xn) = (x0 phi(x1)) d x2 ... d xn
  NCForm nabla(const NCForm& f) const {
    NCForm r = zero();
    if (f.truncated()) r.mark_truncated();
    for (const auto& [w, c] : f.terms()) {
      require(w.degree() >= 1, ErrorCode::DegreeZeroInput, "nabla needs outer degree >= 1");
      NCForm head = phi_letter(w.letters[0]);
      if (w.tilde0 >= 0) head = lmul(ta_cast(), w.tilde0, head);
      append_tail(r, head, w.letters, 1, w.degree(), c);
    }
    return r;
  }

  NCForm one_minus_phi_inv(const NCForm& f) const {
    NCForm acc = f;
    NCForm cur = f;
    for (int guard = 0; !cur.is_zero(); ++guard) {
      require(guard <= outer_ + 2, ErrorCode::TruncationOverflow, "phi series failed to terminate");
      cur = phi(cur);
      acc = acc + cur;
    }
    return acc;
  }

  // embeddings between forms over A and Omega TA words
  NCForm embed_even(const NCForm& x) const { return ta_->embed(x, outer_, ta_); }

  NCForm embed_odd(const NCForm& xi) const {
    NCForm r = zero();
    if (xi.truncated()) r.mark_truncated();
    for (const auto& [w, c] : xi.terms()) {
      require(w.degree() % 2 == 1, ErrorCode::ParityMismatch, "odd chain expected");
      FWord head{w.tilde0, std::vector<int>(w.letters.begin(), w.letters.end() - 1)};
      int a = w.letters.back();
      int x_idx = head.degree() == 0 && head.tilde0 < 0 ? -1 : ta_->index_of(head);
      r.add(FWord{x_idx, {ta_->index_of(FWord{a, {}})}}, c);
    }
    return r;
  }

  NCForm to_A_even(const NCForm& f) const {
    NCForm r(a_, ta_->inner_cap());
    if (f.truncated()) r.mark_truncated();
    for (const auto& [w, c] : f.terms()) {
      require(w.degree() == 0, ErrorCode::ParityMismatch, "outer degree 0 expected");
      r.add(ta_->word_at(w.tilde0), c);
    }
    return r;
  }

  // gamma: X(TA) -> Omega TA; on canonical odd generators x d a the extra
  // b(x phi(a)) term vanishes because phi(a) = 0 on A.
  NCForm gamma(const XChainA& xi) const {
    NCForm r = one_minus_phi_inv(embed_even(xi.even));
    if (!xi.odd.is_zero()) r = r + one_minus_phi_inv(embed_odd(xi.odd));
    return r;
  }

  // gamma on a non-canonical generator nat x d y, y an arbitrary tensor
  // element: (1 - phi)^{-1} (x d y + b(x phi(y))).
  NCForm gamma_general(const NCForm& x_over_A, const NCForm& y_over_A) const {
    NCForm x = embed_even(x_over_A);
    NCForm y = embed_even(y_over_A);
    NCForm arg = zero();
    for (const auto& [wx, cx] : x.terms())
      for (const auto& [wy, cy] : y.terms())
        arg.add(FWord{wx.tilde0, {wy.tilde0}}, cx * cy);
    NCForm xphiy = zero();
    for (const auto& [wy, cy] : y.terms()) {
      NCForm t = phi_letter(wy.tilde0);
      t = cy * t;
      for (const auto& [wx, cx] : x.terms()) {
        NCForm u = wx.tilde0 >= 0 ? lmul(ta_cast(), wx.tilde0, t) : t;
        xphiy.add_form(u, cx);
      }
    }
    arg = arg + hochschild_b(xphiy);
    return one_minus_phi_inv(arg);
  }

  // pi: Omega TA -> X(TA), realized on forms over A. Outer degree 0 maps by
  // un-interning; outer degree 1 maps through the bimodule identification
  // nat(x0 d y) = sum nat((right o x0 o left) d b) over the tensor letters b
  // of y; higher degrees die.
  XChainA pi(const NCForm& f) const {
    NCForm even(a_, ta_->inner_cap());
    NCForm odd(a_, ta_->inner_cap());
    if (f.truncated()) {
      even.mark_truncated();
      odd.mark_truncated();
    }
    for (const auto& [w, c] : f.terms()) {
      if (w.degree() == 0) {
        even.add(ta_->word_at(w.tilde0), c);
      } else if (w.degree() == 1) {
        const FWord& y = ta_->word_at(w.letters[0]);
        auto tws = to_tensor_words(a_, y, c);
        for (const auto& t : tws) {
          for (size_t j = 0; j < t.letters.size(); ++j) {
            NCForm left = from_tensor_word(a_, ta_->inner_cap(),
                                           std::vector<int>(t.letters.begin(), t.letters.begin() + j),
                                           Scalar::one(mode()));
            NCForm right = from_tensor_word(a_, ta_->inner_cap(),
                                            std::vector<int>(t.letters.begin() + j + 1, t.letters.end()),
                                            Scalar::one(mode()));
            NCForm x0 = w.tilde0 < 0 ? NCForm::unit_word(a_, ta_->inner_cap())
                                     : NCForm::word(a_, ta_->inner_cap(), ta_->word_at(w.tilde0), Scalar::one(mode()));
            NCForm u = fedosov_product(fedosov_product(right, x0), left);
            // u d b as an odd form over A
            NCForm da = differential_d(NCForm::basis_elem(a_, ta_->inner_cap(), t.letters[j]));
            odd.add_form(form_product(u, da), t.coeff);
          }
        }
      }
    }
    return {even, odd};
  }

  NCForm q_op(const NCForm& f) const { return gamma(pi(f)); }

  // contracting homotopy h = (1 - phi)^{-1} nabla (1 - Q)
  NCForm homotopy_h(const NCForm& f) const {
    NCForm g = f - q_op(f);
    NCForm g1 = zero();
    for (const auto& [w, c] : g.terms())
      if (w.degree() >= 1) g1.add(w, c);
    if (g.truncated()) g1.mark_truncated();
    return one_minus_phi_inv(nabla(g1));
  }

 private:
  Mode mode() const { return a_->mode(); }
  Scalar one() const { return Scalar::one(mode()); }
  BasisAlgebraPtr ta_cast() const { return std::static_pointer_cast<const BasisAlgebra>(ta_); }

  // append d-letters tail[from..to) to every word of g, scaled
  void append_tail(NCForm& out, const NCForm& g, const std::vector<int>& tail, int from, int to,
                   const Scalar& scale) const {
    if (g.truncated()) out.mark_truncated();
    for (const auto& [w, c] : g.terms()) {
      FWord nw = w;
      for (int j = from; j < to; ++j) nw.letters.push_back(tail[j]);
      out.add(std::move(nw), c * scale);
    }
  }

  NCForm rmul_ta(const NCForm& f, int letter) const { return rmul(f, letter); }

  AlgebraPtr a_;
  int outer_;
  std::shared_ptr<const TensorAlgebraTrunc> ta_;
  mutable std::map<int, NCForm> phi_cache_;
};

}  // namespace ncx
