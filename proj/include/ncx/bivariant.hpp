#pragma once

#include <functional>
#include <vector>

#include "ncx/formring.hpp"
#include "ncx/ncform.hpp"
#include "ncx/spectral.hpp"

namespace ncx {

// Matrix over B~ with complex coefficients, stored per B~-basis component:
// comp[0] is the unit part, comp[1 + i] the coefficient of the i-th basis
// element of B.
struct BTildeMatrix {
  int n = 0;
  std::vector<CMat> comp;

  static BTildeMatrix zero(int n, int dim_b) {
    BTildeMatrix m;
    m.n = n;
    m.comp.assign(dim_b + 1, CMat::Zero(n, n));
    return m;
  }
  static BTildeMatrix scalar(int n, int dim_b, const CMat& unit_part) {
    BTildeMatrix m = zero(n, dim_b);
    m.comp[0] = unit_part;
    return m;
  }
  BTildeMatrix scaled(Cplx f) const {
    BTildeMatrix m = *this;
    for (auto& c : m.comp) c = f * c;
    return m;
  }
  friend BTildeMatrix operator+(const BTildeMatrix& x, const BTildeMatrix& y) {
    BTildeMatrix r = x;
    for (size_t i = 0; i < r.comp.size(); ++i) r.comp[i] += y.comp[i];
    return r;
  }

  FormMatrix materialize(const FormRing* ring, int p, int q) const {
    require(p + q == n, ErrorCode::DimensionMismatch, "grading split does not match");
    FormMatrix m(ring, p, q);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        NCForm f = ring->zero();
        if (comp[0](i, j) != Cplx(0, 0)) f.add(FWord{-1, {}}, Scalar::flt(comp[0](i, j)));
        for (size_t b = 1; b < comp.size(); ++b)
          if (comp[b](i, j) != Cplx(0, 0))
            f.add(FWord{static_cast<int>(b) - 1, {}}, Scalar::flt(comp[b](i, j)));
        m.at(i, j) = f;
      }
    return m;
  }
};

// A family of spectral triples over B: rho and D are matrices over B~ of
// form degree zero; parity even or odd (the odd case stores the doubled
// matrices built from the C_1 factorization).
struct BivariantTriple {
  AlgebraPtr a;
  AlgebraPtr b;
  TripleParity parity = TripleParity::Even;
  int p = 0, q = 0;
  std::vector<BTildeMatrix> rho;
  BTildeMatrix dop;
};

inline BivariantTriple make_even_bivariant(AlgebraPtr a, AlgebraPtr b, int p, int q,
                                           std::vector<BTildeMatrix> rho, BTildeMatrix dop) {
  BivariantTriple t;
  t.a = std::move(a);
  t.b = std::move(b);
  t.parity = TripleParity::Even;
  t.p = p;
  t.q = q;
  require(static_cast<int>(rho.size()) == t.a->dim(), ErrorCode::DimensionMismatch, "one matrix per basis");
  t.rho = std::move(rho);
  t.dop = std::move(dop);
  return t;
}

inline BivariantTriple make_odd_bivariant(AlgebraPtr a, AlgebraPtr b, int k,
                                          const std::vector<BTildeMatrix>& alpha, const BTildeMatrix& q_op) {
  BivariantTriple t;
  t.a = std::move(a);
  t.b = std::move(b);
  t.parity = TripleParity::Odd;
  t.p = t.q = k;
  int db = static_cast<int>(q_op.comp.size()) - 1;
  for (const auto& al : alpha) {
    BTildeMatrix m = BTildeMatrix::zero(2 * k, db);
    for (size_t c = 0; c < m.comp.size(); ++c) {
      m.comp[c].block(0, 0, k, k) = al.comp[c];
      m.comp[c].block(k, k, k, k) = al.comp[c];
    }
    t.rho.push_back(m);
  }
  t.dop = BTildeMatrix::zero(2 * k, db);
  for (size_t c = 0; c < t.dop.comp.size(); ++c) {
    t.dop.comp[c].block(0, k, k, k) = q_op.comp[c];
    t.dop.comp[c].block(k, 0, k, k) = q_op.comp[c];
  }
  return t;
}

// Value of chi on a chain: an element of X(B) = B (+) Omega^1 B_nat. The
// odd part is a quotient-reduced one-form over B with lowered coefficients.
struct XChainB {
  std::vector<Cplx> even;
  NCForm odd;

  double max_abs() const {
    double m = 0;
    for (const auto& c : even) m = std::max(m, std::abs(c));
    return std::max(m, odd.is_zero() ? 0.0 : odd.max_abs());
  }
  friend XChainB operator-(const XChainB& x, const XChainB& y) {
    XChainB r = x;
    for (size_t i = 0; i < r.even.size(); ++i) r.even[i] -= y.even[i];
    r.odd = x.odd - y.odd;
    return r;
  }
};

// X(B) boundaries on the value side: bbar(nat b0 d b1) = [b0, b1],
// nat d(b) = class of 1~ d b.
inline std::vector<Cplx> x_bbar_B(const AlgebraPtr& b, const NCForm& one_form) {
  std::vector<Cplx> out(b->dim(), Cplx(0, 0));
  bool tr = false;
  for (const auto& [w, c] : one_form.terms()) {
    require(w.degree() == 1, ErrorCode::NotDegreeOne, "bbar needs a one-form");
    if (w.tilde0 < 0) continue;
    for (const auto& t : b->product(w.tilde0, w.letters[0], tr)) out[t.index] += c.lower() * t.coeff.lower();
    for (const auto& t : b->product(w.letters[0], w.tilde0, tr)) out[t.index] -= c.lower() * t.coeff.lower();
  }
  return out;
}

inline NCForm x_natd_B(const AlgebraPtr& b, const std::vector<Cplx>& elem) {
  NCForm f(b, 2);
  for (int i = 0; i < b->dim(); ++i)
    if (elem[i] != Cplx(0, 0)) f.add(FWord{-1, {i}}, Scalar::flt(elem[i]));
  return one_form_quotient(b).reduce(f);
}

// parity involution on a matrix over forms: entrywise (-)^{block + degree}
inline FormMatrix parity_involution(const FormMatrix& m) {
  FormMatrix r(m.ring(), m.p(), m.q());
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) {
      NCForm f(m.ring()->base(), m.ring()->cap());
      int blk = (m.block(i) + m.block(j)) % 2;
      for (const auto& [w, c] : m.at(i, j).terms())
        f.add(w, (blk + w.degree()) % 2 == 0 ? c : -c);
      r.at(i, j) = f;
    }
  return r;
}

// Evaluates the components p_k tau mu nat of the superconnection heat
// cochain on chains over A; the optional derivative data enables one
// du-insertion (the suspension direction) for Chern-Simons transgression.
// Each term is a merged-simplex integral
//   int_{Delta} e^{-s0 D^2} G_1 e^{-s1 D^2} ... G_m e^{-sm D^2}
// with G-factors drawn from [D, rho(a)], rho(a~0), -d rho(a), -dD and the
// du-marked -rho_dot(a), -D_dot, evaluated with one block matrix
// exponential through the ring's regular representation.
class SuperconnectionCochain {
 public:
  SuperconnectionCochain(const BivariantTriple& t, const std::vector<BTildeMatrix>* rho_dot = nullptr,
                         const BTildeMatrix* d_dot = nullptr)
      : t_(t), ring_(t.b, 1, Mode::Float), rho_dot_(rho_dot), d_dot_(d_dot) {
    for (const auto& r : t_.rho) rho_m_.push_back(r.materialize(&ring_, t_.p, t_.q));
    d_m_ = t_.dop.materialize(&ring_, t_.p, t_.q);
    d2_ = d_m_ * d_m_;
    idm_ = FormMatrix::identity(&ring_, t_.p, t_.q);
    d2_low_ = d2_.lower();
    d2_zero_ = d2_.is_zero();
    for (const auto& r : rho_m_) {
      comm_c_.push_back(d_m_ * r - r * d_m_);
      drho_c_.push_back(Scalar::flt(-1.0) * dmat(r));
    }
    dd_c_ = Scalar::flt(-1.0) * dmat(d_m_);
    if (rho_dot_ != nullptr)
      for (const auto& r : *rho_dot_)
        rhodot_c_.push_back(Scalar::flt(-1.0) * row_twist(r.materialize(&ring_, t_.p, t_.q)));
    if (d_dot_ != nullptr)
      ddot_c_ = Scalar::flt(-1.0) * row_twist(d_dot_->materialize(&ring_, t_.p, t_.q));
  }

  // lowered matrix cache keyed by factor pointer
  const CMat& lowered(const FormMatrix* m) const {
    auto it = low_cache_.find(m);
    if (it == low_cache_.end()) it = low_cache_.emplace(m, m->lower()).first;
    return it->second;
  }

  const FormRing& ring() const { return ring_; }
  TripleParity parity() const { return t_.parity; }

  XChainB eval_chain(const NCForm& chain, bool with_du) const {
    NCForm total0 = ring_.zero(), total1 = ring_.zero();
    for (const auto& [w, c] : chain.terms()) {
      Cplx cv = c.lower();
      if (cv == Cplx(0, 0)) continue;
      total0.add_form(eval_word(w, 0, with_du), Scalar::flt(cv));
      total1.add_form(eval_word(w, 1, with_du), Scalar::flt(cv));
    }
    XChainB out;
    out.even.assign(t_.b->dim(), Cplx(0, 0));
    for (const auto& [w, c] : total0.terms())
      if (w.degree() == 0 && w.tilde0 >= 0) out.even[w.tilde0] += c.lower();
    NCForm one_form(t_.b, 2);
    for (const auto& [w, c] : total1.terms())
      if (w.degree() == 1) one_form.add(w, c);
    out.odd = one_form_quotient(t_.b).reduce(one_form);
    return out;
  }

  // tau mu nat on one word with prescribed d- and du-insertion counts
  NCForm eval_word(const FWord& w, int want_d, bool want_du) const {
    NCForm acc = ring_.zero();
    int n = w.degree();
    for (int i = 0; i <= n; ++i) {
      int cotrace_sign = (static_cast<long>(n) * (i + 1)) % 2 == 0 ? 1 : -1;
      std::vector<int> letters(w.letters.begin() + i, w.letters.end());
      int left_count = n - i;
      letters.insert(letters.end(), w.letters.begin(), w.letters.begin() + i);
      // insertion choices: type 0 none; type 1 letter pos replaced; type 2
      // gap pos on the left side; type 3 gap pos on the right side
      struct Choice {
        int type = 0;
        int pos = 0;
      };
      std::vector<Choice> d_choices, du_choices;
      int right_count = n - left_count;
      auto fill = [&](std::vector<Choice>& cs) {
        for (int j = 0; j < n; ++j) cs.push_back({1, j});
        for (int g = 0; g <= left_count; ++g) cs.push_back({2, g});
        for (int g = 0; g <= right_count; ++g) cs.push_back({3, g});
      };
      if (want_d == 0) d_choices.push_back({0, 0});
      else fill(d_choices);
      if (!want_du) du_choices.push_back({0, 0});
      else fill(du_choices);

      for (const auto& dc : d_choices)
        for (const auto& duc : du_choices) {
          // assemble the factor sequence
          std::vector<const FormMatrix*> mats;
          std::vector<int> parities;  // stripped value parity, for du crossing
          int du_index = -1;
          int n1 = left_count, n2 = right_count;
          auto push = [&](const FormMatrix* m, int par, bool is_du) {
            if (is_du) du_index = static_cast<int>(mats.size());
            mats.push_back(m);
            parities.push_back(par);
          };
          auto push_gap = [&](int side, int g) {
            if (dc.type == side + 2 && dc.pos == g) {
              push(&dd_c_, 0, false);  // -dD even
              (side == 0 ? n1 : n2) += 1;
            }
            if (duc.type == side + 2 && duc.pos == g) {
              require(d_dot_ != nullptr, ErrorCode::ResolutionError, "no derivative data");
              push(&ddot_c_, 1, true);  // -du Ddot, odd value
              (side == 0 ? n1 : n2) += 1;
            }
          };
          auto push_letter = [&](int j) {
            int a = letters[j];
            if (dc.type == 1 && dc.pos == j) {
              push(&drho_c_[a], 1, false);  // -d rho, odd
            } else if (duc.type == 1 && duc.pos == j) {
              require(rho_dot_ != nullptr, ErrorCode::ResolutionError, "no derivative data");
              push(&rhodot_c_[a], 0, true);  // -du rhodot, even value
            } else {
              push(&comm_c_[a], 1, false);  // [D, rho(a)], odd
            }
          };
          for (int g = 0; g < left_count; ++g) {
            push_gap(0, g);
            push_letter(g);
          }
          push_gap(0, left_count);
          push(w.tilde0 < 0 ? &idm_ : &rho_m_[w.tilde0], 0, false);
          for (int g = 0; g < right_count; ++g) {
            push_gap(1, g);
            push_letter(left_count + g);
          }
          push_gap(1, right_count);
          if (want_du && du_index < 0) continue;  // du requested but not placed (empty choice)

          int sign = ((n1 + n2 + left_count) % 2 == 0 ? 1 : -1) * cotrace_sign;
          FormMatrix val = evaluate_factors(mats, parities, du_index);
          acc.add_form(tau(val), Scalar::flt(Cplx(sign, 0)));
        }
    }
    return acc;
  }

 private:
  FormMatrix comm_f(int letter) const { return d_m_ * rho_m_[letter] - rho_m_[letter] * d_m_; }
  FormMatrix middle(int tilde0) const { return tilde0 < 0 ? idm_ : rho_m_[tilde0]; }

  FormMatrix row_twist(const FormMatrix& m) const {
    FormMatrix r = m;
    for (int i = m.p(); i < m.n(); ++i)
      for (int j = 0; j < m.n(); ++j) r.at(i, j) = (-Scalar::one(Mode::Float)) * r.at(i, j);
    return r;
  }

  // duhamel over the ring; if du_index >= 0, move the du marker out to the
  // left (crossing sign from stripped parities) and integrate the stripped
  // factors.
  FormMatrix evaluate_factors(const std::vector<const FormMatrix*>& mats, const std::vector<int>& parities,
                              int du_index) const {
    int sign = 1;
    if (du_index >= 0)
      for (int j = 0; j < du_index; ++j)
        if (parities[j] % 2 == 1) sign = -sign;
    FormMatrix res;
    if (d2_zero_) {
      // exact collapse: volume of the simplex times the ordered product
      FormMatrix prod = idm_;
      for (const auto* m : mats) prod = prod * (*m);
      double vol = 1;
      for (size_t j = 1; j <= mats.size(); ++j) vol /= static_cast<double>(j);
      res = Scalar::flt(Cplx(vol, 0)) * prod;
    } else {
      std::vector<CMat> lows;
      lows.reserve(mats.size());
      for (const auto* m : mats) lows.push_back(lowered(m));
      CMat r = duhamel_integral(d2_low_, lows, 1.0);
      res = FormMatrix::from_lowered(&ring_, t_.p, t_.q, r, 1e-300);
    }
    if (sign < 0) res = Scalar::flt(-1.0) * res;
    return res;
  }

  NCForm tau(const FormMatrix& m) const {
    if (t_.parity == TripleParity::Even) return m.supertrace();
    NCForm s = ring_.zero();
    for (int k = 0; k < t_.p; ++k) s = s + m.at(t_.p + k, k);
    return Scalar::sqrt_2i(Mode::Float) * s;
  }

  BivariantTriple t_;
  FormRing ring_;
  const std::vector<BTildeMatrix>* rho_dot_;
  const BTildeMatrix* d_dot_;
  std::vector<FormMatrix> rho_m_;
  FormMatrix d_m_, d2_, idm_;
  std::vector<FormMatrix> comm_c_, drho_c_, rhodot_c_;
  FormMatrix dd_c_, ddot_c_;
  CMat d2_low_;
  bool d2_zero_ = false;
  mutable std::map<const FormMatrix*, CMat> low_cache_;
};

// chi(E, rho, D): the bivariant Chern character cochain as a map from
// chains over A to X(B).
inline XChainB chi_bivariant(const BivariantTriple& t, const NCForm& chain) {
  SuperconnectionCochain sc(t);
  return sc.eval_chain(chain, false);
}

// One-parameter family sampled through functors; dot entries are the exact
// u-derivatives of rho and D.
struct BivariantPath {
  std::function<BivariantTriple(double)> at;
  std::function<std::vector<BTildeMatrix>(double)> rho_dot;
  std::function<BTildeMatrix(double)> d_dot;
};

// midpoint-rule integral of the Chern-Simons transgression over the path
inline XChainB chern_simons(const BivariantPath& path, int grid_m, const NCForm& chain) {
  require(grid_m >= 2, ErrorCode::GridTooCoarse, "need at least two grid cells");
  XChainB acc;
  bool first = true;
  for (int j = 0; j < grid_m; ++j) {
    double u = (j + 0.5) / grid_m;
    BivariantTriple t = path.at(u);
    std::vector<BTildeMatrix> rd = path.rho_dot(u);
    BTildeMatrix dd = path.d_dot(u);
    SuperconnectionCochain sc(t, &rd, &dd);
    XChainB v = sc.eval_chain(chain, true);
    if (first) {
      acc = v;
      acc.even.assign(v.even.size(), Cplx(0, 0));
      acc.odd = Scalar::flt(0.0) * v.odd;
      first = false;
    }
    for (size_t k = 0; k < acc.even.size(); ++k) acc.even[k] += v.even[k] / static_cast<double>(grid_m);
    acc.odd.add_form(v.odd, Scalar::flt(Cplx(1.0 / grid_m, 0)));
  }
  acc.odd = one_form_quotient(path.at(0).b).reduce(acc.odd);
  return acc;
}

// --- algebra homomorphisms and functoriality --------------------------------

struct AlgebraHom {
  AlgebraPtr from, to;
  std::vector<AlgElem> images;  // per from-basis element
};

inline AlgebraHom make_hom(AlgebraPtr from, AlgebraPtr to, std::vector<AlgElem> images) {
  AlgebraHom h{std::move(from), std::move(to), std::move(images)};
  require(static_cast<int>(h.images.size()) == h.from->dim(), ErrorCode::DimensionMismatch,
          "one image per basis element");
  bool tr = false;
  for (int i = 0; i < h.from->dim(); ++i)
    for (int j = 0; j < h.from->dim(); ++j) {
      AlgElem expect = AlgElem::zero(h.to);
      for (const auto& t : h.from->product(i, j, tr)) expect = expect + (t.coeff * h.images[t.index]);
      require(h.images[i] * h.images[j] == expect, ErrorCode::NotHomomorphism, "phi is not a homomorphism");
    }
  return h;
}

// chain transport Omega(phi): a~0 d a1 ... -> phi(a~0) d phi(a1) ...
inline NCForm omega_map(const AlgebraHom& h, const NCForm& chain) {
  NCForm out(h.to, chain.trunc());
  for (const auto& [w, c] : chain.terms()) {
    std::vector<std::pair<FWord, Scalar>> acc = {{FWord{-2, {}}, c}};  // -2 marks unset tilde
    // tilde part
    std::vector<std::pair<FWord, Scalar>> next;
    if (w.tilde0 < 0) {
      acc[0].first.tilde0 = -1;
    } else {
      next.clear();
      for (const auto& [nw, nc] : acc)
        for (int k = 0; k < h.to->dim(); ++k)
          if (!h.images[w.tilde0].coeffs[k].is_zero())
            next.push_back({FWord{k, {}}, nc * h.images[w.tilde0].coeffs[k]});
      acc = next;
    }
    for (int l : w.letters) {
      next.clear();
      for (const auto& [nw, nc] : acc)
        for (int k = 0; k < h.to->dim(); ++k)
          if (!h.images[l].coeffs[k].is_zero()) {
            FWord ext = nw;
            ext.letters.push_back(k);
            next.push_back({ext, nc * h.images[l].coeffs[k]});
          }
      acc = next;
    }
    for (auto& [nw, nc] : acc) out.add(nw, nc);
  }
  return out;
}

// left product phi . (E, rho, D) = (E, rho . phi, D)
inline BivariantTriple left_compose(const AlgebraHom& h, const BivariantTriple& t) {
  require(h.to == t.a, ErrorCode::AlgebraMismatch, "hom target must be the triple's algebra");
  BivariantTriple r = t;
  r.a = h.from;
  r.rho.clear();
  int db = static_cast<int>(t.dop.comp.size()) - 1;
  for (int i = 0; i < h.from->dim(); ++i) {
    BTildeMatrix m = BTildeMatrix::zero(t.p + t.q, db);
    for (int k = 0; k < h.to->dim(); ++k) {
      Cplx c = h.images[i].coeffs[k].lower();
      if (c != Cplx(0, 0)) m = m + t.rho[k].scaled(c);
    }
    r.rho.push_back(m);
  }
  return r;
}

inline SpectralTriple left_compose(const AlgebraHom& h, const SpectralTriple& t) {
  require(h.to == t.a, ErrorCode::AlgebraMismatch, "hom target must be the triple's algebra");
  std::vector<CMat> rho;
  for (int i = 0; i < h.from->dim(); ++i) {
    CMat m = CMat::Zero(t.p + t.q, t.p + t.q);
    for (int k = 0; k < h.to->dim(); ++k) m += h.images[i].coeffs[k].lower() * t.rho[k];
    rho.push_back(m);
  }
  if (t.parity == TripleParity::Even) return make_even_triple(h.from, t.p, t.q, rho, t.D);
  std::vector<CMat> alpha;
  for (int i = 0; i < h.from->dim(); ++i) {
    CMat m = CMat::Zero(t.p, t.p);
    for (int k = 0; k < h.to->dim(); ++k) m += h.images[i].coeffs[k].lower() * t.alpha[k];
    alpha.push_back(m);
  }
  return make_odd_triple(h.from, alpha, t.Q);
}

}  // namespace ncx
