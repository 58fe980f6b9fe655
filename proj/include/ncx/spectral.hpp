#pragma once

#include <functional>
#include <vector>

#include "ncx/formring.hpp"
#include "ncx/graded_matrix.hpp"
#include "ncx/matfun.hpp"
#include "ncx/ncform.hpp"

namespace ncx {

// --- Clifford algebra representations --------------------------------------

// Gamma matrices for C_n, n <= 4, with exact Q(i) entries. Even n: the
// spinor space is graded with diagonal grading operator (-i)^k g1...gn and
// odd hermitian generators; odd n: trivially graded.
struct CliffordRep {
  int n = 0;
  int p = 0, q = 0;  // spinor space grading
  std::vector<GradedMatrix> gamma;

  GradedMatrix product(const std::vector<int>& idx) const {
    GradedMatrix m = GradedMatrix::identity(p, q);
    for (int i : idx) m = m * gamma[i];
    return m;
  }
};

inline CliffordRep clifford_rep(int n) {
  require(n >= 1 && n <= 4, ErrorCode::DimensionMismatch, "clifford_rep supports 1 <= n <= 4");
  const Scalar one = Scalar::one(Mode::Exact);
  const Scalar i_unit = Scalar::exact(rat(0), rat(1));
  auto sigma = [&](int k, int pp, int qq) {
    GradedMatrix m(pp, qq);
    if (k == 1) {
      m.at(0, 1) = one;
      m.at(1, 0) = one;
    } else if (k == 2) {
      m.at(0, 1) = -i_unit;
      m.at(1, 0) = i_unit;
    } else {
      m.at(0, 0) = one;
      m.at(1, 1) = -one;
    }
    return m;
  };
  CliffordRep rep;
  rep.n = n;
  if (n == 1) {
    rep.p = 1;
    rep.q = 0;
    GradedMatrix g(1, 0);
    g.at(0, 0) = one;
    rep.gamma = {g};
  } else if (n == 2) {
    rep.p = rep.q = 1;
    rep.gamma = {sigma(1, 1, 1), sigma(2, 1, 1)};
  } else if (n == 3) {
    rep.p = 2;
    rep.q = 0;
    rep.gamma = {sigma(1, 2, 0), sigma(2, 2, 0), sigma(3, 2, 0)};
  } else {
    // gamma_mu = s1 (x) s_mu for mu = 1..3, gamma_4 = s2 (x) 1; grading s3 (x) 1
    rep.p = rep.q = 2;
    auto kron = [&](const GradedMatrix& x, const GradedMatrix& y) {
      // 4x4 with grading (rows 0,1 even; 2,3 odd) in the s3(x)1-diagonal basis:
      // basis order (e0 (x) f0, e0 (x) f1, e1 (x) f0, e1 (x) f1) happens to put
      // the grading diag(1,1,-1,-1) already.
      GradedMatrix m(2, 2);
      for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
          for (int i2 = 0; i2 < 2; ++i2)
            for (int j2 = 0; j2 < 2; ++j2) m.at(i1 * 2 + i2, j1 * 2 + j2) = x.at(i1, j1) * y.at(i2, j2);
      return m;
    };
    GradedMatrix one2 = GradedMatrix::identity(2, 0);
    rep.gamma = {kron(sigma(1, 1, 1), sigma(1, 2, 0)), kron(sigma(1, 1, 1), sigma(2, 2, 0)),
                 kron(sigma(1, 1, 1), sigma(3, 2, 0)), kron(sigma(2, 1, 1), one2)};
  }
  // verify the anticommutation relations exactly
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      GradedMatrix s = rep.gamma[i] * rep.gamma[j] + rep.gamma[j] * rep.gamma[i];
      GradedMatrix expect(rep.p, rep.q);
      if (i == j) expect = Scalar::exact_int(2) * GradedMatrix::identity(rep.p, rep.q);
      require(s == expect, ErrorCode::DimensionMismatch, "clifford anticommutation failed");
    }
  return rep;
}

// --- spectral triples over scalar coefficients -----------------------------

enum class TripleParity { Even, Odd };

// Matrix-scale family member: H = C^{p|q}, rho a homomorphism into even
// endomorphisms, D odd. In the odd case the C_1 factorization (K, alpha, Q)
// is stored and the doubled matrices are derived from it.
struct SpectralTriple {
  AlgebraPtr a;
  TripleParity parity = TripleParity::Even;
  int p = 0, q = 0;
  std::vector<CMat> rho;  // one (p+q)x(p+q) matrix per basis element of A
  CMat D;
  // odd-case factorization
  std::vector<CMat> alpha;
  CMat Q;
};

namespace detail {

inline bool is_even_block(const CMat& m, int p, double tol = 1e-12) {
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j)
      if (((i < p) != (j < p)) && std::abs(m(i, j)) > tol) return false;
  return true;
}
inline bool is_odd_block(const CMat& m, int p, double tol = 1e-12) {
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j)
      if (((i < p) == (j < p)) && std::abs(m(i, j)) > tol) return false;
  return true;
}

inline void check_homomorphism(const AlgebraPtr& a, const std::vector<CMat>& rho, double tol = 1e-10) {
  bool tr = false;
  for (int i = 0; i < a->dim(); ++i)
    for (int j = 0; j < a->dim(); ++j) {
      CMat expect = CMat::Zero(rho[0].rows(), rho[0].cols());
      for (const auto& t : a->product(i, j, tr)) expect += t.coeff.lower() * rho[t.index];
      require((rho[i] * rho[j] - expect).norm() <= tol * (1 + expect.norm()), ErrorCode::NotHomomorphism,
              "rho is not an algebra homomorphism");
    }
}

}  // namespace detail

inline SpectralTriple make_even_triple(AlgebraPtr a, int p, int q, std::vector<CMat> rho, CMat d) {
  SpectralTriple t;
  t.a = std::move(a);
  t.parity = TripleParity::Even;
  t.p = p;
  t.q = q;
  require(static_cast<int>(rho.size()) == t.a->dim(), ErrorCode::DimensionMismatch, "one matrix per basis");
  for (const auto& m : rho) {
    require(m.rows() == p + q && m.cols() == p + q, ErrorCode::DimensionMismatch, "rho shape");
    require(detail::is_even_block(m, p), ErrorCode::ParityMismatch, "rho(a) must be even");
  }
  require(d.rows() == p + q && d.cols() == p + q, ErrorCode::DimensionMismatch, "D shape");
  require(detail::is_odd_block(d, p), ErrorCode::ParityMismatch, "D must be odd");
  detail::check_homomorphism(t.a, rho);
  t.rho = std::move(rho);
  t.D = std::move(d);
  return t;
}

inline SpectralTriple make_odd_triple(AlgebraPtr a, std::vector<CMat> alpha, CMat q_op) {
  SpectralTriple t;
  t.a = std::move(a);
  t.parity = TripleParity::Odd;
  int k = static_cast<int>(q_op.rows());
  t.p = t.q = k;
  require(q_op.cols() == k, ErrorCode::NotSquare, "Q must be square");
  detail::check_homomorphism(t.a, alpha);
  t.alpha = alpha;
  t.Q = q_op;
  t.rho.clear();
  for (const auto& al : alpha) {
    CMat m = CMat::Zero(2 * k, 2 * k);
    m.block(0, 0, k, k) = al;
    m.block(k, k, k, k) = al;
    t.rho.push_back(m);
  }
  t.D = CMat::Zero(2 * k, 2 * k);
  t.D.block(0, k, k, k) = q_op;
  t.D.block(k, 0, k, k) = q_op;
  return t;
}

// heat time scaling: D -> sqrt(t) D
inline SpectralTriple scale_time(const SpectralTriple& t, double time) {
  require(time >= 0, ErrorCode::NegativeTime, "time must be nonnegative");
  SpectralTriple r = t;
  r.D = std::sqrt(time) * t.D;
  if (t.parity == TripleParity::Odd) r.Q = std::sqrt(time) * t.Q;
  return r;
}

inline CMat rho_of_word_coeff(const SpectralTriple& t, int tilde0) {
  if (tilde0 < 0) return CMat::Identity(t.p + t.q, t.p + t.q);
  return t.rho[tilde0];
}

inline Cplx supertrace_c(const CMat& m, int p) {
  Cplx s = 0;
  for (long i = 0; i < m.rows(); ++i) s += (i < p ? m(i, i) : -m(i, i));
  return s;
}

// JLO cocycle, even case:
//   chain a0 da1 ... da2n  |->  int_{Delta_2n} Tr_s(rho(a0) e^{-s0 D^2} [D, rho(a1)] ... e^{-s2n D^2}).
inline Cplx jlo_even(const SpectralTriple& t, const NCForm& chain) {
  require(t.parity == TripleParity::Even, ErrorCode::ParityMismatch, "jlo_even needs an even triple");
  CMat d2 = t.D * t.D;
  Cplx acc = 0;
  for (const auto& [w, c] : chain.terms()) {
    require(w.degree() % 2 == 0, ErrorCode::ParityMismatch, "even cocycle on odd chain");
    std::vector<CMat> factors;
    for (int l : w.letters) factors.push_back(t.D * t.rho[l] - t.rho[l] * t.D);
    CMat val = rho_of_word_coeff(t, w.tilde0) * duhamel_integral(d2, factors, 1.0);
    acc += c.lower() * supertrace_c(val, t.p);
  }
  return acc;
}

// JLO cocycle, odd case, with the -sqrt(2i) normalization:
//   -sqrt(2i) int Tr(alpha(a0) e^{-s0 Q^2} [Q, alpha(a1)] ... e^{-s_{2n+1} Q^2}).
inline Cplx jlo_odd(const SpectralTriple& t, const NCForm& chain) {
  require(t.parity == TripleParity::Odd, ErrorCode::ParityMismatch, "jlo_odd needs an odd triple");
  CMat q2 = t.Q * t.Q;
  Cplx acc = 0;
  for (const auto& [w, c] : chain.terms()) {
    require(w.degree() % 2 == 1, ErrorCode::ParityMismatch, "odd cocycle on even chain");
    std::vector<CMat> factors;
    for (int l : w.letters) factors.push_back(t.Q * t.alpha[l] - t.alpha[l] * t.Q);
    CMat a0 = w.tilde0 < 0 ? CMat::Identity(t.p, t.p) : t.alpha[w.tilde0];
    CMat val = a0 * duhamel_integral(q2, factors, 1.0);
    acc += c.lower() * val.trace();
  }
  return -Scalar::sqrt_2i(Mode::Float).as_float() * acc;
}

inline Cplx jlo(const SpectralTriple& t, const NCForm& chain) {
  return t.parity == TripleParity::Even ? jlo_even(t, chain) : jlo_odd(t, chain);
}

// conjugation by an even invertible u: rho -> u rho u^{-1}, D -> u D u^{-1}
inline SpectralTriple conjugate(const SpectralTriple& t, const CMat& u) {
  SpectralTriple r = t;
  CMat uinv = u.inverse();
  for (auto& m : r.rho) m = u * m * uinv;
  r.D = u * t.D * uinv;
  if (t.parity == TripleParity::Odd) {
    CMat uk = u.block(0, 0, t.p, t.p);
    CMat ukinv = uk.inverse();
    for (auto& m : r.alpha) m = uk * m * ukinv;
    r.Q = uk * t.Q * ukinv;
  }
  return r;
}

// --- the Chern character of an idempotent ----------------------------------

enum class ChPicture { XComplex, BB };

// ch(e) for an idempotent matrix e over A~, given as a FormMatrix over an
// exact form ring of A (entries of degree 0). X-picture coefficients
// (2n)!/(n!)^2; bB picture (-)^n (2n)!/n!.
inline NCForm ch_idempotent(const FormMatrix& e, int n_trunc, ChPicture picture) {
  const FormRing* ring = e.ring();
  require(ring->cap() >= n_trunc, ErrorCode::TruncationOverflow, "ring cap below requested truncation");
  FormMatrix e2 = e * e;
  require((e2 - e).is_zero(), ErrorCode::NotIdempotent, "e^2 != e");
  Mode m = ring->mode();
  FormMatrix de = dmat(e);
  FormMatrix dede = de * de;
  // (e - 1/2)
  Scalar half = m == Mode::Exact ? Scalar::exact(rat(1, 2)) : Scalar::flt(0.5);
  FormMatrix eh = e - half * FormMatrix::identity(ring, e.p(), e.q());
  NCForm out = e.supertrace();
  FormMatrix pw = FormMatrix::identity(ring, e.p(), e.q());
  for (int n = 1; 2 * n <= n_trunc; ++n) {
    pw = pw * dede;
    Rat coeff = picture == ChPicture::XComplex ? binomial_2n_n(n) : factorial(2 * n) / factorial(n);
    if (picture == ChPicture::BB && n % 2 == 1) coeff = -coeff;
    Scalar cs = m == Mode::Exact ? Scalar::exact(coeff) : Scalar::flt(coeff.get_d());
    out = out + cs * (eh * pw).supertrace();
  }
  return out;
}

// --- index pairing ----------------------------------------------------------

// Amplified idempotent rho_N(e) on C^N (x) H, reordered to (even | odd)
// blocks, as a complex matrix together with the amplified D.
struct AmplifiedPair {
  CMat e;  // idempotent, even
  CMat d;  // odd
  int p = 0, q = 0;
};

inline AmplifiedPair amplify(const FormMatrix& e, const SpectralTriple& t) {
  const FormRing* ring = e.ring();
  require(ring->exact_base() == t.a || ring->base() == t.a, ErrorCode::AlgebraMismatch,
          "idempotent and triple algebras differ");
  int n = e.n();
  int h = t.p + t.q;
  // index map: (i, v) with v in H -> reorder so even H-components of all N
  // copies come first
  int bigp = n * t.p, bigq = n * t.q;
  auto pos = [&](int i, int v) { return v < t.p ? i * t.p + v : bigp + i * t.q + (v - t.p); };
  CMat ebig = CMat::Zero(n * h, n * h), dbig = CMat::Zero(n * h, n * h);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CMat block = CMat::Zero(h, h);
      for (const auto& [w, c] : e.at(i, j).terms()) {
        require(w.degree() == 0, ErrorCode::ParityMismatch, "idempotent entries must have degree 0");
        block += c.lower() * rho_of_word_coeff(t, w.tilde0);
      }
      for (int v = 0; v < h; ++v)
        for (int u = 0; u < h; ++u)
          if (block(v, u) != Cplx(0, 0)) ebig(pos(i, v), pos(j, u)) = block(v, u);
    }
  for (int i = 0; i < n; ++i)
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < h; ++u)
        if (t.D(v, u) != Cplx(0, 0)) dbig(pos(i, v), pos(i, u)) = t.D(v, u);
  return {ebig, dbig, bigp, bigq};
}

// Bounded flattening perturbation: D_1 = D + (e[D,e] - [D,e]e) with
// [D,e] = De - eD equals eDe + (1-e)D(1-e) and commutes with e. (The
// orientation of the commutator matters; the other sign doubles [D,e].)
inline CMat flatten_dirac(const CMat& d, const CMat& e) {
  CMat comm = d * e - e * d;
  return d + e * comm - comm * e;
}

// Index pairing <ch(e), JLO(T)> at heat time `time`: flatten D along the
// bounded-perturbation path and evaluate the McKean-Singer term; the series
// terms with n >= 1 vanish after flattening (the residual is reported).
struct PairingResult {
  Cplx value;
  double series_residual;  // |n = 1 term| after flattening
};

inline PairingResult index_pairing(const FormMatrix& e, const SpectralTriple& t, double time) {
  require(t.parity == TripleParity::Even, ErrorCode::ParityMismatch, "index pairing needs an even triple");
  AmplifiedPair amp = amplify(e, t);
  require((amp.e * amp.e - amp.e).norm() < 1e-9, ErrorCode::NotIdempotent, "amplified e is not idempotent");
  CMat d1 = flatten_dirac(amp.d, amp.e);
  CMat d2 = time * (d1 * d1);
  CMat heat = CMat((-d2).exp());
  Cplx value = supertrace_c(amp.e * heat, amp.p);
  // n = 1 term of the bB-series: -2 int Tr_s((e - 1/2) [D,e][D,e] ...)
  CMat comm = std::sqrt(time) * (d1 * amp.e - amp.e * d1);
  CMat ehalf = amp.e - 0.5 * CMat::Identity(amp.e.rows(), amp.e.cols());
  CMat term1 = ehalf * duhamel_integral(d2, {comm, comm}, 1.0);
  double residual = std::abs(-2.0 * supertrace_c(term1, amp.p));
  return {value, residual};
}

// Exact Fredholm index dim ker(e D+ e) - dim ker(e D- e) by exact rank
// computation over the scalar field.
inline int fredholm_index(const GradedMatrix& e, const GradedMatrix& d) {
  require(e.p() == d.p() && e.q() == d.q(), ErrorCode::DimensionMismatch, "shape mismatch");
  int p = e.p(), q = e.q();
  auto sub = [&](const GradedMatrix& m, bool rows_even, bool cols_even) {
    std::vector<std::vector<Scalar>> rows;
    int r0 = rows_even ? 0 : p, r1 = rows_even ? p : p + q;
    int c0 = cols_even ? 0 : p, c1 = cols_even ? p : p + q;
    for (int i = r0; i < r1; ++i) {
      std::vector<Scalar> row;
      for (int j = c0; j < c1; ++j) row.push_back(m.at(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  GradedMatrix ede = e * d * e;
  int rank_epp = exact_rank(sub(e, true, true));
  int rank_eqq = exact_rank(sub(e, false, false));
  int rank_plus = exact_rank(sub(ede, false, true));   // e D+ e : e H+ -> e H-
  int rank_minus = exact_rank(sub(ede, true, false));  // e D- e : e H- -> e H+
  int ker_plus = rank_epp - rank_plus;
  int ker_minus = rank_eqq - rank_minus;
  return ker_plus - ker_minus;
}

}  // namespace ncx
