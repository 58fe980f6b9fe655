#pragma once

#include "ncx/gaussian.hpp"

namespace ncx {

// X-complex data over the Fedosov algebra T_n = (Omega^+(R^n), o): the even
// part is a gaussian form, the odd part a list of pairs u d v.
struct XOddT {
  std::vector<std::pair<GaussianForm, GaussianForm>> terms;  // sum of nat u d v
};

struct BottChern {
  TripleParity parity;
  GaussianForm even;  // n even
  XOddT odd;          // n odd
};

enum class BottMethod { ClosedForm, FedosovExp };

namespace detail {

inline Scalar exact_to_sym(const Scalar& s) { return s.to_symbolic(); }

// gamma matrices as spinor-form constants (symbolic scalars)
inline SpinorForm gamma_form(const CliffordRep& rep, int mu, int n) {
  SpinorForm m(n, rep.p, rep.q);
  for (int i = 0; i < rep.p + rep.q; ++i)
    for (int j = 0; j < rep.p + rep.q; ++j) {
      const Scalar& c = rep.gamma[mu].at(i, j);
      if (!c.is_zero()) m.at(i, j) = exact_to_sym(c) * GaussianForm::one(n);
    }
  return m;
}

// Q_lambda = sqrt(lam) x_mu gamma^mu by Clifford multiplication
inline SpinorForm dirac_Q(const CliffordRep& rep, int n) {
  SpinorForm q(n, rep.p, rep.q);
  Scalar sqrt_lam = Scalar::sym_monomial({rat(1), rat(0)}, 0, 1);
  for (int mu = 0; mu < n; ++mu) {
    SpinorForm g = gamma_form(rep, mu, n);
    SpinorForm xg = (sqrt_lam)*g;
    for (int i = 0; i < q.dim(); ++i)
      for (int j = 0; j < q.dim(); ++j)
        q.at(i, j) = q.at(i, j) + wedge(GaussianForm::coordinate(n, mu), xg.at(i, j));
  }
  return q;
}

// lam x^2 Id
inline SpinorForm lam_x2_id(int n, int p, int q) {
  SpinorForm m(n, p, q);
  GaussianForm x2(n);
  for (int u = 0; u < n; ++u) {
    GaussianForm::Key k{std::vector<int>(n, 0), 0, 0};
    k.alpha[u] = 2;
    x2.add(k, Scalar::sym_monomial({rat(1), rat(0)}, 0, 2));
  }
  for (int i = 0; i < p + q; ++i) m.at(i, i) = x2;
  return m;
}

inline Scalar two_i_pow(int k) {  // (2i)^k by exact multiplication
  ExactGaussian v{rat(1), rat(0)};
  for (int j = 0; j < k; ++j) v = v * ExactGaussian{rat(0), rat(2)};
  return Scalar::sym_monomial(v, 0, 0);
}

// (2 i lam)^{n/2} with sqrt(2i) = 1 + i for odd n
inline Scalar two_i_lam_pow_half(int n) {
  if (n % 2 == 0) {
    Scalar s = two_i_pow(n / 2);
    return s * Scalar::sym_monomial({rat(1), rat(0)}, 0, n);
  }
  Scalar s = two_i_pow(n / 2) * Scalar::sqrt_2i(Mode::Symbolic);
  return s * Scalar::sym_monomial({rat(1), rat(0)}, 0, n);
}

// (2 pi i)^{n/2} as a single symbolic monomial
inline Scalar two_pi_i_pow_half(int n) {
  if (n % 2 == 0) {
    Scalar s = two_i_pow(n / 2);
    return s * Scalar::sym_monomial({rat(1), rat(0)}, n, 0);
  }
  Scalar s = two_i_pow(n / 2) * Scalar::sqrt_2i(Mode::Symbolic);
  return s * Scalar::sym_monomial({rat(1), rat(0)}, n, 0);
}

inline GaussianForm top_form(int n, const Scalar& coeff, int rotate /*cyclic start, 0 = sorted*/) {
  // e^{-lam x^2} dx_{rotate+1} ... dx_{rotate-1} (sorted normal form + sign)
  // the cyclic rotation of k slots out of n-1 remaining... handled by caller
  GaussianForm f(n);
  GaussianForm::Key k{std::vector<int>(n, 0), 1, 0};
  for (int u = 0; u < n; ++u)
    if (u != rotate || rotate < 0) k.mask |= 1u << u;
  if (rotate < 0) k.mask = (n >= 32 ? ~0u : ((1u << n) - 1));
  f.add(k, coeff);
  return f;
}

}  // namespace detail

// The Fedosov exponential route: exp_o(-D^{o2}) computed from the Clifford
// representation, the Bott Dirac operator and the literal Duhamel series.
inline SpinorForm bott_heat_exponential(int n) {
  CliffordRep rep = clifford_rep(n);
  SpinorForm q = detail::dirac_Q(rep, n);
  SpinorForm d;
  int sp, sq;
  if (n % 2 == 0) {
    d = q;  // D = Q_lambda, gammas odd
    sp = rep.p;
    sq = rep.q;
  } else {
    // doubled picture D = eps Q on S_n + S_n eps
    int k = rep.p + rep.q;
    sp = sq = k;
    d = SpinorForm(n, k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        d.at(i, k + j) = q.at(i, j);
        d.at(k + i, j) = q.at(i, j);
      }
  }
  // H = -D^{o2} = -(D D + dD dD); the degree-0 part is -lam x^2 Id
  SpinorForm dd = dmat(d);
  SpinorForm h_nil_neg = d * d - detail::lam_x2_id(n, sp, sq);  // should vanish
  require(h_nil_neg.is_zero(), ErrorCode::DimensionMismatch, "D^2 != lam x^2 in the Bott picture");
  SpinorForm nil = (-Scalar::one(Mode::Symbolic)) * (dd * dd);
  // dH for H = -lam x^2 + nil
  SpinorForm h = ((-Scalar::one(Mode::Symbolic)) * detail::lam_x2_id(n, sp, sq)) + nil;
  SpinorForm dh = dmat(h);
  return fedosov_exp_gaussian(nil, dh);
}

// ch(beta_n) in the requested computation path.
inline BottChern bott_chern(int n, BottMethod method) {
  require(n >= 1 && n <= 4, ErrorCode::DimensionMismatch, "bott_chern supports 1 <= n <= 4");
  BottChern out;
  out.parity = n % 2 == 0 ? TripleParity::Even : TripleParity::Odd;
  if (method == BottMethod::ClosedForm) {
    if (n % 2 == 0) {
      // n!/(n/2)! (2 i lam)^{n/2} e^{-lam x^2} dx_1...dx_n
      Scalar coeff = Scalar::sym_monomial({factorial(n) / factorial(n / 2), rat(0)}, 0, 0) *
                     detail::two_i_lam_pow_half(n);
      out.even = detail::top_form(n, coeff, -1);
    } else {
      int k = n / 2;
      Scalar coeff = Scalar::sym_monomial({-factorial(2 * k) / factorial(k), rat(0)}, 0, 0) *
                     detail::two_i_lam_pow_half(n);
      for (int j = 0; j < n; ++j) {
        // e^{-lam x^2} dx_{j+2} ... dx_{j} (cyclic, j-th coordinate removed),
        // normalized to sorted order: the cyclic order (j+1, ..., n, 1, ..., j-1)
        // differs from sorted by a rotation of the remaining n-1 indices
        int rot_sign = 1;
        // moving the block (j+1..n-1) of size n-1-j past (0..j-1) of size j:
        // permutation sign (-1)^{j (n-1-j)}
        if ((static_cast<long>(j) * (n - 1 - j)) % 2 == 1) rot_sign = -1;
        GaussianForm u = detail::top_form(n, rot_sign > 0 ? coeff : -coeff, j);
        out.odd.terms.push_back({u, GaussianForm::coordinate(n, j)});
      }
    }
    return out;
  }
  // Fedosov exponential route
  SpinorForm e = bott_heat_exponential(n);
  if (n % 2 == 0) {
    out.even = e.supertrace();
  } else {
    // ch = nat tau(E dD) = -sqrt(2i) sum_nu sqrt(lam) tr(E0 gamma^nu) d x_nu
    CliffordRep rep = clifford_rep(n);
    int k = rep.p + rep.q;
    // E is block diagonal in the doubled picture; its K-block E0 sits top-left
    Scalar pref = -Scalar::sqrt_2i(Mode::Symbolic) * Scalar::sym_monomial({rat(1), rat(0)}, 0, 1);
    for (int nu = 0; nu < n; ++nu) {
      SpinorForm g = detail::gamma_form(rep, nu, n);
      GaussianForm tr(n);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          if (e.at(i, j).is_zero() || g.at(j, i).is_zero()) continue;
          tr.add_form(wedge(e.at(i, j), g.at(j, i)), Scalar::one(Mode::Symbolic));
        }
      out.odd.terms.push_back({pref * tr, GaussianForm::coordinate(n, nu)});
    }
  }
  return out;
}

// The fundamental-class cocycle on X(T_n):
//   even chains:  (-)^n [n/2]!/(n! (2 pi i)^{n/2}) int x
//   odd chains:   the same coefficient on sum int u /\ dv
inline Scalar fundamental_cocycle(int n, const GaussianForm& even_chain) {
  Scalar coeff = Scalar::sym_monomial({factorial(n / 2) / factorial(n), rat(0)}, 0, 0) /
                 detail::two_pi_i_pow_half(n);
  if (n % 2 == 1) coeff = -coeff;
  return coeff * integrate_top(even_chain);
}

inline Scalar fundamental_cocycle(int n, const XOddT& odd_chain) {
  Scalar coeff = Scalar::sym_monomial({factorial(n / 2) / factorial(n), rat(0)}, 0, 0) /
                 detail::two_pi_i_pow_half(n);
  if (n % 2 == 1) coeff = -coeff;
  Scalar acc = Scalar::zero(Mode::Symbolic);
  for (const auto& [u, v] : odd_chain.terms) acc += integrate_top(wedge(u, deRham_d(v)));
  return coeff * acc;
}

// <ch(beta_n), ch(Dirac)> via the retracted fundamental-class cocycle;
// exactly 1 in the symbolic field, independent of lambda.
inline Scalar pair_bott_dirac(int n, BottMethod method = BottMethod::ClosedForm) {
  BottChern ch = bott_chern(n, method);
  if (n % 2 == 0) return fundamental_cocycle(n, ch.even);
  return fundamental_cocycle(n, ch.odd);
}

}  // namespace ncx
