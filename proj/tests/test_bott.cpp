#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ncx/bott.hpp"

using namespace ncx;

namespace {

const Scalar kSymOne = Scalar::one(Mode::Symbolic);

Scalar sym_rat(long num, long den = 1) { return Scalar::sym_monomial({rat(num, den), rat(0)}, 0, 0); }

GaussianForm random_gaussian(int n, int deg, std::mt19937_64& rng, int max_terms = 3) {
  GaussianForm f(n);
  for (int t = 0; t < max_terms; ++t) {
    GaussianForm::Key k;
    k.alpha.assign(n, 0);
    for (int u = 0; u < n; ++u) k.alpha[u] = static_cast<int>(rng() % 3);
    k.g = static_cast<int>(rng() % 2);
    // random mask of the requested popcount
    std::vector<int> idx(n);
    for (int u = 0; u < n; ++u) idx[u] = u;
    for (int u = n - 1; u > 0; --u) std::swap(idx[u], idx[rng() % (u + 1)]);
    k.mask = 0;
    for (int u = 0; u < deg; ++u) k.mask |= 1u << idx[u];
    long c = static_cast<long>(rng() % 9) - 4;
    long ci = static_cast<long>(rng() % 5) - 2;
    f.add(k, Scalar::sym_monomial({rat(c), rat(ci)}, 0, static_cast<int>(rng() % 3) - 1));
  }
  return f;
}

}  // namespace

TEST_CASE("gaussian form calculus") {
  std::mt19937_64 rng(1);
  SECTION("d of the gaussian") {
    GaussianForm g = GaussianForm::gaussian(2);
    GaussianForm dg = deRham_d(g);
    GaussianForm expect(2);
    for (int u = 0; u < 2; ++u) {
      GaussianForm::Key k{std::vector<int>{0, 0}, 1, 1u << u};
      k.alpha[u] = 1;
      expect.add(k, Scalar::sym_monomial({rat(-2), rat(0)}, 0, 2));
    }
    REQUIRE(dg == expect);
  }
  SECTION("antisymmetry normal form: dx1 dx2 = -dx2 dx1") {
    GaussianForm a = wedge(GaussianForm::dx(2, 0), GaussianForm::dx(2, 1));
    GaussianForm b = wedge(GaussianForm::dx(2, 1), GaussianForm::dx(2, 0));
    REQUIRE(a == (-kSymOne) * b);
    REQUIRE(wedge(GaussianForm::dx(2, 0), GaussianForm::dx(2, 0)).is_zero());
  }
  SECTION("d^2 = 0 and graded commutativity, randomized") {
    for (int n = 1; n <= 3; ++n)
      for (int it = 0; it < 12; ++it) {
        int dx1 = static_cast<int>(rng() % (n + 1)), dx2 = static_cast<int>(rng() % (n + 1));
        GaussianForm x = random_gaussian(n, dx1, rng);
        GaussianForm y = random_gaussian(n, dx2, rng);
        REQUIRE(deRham_d(deRham_d(x)).is_zero());
        GaussianForm xy = wedge(x, y);
        GaussianForm yx = wedge(y, x);
        if (dx1 * dx2 % 2 == 1) yx = (-kSymOne) * yx;
        REQUIRE(xy == yx);
      }
  }
  SECTION("fedosov product is associative on random even triples") {
    for (int it = 0; it < 8; ++it) {
      int n = 3;
      GaussianForm x = random_gaussian(n, 2 * (rng() % 2), rng, 2);
      GaussianForm y = random_gaussian(n, 2 * (rng() % 2), rng, 2);
      GaussianForm z = random_gaussian(n, 0, rng, 2);
      REQUIRE(fedosov_T(fedosov_T(x, y), z) == fedosov_T(x, fedosov_T(y, z)));
    }
  }
  SECTION("integration basics") {
    // int e^{-lam x^2} dx_1...dx_n = (pi/lam)^{n/2}
    for (int n = 1; n <= 2; ++n) {
      GaussianForm top(n);
      GaussianForm::Key k{std::vector<int>(n, 0), 1, n == 1 ? 1u : 3u};
      top.add(k, kSymOne);
      Scalar v = integrate_top(top);
      REQUIRE(v == Scalar::sym_monomial({rat(1), rat(0)}, n, -n));
      // numeric quadrature oracle at lambda = 1
      double numeric = std::pow(M_PI, n / 2.0);
      REQUIRE(std::abs(v.lower(M_PI, 1.0) - Cplx(numeric, 0)) < 1e-8);
    }
    // odd integrand vanishes
    GaussianForm odd1(1);
    GaussianForm::Key k1{std::vector<int>{1}, 1, 1u};
    odd1.add(k1, kSymOne);
    REQUIRE(integrate_top(odd1).is_zero());
    // orientation: reordered top form picks up the sign
    GaussianForm f2 = wedge(GaussianForm::dx(2, 1), GaussianForm::dx(2, 0));
    GaussianForm damped = wedge(GaussianForm::gaussian(2), f2);
    REQUIRE(integrate_top(damped) == -Scalar::sym_monomial({rat(1), rat(0)}, 2, -2));
    // guards
    GaussianForm not_top = GaussianForm::gaussian(2);
    REQUIRE_THROWS_AS(integrate_top(not_top), Error);
    GaussianForm no_gauss(1);
    no_gauss.add(GaussianForm::Key{std::vector<int>{0}, 0, 1u}, kSymOne);
    REQUIRE_THROWS_AS(integrate_top(no_gauss), Error);
  }
  SECTION("Stokes: integral of an exact damped form vanishes, n = 1") {
    // symbolic integration-by-parts oracle: int d(x^a e^{-lam x^2}) = 0
    for (int a = 0; a <= 4; ++a) {
      GaussianForm f(1);
      f.add(GaussianForm::Key{std::vector<int>{a}, 1, 0}, kSymOne);
      REQUIRE(integrate_top(deRham_d(f)).is_zero());
    }
  }
}

TEST_CASE("bott chern character") {
  SECTION("n = 2 closed form: 4 i lam e^{-lam x^2} dx1 dx2") {
    BottChern ch = bott_chern(2, BottMethod::ClosedForm);
    GaussianForm expect(2);
    expect.add(GaussianForm::Key{std::vector<int>{0, 0}, 1, 3u},
               Scalar::sym_monomial({rat(0), rat(4)}, 0, 2));
    REQUIRE(ch.even == expect);
  }
  SECTION("n = 1 closed form: -(2 i lam)^{1/2} e^{-lam x^2} d x1") {
    BottChern ch = bott_chern(1, BottMethod::ClosedForm);
    REQUIRE(ch.odd.terms.size() == 1);
    GaussianForm expect(1);
    expect.add(GaussianForm::Key{std::vector<int>{0}, 1, 0},
               Scalar::sym_monomial({rat(-1), rat(-1)}, 0, 1));  // -(1+i) lam^{1/2}
    REQUIRE(ch.odd.terms[0].first == expect);
  }
  SECTION("the heat exponential collapses to the closed form, n = 1..4") {
    for (int n = 1; n <= 4; ++n) {
      BottChern closed = bott_chern(n, BottMethod::ClosedForm);
      BottChern fed = bott_chern(n, BottMethod::FedosovExp);
      if (n % 2 == 0) {
        REQUIRE(closed.even == fed.even);
      } else {
        REQUIRE(closed.odd.terms.size() == fed.odd.terms.size());
        // compare as reduced pair sums: both lists pair the same u with d x_j
        for (size_t j = 0; j < closed.odd.terms.size(); ++j) {
          REQUIRE(closed.odd.terms[j].second == fed.odd.terms[j].second);
          REQUIRE(closed.odd.terms[j].first == fed.odd.terms[j].first);
        }
      }
    }
  }
  SECTION("exp_o(-D^{o2}) equals the collapsed series e^{-D^2} sum (-)^k/k! (dD dD)^k") {
    for (int n = 1; n <= 3; ++n) {
      SpinorForm e = bott_heat_exponential(n);
      CliffordRep rep = clifford_rep(n);
      SpinorForm q = detail::dirac_Q(rep, n);
      SpinorForm d = q;
      int sp = rep.p, sq = rep.q;
      if (n % 2 == 1) {
        int k = rep.p + rep.q;
        sp = sq = k;
        d = SpinorForm(n, k, k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            d.at(i, k + j) = q.at(i, j);
            d.at(k + i, j) = q.at(i, j);
          }
      }
      SpinorForm dd = dmat(d);
      SpinorForm nil = (-kSymOne) * (dd * dd);
      SpinorForm collapsed(n, sp, sq);
      SpinorForm pw = SpinorForm::identity(n, sp, sq);
      for (int k2 = 0; k2 <= n; ++k2) {
        if (k2 > 0) {
          pw = pw * nil;
          pw = sym_rat(1, k2) * pw;
        }
        collapsed = collapsed + pw;
        if (pw.is_zero()) break;
      }
      // attach the gaussian factor
      SpinorForm expect(n, sp, sq);
      for (int i = 0; i < collapsed.dim(); ++i)
        for (int j = 0; j < collapsed.dim(); ++j)
          for (const auto& [key, c] : collapsed.at(i, j).terms()) {
            auto nk = key;
            nk.g += 1;
            expect.at(i, j).add(nk, c);
          }
      REQUIRE((e - expect).is_zero());
    }
  }
}

TEST_CASE("fundamental cocycle") {
  SECTION("n = 2 on e^{-lam x^2} dx1 dx2 gives 1/(4 i lam)") {
    GaussianForm f(2);
    f.add(GaussianForm::Key{std::vector<int>{0, 0}, 1, 3u}, kSymOne);
    Scalar v = fundamental_cocycle(2, f);
    // [1]!/(2! (2 pi i)) * (pi/lam) = 1/(4 i lam) = -i/(4 lam)
    REQUIRE(v == Scalar::sym_monomial({rat(0), rat(-1, 4)}, 0, -2));
  }
  SECTION("boundary annihilation: nat d of an even form pairs to zero") {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 6; ++it) {
      // x even (degree 0 here), nat d x = 1 d x: pair = int dx = 0 by Stokes
      GaussianForm x(1);
      x.add(GaussianForm::Key{std::vector<int>{static_cast<int>(rng() % 4)}, 1, 0}, kSymOne);
      XOddT ndx;
      ndx.terms.push_back({GaussianForm::one(1), x});
      REQUIRE(fundamental_cocycle(1, ndx).is_zero());
    }
  }
  SECTION("trace property on commutators in the odd bimodule") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 6; ++it) {
      int n = 1;  // top degree 1, so degree-0 u gives a top-degree integrand
      // x polynomial (undamped), u d v with gaussian u: [x, u d v] pairs to 0:
      // int (x o u) /\ dv == int (u d(v o x) - (u o v) d x)
      GaussianForm x = random_gaussian(n, 0, rng, 2);
      GaussianForm u = random_gaussian(n, 0, rng, 2);
      GaussianForm v = random_gaussian(n, 0, rng, 2);
      // remove gaussians from x and v, force one on u
      GaussianForm xs(n), us(n), vs(n);
      for (const auto& [k, c] : x.terms()) {
        auto nk = k;
        nk.g = 0;
        xs.add(nk, c);
      }
      for (const auto& [k, c] : u.terms()) {
        auto nk = k;
        nk.g = 1;
        us.add(nk, c);
      }
      for (const auto& [k, c] : v.terms()) {
        auto nk = k;
        nk.g = 0;
        vs.add(nk, c);
      }
      XOddT left;
      left.terms.push_back({fedosov_T(xs, us), vs});
      XOddT right;
      right.terms.push_back({us, fedosov_T(vs, xs)});
      right.terms.push_back({(-kSymOne) * fedosov_T(us, vs), xs});
      Scalar lv = fundamental_cocycle(n, left);
      Scalar rv = fundamental_cocycle(n, right);
      REQUIRE(lv == rv);
    }
  }
}

TEST_CASE("bott-dirac normalization") {
  SECTION("pairing is exactly 1 for n = 1, 2, 3, 4, both computation paths") {
    for (int n = 1; n <= 4; ++n) {
      REQUIRE(pair_bott_dirac(n, BottMethod::ClosedForm) == kSymOne);
      REQUIRE(pair_bott_dirac(n, BottMethod::FedosovExp) == kSymOne);
    }
  }
  SECTION("lambda independence under numeric lowering") {
    Scalar v = pair_bott_dirac(3, BottMethod::ClosedForm);
    REQUIRE(std::abs(v.lower(M_PI, 0.7) - Cplx(1, 0)) < 1e-14);
    REQUIRE(std::abs(v.lower(M_PI, 1.3) - Cplx(1, 0)) < 1e-14);
  }
}
