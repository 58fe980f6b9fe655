#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "ncx/tensor.hpp"

using namespace ncx;
using ncx::testutil::random_form;

namespace {

const Scalar kOne = Scalar::one(Mode::Exact);

NCForm word_form(const BasisAlgebraPtr& a, int trunc, int t0, std::vector<int> letters) {
  return NCForm::word(a, trunc, FWord{t0, std::move(letters)}, kOne);
}

NCForm random_even(const BasisAlgebraPtr& alg, int trunc, int maxdeg, std::mt19937_64& rng) {
  NCForm f(alg, trunc);
  for (int d = 0; d <= maxdeg; d += 2) f.add_form(random_form(alg, trunc, d, 2, rng), kOne);
  return f;
}

}  // namespace

TEST_CASE("fedosov product") {
  SECTION("e o e = e - de de in TC") {
    auto c = algebra_C();
    NCForm e = NCForm::basis_elem(c, 6, 0);
    NCForm lhs = fedosov_product(e, e);
    NCForm expect = e - word_form(c, 6, -1, {0, 0});
    REQUIRE(lhs == expect);
  }
  SECTION("the unit word is neutral") {
    auto m2 = algebra_Mn(2);
    std::mt19937_64 rng(1);
    NCForm x = random_even(m2, 6, 4, rng);
    REQUIRE(fedosov_product(NCForm::unit_word(m2, 6), x) == x);
    REQUIRE(fedosov_product(x, NCForm::unit_word(m2, 6)) == x);
  }
  SECTION("(a da da) o (a da da) by Leibniz expansion oracle, a in M2") {
    auto m2 = algebra_Mn(2);
    for (int a = 0; a < 4; ++a) {
      NCForm x = word_form(m2, 8, a, {a, a});
      NCForm oracle = form_product(x, x) - form_product(differential_d(x), differential_d(x));
      REQUIRE(fedosov_product(x, x) == oracle);
    }
  }
  SECTION("associativity, exhaustive over C1 words of degree <= 4 at N = 6") {
    auto c1 = algebra_C1();
    std::vector<FWord> words;
    for (int deg = 0; deg <= 4; deg += 2) {
      int count = 3;
      for (int i = 0; i < deg; ++i) count *= 2;
      for (int idx = 0; idx < count; ++idx) {
        int rest = idx;
        FWord w;
        w.tilde0 = rest % 3 - 1;
        rest /= 3;
        for (int i = 0; i < deg; ++i) {
          w.letters.push_back(rest % 2);
          rest /= 2;
        }
        if (deg == 0 && w.tilde0 < 0) continue;
        words.push_back(std::move(w));
      }
    }
    for (const auto& wx : words)
      for (const auto& wy : words)
        for (const auto& wz : words) {
          if (wx.degree() + wy.degree() + wz.degree() > 4) continue;
          NCForm x = NCForm::word(c1, 6, wx, kOne);
          NCForm y = NCForm::word(c1, 6, wy, kOne);
          NCForm z = NCForm::word(c1, 6, wz, kOne);
          NCForm lhs = fedosov_product(fedosov_product(x, y), z);
          NCForm rhs = fedosov_product(x, fedosov_product(y, z));
          REQUIRE(lhs == rhs);
          REQUIRE(!lhs.truncated());
        }
  }
  SECTION("odd forms are rejected") {
    auto m2 = algebra_Mn(2);
    REQUIRE_THROWS_AS(fedosov_product(word_form(m2, 4, 0, {1}), word_form(m2, 4, 0, {})), Error);
  }
}

TEST_CASE("mult map") {
  auto c = algebra_C();
  SECTION("e_hat maps to e") {
    NCForm eh = idempotent_e_hat(8);
    REQUIRE(mult_map(eh, c) == AlgElem::basis(c, 0));
  }
  SECTION("degree-2 words map to zero") {
    auto m2 = algebra_Mn(2);
    REQUIRE(mult_map(word_form(m2, 4, 0, {1, 2}), m2).is_zero());
  }
  SECTION("m(x o y) = m(x) m(y) on random pairs") {
    auto m2 = algebra_Mn(2);
    std::mt19937_64 rng(4);
    for (int it = 0; it < 25; ++it) {
      NCForm x = random_even(m2, 6, 2, rng);
      NCForm y = random_even(m2, 6, 2, rng);
      REQUIRE(mult_map(fedosov_product(x, y), m2) == mult_map(x, m2) * mult_map(y, m2));
    }
  }
}

TEST_CASE("tensor word view") {
  auto m2 = algebra_Mn(2);
  SECTION("round trip on random words of degree <= 4") {
    for (int deg = 0; deg <= 4; deg += 2) {
      std::mt19937_64 rng(deg + 1);
      for (int it = 0; it < 30; ++it) {
        FWord w = ncx::testutil::random_word(m2, deg, rng);
        if (deg == 0 && w.tilde0 < 0) continue;
        auto tws = to_tensor_words(m2, w, kOne);
        NCForm back(m2, 6);
        for (const auto& t : tws) back.add_form(from_tensor_word(m2, 6, t.letters, t.coeff), kOne);
        REQUIRE(back == NCForm::word(m2, 6, w, kOne));
      }
    }
  }
  SECTION("a tensor word of two letters is b1 o b2") {
    NCForm f = from_tensor_word(m2, 6, {1, 2}, kOne);
    NCForm expect = NCForm(m2, 6);
    expect.add(FWord{0, {}}, kOne);  // E12 E21 = E11
    expect.add(FWord{-1, {1, 2}}, -kOne);
    REQUIRE(f == expect);
  }
}

TEST_CASE("X(TA) boundaries on Omega A") {
  auto m2 = algebra_Mn(2);
  SECTION("nat d (a) = da in degree 0") {
    NCForm a = NCForm::basis_elem(m2, 6, 2);
    REQUIRE(x_boundary_d(a) == differential_d(a));
  }
  SECTION("bbar(a0 da1) composes b and d per the quoted formula") {
    for (int a0 = 0; a0 < 4; ++a0)
      for (int a1 = 0; a1 < 4; ++a1) {
        NCForm f = word_form(m2, 6, a0, {a1});
        NCForm dform = differential_d(f);
        NCForm oracle = hochschild_b(f) - dform - karoubi_kappa(dform);
        REQUIRE(x_boundary_b(f) == oracle);
      }
  }
  SECTION("boundaries square to zero both ways on truncation-safe inputs") {
    std::mt19937_64 rng(6);
    for (int it = 0; it < 10; ++it) {
      NCForm x = random_form(m2, 8, 2, 3, rng);
      REQUIRE(x_boundary_b(x_boundary_d(x)).is_zero());
      NCForm xi = random_form(m2, 8, 3, 3, rng);
      REQUIRE(x_boundary_d(x_boundary_b(xi)).is_zero());
    }
  }
  SECTION("overflow policy") {
    NCForm top = word_form(m2, 2, 0, {1, 2});
    REQUIRE_THROWS_AS(x_boundary_d(top), Error);
    NCForm dropped = x_boundary_d(top, OverflowPolicy::Drop);
    REQUIRE(dropped.truncated());
  }
}

TEST_CASE("rescale conjugation matches the Cuntz-Quillen boundaries on P-projected forms") {
  auto c1 = algebra_C1();
  std::mt19937_64 rng(7);
  for (int deg = 0; deg <= 4; ++deg) {
    NCForm f = random_form(c1, 8, deg, 3, rng);
    NCForm pf = spectral_projection_P(f);
    if (pf.is_zero()) continue;
    NCForm chain = rescale_c(pf, RescaleDirection::Forward);
    NCForm bb = hochschild_b(chain) + connes_B(chain);
    NCForm lhs = rescale_c(bb, RescaleDirection::Inverse);
    NCForm rhs = deg % 2 == 0 ? x_boundary_d(pf) : x_boundary_b(pf);
    REQUIRE(lhs == rhs);
    REQUIRE(!lhs.truncated());
  }
}

TEST_CASE("the idempotent e_hat") {
  SECTION("N = 0 truncation is e") {
    auto c = algebra_C();
    REQUIRE(idempotent_e_hat(0) == NCForm::basis_elem(c, 0, 0));
  }
  SECTION("N = 2: e + 2 (e - 1/2) de de") {
    auto c = algebra_C();
    NCForm expect = NCForm::basis_elem(c, 2, 0);
    expect.add(FWord{0, {0, 0}}, Scalar::exact_int(2));
    expect.add(FWord{-1, {0, 0}}, -kOne);
    REQUIRE(idempotent_e_hat(2) == expect);
  }
  SECTION("e_hat o e_hat = e_hat through degree N-2 at N = 8") {
    NCForm eh = idempotent_e_hat(8);
    NCForm sq = fedosov_product(eh, eh);
    for (int deg = 0; deg <= 6; ++deg) REQUIRE(sq.component(deg) == eh.component(deg));
  }
  SECTION("nat d e_hat = 0 through degree N-1 at N = 8") {
    NCForm eh = idempotent_e_hat(8);
    NCForm nd = x_boundary_d(eh, OverflowPolicy::Drop);
    for (int deg = 0; deg <= 7; ++deg) REQUIRE(nd.component(deg).is_zero());
  }
}

TEST_CASE("fedosov lift of a representation") {
  auto b = algebra_nilpotent_poly(2);
  auto m2 = algebra_Mn(2);
  FormRing ring(b, 4, Mode::Exact);
  std::vector<FormMatrix> rho;
  for (int i = 0; i < 4; ++i) {
    FormMatrix m(&ring, 2, 0);
    m.at(i / 2, i % 2) = ring.unit();
    rho.push_back(m);
  }
  // conjugate by u = 1 + x E12 for genuine B-dependence; u^{-1} = 1 - x E12
  FormMatrix u = FormMatrix::identity(&ring, 2, 0);
  u.at(0, 1) = NCForm::basis_elem(ring.base(), 4, 0);
  FormMatrix uinv = FormMatrix::identity(&ring, 2, 0);
  uinv.at(0, 1) = (-kOne) * NCForm::basis_elem(ring.base(), 4, 0);
  for (auto& m : rho) m = u * m * uinv;
  RepLift lift(m2, &ring, rho);

  SECTION("defining action on a module vector") {
    FormMatrix xi(&ring, 2, 0);
    xi.at(0, 0) = NCForm::basis_elem(ring.base(), 4, 1);
    xi.at(1, 0) = ring.unit();
    for (int a = 0; a < 4; ++a) {
      NCForm x = NCForm::basis_elem(m2, 4, a);
      FormMatrix lhs = lift.act(x, xi);
      FormMatrix rhs = rho[a] * xi - dmat(rho[a]) * dmat(xi);
      REQUIRE((lhs - rhs).is_zero());
    }
  }
  SECTION("degree-0 part of lift(a) is rho(a)") {
    for (int a = 0; a < 4; ++a) {
      FormMatrix m = lift.lift(NCForm::basis_elem(m2, 4, a));
      REQUIRE((m - rho[a]).is_zero());
    }
  }
  SECTION("multiplicativity on random even tensor elements") {
    std::mt19937_64 rng(9);
    for (int it = 0; it < 10; ++it) {
      NCForm x = random_even(m2, 4, 2, rng);
      NCForm y = random_even(m2, 4, 2, rng);
      FormMatrix lhs = lift.lift(fedosov_product(x, y));
      FormMatrix rhs = fedosov(lift.lift(x), lift.lift(y));
      REQUIRE((lhs - rhs).is_zero());
    }
  }
  SECTION("unital representation of C sends e_hat to the identity") {
    auto c = algebra_C();
    std::vector<FormMatrix> rho1 = {FormMatrix::identity(&ring, 1, 0)};
    RepLift l1(c, &ring, rho1);
    FormMatrix m = l1.lift(idempotent_e_hat(4));
    REQUIRE((m - FormMatrix::identity(&ring, 1, 0)).is_zero());
  }
}

TEST_CASE("fedosov exponential, numeric") {
  auto b = algebra_nilpotent_poly(2);
  FormRing ring(b, 2, Mode::Float);
  const Scalar fone = Scalar::one(Mode::Float);
  SECTION("dH = 0 reduces to the matrix exponential to 1e-12") {
    FormMatrix h(&ring, 1, 1);
    h.at(0, 0) = Scalar::flt(Cplx(0.3, 0.1)) * ring.unit();
    h.at(0, 1) = Scalar::flt(Cplx(-0.2, 0.4)) * ring.unit();
    h.at(1, 0) = Scalar::flt(Cplx(0.1, -0.1)) * ring.unit();
    h.at(1, 1) = Scalar::flt(Cplx(-0.5, 0.2)) * ring.unit();
    REQUIRE(dmat(h).is_zero());
    FormMatrix e = fedosov_exp(h);
    CMat h0(2, 2);
    h0 << Cplx(0.3, 0.1), Cplx(-0.2, 0.4), Cplx(0.1, -0.1), Cplx(-0.5, 0.2);
    CMat e0 = h0.exp();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Cplx got = 0;
        for (const auto& [w, c] : e.at(i, j).terms()) {
          REQUIRE(w.degree() == 0);
          got += c.lower();
        }
        REQUIRE(std::abs(got - e0(i, j)) < 1e-12);
      }
  }
  SECTION("generic 2x2 H0 with nilpotent dH vs the defining power series, 1e-9") {
    // H must be even: trivially graded module, entries of even form degree
    FormMatrix h(&ring, 2, 0);
    h.at(0, 0) = Scalar::flt(Cplx(0.25, 0.0)) * ring.unit() +
                 Scalar::flt(Cplx(0.5, 0.1)) * NCForm::word(ring.base(), 2, FWord{0, {}}, fone);
    h.at(0, 1) = Scalar::flt(Cplx(0.1, -0.3)) * ring.unit();
    h.at(1, 0) = Scalar::flt(Cplx(-0.2, 0.05)) * ring.unit() +
                 Scalar::flt(Cplx(0.3, 0.0)) * NCForm::word(ring.base(), 2, FWord{1, {}}, fone);
    h.at(1, 1) = Scalar::flt(Cplx(-0.4, 0.2)) * ring.unit();
    // the x-dependent degree-0 entries make dH nonzero
    REQUIRE(!dmat(h).is_zero());
    FormMatrix impl = fedosov_exp(h);
    FormMatrix acc = FormMatrix::identity(&ring, 2, 0);
    FormMatrix pw = FormMatrix::identity(&ring, 2, 0);
    for (int n = 1; n <= 60; ++n) {
      pw = fedosov(pw, h);
      pw = Scalar::flt(Cplx(1.0 / n, 0)) * pw;
      acc = acc + pw;
      if (pw.max_abs() < 1e-16) break;
    }
    REQUIRE((impl - acc).max_abs() < 1e-9);
  }
}
