#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "ncx/algebra.hpp"
#include "ncx/graded_matrix.hpp"

using namespace ncx;

TEST_CASE("make_algebra validates the axioms") {
  SECTION("dim 1 with c[0][0][0] = 1 is the unital algebra C") {
    auto a = algebra_C();
    REQUIRE(a->dim() == 1);
    REQUIRE(a->unit() == 0);
  }
  SECTION("matrix units give M2, non-unital as a basis algebra") {
    auto m2 = algebra_Mn(2);
    REQUIRE(m2->dim() == 4);
    bool tr = false;
    // E12 E21 = E11
    auto e = m2->product(1, 2, tr);
    REQUIRE(e.size() == 1);
    REQUIRE(e[0].index == 0);
    // E12 E12 = 0
    REQUIRE(m2->product(1, 1, tr).empty());
  }
  SECTION("C1 is graded with odd generator squaring to 1") {
    auto c1 = algebra_C1();
    REQUIRE(c1->graded());
    REQUIRE(c1->parity(1) == 1);
    bool tr = false;
    auto e = c1->product(1, 1, tr);
    REQUIRE(e.size() == 1);
    REQUIRE(e[0].index == 0);
  }
  SECTION("non-associative constants are rejected with the failing triple") {
    // dim 2: e1 e1 = e0, e1 e0 = e1, everything else zero -> (e1 e1) e1 != e1 (e1 e1)
    std::vector<Scalar> c(8, Scalar::zero(Mode::Exact));
    auto set = [&](int i, int j, int k) { c[(i * 2 + j) * 2 + k] = Scalar::one(Mode::Exact); };
    set(1, 1, 0);
    set(1, 0, 1);
    REQUIRE_THROWS_MATCHES(make_algebra(2, c), Error,
                           Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("NonAssociative")));
  }
  SECTION("bad unit is rejected") {
    // multiplication identically zero but unit declared
    std::vector<Scalar> c(8, Scalar::zero(Mode::Exact));
    REQUIRE_THROWS_AS(make_algebra(2, c, 0), Error);
  }
}

TEST_CASE("unitalize adjoins a fresh unit even to unital algebras") {
  SECTION("C becomes two-dimensional") {
    auto u = unitalize(algebra_C());
    REQUIRE(u->dim() == 2);
    REQUIRE(u->unit() == 0);
    bool tr = false;
    // old unit is idempotent but not the new unit
    auto e = u->product(1, 1, tr);
    REQUIRE(e.size() == 1);
    REQUIRE(e[0].index == 1);
  }
  SECTION("M2 becomes five-dimensional with distinct units") {
    auto u = unitalize(algebra_Mn(2));
    REQUIRE(u->dim() == 5);
    // old unit = E11 + E22 at shifted indices 1 and 4; check (old unit)^2 = old unit != new unit
    AlgElem old_unit = AlgElem::basis(u, 1) + AlgElem::basis(u, 4);
    REQUIRE(old_unit * old_unit == old_unit);
    REQUIRE(!(old_unit == AlgElem::basis(u, 0)));
  }
  SECTION("C1 keeps its grading and the adjoined unit is even") {
    auto u = unitalize(algebra_C1());
    REQUIRE(u->dim() == 3);
    REQUIRE(u->graded());
    REQUIRE(u->parity(0) == 0);
    REQUIRE(u->parity(2) == 1);
  }
}

TEST_CASE("supertrace") {
  SECTION("identity on C^{p|q} gives p - q") {
    auto id = GradedMatrix::identity(3, 1);
    REQUIRE(supertrace(id) == Scalar::exact_int(2));
  }
  SECTION("odd matrices have supertrace zero") {
    GradedMatrix m(1, 1);
    m.at(0, 1) = Scalar::exact_int(5);
    m.at(1, 0) = Scalar::exact(rat(1), rat(2));
    REQUIRE(m.parity() == MatParity::Odd);
    REQUIRE(supertrace(m).is_zero());
  }
  SECTION("supertrace vanishes on graded commutators, randomized") {
    std::mt19937_64 rng(7);
    auto rnd = [&](MatParity par) {
      GradedMatrix m(2, 1);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          bool odd_pos = (m.block(i) + m.block(j)) % 2 == 1;
          if ((par == MatParity::Odd) != odd_pos) continue;
          m.at(i, j) = Scalar::exact(rat(static_cast<long>(rng() % 11) - 5, 1 + rng() % 3),
                                     rat(static_cast<long>(rng() % 11) - 5, 1 + rng() % 3));
        }
      return m;
    };
    for (int it = 0; it < 50; ++it) {
      auto px = it % 2 == 0 ? MatParity::Even : MatParity::Odd;
      auto py = (it / 2) % 2 == 0 ? MatParity::Even : MatParity::Odd;
      GradedMatrix x = rnd(px), y = rnd(py);
      REQUIRE(supertrace(graded_commutator(x, y)).is_zero());
    }
  }
}

TEST_CASE("exact rank") {
  std::vector<std::vector<Scalar>> rows = {
      {Scalar::exact_int(1), Scalar::exact_int(2)},
      {Scalar::exact_int(2), Scalar::exact_int(4)},
      {Scalar::exact_int(0), Scalar::exact_int(1)},
  };
  REQUIRE(exact_rank(rows) == 2);
}
