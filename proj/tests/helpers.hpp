#pragma once

#include <random>

#include "ncx/ncform.hpp"

namespace ncx::testutil {

inline Scalar small_exact(std::mt19937_64& rng) {
  long n = static_cast<long>(rng() % 9) - 4;
  long d = 1 + static_cast<long>(rng() % 3);
  long ni = static_cast<long>(rng() % 9) - 4;
  return Scalar::exact(rat(n, d), rat(ni, d));
}

inline FWord random_word(const BasisAlgebraPtr& alg, int degree, std::mt19937_64& rng,
                         bool allow_unit_coeff = true) {
  FWord w;
  int t0 = static_cast<int>(rng() % (alg->dim() + (allow_unit_coeff ? 1 : 0)));
  w.tilde0 = (allow_unit_coeff && t0 == alg->dim()) ? -1 : t0;
  if (degree == 0 && w.tilde0 < 0) w.tilde0 = static_cast<int>(rng() % alg->dim());
  for (int i = 0; i < degree; ++i) w.letters.push_back(static_cast<int>(rng() % alg->dim()));
  return w;
}

// random form, homogeneous of the given degree
inline NCForm random_form(const BasisAlgebraPtr& alg, int trunc, int degree, int nterms,
                          std::mt19937_64& rng, bool allow_unit_coeff = true) {
  NCForm f(alg, trunc);
  for (int i = 0; i < nterms; ++i) f.add(random_word(alg, degree, rng, allow_unit_coeff), small_exact(rng));
  return f;
}

}  // namespace ncx::testutil
