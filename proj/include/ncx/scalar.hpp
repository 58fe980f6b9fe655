#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <variant>

#include "ncx/errors.hpp"

namespace ncx {

using Rat = mpq_class;
using Cplx = std::complex<double>;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Element of Q(i).
struct ExactGaussian {
  Rat re{0}, im{0};

  ExactGaussian() = default;
  ExactGaussian(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  friend ExactGaussian operator+(const ExactGaussian& a, const ExactGaussian& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ExactGaussian operator-(const ExactGaussian& a, const ExactGaussian& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ExactGaussian operator-(const ExactGaussian& a) { return {-a.re, -a.im}; }
  friend ExactGaussian operator*(const ExactGaussian& a, const ExactGaussian& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ExactGaussian operator/(const ExactGaussian& a, const ExactGaussian& b) {
    Rat n = b.re * b.re + b.im * b.im;
    require(n != 0, ErrorCode::ModeError, "division by zero in Q(i)");
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  friend bool operator==(const ExactGaussian& a, const ExactGaussian& b) {
    return a.re == b.re && a.im == b.im;
  }
  Cplx lower() const { return {re.get_d(), im.get_d()}; }
};

// Finite sum of terms c * pi^{p/2} * lambda^{q/2} with c in Q(i); keyed by the
// half-integer exponent pair (p, q). Terms with equal keys merge, zeros drop.
struct SymbolicSum {
  std::map<std::pair<int, int>, ExactGaussian> terms;

  bool is_zero() const { return terms.empty(); }
  void add_term(int p, int q, const ExactGaussian& c) {
    if (c.is_zero()) return;
    auto key = std::make_pair(p, q);
    auto it = terms.find(key);
    if (it == terms.end()) {
      terms.emplace(key, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
  friend SymbolicSum operator+(const SymbolicSum& a, const SymbolicSum& b) {
    SymbolicSum r = a;
    for (const auto& [k, c] : b.terms) r.add_term(k.first, k.second, c);
    return r;
  }
  friend SymbolicSum operator-(const SymbolicSum& a) {
    SymbolicSum r;
    for (const auto& [k, c] : a.terms) r.terms.emplace(k, -c);
    return r;
  }
  friend SymbolicSum operator-(const SymbolicSum& a, const SymbolicSum& b) { return a + (-b); }
  friend SymbolicSum operator*(const SymbolicSum& a, const SymbolicSum& b) {
    SymbolicSum r;
    for (const auto& [ka, ca] : a.terms)
      for (const auto& [kb, cb] : b.terms)
        r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return r;
  }
  bool is_monomial() const { return terms.size() == 1; }
  friend bool operator==(const SymbolicSum& a, const SymbolicSum& b) { return a.terms == b.terms; }
  Cplx lower(double pi_val, double lambda_val) const {
    Cplx z = 0;
    for (const auto& [k, c] : terms)
      z += c.lower() * std::pow(pi_val, k.first / 2.0) * std::pow(lambda_val, k.second / 2.0);
    return z;
  }
};

enum class Mode { Exact, Symbolic, Float };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Exact: return "exact";
    case Mode::Symbolic: return "symbolic";
    case Mode::Float: return "float";
  }
  return "?";
}

// Tri-mode scalar. The mode is fixed per value and per computation;
// cross-mode arithmetic throws ModeError. The only implicit-free conversions
// are the explicit maps to_symbolic (Exact -> Symbolic, lossless) and
// lower (Exact/Symbolic -> Float, binding pi and lambda).
class Scalar {
 public:
  Scalar() : v_(ExactGaussian{}) {}

  static Scalar exact(Rat re, Rat im = Rat(0)) { return Scalar(ExactGaussian{std::move(re), std::move(im)}); }
  static Scalar exact_int(long n) { return exact(rat(n)); }
  static Scalar symbolic(SymbolicSum s) { return Scalar(std::move(s)); }
  // c * pi^{p/2} * lambda^{q/2}
  static Scalar sym_monomial(ExactGaussian c, int p, int q) {
    SymbolicSum s;
    s.add_term(p, q, c);
    return Scalar(std::move(s));
  }
  static Scalar flt(Cplx z) { return Scalar(z); }
  static Scalar zero(Mode m) {
    switch (m) {
      case Mode::Exact: return exact(Rat(0));
      case Mode::Symbolic: return Scalar(SymbolicSum{});
      case Mode::Float: return flt(0);
    }
    return {};
  }
  static Scalar one(Mode m) {
    switch (m) {
      case Mode::Exact: return exact(Rat(1));
      case Mode::Symbolic: return sym_monomial({Rat(1), Rat(0)}, 0, 0);
      case Mode::Float: return flt(1);
    }
    return {};
  }
  // sqrt(2i), fixed to the principal value 1+i (squares to 2i inside Q(i)).
  static Scalar sqrt_2i(Mode m) {
    switch (m) {
      case Mode::Exact: return exact(Rat(1), Rat(1));
      case Mode::Symbolic: return sym_monomial({Rat(1), Rat(1)}, 0, 0);
      case Mode::Float: return flt(Cplx(1, 1));
    }
    return {};
  }

  Mode mode() const {
    if (std::holds_alternative<ExactGaussian>(v_)) return Mode::Exact;
    if (std::holds_alternative<SymbolicSum>(v_)) return Mode::Symbolic;
    return Mode::Float;
  }

  const ExactGaussian& as_exact() const {
    require(mode() == Mode::Exact, ErrorCode::ModeError, "scalar is not in exact mode");
    return std::get<ExactGaussian>(v_);
  }
  const SymbolicSum& as_symbolic() const {
    require(mode() == Mode::Symbolic, ErrorCode::ModeError, "scalar is not in symbolic mode");
    return std::get<SymbolicSum>(v_);
  }
  Cplx as_float() const {
    require(mode() == Mode::Float, ErrorCode::ModeError, "scalar is not in float mode");
    return std::get<Cplx>(v_);
  }

  bool is_zero() const {
    switch (mode()) {
      case Mode::Exact: return as_exact().is_zero();
      case Mode::Symbolic: return as_symbolic().is_zero();
      case Mode::Float: return as_float() == Cplx(0, 0);
    }
    return false;
  }

  // Exact -> Symbolic embedding as the (p,q) = (0,0) monomial.
  Scalar to_symbolic() const {
    if (mode() == Mode::Symbolic) return *this;
    return sym_monomial(as_exact(), 0, 0);
  }

  // Lowering map to Complex64. pi and lambda are bound to numeric values;
  // exact values ignore them.
  Cplx lower(double pi_val = M_PI, double lambda_val = 1.0) const {
    switch (mode()) {
      case Mode::Exact: return as_exact().lower();
      case Mode::Symbolic: return as_symbolic().lower(pi_val, lambda_val);
      case Mode::Float: return as_float();
    }
    return 0;
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    check_mode(a, b);
    switch (a.mode()) {
      case Mode::Exact: return Scalar(a.as_exact() + b.as_exact());
      case Mode::Symbolic: return Scalar(a.as_symbolic() + b.as_symbolic());
      case Mode::Float: return Scalar(a.as_float() + b.as_float());
    }
    return {};
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
  friend Scalar operator-(const Scalar& a) {
    switch (a.mode()) {
      case Mode::Exact: return Scalar(-a.as_exact());
      case Mode::Symbolic: return Scalar(-a.as_symbolic());
      case Mode::Float: return Scalar(-a.as_float());
    }
    return {};
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    check_mode(a, b);
    switch (a.mode()) {
      case Mode::Exact: return Scalar(a.as_exact() * b.as_exact());
      case Mode::Symbolic: return Scalar(a.as_symbolic() * b.as_symbolic());
      case Mode::Float: return Scalar(a.as_float() * b.as_float());
    }
    return {};
  }
  // Division: full field operation in Exact and Float mode; in Symbolic mode
  // the divisor must be a single monomial.
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    check_mode(a, b);
    switch (a.mode()) {
      case Mode::Exact: return Scalar(a.as_exact() / b.as_exact());
      case Mode::Float: {
        require(b.as_float() != Cplx(0, 0), ErrorCode::ModeError, "division by zero");
        return Scalar(a.as_float() / b.as_float());
      }
      case Mode::Symbolic: {
        const auto& s = b.as_symbolic();
        require(s.is_monomial(), ErrorCode::ModeError, "symbolic division needs a monomial divisor");
        const auto& [key, c] = *s.terms.begin();
        SymbolicSum r;
        for (const auto& [ka, ca] : a.as_symbolic().terms)
          r.add_term(ka.first - key.first, ka.second - key.second, ca / c);
        return Scalar(std::move(r));
      }
    }
    return {};
  }
  Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
  Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
  Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.mode() != b.mode()) return false;
    switch (a.mode()) {
      case Mode::Exact: return a.as_exact() == b.as_exact();
      case Mode::Symbolic: return a.as_symbolic() == b.as_symbolic();
      case Mode::Float: return a.as_float() == b.as_float();
    }
    return false;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  double abs() const {
    switch (mode()) {
      case Mode::Float: return std::abs(as_float());
      default: return std::abs(lower());
    }
  }

  std::string str() const {
    std::ostringstream os;
    switch (mode()) {
      case Mode::Exact: {
        const auto& g = as_exact();
        os << g.re.get_str();
        if (g.im != 0) os << (g.im > 0 ? "+" : "") << g.im.get_str() << "i";
        break;
      }
      case Mode::Symbolic: {
        const auto& s = as_symbolic();
        if (s.terms.empty()) return "0";
        bool first = true;
        for (const auto& [k, c] : s.terms) {
          if (!first) os << " + ";
          first = false;
          os << "(" << c.re.get_str();
          if (c.im != 0) os << (c.im > 0 ? "+" : "") << c.im.get_str() << "i";
          os << ")";
          if (k.first != 0) os << "*pi^(" << k.first << "/2)";
          if (k.second != 0) os << "*lam^(" << k.second << "/2)";
        }
        break;
      }
      case Mode::Float: {
        os << as_float().real();
        if (as_float().imag() != 0) os << (as_float().imag() > 0 ? "+" : "") << as_float().imag() << "i";
        break;
      }
    }
    return os.str();
  }

 private:
  explicit Scalar(ExactGaussian g) : v_(std::move(g)) {}
  explicit Scalar(SymbolicSum s) : v_(std::move(s)) {}
  explicit Scalar(Cplx z) : v_(z) {}

  static void check_mode(const Scalar& a, const Scalar& b) {
    require(a.mode() == b.mode(), ErrorCode::ModeError,
            std::string("cross-mode arithmetic: ") + to_string(a.mode()) + " vs " + to_string(b.mode()));
  }

  std::variant<ExactGaussian, SymbolicSum, Cplx> v_;
};

inline Rat factorial(int n) {
  Rat r(1);
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

inline Rat binomial_2n_n(int n) {  // (2n)! / (n!)^2
  return factorial(2 * n) / (factorial(n) * factorial(n));
}

}  // namespace ncx
