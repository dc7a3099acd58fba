// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Finitely supported elements sum_g a_g u_g of the group algebra, with the
// canonical trace tau(a) = a_e and inner product <a, b> = tau(a b*).
// Coefficients may be complex doubles, exact rationals, or exact cyclotomic
// numbers over Q.

#pragma once

#include <complex>
#include <map>
#include <utility>

#include "cyclotomic.hpp"
#include "groups.hpp"
#include "rational.hpp"

namespace vnfactor {

using CyclotomicQ = Cyclotomic<Rational>;

template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<std::complex<double>> {
  static std::complex<double> conj(std::complex<double> const& x) {
    return std::conj(x);
  }
  static bool is_zero(std::complex<double> const& x) {
    return x == std::complex<double>(0.0, 0.0);
  }
  static std::complex<double> to_complex(std::complex<double> const& x) {
    return x;
  }
};

template <>
struct ScalarTraits<Rational> {
  static Rational conj(Rational const& x) {
    return x;
  }
  static bool is_zero(Rational const& x) {
    return x == 0;
  }
  static std::complex<double> to_complex(Rational const& x) {
    return {to_double(x), 0.0};
  }
};

template <typename R>
struct ScalarTraits<Cyclotomic<R>> {
  static Cyclotomic<R> conj(Cyclotomic<R> const& x) {
    return x.conj();
  }
  static bool is_zero(Cyclotomic<R> const& x) {
    return x.is_zero();
  }
  static std::complex<double> to_complex(Cyclotomic<R> const& x) {
    return x.to_complex();
  }
};

inline CyclotomicQ to_cyclotomic_q(CyclotomicInt const& c) {
  std::vector<Rational> q;
  for (auto x : c.coefficients()) {
    q.emplace_back(x);
  }
  return CyclotomicQ::from_powers(c.order(), std::move(q));
}

template <typename S>
class GroupAlgebraElement {
 public:
  using Traits  = ScalarTraits<S>;
  using Support = std::map<Element, S>;

  GroupAlgebraElement() = default;
  explicit GroupAlgebraElement(GroupHandle h) : _handle(std::move(h)) {}

  static GroupAlgebraElement basis(GroupHandle const& h, Element const& g,
                                   S coefficient = S(1)) {
    GroupAlgebraElement a(h);
    a.add_term(g, std::move(coefficient));
    return a;
  }

  static GroupAlgebraElement identity(GroupHandle const& h) {
    return basis(h, h.identity());
  }

  GroupHandle const& handle() const noexcept {
    return _handle;
  }
  Support const& support() const noexcept {
    return _terms;
  }
  std::size_t size() const noexcept {
    return _terms.size();
  }
  bool is_zero() const noexcept {
    return _terms.empty();
  }

  S coefficient(Element const& g) const {
    auto it = _terms.find(g);
    return it == _terms.end() ? S(0) : it->second;
  }

  void add_term(Element const& g, S const& c) {
    _handle.check(g);
    if (Traits::is_zero(c)) {
      return;
    }
    auto [it, inserted] = _terms.emplace(g, c);
    if (!inserted) {
      it->second = it->second + c;
      if (Traits::is_zero(it->second)) {
        _terms.erase(it);
      }
    }
  }

  // (sum a_g u_g)* = sum conj(a_g) u_{g^-1}
  GroupAlgebraElement star() const {
    GroupAlgebraElement out(_handle);
    for (auto const& [g, c] : _terms) {
      out._terms.emplace(_handle.inv(g), Traits::conj(c));
    }
    return out;
  }

  GroupAlgebraElement scaled(S const& s) const {
    GroupAlgebraElement out(_handle);
    for (auto const& [g, c] : _terms) {
      out.add_term(g, s * c);
    }
    return out;
  }

  friend GroupAlgebraElement operator+(GroupAlgebraElement const& a,
                                       GroupAlgebraElement const& b) {
    a.same_handle(b);
    auto out = a;
    for (auto const& [g, c] : b._terms) {
      out.add_term(g, c);
    }
    return out;
  }

  friend GroupAlgebraElement operator-(GroupAlgebraElement const& a,
                                       GroupAlgebraElement const& b) {
    a.same_handle(b);
    auto out = a;
    for (auto const& [g, c] : b._terms) {
      out.add_term(g, S(0) - c);
    }
    return out;
  }

  friend GroupAlgebraElement operator*(GroupAlgebraElement const& a,
                                       GroupAlgebraElement const& b) {
    a.same_handle(b);
    GroupAlgebraElement out(a._handle);
    for (auto const& [g, c] : a._terms) {
      for (auto const& [h, d] : b._terms) {
        out.add_term(a._handle.mul(g, h), c * d);
      }
    }
    return out;
  }

  friend GroupAlgebraElement operator*(S const& s, GroupAlgebraElement const& a) {
    return a.scaled(s);
  }

  friend bool operator==(GroupAlgebraElement const& a,
                         GroupAlgebraElement const& b) {
    return a._handle.id() == b._handle.id() && a._terms == b._terms;
  }

  void same_handle(GroupAlgebraElement const& b) const {
    if (_handle.id() != b._handle.id()) {
      throw DomainMismatch("group algebra elements over different groups");
    }
  }

 private:
  GroupHandle _handle;
  Support     _terms;
};

// tau(a): the coefficient of u_e.
template <typename S>
S trace(GroupAlgebraElement<S> const& a) {
  return a.coefficient(a.handle().identity());
}

// tau(a b) = sum_g a_g b_{g^-1}, without forming the product.
template <typename S>
S trace_of_product(GroupAlgebraElement<S> const& a,
                   GroupAlgebraElement<S> const& b) {
  a.same_handle(b);
  S acc(0);
  for (auto const& [g, c] : a.support()) {
    auto it = b.support().find(a.handle().inv(g));
    if (it != b.support().end()) {
      acc = acc + c * it->second;
    }
  }
  return acc;
}

// <a, b> = tau(a b*) = sum_g a_g conj(b_g)
template <typename S>
S tau_inner_product(GroupAlgebraElement<S> const& a,
                    GroupAlgebraElement<S> const& b) {
  a.same_handle(b);
  S acc(0);
  for (auto const& [g, c] : a.support()) {
    auto it = b.support().find(g);
    if (it != b.support().end()) {
      acc = acc + c * ScalarTraits<S>::conj(it->second);
    }
  }
  return acc;
}

// Largest coefficient modulus, used for float residuals.
template <typename S>
double max_abs_coefficient(GroupAlgebraElement<S> const& a) {
  double m = 0.0;
  for (auto const& [g, c] : a.support()) {
    m = std::max(m, std::abs(ScalarTraits<S>::to_complex(c)));
  }
  return m;
}

}  // namespace vnfactor
