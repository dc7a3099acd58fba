// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Exact arithmetic in cyclotomic fields Q(zeta_m) (or rings Z[zeta_m] when the
// coefficient type is an integer). Elements are stored in the power basis
// 1, z, ..., z^(phi(m)-1), reduced modulo the m-th cyclotomic polynomial, so
// two elements of the same order are equal iff their coefficient vectors are.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace vnfactor {

namespace detail {

  inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
    while (b != 0) {
      auto t = a % b;
      a      = b;
      b      = t;
    }
    return a;
  }

  inline std::uint64_t lcm(std::uint64_t a, std::uint64_t b) {
    return a / gcd(a, b) * b;
  }

  // Coefficients of Phi_m, lowest degree first; monic of degree phi(m).
  inline std::vector<std::int64_t> compute_cyclotomic_polynomial(unsigned m) {
    // x^m - 1 divided by Phi_d for every proper divisor d of m.
    std::vector<std::int64_t> num(m + 1, 0);
    num[0] = -1;
    num[m] = 1;
    for (unsigned d = 1; d < m; ++d) {
      if (m % d != 0) {
        continue;
      }
      auto const                den = compute_cyclotomic_polynomial(d);
      std::size_t const         dd  = den.size() - 1;
      std::vector<std::int64_t> quot(num.size() - dd, 0);
      for (std::size_t i = num.size() - 1; i + 1 > dd; --i) {
        std::int64_t c = num[i];  // den is monic
        quot[i - dd]   = c;
        if (c != 0) {
          for (std::size_t j = 0; j <= dd; ++j) {
            num[i - dd + j] -= c * den[j];
          }
        }
        if (i == dd) {
          break;
        }
      }
      num = std::move(quot);
    }
    return num;
  }

  inline std::vector<std::int64_t> const& cyclotomic_polynomial(unsigned m) {
    static std::mutex                                        mtx;
    static std::map<unsigned, std::vector<std::int64_t>> cache;
    std::lock_guard<std::mutex>                              lock(mtx);
    auto it = cache.find(m);
    if (it == cache.end()) {
      it = cache.emplace(m, compute_cyclotomic_polynomial(m)).first;
    }
    return it->second;
  }

  template <typename R>
  bool is_zero_coefficient(R const& r) {
    return r == R(0);
  }

}  // namespace detail

template <typename R>
class Cyclotomic {
 public:
  Cyclotomic() : _order(1), _coeffs(1, R(0)) {}

  // NOLINTNEXTLINE(google-explicit-constructor)
  Cyclotomic(R scalar) : _order(1), _coeffs{std::move(scalar)} {}

  // Sum of dense[j] * z^j for j < m with z a primitive m-th root of unity.
  static Cyclotomic from_powers(unsigned m, std::vector<R> dense) {
    if (m == 0) {
      throw std::invalid_argument("cyclotomic order must be positive");
    }
    if (dense.size() > m) {
      std::vector<R> folded(m, R(0));
      for (std::size_t j = 0; j < dense.size(); ++j) {
        folded[j % m] += dense[j];
      }
      dense = std::move(folded);
    }
    dense.resize(m, R(0));
    Cyclotomic c;
    c._order  = m;
    c._coeffs = reduce(m, std::move(dense));
    return c;
  }

  static Cyclotomic root_of_unity(unsigned m, std::int64_t power) {
    std::vector<R> dense(m, R(0));
    auto           p = ((power % static_cast<std::int64_t>(m)) + m) % m;
    dense[p]         = R(1);
    return from_powers(m, std::move(dense));
  }

  unsigned order() const noexcept {
    return _order;
  }

  std::vector<R> const& coefficients() const noexcept {
    return _coeffs;
  }

  bool is_zero() const {
    for (auto const& c : _coeffs) {
      if (!detail::is_zero_coefficient(c)) {
        return false;
      }
    }
    return true;
  }

  // The value as a rational number, if it is one.
  std::optional<R> as_scalar() const {
    for (std::size_t i = 1; i < _coeffs.size(); ++i) {
      if (!detail::is_zero_coefficient(_coeffs[i])) {
        return std::nullopt;
      }
    }
    return _coeffs[0];
  }

  Cyclotomic lifted(unsigned m) const {
    if (m % _order != 0) {
      throw std::invalid_argument("cannot lift cyclotomic to non-multiple order");
    }
    if (m == _order) {
      return *this;
    }
    std::vector<R> dense(m, R(0));
    unsigned const step = m / _order;
    for (std::size_t j = 0; j < _coeffs.size(); ++j) {
      dense[j * step] = _coeffs[j];
    }
    return from_powers(m, std::move(dense));
  }

  Cyclotomic conj() const {
    std::vector<R> dense(_order, R(0));
    for (std::size_t j = 0; j < _coeffs.size(); ++j) {
      dense[(_order - j) % _order] += _coeffs[j];
    }
    return from_powers(_order, std::move(dense));
  }

  std::complex<double> to_complex() const {
    std::complex<double> z = 0;
    for (std::size_t j = 0; j < _coeffs.size(); ++j) {
      if (detail::is_zero_coefficient(_coeffs[j])) {
        continue;
      }
      double const angle = 2.0 * std::numbers::pi * static_cast<double>(j)
                           / static_cast<double>(_order);
      z += to_double(_coeffs[j]) * std::polar(1.0, angle);
    }
    return z;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool               first = true;
    for (std::size_t j = 0; j < _coeffs.size(); ++j) {
      if (detail::is_zero_coefficient(_coeffs[j])) {
        continue;
      }
      if (!first) {
        os << " + ";
      }
      first = false;
      os << coefficient_string(_coeffs[j]);
      if (j > 0) {
        os << "*z" << _order << "^" << j;
      }
    }
    if (first) {
      os << "0";
    }
    return os.str();
  }

  Cyclotomic& operator+=(Cyclotomic const& other) {
    return *this = *this + other;
  }

  Cyclotomic& operator-=(Cyclotomic const& other) {
    return *this = *this - other;
  }

  Cyclotomic& operator*=(Cyclotomic const& other) {
    return *this = *this * other;
  }

  friend Cyclotomic operator+(Cyclotomic const& a, Cyclotomic const& b) {
    if (a._order != b._order) {
      unsigned m = static_cast<unsigned>(detail::lcm(a._order, b._order));
      return a.lifted(m) + b.lifted(m);
    }
    Cyclotomic c = a;
    for (std::size_t j = 0; j < c._coeffs.size(); ++j) {
      c._coeffs[j] += b._coeffs[j];
    }
    return c;
  }

  friend Cyclotomic operator-(Cyclotomic const& a) {
    Cyclotomic c = a;
    for (auto& x : c._coeffs) {
      x = -x;
    }
    return c;
  }

  friend Cyclotomic operator-(Cyclotomic const& a, Cyclotomic const& b) {
    return a + (-b);
  }

  friend Cyclotomic operator*(Cyclotomic const& a, Cyclotomic const& b) {
    if (a._order != b._order) {
      unsigned m = static_cast<unsigned>(detail::lcm(a._order, b._order));
      return a.lifted(m) * b.lifted(m);
    }
    unsigned const m = a._order;
    std::vector<R> dense(m, R(0));
    for (std::size_t i = 0; i < a._coeffs.size(); ++i) {
      if (detail::is_zero_coefficient(a._coeffs[i])) {
        continue;
      }
      for (std::size_t j = 0; j < b._coeffs.size(); ++j) {
        if (detail::is_zero_coefficient(b._coeffs[j])) {
          continue;
        }
        dense[(i + j) % m] += a._coeffs[i] * b._coeffs[j];
      }
    }
    return from_powers(m, std::move(dense));
  }

  friend bool operator==(Cyclotomic const& a, Cyclotomic const& b) {
    if (a._order != b._order) {
      unsigned m = static_cast<unsigned>(detail::lcm(a._order, b._order));
      return a.lifted(m)._coeffs == b.lifted(m)._coeffs;
    }
    return a._coeffs == b._coeffs;
  }

  friend bool operator!=(Cyclotomic const& a, Cyclotomic const& b) {
    return !(a == b);
  }

 private:
  static std::vector<R> reduce(unsigned m, std::vector<R> dense) {
    auto const&       phi_poly = detail::cyclotomic_polynomial(m);
    std::size_t const phi      = phi_poly.size() - 1;
    for (std::size_t j = dense.size(); j-- > phi;) {
      if (detail::is_zero_coefficient(dense[j])) {
        continue;
      }
      R c      = dense[j];
      dense[j] = R(0);
      for (std::size_t i = 0; i < phi; ++i) {
        if (phi_poly[i] != 0) {
          dense[j - phi + i] -= c * R(phi_poly[i]);
        }
      }
    }
    dense.resize(phi);
    return dense;
  }

  template <typename T>
  static double to_double(T const& x) {
    if constexpr (std::is_arithmetic_v<T>) {
      return static_cast<double>(x);
    } else {
      return x.template convert_to<double>();
    }
  }

  template <typename T>
  static std::string coefficient_string(T const& x) {
    if constexpr (std::is_arithmetic_v<T>) {
      return std::to_string(x);
    } else {
      return x.str();
    }
  }

  unsigned       _order;
  std::vector<R> _coeffs;
};

using CyclotomicInt = Cyclotomic<std::int64_t>;

}  // namespace vnfactor
