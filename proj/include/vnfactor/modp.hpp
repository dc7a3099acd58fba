// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Arithmetic and dense linear algebra over a prime field F_p, used by the
// class-sum eigenvector method for character tables.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cyclotomic.hpp"  // for detail::gcd

namespace vnfactor::modp {

class Field {
 public:
  explicit Field(std::uint64_t p) : _p(p) {
    if (p < 2 || p >= (std::uint64_t(1) << 31)) {
      throw std::invalid_argument("prime field modulus out of range");
    }
  }

  std::uint64_t prime() const noexcept {
    return _p;
  }

  std::uint64_t reduce(std::int64_t x) const noexcept {
    auto r = x % static_cast<std::int64_t>(_p);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(_p)
                                            : r);
  }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
    auto s = a + b;
    return s >= _p ? s - _p : s;
  }

  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept {
    return a >= b ? a - b : a + _p - b;
  }

  std::uint64_t neg(std::uint64_t a) const noexcept {
    return a == 0 ? 0 : _p - a;
  }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept {
    return (a * b) % _p;
  }

  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const noexcept {
    std::uint64_t r = 1;
    a %= _p;
    while (e > 0) {
      if (e & 1) {
        r = mul(r, a);
      }
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  std::uint64_t inv(std::uint64_t a) const {
    if (a % _p == 0) {
      throw std::domain_error("inverse of zero in F_p");
    }
    return pow(a, _p - 2);
  }

 private:
  std::uint64_t _p;
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) {
    return false;
  }
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      return false;
    }
  }
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) {
        n /= d;
      }
    }
  }
  if (n > 1) {
    out.push_back(n);
  }
  return out;
}

inline std::uint64_t primitive_root(Field const& f) {
  auto const p       = f.prime();
  auto const factors = prime_factors(p - 1);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (auto q : factors) {
      if (f.pow(g, (p - 1) / q) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      return g;
    }
  }
  return 1;  // p == 2
}

// Smallest prime p with p = 1 (mod exponent) and p > 2 sqrt(order).
inline std::uint64_t dixon_prime(std::uint64_t exponent, std::uint64_t order) {
  for (std::uint64_t p = exponent + 1;; p += exponent) {
    if (p * p > 4 * order && is_prime(p)) {
      return p;
    }
  }
}

using Matrix = std::vector<std::vector<std::uint64_t>>;

// Basis of {x : A x = 0}, returned as columns of a (cols x dim) matrix.
inline Matrix nullspace(Matrix a, Field const& f) {
  std::size_t const rows = a.size();
  std::size_t const cols = rows == 0 ? 0 : a[0].size();
  std::vector<std::size_t> pivot_cols;
  std::size_t              r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) {
      ++piv;
    }
    if (piv == rows) {
      continue;
    }
    std::swap(a[piv], a[r]);
    auto const inv = f.inv(a[r][c]);
    for (auto& x : a[r]) {
      x = f.mul(x, inv);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) {
        continue;
      }
      auto const factor = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) {
        a[i][j] = f.sub(a[i][j], f.mul(factor, a[r][j]));
      }
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) {
    is_pivot[c] = true;
  }
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < cols; ++c) {
    if (!is_pivot[c]) {
      free_cols.push_back(c);
    }
  }
  Matrix basis(cols, std::vector<std::uint64_t>(free_cols.size(), 0));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    auto const fc   = free_cols[k];
    basis[fc][k]    = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
      basis[pivot_cols[i]][k] = f.neg(a[i][fc]);
    }
  }
  return basis;
}

// Column-echelon form of a full-column-rank basis B (n x d): returns B' with
// the same column span and rows pivots[c] equal to the c-th unit vector.
inline std::pair<Matrix, std::vector<std::size_t>>
column_echelon(Matrix const& b, Field const& f) {
  std::size_t const n = b.size();
  std::size_t const d = n == 0 ? 0 : b[0].size();
  // Row-reduce the transpose.
  Matrix t(d, std::vector<std::uint64_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      t[j][i] = b[i][j];
    }
  }
  std::vector<std::size_t> pivots;
  std::size_t              r = 0;
  for (std::size_t c = 0; c < n && r < d; ++c) {
    std::size_t piv = r;
    while (piv < d && t[piv][c] == 0) {
      ++piv;
    }
    if (piv == d) {
      continue;
    }
    std::swap(t[piv], t[r]);
    auto const inv = f.inv(t[r][c]);
    for (auto& x : t[r]) {
      x = f.mul(x, inv);
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (i == r || t[i][c] == 0) {
        continue;
      }
      auto const factor = t[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        t[i][j] = f.sub(t[i][j], f.mul(factor, t[r][j]));
      }
    }
    pivots.push_back(c);
    ++r;
  }
  if (r != d) {
    throw std::logic_error("column_echelon: basis is rank deficient");
  }
  Matrix out(n, std::vector<std::uint64_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out[i][j] = t[j][i];
    }
  }
  return {std::move(out), std::move(pivots)};
}

// Characteristic polynomial det(xI - A), lowest degree first, via reduction
// to upper Hessenberg form.
inline std::vector<std::uint64_t> charpoly(Matrix a, Field const& f) {
  std::size_t const n = a.size();
  for (std::size_t m = 0; m + 2 < n; ++m) {
    std::size_t piv = m + 1;
    while (piv < n && a[piv][m] == 0) {
      ++piv;
    }
    if (piv == n) {
      continue;
    }
    if (piv != m + 1) {
      std::swap(a[piv], a[m + 1]);
      for (std::size_t i = 0; i < n; ++i) {
        std::swap(a[i][piv], a[i][m + 1]);
      }
    }
    auto const inv = f.inv(a[m + 1][m]);
    for (std::size_t i = m + 2; i < n; ++i) {
      if (a[i][m] == 0) {
        continue;
      }
      auto const u = f.mul(a[i][m], inv);
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] = f.sub(a[i][j], f.mul(u, a[m + 1][j]));
      }
      for (std::size_t j = 0; j < n; ++j) {
        a[j][m + 1] = f.add(a[j][m + 1], f.mul(u, a[j][i]));
      }
    }
  }
  // p[k] = charpoly of the leading k x k block.
  std::vector<std::vector<std::uint64_t>> p(n + 1);
  p[0] = {1};
  for (std::size_t k = 1; k <= n; ++k) {
    auto const& prev = p[k - 1];
    std::vector<std::uint64_t> cur(k + 1, 0);
    auto const                 h = a[k - 1][k - 1];
    for (std::size_t i = 0; i < prev.size(); ++i) {
      cur[i + 1] = f.add(cur[i + 1], prev[i]);
      cur[i]     = f.sub(cur[i], f.mul(h, prev[i]));
    }
    std::uint64_t t = 1;
    for (std::size_t i = k - 1; i-- > 0;) {
      t = f.mul(t, a[i + 1][i]);
      if (t == 0) {
        break;
      }
      auto const coeff = f.mul(t, a[i][k - 1]);
      for (std::size_t j = 0; j < p[i].size(); ++j) {
        cur[j] = f.sub(cur[j], f.mul(coeff, p[i][j]));
      }
    }
    p[k] = std::move(cur);
  }
  return p[n];
}

inline std::vector<std::uint64_t> roots(std::vector<std::uint64_t> const& poly,
                                        Field const&                      f) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = 0; x < f.prime(); ++x) {
    std::uint64_t v = 0;
    for (std::size_t i = poly.size(); i-- > 0;) {
      v = f.add(f.mul(v, x), poly[i]);
    }
    if (v == 0) {
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace vnfactor::modp
