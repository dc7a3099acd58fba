// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Character tables of finite groups by the class-sum eigenvector method:
// the central characters omega_chi are the common eigenvectors of the class
// multiplication matrices, which split over F_p for p = 1 (mod exponent).
// Degrees and values are recovered mod p and lifted to Z[zeta_e] through
// eigenvalue multiplicities of the power maps. Every table is checked against
// both orthogonality relations before it is returned.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclotomic.hpp"
#include "groups.hpp"
#include "modp.hpp"

namespace vnfactor {

class InternalConsistencyError : public std::runtime_error {
 public:
  InternalConsistencyError(std::string relation, std::string const& what)
      : std::runtime_error(what), _relation(std::move(relation)) {}
  std::string const& relation() const noexcept {
    return _relation;
  }

 private:
  std::string _relation;
};

inline constexpr std::size_t default_max_character_order = 5000;

////////////////////////////////////////////////////////////////////////
// Class data
////////////////////////////////////////////////////////////////////////

struct ClassData {
  FiniteSubgroup group;
  // Element indices per class; class 0 is {e}; classes ordered by first
  // appearance in the subgroup's element order.
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t>              class_of;
  std::vector<std::size_t>              inverse_class;
  std::vector<std::uint64_t>            element_orders;  // per class
  std::uint64_t                         exponent = 1;
  // power_map[k][j]: class of g_k^j for j < exponent
  std::vector<std::vector<std::size_t>> power_map;
  // a_{ijk} = #{(x, y) in C_i x C_j : xy = z} for fixed z in C_k
  std::vector<std::int64_t> constants;

  std::size_t class_count() const noexcept {
    return classes.size();
  }
  std::uint64_t order() const noexcept {
    return group.order();
  }
  std::uint64_t class_size(std::size_t i) const {
    return classes.at(i).size();
  }
  std::int64_t structure_constant(std::size_t i, std::size_t j,
                                  std::size_t k) const {
    auto const r = classes.size();
    return constants.at((i * r + j) * r + k);
  }
  Element const& representative(std::size_t k) const {
    return group.element(classes.at(k).front());
  }
};

inline ClassData class_data(FiniteSubgroup const& h,
                            std::size_t max_order = default_max_character_order) {
  if (h.order() > max_order) {
    throw ParameterError("group of order " + std::to_string(h.order())
                         + " exceeds the character engine limit "
                         + std::to_string(max_order));
  }
  ClassData cd;
  cd.group     = h;
  auto const n = h.order();
  auto const& hd = h.handle();

  std::vector<std::size_t> inv(n);
  for (std::size_t x = 0; x < n; ++x) {
    inv[x] = h.inv_index(x);
  }
  std::vector<std::size_t> gens;
  for (auto const& g : h.generators()) {
    auto i = *h.index_of(g);
    gens.push_back(i);
    gens.push_back(inv[i]);
  }

  constexpr auto unassigned = static_cast<std::size_t>(-1);
  cd.class_of.assign(n, unassigned);
  for (std::size_t x = 0; x < n; ++x) {
    if (cd.class_of[x] != unassigned) {
      continue;
    }
    auto const id = cd.classes.size();
    cd.classes.push_back({x});
    cd.class_of[x] = id;
    auto& cls      = cd.classes.back();
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (auto s : gens) {
        auto y = h.mul_index(h.mul_index(s, cls[i]), inv[s]);
        if (cd.class_of[y] == unassigned) {
          cd.class_of[y] = id;
          cls.push_back(y);
        }
      }
    }
  }
  auto const r = cd.classes.size();

  cd.inverse_class.resize(r);
  cd.element_orders.resize(r);
  for (std::size_t k = 0; k < r; ++k) {
    auto const g        = cd.classes[k].front();
    cd.inverse_class[k] = cd.class_of[inv[g]];
    std::uint64_t ord   = 1;
    auto          x     = g;
    while (x != 0) {
      x = h.mul_index(x, g);
      ++ord;
    }
    if (g == 0) {
      ord = 1;
    }
    cd.element_orders[k] = ord;
    cd.exponent          = detail::lcm(cd.exponent, ord);
  }
  cd.power_map.assign(r, std::vector<std::size_t>(cd.exponent));
  for (std::size_t k = 0; k < r; ++k) {
    auto const g = cd.classes[k].front();
    std::size_t x = 0;
    for (std::uint64_t j = 0; j < cd.exponent; ++j) {
      cd.power_map[k][j] = cd.class_of[x];
      x                  = h.mul_index(x, g);
    }
  }

  cd.constants.assign(r * r * r, 0);
  for (std::size_t k = 0; k < r; ++k) {
    auto const z = cd.classes[k].front();
    for (std::size_t x = 0; x < n; ++x) {
      auto const y = h.mul_index(inv[x], z);
      cd.constants[(cd.class_of[x] * r + cd.class_of[y]) * r + k] += 1;
    }
  }
  (void) hd;
  return cd;
}

inline ClassData class_data(GroupHandle const& h,
                            std::size_t max_order = default_max_character_order) {
  auto f = h.finiteness();
  if (f.kind == Finiteness::Kind::infinite || !h.generator_count()) {
    throw RequiresFinite("class_data requires a finite group; "
                         + h.family() + " is not finite");
  }
  if (f.is_finite() && f.order > max_order) {
    throw ParameterError("group of order " + std::to_string(f.order)
                         + " exceeds the character engine limit "
                         + std::to_string(max_order));
  }
  return class_data(FiniteSubgroup::whole(h, max_order), max_order);
}

////////////////////////////////////////////////////////////////////////
// Character tables
////////////////////////////////////////////////////////////////////////

enum class Provenance { exact_cyclotomic, float_tolerance };

inline char const* to_string(Provenance p) {
  return p == Provenance::exact_cyclotomic ? "exact-cyclotomic" : "float";
}

// Largest exponent for which values are kept as exact cyclotomic integers.
inline constexpr std::uint64_t max_exact_exponent = 64;

struct CharacterTable {
  std::uint64_t              group_order = 0;
  std::uint64_t              exponent    = 1;
  std::uint64_t              prime       = 0;
  std::vector<std::uint64_t> class_sizes;
  std::vector<std::uint64_t> degrees;
  // values[i][j] = chi_i on class j
  std::vector<std::vector<std::complex<double>>> values;
  // Same values in Z[zeta_exponent]; empty for float provenance.
  std::vector<std::vector<CyclotomicInt>> exact;
  Provenance                              provenance = Provenance::exact_cyclotomic;
  double                                  tolerance  = 0.0;

  std::size_t size() const noexcept {
    return degrees.size();
  }
  bool is_exact() const noexcept {
    return provenance == Provenance::exact_cyclotomic && !exact.empty();
  }
};

struct OrthogonalityReport {
  double row_residual    = 0.0;
  double column_residual = 0.0;
  bool   degree_sum_ok   = false;  // sum chi(1)^2 = |H|
  bool   degrees_divide  = false;  // chi(1) | |H|
  bool   exact           = false;
  double tolerance       = 0.0;
  bool   pass            = false;
  std::string failed_relation;  // empty when pass
};

// Maximum residual of both orthogonality relations. Exact tables are checked
// in Z[zeta_e] and pass only with zero residual.
inline OrthogonalityReport validate_orthogonality(CharacterTable const& t,
                                                  ClassData const&      cd,
                                                  double tolerance = 1e-9) {
  OrthogonalityReport rep;
  auto const          r = cd.class_count();
  auto const          n = static_cast<std::int64_t>(cd.order());
  rep.exact             = t.is_exact();
  rep.tolerance         = rep.exact ? 0.0 : tolerance;
  if (t.size() != r || t.values.size() != r) {
    rep.failed_relation = "dimensions";
    rep.row_residual = rep.column_residual = INFINITY;
    return rep;
  }
  if (rep.exact) {
    std::vector<std::vector<CyclotomicInt>> conj(r, std::vector<CyclotomicInt>(r));
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        conj[i][j] = t.exact[i][j].conj();
      }
    }
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t i2 = 0; i2 < r; ++i2) {
        CyclotomicInt s;
        for (std::size_t j = 0; j < r; ++j) {
          s += CyclotomicInt(static_cast<std::int64_t>(cd.class_size(j)))
               * t.exact[i][j] * conj[i2][j];
        }
        if (i == i2) {
          s -= CyclotomicInt(n);
        }
        rep.row_residual = std::max(rep.row_residual, std::abs(s.to_complex()));
        if (!s.is_zero() && rep.row_residual == 0.0) {
          rep.row_residual = 1e-300;
        }
      }
    }
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t k = 0; k < r; ++k) {
        CyclotomicInt s;
        for (std::size_t i = 0; i < r; ++i) {
          s += t.exact[i][j] * conj[i][k];
        }
        // |C_j| * sum = |H| delta_jk keeps the check integral
        s = CyclotomicInt(static_cast<std::int64_t>(cd.class_size(j))) * s;
        if (j == k) {
          s -= CyclotomicInt(n);
        }
        double const res = std::abs(s.to_complex())
                           / static_cast<double>(cd.class_size(j));
        rep.column_residual = std::max(rep.column_residual, res);
        if (!s.is_zero() && rep.column_residual == 0.0) {
          rep.column_residual = 1e-300;
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t i2 = 0; i2 < r; ++i2) {
        std::complex<double> s = 0;
        for (std::size_t j = 0; j < r; ++j) {
          s += static_cast<double>(cd.class_size(j)) * t.values[i][j]
               * std::conj(t.values[i2][j]);
        }
        if (i == i2) {
          s -= static_cast<double>(n);
        }
        rep.row_residual = std::max(rep.row_residual, std::abs(s));
      }
    }
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t k = 0; k < r; ++k) {
        std::complex<double> s = 0;
        for (std::size_t i = 0; i < r; ++i) {
          s += t.values[i][j] * std::conj(t.values[i][k]);
        }
        if (j == k) {
          s -= static_cast<double>(n) / static_cast<double>(cd.class_size(j));
        }
        rep.column_residual = std::max(rep.column_residual, std::abs(s));
      }
    }
  }
  std::uint64_t sum_sq = 0;
  rep.degrees_divide   = true;
  for (auto d : t.degrees) {
    sum_sq += d * d;
    rep.degrees_divide = rep.degrees_divide && d > 0 && cd.order() % d == 0;
  }
  rep.degree_sum_ok = sum_sq == cd.order();
  if (rep.row_residual > rep.tolerance) {
    rep.failed_relation = "row orthogonality";
  } else if (rep.column_residual > rep.tolerance) {
    rep.failed_relation = "column orthogonality";
  } else if (!rep.degree_sum_ok) {
    rep.failed_relation = "sum of squared degrees";
  } else if (!rep.degrees_divide) {
    rep.failed_relation = "degrees divide the group order";
  }
  rep.pass = rep.failed_relation.empty();
  return rep;
}

namespace detail {

  // Common eigenvectors of the class matrices over F_p, normalized so the
  // identity-class entry is 1; one per irreducible character.
  inline std::vector<std::vector<std::uint64_t>>
  central_characters_mod_p(ClassData const& cd, modp::Field const& f) {
    auto const  r = cd.class_count();
    modp::Matrix full(r, std::vector<std::uint64_t>(r, 0));
    for (std::size_t i = 0; i < r; ++i) {
      full[i][i] = 1;
    }
    std::vector<modp::Matrix> spaces{full};
    for (std::size_t i = 1; i < r; ++i) {
      bool split = std::all_of(spaces.begin(), spaces.end(),
                               [](auto const& b) { return b[0].size() == 1; });
      if (split) {
        break;
      }
      std::vector<modp::Matrix> next;
      for (auto const& b : spaces) {
        auto const d = b[0].size();
        if (d == 1) {
          next.push_back(b);
          continue;
        }
        auto [be, piv] = modp::column_echelon(b, f);
        modp::Matrix c(d, std::vector<std::uint64_t>(d, 0));
        for (std::size_t row = 0; row < d; ++row) {
          auto const jrow = piv[row];
          for (std::size_t k = 0; k < r; ++k) {
            auto const a = cd.structure_constant(i, jrow, k);
            if (a == 0) {
              continue;
            }
            auto const am = f.reduce(a);
            for (std::size_t col = 0; col < d; ++col) {
              c[row][col] = f.add(c[row][col], f.mul(am, be[k][col]));
            }
          }
        }
        std::size_t total = 0;
        for (auto lambda : modp::roots(modp::charpoly(c, f), f)) {
          auto m = c;
          for (std::size_t t = 0; t < d; ++t) {
            m[t][t] = f.sub(m[t][t], lambda);
          }
          auto ns = modp::nullspace(m, f);
          auto const k = ns.empty() ? 0 : ns[0].size();
          if (k == 0) {
            continue;
          }
          modp::Matrix sub(r, std::vector<std::uint64_t>(k, 0));
          for (std::size_t row = 0; row < r; ++row) {
            for (std::size_t t = 0; t < d; ++t) {
              if (be[row][t] == 0) {
                continue;
              }
              for (std::size_t col = 0; col < k; ++col) {
                sub[row][col]
                    = f.add(sub[row][col], f.mul(be[row][t], ns[t][col]));
              }
            }
          }
          total += k;
          next.push_back(modp::column_echelon(sub, f).first);
        }
        if (total != d) {
          throw InternalConsistencyError(
              "class matrix splitting",
              "class-sum matrix does not diagonalize over F_"
                  + std::to_string(f.prime()));
        }
      }
      spaces = std::move(next);
    }
    std::vector<std::vector<std::uint64_t>> out;
    for (auto const& b : spaces) {
      if (b[0].size() != 1) {
        throw InternalConsistencyError(
            "common eigenspaces",
            "class matrices leave a common eigenspace of dimension > 1");
      }
      std::vector<std::uint64_t> w(r);
      for (std::size_t k = 0; k < r; ++k) {
        w[k] = b[k][0];
      }
      if (w[0] == 0) {
        throw InternalConsistencyError(
            "central character normalization",
            "eigenvector vanishes on the identity class");
      }
      auto const s = f.inv(w[0]);
      for (auto& x : w) {
        x = f.mul(x, s);
      }
      out.push_back(std::move(w));
    }
    return out;
  }

}  // namespace detail

inline CharacterTable character_table(ClassData const& cd) {
  auto const    r = cd.class_count();
  auto const    n = cd.order();
  auto const    e = cd.exponent;
  CharacterTable t;
  t.group_order = n;
  t.exponent    = e;
  t.prime       = modp::dixon_prime(e, n);
  for (std::size_t k = 0; k < r; ++k) {
    t.class_sizes.push_back(cd.class_size(k));
  }
  bool const exact = e <= max_exact_exponent;
  t.provenance     = exact ? Provenance::exact_cyclotomic : Provenance::float_tolerance;
  t.tolerance      = exact ? 0.0 : 1e-9;

  modp::Field const f(t.prime);
  auto const        z = f.pow(modp::primitive_root(f), (t.prime - 1) / e);
  auto const        omegas = detail::central_characters_mod_p(cd, f);
  if (omegas.size() != r) {
    throw InternalConsistencyError("character count",
                                   "number of characters differs from the "
                                   "number of classes");
  }
  auto const inv_e = f.inv(e % t.prime);

  struct Row {
    std::uint64_t                     degree;
    std::vector<std::complex<double>> values;
    std::vector<CyclotomicInt>        exact;
  };
  std::vector<Row> rows;
  for (auto const& w : omegas) {
    // chi(1)^2 = |H| / sum_k omega_k omega_{k*} / |C_k|
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < r; ++k) {
      auto term = f.mul(w[k], w[cd.inverse_class[k]]);
      s = f.add(s, f.mul(term, f.inv(cd.class_size(k) % t.prime)));
    }
    if (s == 0) {
      throw InternalConsistencyError("degree recovery",
                                     "degenerate norm of a central character");
    }
    auto const    d2 = f.mul(n % t.prime, f.inv(s));
    std::uint64_t degree = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
      if ((d * d) % t.prime == d2) {
        degree = d;
        break;
      }
    }
    if (degree == 0) {
      throw InternalConsistencyError("degree recovery",
                                     "no integer degree matches mod "
                                         + std::to_string(t.prime));
    }
    std::vector<std::uint64_t> chi(r);
    for (std::size_t k = 0; k < r; ++k) {
      chi[k] = f.mul(f.mul(w[k], degree % t.prime),
                     f.inv(cd.class_size(k) % t.prime));
    }
    Row row;
    row.degree = degree;
    for (std::size_t k = 0; k < r; ++k) {
      // multiplicity of zeta^l as an eigenvalue, from chi on powers of g_k
      std::vector<std::int64_t> mult(e, 0);
      std::int64_t              total = 0;
      for (std::uint64_t l = 0; l < e; ++l) {
        std::uint64_t acc = 0;
        for (std::uint64_t j = 0; j < e; ++j) {
          auto zp = f.pow(z, ((e - (j * l) % e) % e));
          acc     = f.add(acc, f.mul(chi[cd.power_map[k][j]], zp));
        }
        acc = f.mul(acc, inv_e);
        if (acc > degree) {
          throw InternalConsistencyError(
              "eigenvalue multiplicities",
              "multiplicity out of range while lifting character values");
        }
        mult[l] = static_cast<std::int64_t>(acc);
        total += mult[l];
      }
      if (total != static_cast<std::int64_t>(degree)) {
        throw InternalConsistencyError(
            "eigenvalue multiplicities",
            "multiplicities do not add up to the degree");
      }
      std::complex<double> v = 0;
      for (std::uint64_t l = 0; l < e; ++l) {
        if (mult[l] != 0) {
          v += static_cast<double>(mult[l])
               * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(l)
                                     / static_cast<double>(e));
        }
      }
      if (exact) {
        auto c = CyclotomicInt::from_powers(static_cast<unsigned>(e), mult);
        v      = c.to_complex();
        row.exact.push_back(std::move(c));
      }
      row.values.push_back(v);
    }
    rows.push_back(std::move(row));
  }

  // degree ascending, then value tuple descending (trivial character first)
  auto quant = [](double x) { return std::llround(x * 1e9); };
  std::sort(rows.begin(), rows.end(), [&](Row const& a, Row const& b) {
    if (a.degree != b.degree) {
      return a.degree < b.degree;
    }
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      auto ar = quant(a.values[k].real()), br = quant(b.values[k].real());
      if (ar != br) {
        return ar > br;
      }
      auto ai = quant(a.values[k].imag()), bi = quant(b.values[k].imag());
      if (ai != bi) {
        return ai > bi;
      }
    }
    return false;
  });
  for (auto& row : rows) {
    t.degrees.push_back(row.degree);
    t.values.push_back(std::move(row.values));
    if (exact) {
      t.exact.push_back(std::move(row.exact));
    }
  }

  auto rep = validate_orthogonality(t, cd, 1e-9);
  if (!rep.pass) {
    throw InternalConsistencyError(rep.failed_relation,
                                   "character table failed validation: "
                                       + rep.failed_relation);
  }
  return t;
}

}  // namespace vnfactor
