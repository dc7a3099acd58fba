// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Factor spectra of S(H) for finite H: one atom M_d(C) per irreducible
// character, weighted by the trace of its central projection d^2/|H|.
// Also the verifiers built on top of them: product projections of commuting
// subgroups, measure growth along commuting towers, and the orthonormality
// of group unitaries in an icc group.

#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "characters.hpp"
#include "fc_center.hpp"
#include "group_algebra.hpp"
#include "groups.hpp"
#include "numerical.hpp"
#include "rational.hpp"

namespace vnfactor {

class InconsistencyError : public GroupError {
 public:
  using GroupError::GroupError;
};

struct Atom {
  std::size_t   label     = 0;  // row of the character table
  std::uint64_t dimension = 0;
  Rational      measure;
};

struct FactorSpectrum {
  std::uint64_t     order = 0;
  std::vector<Atom> atoms;

  Rational total_measure() const {
    Rational s = 0;
    for (auto const& a : atoms) {
      s += a.measure;
    }
    return s;
  }
  // measure of the atoms with dimension >= d
  Rational measure_at_least(std::uint64_t d) const {
    Rational s = 0;
    for (auto const& a : atoms) {
      if (a.dimension >= d) {
        s += a.measure;
      }
    }
    return s;
  }
};

inline FactorSpectrum factor_spectrum(CharacterTable const& t) {
  FactorSpectrum s;
  s.order = t.group_order;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto const d = t.degrees[i];
    s.atoms.push_back({i, d,
                       Rational(BigInt(d * d), BigInt(t.group_order))});
  }
  return s;
}

inline FactorSpectrum factor_spectrum(FiniteSubgroup const& h) {
  return factor_spectrum(character_table(class_data(h)));
}

// Measure of the atoms that are not C.
inline Rational nonabelian_measure(FactorSpectrum const& s) {
  return s.measure_at_least(2);
}

inline Rational nonabelian_measure(FiniteSubgroup const& h) {
  return nonabelian_measure(factor_spectrum(h));
}

////////////////////////////////////////////////////////////////////////
// Central projections
////////////////////////////////////////////////////////////////////////

// p_chi = (chi(1)/|H|) sum_h conj(chi(h)) u_h, exact.
inline GroupAlgebraElement<CyclotomicQ>
central_projection_exact(ClassData const& cd, CharacterTable const& t,
                         std::size_t row) {
  if (!t.is_exact()) {
    throw ParameterError("exact central projection needs an exact table");
  }
  if (row >= t.size() || t.group_order != cd.order()) {
    throw DomainMismatch("character does not belong to this subgroup");
  }
  auto const& h     = cd.group;
  auto const  scale = CyclotomicQ(Rational(BigInt(t.degrees[row]),
                                           BigInt(cd.order())));
  std::vector<CyclotomicQ> coeff;
  for (std::size_t k = 0; k < cd.class_count(); ++k) {
    coeff.push_back(scale * to_cyclotomic_q(t.exact[row][k].conj()));
  }
  GroupAlgebraElement<CyclotomicQ> p(h.handle());
  for (std::size_t x = 0; x < h.order(); ++x) {
    p.add_term(h.element(x), coeff[cd.class_of[x]]);
  }
  return p;
}

inline GroupAlgebraElement<std::complex<double>>
central_projection(ClassData const& cd, CharacterTable const& t, std::size_t row) {
  if (row >= t.size() || t.group_order != cd.order()) {
    throw DomainMismatch("character does not belong to this subgroup");
  }
  auto const& h     = cd.group;
  double const scale = static_cast<double>(t.degrees[row])
                       / static_cast<double>(cd.order());
  GroupAlgebraElement<std::complex<double>> p(h.handle());
  for (std::size_t x = 0; x < h.order(); ++x) {
    p.add_term(h.element(x), scale * std::conj(t.values[row][cd.class_of[x]]));
  }
  return p;
}

////////////////////////////////////////////////////////////////////////
// Product projections of commuting subgroups
////////////////////////////////////////////////////////////////////////

struct SupportedAtom {
  std::size_t   label     = 0;
  std::uint64_t dimension = 0;
  std::string   weight;          // tau(p0 p1 p_psi), exact or float text
  double        weight_value = 0.0;
  bool          meets_bound  = false;
};

struct ProductProjectionReport {
  std::uint64_t order0 = 0, order1 = 0, order = 0;
  std::uint64_t n0 = 1, n1 = 1;
  bool          exact = true;
  // p0, p1 are projections, they commute, and p0 p1 is central in S(H)
  double p0_residual       = 0.0;
  double p1_residual       = 0.0;
  double commute_residual  = 0.0;
  double central_residual  = 0.0;
  std::string product_trace;  // tau(p0 p1)
  std::vector<SupportedAtom> supported;
  std::vector<std::uint64_t> spectrum_degrees;  // of H
  // numerical witness: matrix units of the supported blocks of H
  bool   numeric_checked     = false;
  double unit_residual       = 0.0;
  std::vector<std::uint64_t> numeric_supported_dims;
  bool   numeric_agrees      = false;
  bool   pass                = false;
};

namespace detail {

  template <typename S>
  GroupAlgebraElement<S> sum_projections(ClassData const& cd,
                                         CharacterTable const& t, std::uint64_t n) {
    GroupAlgebraElement<S> p(cd.group.handle());
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.degrees[i] < n) {
        continue;
      }
      if constexpr (std::is_same_v<S, CyclotomicQ>) {
        p = p + central_projection_exact(cd, t, i);
      } else {
        p = p + central_projection(cd, t, i);
      }
    }
    return p;
  }

  template <typename S>
  double residual(GroupAlgebraElement<S> const& a, GroupAlgebraElement<S> const& b) {
    auto d = a - b;
    if constexpr (std::is_same_v<S, CyclotomicQ>) {
      return d.is_zero() ? 0.0 : std::max(1e-300, max_abs_coefficient(d));
    } else {
      return max_abs_coefficient(d);
    }
  }

  template <typename S>
  std::pair<std::string, double> scalar_text(S const& x) {
    if constexpr (std::is_same_v<S, CyclotomicQ>) {
      auto q = x.as_scalar();
      auto c = x.to_complex();
      return {q ? to_string(*q) : x.to_string(), c.real()};
    } else {
      return {std::to_string(x.real()), x.real()};
    }
  }

  template <typename S>
  void fill_product_report(ProductProjectionReport& rep, ClassData const& cd0,
                           CharacterTable const& t0, ClassData const& cd1,
                           CharacterTable const& t1, ClassData const& cd,
                           CharacterTable const& t, double tol) {
    auto const& h  = cd.group.handle();
    auto const  p0 = sum_projections<S>(cd0, t0, rep.n0);
    auto const  p1 = sum_projections<S>(cd1, t1, rep.n1);
    rep.p0_residual = std::max(residual(p0 * p0, p0), residual(p0.star(), p0));
    rep.p1_residual = std::max(residual(p1 * p1, p1), residual(p1.star(), p1));
    auto const q    = p0 * p1;
    rep.commute_residual = residual(q, p1 * p0);
    rep.central_residual = 0.0;
    for (auto const& g : cd.group.generators()) {
      auto u = GroupAlgebraElement<S>::basis(h, g);
      rep.central_residual = std::max(rep.central_residual, residual(u * q, q * u));
    }
    rep.product_trace = scalar_text(trace(q)).first;

    // tau(q p_psi) = (psi(1)/|H|) sum_h q_h psi(h)
    for (std::size_t i = 0; i < t.size(); ++i) {
      S acc(0);
      for (auto const& [g, c] : q.support()) {
        auto x = cd.group.index_of(g);
        if (!x) {
          throw InternalConsistencyError("product support",
                                         "p0 p1 is not supported in H");
        }
        auto const k = cd.class_of[*x];
        if constexpr (std::is_same_v<S, CyclotomicQ>) {
          acc = acc + c * to_cyclotomic_q(t.exact[i][k]);
        } else {
          acc = acc + c * t.values[i][k];
        }
      }
      if constexpr (std::is_same_v<S, CyclotomicQ>) {
        acc = acc * CyclotomicQ(Rational(BigInt(t.degrees[i]), BigInt(cd.order())));
        if (acc.is_zero()) {
          continue;
        }
      } else {
        acc *= static_cast<double>(t.degrees[i]) / static_cast<double>(cd.order());
        if (std::abs(acc) <= tol) {
          continue;
        }
      }
      SupportedAtom a;
      a.label               = i;
      a.dimension           = t.degrees[i];
      std::tie(a.weight, a.weight_value) = scalar_text(acc);
      a.meets_bound         = a.dimension >= rep.n0 * rep.n1;
      rep.supported.push_back(std::move(a));
    }

    if (cd.order() <= max_numerical_order) {
      auto const nd = numerical_decomposition(cd.group, 0);
      RegularRep rr(cd.group);
      Eigen::MatrixXcd const qm = rr.image(q);
      rep.numeric_checked = true;
      for (auto const& b : nd.blocks) {
        double const w = rr.normalized_trace(qm * b.projection);
        if (std::abs(w) > 1e-6) {
          rep.numeric_supported_dims.push_back(b.dimension);
          rep.unit_residual = std::max(rep.unit_residual, b.units.max_residual());
        }
      }
      std::vector<std::uint64_t> exact_dims;
      for (auto const& a : rep.supported) {
        exact_dims.push_back(a.dimension);
      }
      std::sort(exact_dims.begin(), exact_dims.end());
      std::sort(rep.numeric_supported_dims.begin(), rep.numeric_supported_dims.end());
      rep.numeric_agrees = exact_dims == rep.numeric_supported_dims;
    }
  }

}  // namespace detail

// Checks that p0 p1 (sums of central projections of H0, H1 over characters
// of degree >= n0, n1) is a central projection of S(H) supported only on
// atoms of dimension >= n0 n1, H = <H0, H1>.
inline ProductProjectionReport
product_projection_spectrum(GroupHandle const& g, std::vector<Element> const& gens0,
                            std::vector<Element> const& gens1, std::uint64_t n0,
                            std::uint64_t n1, double tolerance = 1e-9,
                            std::size_t budget = default_max_character_order) {
  if (n0 < 1 || n1 < 1) {
    throw ParameterError("dimension thresholds must be at least 1");
  }
  auto const h0 = FiniteSubgroup::closure_of(g, gens0, budget);
  auto const h1 = FiniteSubgroup::closure_of(g, gens1, budget);
  for (auto const& a : h0.elements()) {
    for (auto const& b : h1.elements()) {
      if (!g.commute(a, b)) {
        throw PreconditionViolation("subgroups do not commute: " + g.format(a)
                                    + " and " + g.format(b));
      }
    }
  }
  auto all = gens0;
  all.insert(all.end(), gens1.begin(), gens1.end());
  auto const h = FiniteSubgroup::closure_of(g, all, budget);

  auto const cd0 = class_data(h0);
  auto const cd1 = class_data(h1);
  auto const cd  = class_data(h);
  auto const t0  = character_table(cd0);
  auto const t1  = character_table(cd1);
  auto const t   = character_table(cd);

  ProductProjectionReport rep;
  rep.order0 = h0.order();
  rep.order1 = h1.order();
  rep.order  = h.order();
  rep.n0     = n0;
  rep.n1     = n1;
  rep.spectrum_degrees = t.degrees;
  rep.exact  = t0.is_exact() && t1.is_exact() && t.is_exact();
  if (rep.exact) {
    detail::fill_product_report<CyclotomicQ>(rep, cd0, t0, cd1, t1, cd, t, tolerance);
  } else {
    detail::fill_product_report<std::complex<double>>(rep, cd0, t0, cd1, t1, cd, t,
                                                      tolerance);
  }
  double const tol = rep.exact ? 0.0 : tolerance;
  bool ok = rep.p0_residual <= tol && rep.p1_residual <= tol
            && rep.commute_residual <= tol && rep.central_residual <= tol
            && !rep.supported.empty();
  for (auto const& a : rep.supported) {
    ok = ok && a.meets_bound;
  }
  if (rep.numeric_checked) {
    ok = ok && rep.numeric_agrees && rep.unit_residual <= 1e-6;
  }
  rep.pass = ok;
  return rep;
}

////////////////////////////////////////////////////////////////////////
// Growth along commuting towers
////////////////////////////////////////////////////////////////////////

struct GrowthStep {
  std::size_t   n     = 0;  // number of tower members used
  std::uint64_t order = 0;  // |closure(G_1 ... G_n)|
  Rational      measure;
};

struct GrowthResult {
  bool                    found = false;
  std::size_t             n     = 0;
  Rational                measure;
  Rational                threshold;      // max(0, 1/2 - eps)
  std::uint64_t           dim_threshold = 0;  // 2^(2^(k-1))
  unsigned                k             = 1;
  Rational                epsilon;
  std::vector<GrowthStep> history;
  std::string             reason;  // why no witness, when !found
};

inline std::uint64_t growth_dimension_threshold(unsigned k) {
  if (k < 1 || k > 6) {
    throw ParameterError("level k must be in [1, 6]");
  }
  return std::uint64_t(1) << (std::uint64_t(1) << (k - 1));
}

inline Rational growth_threshold(Rational const& epsilon) {
  Rational t = Rational(1, 2) - epsilon;
  return t < 0 ? Rational(0) : t;
}

// Measure of atoms with dimension >= 2^(2^(k-1)) in S(closure(G_1..G_n)).
inline GrowthStep growth_step(GroupHandle const& g,
                              std::vector<std::vector<Element>> const& tower,
                              std::size_t n, unsigned k,
                              std::size_t max_order = default_max_character_order) {
  std::vector<Element> gens;
  for (std::size_t i = 0; i < n; ++i) {
    gens.insert(gens.end(), tower.at(i).begin(), tower.at(i).end());
  }
  if (std::holds_alternative<BudgetExceeded>(generate_closure(g, gens, max_order))) {
    throw RequiresFinite("closure of " + std::to_string(n)
                         + " tower members exceeds order "
                         + std::to_string(max_order));
  }
  auto const s = factor_spectrum(FiniteSubgroup::closure_of(g, gens, max_order));
  return {n, s.order, s.measure_at_least(growth_dimension_threshold(k))};
}

// Smallest N with measure{dim >= 2^(2^(k-1))} > max(0, 1/2 - eps) for the
// closure of the first N tower members.
inline GrowthResult growth_search(GroupHandle const& g,
                                  std::vector<std::vector<Element>> const& tower,
                                  unsigned k, Rational const& epsilon,
                                  std::size_t max_order = default_max_character_order) {
  if (!(epsilon > 0 && epsilon < 1)) {
    throw ParameterError("epsilon must lie strictly between 0 and 1");
  }
  GrowthResult r;
  r.k             = k;
  r.epsilon       = epsilon;
  r.dim_threshold = growth_dimension_threshold(k);
  r.threshold     = growth_threshold(epsilon);
  for (std::size_t i = 0; i < tower.size(); ++i) {
    for (std::size_t j = i + 1; j < tower.size(); ++j) {
      for (auto const& a : tower[i]) {
        for (auto const& b : tower[j]) {
          if (!g.commute(a, b)) {
            throw PreconditionViolation(
                "tower members " + std::to_string(i + 1) + " and "
                + std::to_string(j + 1) + " do not commute: " + g.format(a)
                + " and " + g.format(b));
          }
        }
      }
    }
  }
  for (std::size_t n = 1; n <= tower.size(); ++n) {
    GrowthStep step;
    try {
      step = growth_step(g, tower, n, k, max_order);
    } catch (RequiresFinite const& e) {
      r.reason = e.what();
      return r;
    } catch (ParameterError const& e) {
      r.reason = e.what();
      return r;
    }
    r.history.push_back(step);
    if (step.measure > r.threshold) {
      r.found   = true;
      r.n       = n;
      r.measure = step.measure;
      return r;
    }
  }
  r.reason = "no witness within the " + std::to_string(tower.size())
             + " tower members supplied";
  return r;
}

////////////////////////////////////////////////////////////////////////
// icc groups: the unitaries u_g are orthonormal in the single factor
////////////////////////////////////////////////////////////////////////

struct IccReport {
  std::size_t          count = 0;
  std::vector<Element> elements;
  bool                 identity_gram = false;
  std::size_t          off_diagonal_nonzero = 0;
  std::size_t          diagonal_mismatch    = 0;
  std::size_t          class_budget         = 0;
  std::size_t          not_fc_count         = 0;  // non-identity elements
};

inline IccReport icc_orthonormality_check(GroupHandle const& g, std::size_t n,
                                          std::size_t class_budget = default_class_budget) {
  if (n < 1) {
    throw ParameterError("sample size must be at least 1");
  }
  IccReport rep;
  rep.count        = n;
  rep.class_budget = class_budget;
  rep.elements     = enumerate_elements(g, n);
  for (auto const& x : rep.elements) {
    if (g.is_identity(x)) {
      continue;
    }
    auto v = fc_verdict(g, x, class_budget);
    if (v.is_fc()) {
      throw InconsistencyError("element " + g.format(x)
                               + " has a finite conjugacy class of size "
                               + std::to_string(v.class_size)
                               + "; the group is not icc");
    }
    ++rep.not_fc_count;
  }
  auto const& md = g.metadata();
  if (md.fc_center && *md.fc_center != "trivial") {
    throw InconsistencyError("family metadata declares FC-center '"
                             + *md.fc_center + "'; the group is not icc");
  }
  // tau(u_a u_b*) = [a b^-1 = e]
  for (std::size_t i = 0; i < rep.elements.size(); ++i) {
    for (std::size_t j = 0; j < rep.elements.size(); ++j) {
      auto const a  = GroupAlgebraElement<Rational>::basis(g, rep.elements[i]);
      auto const b  = GroupAlgebraElement<Rational>::basis(g, rep.elements[j]);
      auto const ip = trace(a * b.star());
      if (i == j && ip != 1) {
        ++rep.diagonal_mismatch;
      }
      if (i != j && ip != 0) {
        ++rep.off_diagonal_nonzero;
      }
    }
  }
  rep.identity_gram = rep.off_diagonal_nonzero == 0 && rep.diagonal_mismatch == 0;
  return rep;
}

}  // namespace vnfactor
