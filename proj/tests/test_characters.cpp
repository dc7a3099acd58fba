#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

#include <vnfactor/characters.hpp>
#include <vnfactor/cyclotomic.hpp>
#include <vnfactor/group_spec.hpp>
#include <vnfactor/modp.hpp>

#include "oracles.hpp"

using namespace vnfactor;

namespace {

CharacterTable table_of(nlohmann::json const& spec) {
  return character_table(class_data(construct_group(spec)));
}

std::vector<std::uint64_t> sorted(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Independent float check of both relations straight from the values.
double float_residual(CharacterTable const& t, ClassData const& cd) {
  auto const r = t.size();
  double     worst = 0.0;
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) {
      std::complex<double> s = 0.0;
      for (std::size_t j = 0; j < r; ++j) {
        s += static_cast<double>(cd.class_size(j)) * t.values[a][j] * std::conj(t.values[b][j]);
      }
      worst = std::max(worst, std::abs(s - (a == b ? static_cast<double>(cd.order()) : 0.0)));
      std::complex<double> c = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        c += t.values[i][a] * std::conj(t.values[i][b]);
      }
      auto const want = a == b ? static_cast<double>(cd.order()) / static_cast<double>(cd.class_size(a)) : 0.0;
      worst = std::max(worst, std::abs(c - want));
    }
  }
  return worst;
}

}  // namespace

TEST(ClassData, SymmetricThree) {
  auto cd = class_data(construct_group(specs::symmetric(3)));
  ASSERT_EQ(cd.class_count(), 3u);
  EXPECT_EQ(cd.class_size(0), 1u);
  std::vector<std::uint64_t> sizes{cd.class_size(0), cd.class_size(1), cd.class_size(2)};
  EXPECT_EQ(sorted(sizes), (std::vector<std::uint64_t>{1, 2, 3}));
  for (std::size_t k = 0; k < 3; ++k) {
    auto const ord = cd.element_orders[k];
    EXPECT_EQ(cd.class_size(k), ord == 1 ? 1u : ord == 2 ? 3u : 2u);
  }
  EXPECT_EQ(cd.exponent, 6u);
}

TEST(ClassData, CyclicFourIsAllSingletons) {
  auto cd = class_data(construct_group(specs::cyclic(4)));
  ASSERT_EQ(cd.class_count(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(cd.class_size(k), 1u);
  }
}

// Classes are listed in first-appearance order; the expected sizes are
// compared as a multiset.
TEST(ClassData, QuaternionClassSizes) {
  auto cd = class_data(construct_group(specs::quaternion8()));
  std::vector<std::uint64_t> sizes;
  for (std::size_t k = 0; k < cd.class_count(); ++k) {
    sizes.push_back(cd.class_size(k));
  }
  EXPECT_EQ(sorted(sizes), (std::vector<std::uint64_t>{1, 1, 2, 2, 2}));
  EXPECT_EQ(cd.class_size(0), 1u);
}

TEST(ClassData, InfiniteGroupRequiresFinite) {
  EXPECT_THROW(class_data(construct_group(specs::free(2))), RequiresFinite);
  EXPECT_THROW(class_data(construct_group(specs::dihedral_infinite())), RequiresFinite);
}

TEST(ClassData, OrderCapIsEnforced) {
  EXPECT_THROW(class_data(construct_group(specs::symmetric(5)), 100), ParameterError);
}

TEST(Property, StructureConstantsAreConsistent) {
  for (auto const& e : testing_support::small_corpus(64)) {
    auto cd = class_data(construct_group(e.spec));
    auto const r = cd.class_count();
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        std::int64_t s = 0;
        for (std::size_t k = 0; k < r; ++k) {
          s += cd.structure_constant(i, j, k) * static_cast<std::int64_t>(cd.class_size(k));
          if (i == 0) {
            EXPECT_EQ(cd.structure_constant(0, j, k), j == k ? 1 : 0) << e.name;
          }
        }
        EXPECT_EQ(s, static_cast<std::int64_t>(cd.class_size(i) * cd.class_size(j))) << e.name;
      }
    }
  }
}

TEST(Property, ClassesMatchBruteForcePartition) {
  for (auto const& e : testing_support::small_corpus(64)) {
    auto cd    = class_data(construct_group(e.spec));
    auto brute = testing_support::brute_classes(cd.group);
    ASSERT_EQ(brute.size(), cd.class_count()) << e.name;
    for (auto const& b : brute) {
      auto const k = cd.class_of[*b.begin()];
      EXPECT_EQ(std::set<std::size_t>(cd.classes[k].begin(), cd.classes[k].end()), b) << e.name;
    }
  }
}

TEST(CharacterTable, TrivialGroup) {
  auto t = table_of(specs::cyclic(1));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.degrees, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(t.exact[0][0], CyclotomicInt(1));
}

TEST(CharacterTable, CyclicTwo) {
  auto t = table_of(specs::cyclic(2));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.exact[0], (std::vector<CyclotomicInt>{1, 1}));
  EXPECT_EQ(t.exact[1], (std::vector<CyclotomicInt>{1, -1}));
}

TEST(CharacterTable, SymmetricThree) {
  auto cd = class_data(construct_group(specs::symmetric(3)));
  auto t  = character_table(cd);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.degrees, (std::vector<std::uint64_t>{1, 1, 2}));
  EXPECT_TRUE(t.is_exact());
  for (std::size_t k = 0; k < 3; ++k) {
    auto const ord  = cd.element_orders[k];
    auto const want = ord == 1 ? 2 : ord == 2 ? 0 : -1;
    EXPECT_EQ(t.exact[2][k], CyclotomicInt(want));
    EXPECT_EQ(t.exact[0][k], CyclotomicInt(1));
    EXPECT_EQ(t.exact[1][k], CyclotomicInt(ord == 2 ? -1 : 1));
  }
}

TEST(CharacterTable, QuaternionDegrees) {
  auto t = table_of(specs::quaternion8());
  EXPECT_EQ(t.degrees, (std::vector<std::uint64_t>{1, 1, 1, 1, 2}));
}

TEST(CharacterTable, CentralProductOfQuaternions) {
  auto t = table_of(specs::central_product(specs::quaternion8(), specs::quaternion8()));
  std::vector<std::uint64_t> want(16, 1);
  want.push_back(4);
  EXPECT_EQ(t.degrees, want);
}

TEST(CharacterTable, SymmetricFiveDegrees) {
  auto t = table_of(specs::symmetric(5));
  EXPECT_EQ(t.degrees, (std::vector<std::uint64_t>{1, 1, 4, 4, 5, 5, 6}));
}

TEST(Orthogonality, ExactTablesHaveZeroResidual) {
  for (auto spec : {specs::symmetric(3), specs::cyclic(1), specs::dihedral(4)}) {
    auto cd  = class_data(construct_group(spec));
    auto t   = character_table(cd);
    auto rep = validate_orthogonality(t, cd);
    EXPECT_TRUE(rep.pass);
    EXPECT_TRUE(rep.exact);
    EXPECT_EQ(rep.row_residual, 0.0);
    EXPECT_EQ(rep.column_residual, 0.0);
  }
}

TEST(Orthogonality, FlippedSignFails) {
  auto cd = class_data(construct_group(specs::symmetric(3)));
  auto t  = character_table(cd);
  std::size_t k = 0;
  while (cd.element_orders[k] != 3) {
    ++k;
  }
  t.exact[2][k]  = -t.exact[2][k];
  t.values[2][k] = -t.values[2][k];
  auto rep = validate_orthogonality(t, cd);
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.failed_relation.empty());
  EXPECT_GE(std::max(rep.row_residual, rep.column_residual), 1.0);

  t.exact.clear();
  t.provenance = Provenance::float_tolerance;
  t.tolerance  = 1e-9;
  auto frep = validate_orthogonality(t, cd);
  EXPECT_FALSE(frep.pass);
  EXPECT_GE(std::max(frep.row_residual, frep.column_residual), 1.0);
}

TEST(Property, TablesPassIndependentChecksAcrossCorpus) {
  for (auto const& e : testing_support::finite_corpus()) {
    auto cd = class_data(construct_group(e.spec));
    auto t  = character_table(cd);
    ASSERT_EQ(t.size(), cd.class_count()) << e.name;
    EXPECT_LT(float_residual(t, cd), 1e-9) << e.name;
    std::uint64_t sum = 0;
    std::size_t   linear = 0;
    for (auto d : t.degrees) {
      EXPECT_GE(d, 1u);
      EXPECT_EQ(cd.order() % d, 0u) << e.name;
      sum += d * d;
      linear += d == 1;
    }
    EXPECT_EQ(sum, cd.order()) << e.name;
    EXPECT_TRUE(std::is_sorted(t.degrees.begin(), t.degrees.end())) << e.name;
    EXPECT_EQ(linear * testing_support::brute_derived_order(cd.group), cd.order()) << e.name;
    EXPECT_EQ(t.exact[0], std::vector<CyclotomicInt>(cd.class_count(), CyclotomicInt(1))) << e.name;
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t k = 0; k < t.size(); ++k) {
        EXPECT_EQ(t.exact[i][cd.inverse_class[k]], t.exact[i][k].conj()) << e.name;
      }
    }
  }
}

// chi(g) summed over a class times chi(h) class sum equals the central
// character relation |C_i| chi(g_i) |C_j| chi(g_j) = chi(1) sum_k a_ijk |C_k| chi(g_k).
TEST(Property, CentralCharacterRelation) {
  for (auto const& e : testing_support::small_corpus(48)) {
    auto cd = class_data(construct_group(e.spec));
    auto t  = character_table(cd);
    auto const r = cd.class_count();
    for (std::size_t x = 0; x < r; ++x) {
      auto const deg = CyclotomicInt(static_cast<std::int64_t>(t.degrees[x]));
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
          auto lhs = CyclotomicInt(static_cast<std::int64_t>(cd.class_size(i) * cd.class_size(j)))
                     * t.exact[x][i] * t.exact[x][j];
          CyclotomicInt rhs;
          for (std::size_t k = 0; k < r; ++k) {
            rhs += CyclotomicInt(cd.structure_constant(i, j, k)
                                 * static_cast<std::int64_t>(cd.class_size(k)))
                   * t.exact[x][k];
          }
          EXPECT_EQ(lhs, deg * rhs) << e.name;
        }
      }
    }
  }
}

TEST(Cyclotomic, Arithmetic) {
  auto i = CyclotomicInt::root_of_unity(4, 1);
  EXPECT_EQ(i * i, CyclotomicInt(-1));
  auto w = CyclotomicInt::root_of_unity(3, 1);
  EXPECT_EQ(CyclotomicInt(1) + w + w * w, CyclotomicInt(0));
  EXPECT_EQ(w.conj(), w * w);
  auto z = CyclotomicInt::root_of_unity(12, 5);
  EXPECT_NEAR(std::abs(z.to_complex() - std::polar(1.0, 2 * M_PI * 5 / 12)), 0.0, 1e-12);
  EXPECT_EQ(z.lifted(24), z);
  EXPECT_EQ((i + w).as_scalar(), std::nullopt);
  EXPECT_EQ((w + w.conj()).as_scalar(), std::optional<std::int64_t>(-1));
}

TEST(Cyclotomic, RandomRingLaws) {
  testing_support::Gen gen(41);
  auto rnd = [&] {
    std::vector<std::int64_t> c(12);
    for (auto& x : c) {
      x = gen.integer(-3, 3);
    }
    return CyclotomicInt::from_powers(12, c);
  };
  for (int n = 0; n < 300; ++n) {
    auto a = rnd(), b = rnd(), c = rnd();
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ((a * b).conj(), a.conj() * b.conj());
    EXPECT_NEAR(std::abs((a * b).to_complex() - a.to_complex() * b.to_complex()), 0.0, 1e-9);
  }
}

TEST(ModP, PrimeSelectionAndRoots) {
  EXPECT_EQ(modp::dixon_prime(6, 6), 7u);
  EXPECT_EQ(modp::dixon_prime(2, 1), 3u);
  auto p = modp::dixon_prime(60, 120);
  EXPECT_TRUE(modp::is_prime(p));
  EXPECT_EQ(p % 60, 1u);
  EXPECT_GT(p * p, 480u);

  modp::Field f(13);
  EXPECT_EQ(f.mul(f.inv(5), 5), 1u);
  auto g = modp::primitive_root(f);
  for (std::uint64_t k = 1; k < 12; ++k) {
    EXPECT_NE(f.pow(g, k), 1u);
  }
  // (x - 2)(x - 5) = x^2 - 7x + 10
  modp::Matrix a{{2, 1}, {0, 5}};
  auto cp = modp::charpoly(a, f);
  EXPECT_EQ(cp, (std::vector<std::uint64_t>{10, f.neg(7), 1}));
  EXPECT_EQ(modp::roots(cp, f), (std::vector<std::uint64_t>{2, 5}));

  modp::Matrix s{{1, 1}, {1, 1}};
  auto ns = modp::nullspace(s, f);
  ASSERT_EQ(ns.size(), 2u);
  ASSERT_EQ(ns[0].size(), 1u);
  EXPECT_EQ(f.add(ns[0][0], ns[1][0]), 0u);
}
