#include <gtest/gtest.h>

#include <set>

#include <vnfactor/group_spec.hpp>
#include <vnfactor/groups.hpp>

#include "oracles.hpp"

using namespace vnfactor;
using testing_support::Gen;

namespace {

Element perm(GroupHandle const& h, Code images) {
  return h.element(std::move(images));
}

std::vector<GroupHandle> law_families() {
  std::vector<GroupHandle> out;
  for (auto const& e : testing_support::finite_corpus()) {
    out.push_back(construct_group(e.spec));
  }
  out.push_back(construct_group(specs::free(2)));
  out.push_back(construct_group(specs::dihedral_infinite()));
  out.push_back(construct_group(specs::restricted_sum(specs::symmetric(3))));
  out.push_back(construct_group(specs::restricted_sum(specs::quaternion8())));
  return out;
}

Element random_element(GroupHandle const& h, Gen& gen) {
  auto const n = h.generator_count().value_or(6);
  return gen.word(h, static_cast<std::size_t>(gen.integer(0, 8)), std::max<std::size_t>(n, 1));
}

}  // namespace

TEST(Construct, SymmetricThreeHasOrderSixAndStandardGenerators) {
  auto h = construct_group(specs::symmetric(3));
  EXPECT_EQ(h.finiteness().order, 6u);
  ASSERT_EQ(h.generator_count(), 2u);
  EXPECT_EQ(h.format(h.generator(0)), "(1 2)");
  EXPECT_EQ(h.format(h.generator(1)), "(1 2 3)");
}

TEST(Construct, CyclicOneIsTrivial) {
  auto h = construct_group(specs::cyclic(1));
  EXPECT_EQ(h.finiteness().order, 1u);
  EXPECT_EQ(FiniteSubgroup::whole(h).order(), 1u);
}

TEST(Construct, RestrictedSumIsInfiniteWithFinitelySupportedElements) {
  auto h = construct_group(specs::restricted_sum(specs::symmetric(3)));
  EXPECT_EQ(h.finiteness().kind, Finiteness::Kind::infinite);
  auto const& r = dynamic_cast<RestrictedSumGroup const&>(h.group());
  auto s3       = construct_group(specs::symmetric(3));
  auto a        = h.element(r.embed(7, s3.generator(0).code()));
  EXPECT_EQ(r.entries(a.code()).size(), 1u);
  EXPECT_EQ(r.entries(a.code())[0].first, 7);
}

TEST(Construct, MalformedSpecNamesTheField) {
  try {
    construct_group({{"family", "symmetric"}, {"n", "three"}});
    FAIL() << "expected SpecError";
  } catch (SpecError const& e) {
    EXPECT_EQ(e.field(), "n");
  }
  try {
    construct_group(specs::product({specs::symmetric(3), {{"family", "cyclic"}}}));
    FAIL() << "expected SpecError";
  } catch (SpecError const& e) {
    EXPECT_EQ(e.field(), "factors[1].n");
  }
  try {
    construct_group({{"family", "cyclic"}, {"n", 3}, {"rank", 2}});
    FAIL() << "expected SpecError";
  } catch (SpecError const& e) {
    EXPECT_EQ(e.field(), "rank");
  }
  try {
    nlohmann::json bad = specs::dihedral_infinite();
    bad["metadata"]["abelian_by_finite"]["generators"] = nlohmann::json::array({nlohmann::json::array({1, 0, 3})});
    bad["metadata"]["abelian_by_finite"]["index"]      = 2;
    construct_group(bad);
    FAIL() << "expected SpecError";
  } catch (SpecError const& e) {
    EXPECT_EQ(e.field(), "metadata.abelian_by_finite.generators[0]");
  }
}

TEST(Construct, UnsupportedFamilyIsExplicit) {
  EXPECT_THROW(construct_group({{"family", "monster"}}), UnsupportedFamily);
}

TEST(Construct, CayleyTableIsValidated) {
  EXPECT_THROW(construct_group(specs::cayley({{0, 1}, {1, 1}})), SpecError);
  auto h = construct_group(specs::cayley({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}));
  EXPECT_EQ(h.finiteness().order, 3u);
}

TEST(Construct, CentralProductOfQuaternionsHasOrder32) {
  auto h = construct_group(specs::central_product(specs::quaternion8(), specs::quaternion8()));
  EXPECT_EQ(FiniteSubgroup::whole(h).order(), 32u);
}

TEST(GroupLaw, Examples) {
  auto s3 = construct_group(specs::symmetric(3));
  auto t  = perm(s3, {1, 0, 2});
  auto c  = perm(s3, {1, 2, 0});
  EXPECT_TRUE(s3.is_identity(group_law(s3, t, t, GroupOp::mul)));
  EXPECT_EQ(s3.format(group_law(s3, c, c, GroupOp::inv)), "(1 3 2)");

  auto f2 = construct_group(specs::free(2));
  auto x  = f2.element({1});
  auto b  = f2.element({-1, 2});
  EXPECT_EQ(f2.format(f2.mul(x, b)), "y");
}

TEST(GroupLaw, CrossHandleElementsAreRejected) {
  auto a = construct_group(specs::symmetric(3));
  auto b = construct_group(specs::symmetric(3));
  EXPECT_THROW(a.mul(a.generator(0), b.generator(0)), DomainMismatch);
}

TEST(Conjugate, Examples) {
  auto s3 = construct_group(specs::symmetric(3));
  auto t  = perm(s3, {1, 0, 2});
  auto c  = perm(s3, {1, 2, 0});
  EXPECT_TRUE(s3.is_identity(s3.conjugate(s3.identity(), c)));
  EXPECT_EQ(s3.format(s3.conjugate(t, c)), "(2 3)");

  auto d = construct_group(specs::dihedral_infinite());
  for (std::int64_t n : {-3, 0, 1, 5}) {
    EXPECT_EQ(d.conjugate(d.element({n, 0}), d.element({0, 1})).code(), (Code{-n, 0}));
  }
}

// Under the composition (ab)(x) = a(b(x)) that makes (1 2 3)(1 2)(1 2 3)^-1
// equal to (2 3), the commutator of (1 2) and (1 3) is the 3-cycle (1 2 3).
TEST(Commutator, Examples) {
  auto s3 = construct_group(specs::symmetric(3));
  auto a  = perm(s3, {1, 0, 2});
  auto b  = perm(s3, {2, 1, 0});
  EXPECT_EQ(s3.format(s3.commutator(a, b)), "(1 2 3)");
  EXPECT_EQ(s3.format(s3.commutator(b, a)), "(1 3 2)");
  EXPECT_TRUE(s3.is_identity(s3.commutator(a, a)));

  auto sum = construct_group(specs::restricted_sum(specs::symmetric(3)));
  auto const& r = dynamic_cast<RestrictedSumGroup const&>(sum.group());
  auto x = sum.element(r.embed(0, a.code()));
  auto y = sum.element(r.embed(3, b.code()));
  EXPECT_TRUE(sum.is_identity(sum.commutator(x, y)));
}

TEST(Closure, Examples) {
  auto s3  = construct_group(specs::symmetric(3));
  auto res = generate_closure(s3, {s3.generator(0), s3.generator(1)});
  ASSERT_TRUE(std::holds_alternative<ElementSet>(res));
  EXPECT_EQ(std::get<ElementSet>(res).size(), 6u);

  auto id = generate_closure(s3, {s3.identity()});
  ASSERT_TRUE(std::holds_alternative<ElementSet>(id));
  EXPECT_EQ(std::get<ElementSet>(id).size(), 1u);

  auto f2  = construct_group(specs::free(2));
  auto big = generate_closure(f2, {f2.generator(0)}, 10);
  ASSERT_TRUE(std::holds_alternative<BudgetExceeded>(big));
  EXPECT_EQ(std::get<BudgetExceeded>(big).budget, 10u);
  EXPECT_GT(std::get<BudgetExceeded>(big).partial_count, 10u);

  EXPECT_THROW(generate_closure(s3, {}, 0), ParameterError);
}

TEST(Closure, IdempotentAndConjugationStable) {
  Gen gen(11);
  for (auto const& e : testing_support::small_corpus(64)) {
    auto h = construct_group(e.spec);
    auto g = FiniteSubgroup::whole(h);
    std::vector<Element> gens{gen.element(g), gen.element(g)};
    auto sub = FiniteSubgroup::closure_of(h, gens);
    auto again = FiniteSubgroup::closure_of(h, sub.elements());
    EXPECT_EQ(again.order(), sub.order()) << e.name;
    for (auto const& a : sub.elements()) {
      for (auto const& b : sub.elements()) {
        EXPECT_TRUE(sub.contains(h.conjugate(a, b))) << e.name;
      }
    }
  }
}

TEST(Enumerate, Examples) {
  auto s3  = construct_group(specs::symmetric(3));
  auto all = enumerate_elements(s3, 6);
  EXPECT_EQ(std::set<Element>(all.begin(), all.end()).size(), 6u);
  EXPECT_EQ(enumerate_elements(s3, 100).size(), 6u);

  auto triv = construct_group(specs::cyclic(1));
  auto one  = enumerate_elements(triv, 5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(triv.is_identity(one[0]));

  auto f2    = construct_group(specs::free(2));
  auto first = enumerate_elements(f2, 5);
  std::vector<std::string> names;
  for (auto const& x : first) {
    names.push_back(f2.format(x));
  }
  EXPECT_EQ(names, (std::vector<std::string>{"e", "x", "x^-1", "y", "y^-1"}));
}

TEST(Enumerate, PrefixStable) {
  auto h = construct_group(specs::restricted_sum(specs::quaternion8()));
  auto a = enumerate_elements(h, 40);
  auto b = enumerate_elements(h, 90);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
}

TEST(Enumerate, FiniteOrderMatchesHint) {
  for (auto const& e : testing_support::finite_corpus()) {
    auto h   = construct_group(e.spec);
    auto all = enumerate_elements(h, 100000);
    EXPECT_EQ(all.size(), h.finiteness().order) << e.name;
    EXPECT_EQ(std::set<Element>(all.begin(), all.end()).size(), all.size()) << e.name;
  }
}

// Random words of length <= 6 all show up in a finite prefix.
TEST(Enumerate, FairOnInfiniteFamilies) {
  Gen gen(5);
  for (auto spec : {specs::free(2), specs::dihedral_infinite()}) {
    auto h      = construct_group(spec);
    auto prefix = enumerate_elements(h, 4000);
    std::set<Element> seen(prefix.begin(), prefix.end());
    for (int i = 0; i < 200; ++i) {
      auto w = gen.word(h, static_cast<std::size_t>(gen.integer(0, 6)), 2);
      EXPECT_TRUE(seen.count(w)) << h.format(w);
    }
  }
}

TEST(Property, GroupAxiomsOnSampledTriples) {
  Gen gen(2024);
  for (auto const& h : law_families()) {
    for (int i = 0; i < 1000; ++i) {
      auto a = random_element(h, gen);
      auto b = random_element(h, gen);
      auto c = random_element(h, gen);
      ASSERT_EQ(h.mul(h.mul(a, b), c), h.mul(a, h.mul(b, c))) << h.family();
      ASSERT_EQ(h.mul(a, h.identity()), a);
      ASSERT_EQ(h.mul(h.identity(), a), a);
      ASSERT_TRUE(h.is_identity(h.mul(a, h.inv(a))));
      ASSERT_TRUE(h.is_identity(h.mul(h.inv(a), a)));
      ASSERT_TRUE(h.group().is_valid(h.mul(a, b).code()));
    }
  }
}

TEST(Property, CommutatorVanishesIffCommute) {
  Gen gen(3);
  for (auto const& h : law_families()) {
    for (int i = 0; i < 300; ++i) {
      auto a = random_element(h, gen);
      auto b = random_element(h, gen);
      EXPECT_EQ(h.is_identity(h.commutator(a, b)), h.mul(a, b) == h.mul(b, a));
    }
  }
}

TEST(Property, CanonicalFormsAreUnique) {
  // Two words for the same element land on the same code.
  auto d = construct_group(specs::dihedral_infinite());
  auto t = d.generator(0);
  auto s = d.generator(1);
  EXPECT_EQ(d.mul(s, t), d.mul(d.inv(t), s));
  auto q = construct_group(specs::quaternion8());
  auto i = q.generator(0);
  auto j = q.generator(1);
  EXPECT_EQ(q.mul(i, j), q.inv(q.mul(j, i)));
  EXPECT_EQ(q.mul(q.mul(i, i), q.mul(i, i)), q.identity());
}
