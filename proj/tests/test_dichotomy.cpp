#include <gtest/gtest.h>

#include <set>

#include <vnfactor/dichotomy.hpp>
#include <vnfactor/group_spec.hpp>

#include "oracles.hpp"

using namespace vnfactor;

namespace {

struct SumFixture {
  GroupHandle               h = construct_group(specs::restricted_sum(specs::symmetric(3)));
  RestrictedSumGroup const& r = dynamic_cast<RestrictedSumGroup const&>(h.group());
  GroupHandle               s3 = construct_group(specs::symmetric(3));

  Element at(std::int64_t coord, Code images) const {
    return h.element(r.embed(coord, s3.element(std::move(images)).code()));
  }
};

std::set<std::int64_t> coordinates(RestrictedSumGroup const& r, Element const& g) {
  std::set<std::int64_t> out;
  for (auto const& [c, code] : r.entries(g.code())) {
    out.insert(c);
  }
  return out;
}

}  // namespace

TEST(FindNoncommutingPair, SymmetricThreeOrder) {
  auto h = construct_group(specs::symmetric(3));
  ElementStream s(h, 1000);
  auto res = find_noncommuting_pair(s);
  ASSERT_TRUE(std::holds_alternative<NoncommutingPair>(res));
  auto const& p = std::get<NoncommutingPair>(res);
  EXPECT_EQ(h.format(p.g), "(1 2)");
  EXPECT_EQ(h.format(p.h), "(1 2 3)");
}

TEST(FindNoncommutingPair, CyclicIsAbelianProof) {
  auto h = construct_group(specs::cyclic(4));
  ElementStream s(h, 1000);
  auto res = find_noncommuting_pair(s);
  ASSERT_TRUE(std::holds_alternative<AbelianEvidence>(res));
  auto const& ev = std::get<AbelianEvidence>(res);
  EXPECT_TRUE(ev.exhaustive);
  EXPECT_EQ(ev.examined, 4u);
}

TEST(FindNoncommutingPair, BudgetedAbelianEvidenceIsNotProof) {
  auto h = construct_group(specs::dihedral_infinite());
  ElementStream s(h, 50, [&](Element const& g) { return g.code()[1] == 0; });
  auto res = find_noncommuting_pair(s);
  ASSERT_TRUE(std::holds_alternative<AbelianEvidence>(res));
  EXPECT_FALSE(std::get<AbelianEvidence>(res).exhaustive);
  EXPECT_EQ(std::get<AbelianEvidence>(res).budget, 50u);
}

TEST(FindNoncommutingPair, RestrictedSumStartsInCoordinateZero) {
  SumFixture f;
  ElementStream s(f.h, 100);
  auto res = find_noncommuting_pair(s);
  ASSERT_TRUE(std::holds_alternative<NoncommutingPair>(res));
  auto const& p = std::get<NoncommutingPair>(res);
  EXPECT_EQ(coordinates(f.r, p.g), (std::set<std::int64_t>{0}));
  EXPECT_EQ(coordinates(f.r, p.h), (std::set<std::int64_t>{0}));
  EXPECT_FALSE(f.h.commute(p.g, p.h));
}

TEST(FindNoncommutingPair, EmptyStreamIsRejected) {
  auto h = construct_group(specs::symmetric(3));
  ElementStream none(h, 0);
  EXPECT_THROW(find_noncommuting_pair(none), ParameterError);
  ElementStream filtered(h, 100, [](Element const&) { return false; });
  EXPECT_THROW(find_noncommuting_pair(filtered), ParameterError);
}

TEST(KernelMembership, Examples) {
  SumFixture f;
  auto k = conjugacy_class(f.h, f.at(0, {1, 2, 0})).elements;
  EXPECT_TRUE(kernel_membership(f.h, f.h.identity(), k));
  EXPECT_TRUE(kernel_membership(f.h, f.at(5, {1, 0, 2}), k));
  EXPECT_FALSE(kernel_membership(f.h, f.at(0, {1, 0, 2}), k));
}

TEST(KernelMembership, UnstableSetIsAPreconditionViolation) {
  SumFixture f;
  ElementSet k{f.at(0, {1, 0, 2})};
  EXPECT_THROW(kernel_membership(f.h, f.at(0, {1, 2, 0}), k), PreconditionViolation);
}

TEST(Lemma10, SymmetricSumFivePairs) {
  SumFixture f;
  auto w = lemma10_sequence(f.h, 5);
  ASSERT_EQ(w.pairs.size(), 5u);
  EXPECT_TRUE(w.complete);
  EXPECT_TRUE(w.invariants_hold());
  std::set<std::int64_t> used;
  for (auto const& [g, h] : w.pairs) {
    auto cg = coordinates(f.r, g);
    ASSERT_EQ(cg.size(), 1u);
    EXPECT_EQ(cg, coordinates(f.r, h));
    used.insert(*cg.begin());
  }
  EXPECT_EQ(used.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_EQ(w.commutation[i][j], i == j ? 0 : 1);
    }
  }
}

TEST(Lemma10, QuaternionSum) {
  auto h = construct_group(specs::restricted_sum(specs::quaternion8()));
  for (std::size_t k : {3u, 5u}) {
    auto w = lemma10_sequence(h, k);
    ASSERT_EQ(w.pairs.size(), k);
    EXPECT_TRUE(w.complete);
    for (auto const& set : w.generator_sets) {
      // [i] u [j]: two non-central classes of size 2.
      EXPECT_EQ(set.size(), 4u);
    }
  }
}

TEST(Lemma10, CountOneIsThePairSearch) {
  SumFixture f;
  auto w = lemma10_sequence(f.h, 1);
  ElementStream s(f.h, default_closure_budget);
  auto p = std::get<NoncommutingPair>(find_noncommuting_pair(s));
  ASSERT_EQ(w.pairs.size(), 1u);
  EXPECT_EQ(w.pairs[0].first, p.g);
  EXPECT_EQ(w.pairs[0].second, p.h);
  EXPECT_THROW(lemma10_sequence(f.h, 0), ParameterError);
}

TEST(Lemma10, BudgetExhaustionIsInconclusive) {
  auto h = construct_group(specs::restricted_sum(specs::symmetric(3)));
  auto w = lemma10_sequence(h, 3, {5, default_class_budget});
  EXPECT_FALSE(w.complete);
  EXPECT_FALSE(w.diagnostics.empty());
}

TEST(Property, KernelElementsCentralizeEarlierSubgroups) {
  for (auto spec : {specs::restricted_sum(specs::symmetric(3)),
                    specs::restricted_sum(specs::quaternion8()),
                    specs::restricted_sum(specs::dihedral(4))}) {
    auto h = construct_group(spec);
    Lemma10Builder b(h, {});
    ElementSet     k;
    for (int step = 0; step < 3; ++step) {
      ASSERT_TRUE(b.step());
      auto const& sets = b.witness().generator_sets;
      k.insert(k.end(), sets.back().begin(), sets.back().end());
      std::vector<FiniteSubgroup> subs;
      for (auto const& s : sets) {
        subs.push_back(FiniteSubgroup::closure_of(h, s));
      }
      for (auto const& g : enumerate_elements(h, 400)) {
        if (!kernel_membership(h, g, k)) {
          continue;
        }
        for (auto const& sub : subs) {
          for (auto const& x : sub.elements()) {
            ASSERT_TRUE(h.commute(g, x)) << h.format(g) << " vs " << h.format(x);
          }
        }
      }
    }
  }
}

TEST(Property, GeneratorSetsAreConjugationStable) {
  auto h = construct_group(specs::restricted_sum(specs::dihedral(4)));
  auto w = lemma10_sequence(h, 4);
  ASSERT_TRUE(w.complete);
  for (auto const& set : w.generator_sets) {
    std::set<Element> s(set.begin(), set.end());
    for (std::size_t i = 0; i < 40; ++i) {
      auto t = h.generator(i);
      for (auto const& x : set) {
        EXPECT_TRUE(s.count(h.conjugate(x, t)));
      }
    }
  }
}

TEST(Classify, FiniteGroupIsTypeI) {
  auto c = classify(specs::symmetric(5));
  EXPECT_EQ(c.verdict, Verdict::type_I);
  ASSERT_TRUE(c.abelian);
  EXPECT_EQ(c.abelian->index, 120u);
}

TEST(Classify, InfiniteDihedralIsTypeI) {
  auto c = classify(specs::dihedral_infinite());
  EXPECT_EQ(c.verdict, Verdict::type_I);
  ASSERT_TRUE(c.abelian);
  EXPECT_EQ(c.abelian->index, 2u);
  ASSERT_EQ(c.abelian->generators.size(), 1u);
  EXPECT_EQ(c.abelian->generators[0].code(), (Code{1, 0}));
}

TEST(Classify, SymmetricSumIsNotTypeI) {
  auto c = classify(specs::restricted_sum(specs::symmetric(3)));
  EXPECT_EQ(c.verdict, Verdict::not_type_I);
  ASSERT_TRUE(c.growth);
  EXPECT_TRUE(c.growth->found);
  EXPECT_EQ(c.growth->n, 3u);
  EXPECT_EQ(c.growth->measure, make_rational(20, 27));
  EXPECT_GT(c.growth->measure, c.growth->threshold);
  ASSERT_TRUE(c.commuting);
  EXPECT_TRUE(c.commuting->invariants_hold());
}

TEST(Classify, FreeGroupIsInconclusive) {
  auto c = classify(specs::free(2));
  EXPECT_EQ(c.verdict, Verdict::inconclusive);
  EXPECT_FALSE(c.notes.empty());
}

TEST(Classify, BadSpecIsInconclusive) {
  auto c = classify({{"family", "nope"}});
  EXPECT_EQ(c.verdict, Verdict::inconclusive);
}

TEST(Replay, CertificatesReplayFromJson) {
  for (auto spec : {specs::restricted_sum(specs::symmetric(3)),
                    specs::restricted_sum(specs::quaternion8()), specs::symmetric(5),
                    specs::dihedral_infinite()}) {
    auto j   = to_json(classify(spec));
    auto rep = replay_certificate(nlohmann::json::parse(j.dump()));
    EXPECT_TRUE(rep.ok) << j.dump();
  }
}

TEST(Replay, TamperedCertificatesFail) {
  auto j = to_json(classify(specs::restricted_sum(specs::symmetric(3))));

  auto measure = j;
  measure["growth"]["history"][2]["measure"] = "3/4";
  EXPECT_FALSE(replay_certificate(measure).ok);

  auto pair = j;
  pair["commuting_witness"]["pairs"][0]["h"] = pair["commuting_witness"]["pairs"][0]["g"];
  EXPECT_FALSE(replay_certificate(pair).ok);

  auto index = to_json(classify(specs::dihedral_infinite()));
  index["abelian_by_finite"]["index"] = 3;
  EXPECT_FALSE(replay_certificate(index).ok);

  auto inconclusive = to_json(classify(specs::free(2)));
  EXPECT_FALSE(replay_certificate(inconclusive).ok);
}

TEST(Classify, Deterministic) {
  auto spec = specs::restricted_sum(specs::symmetric(3));
  EXPECT_EQ(to_json(classify(spec)).dump(), to_json(classify(spec)).dump());
}
