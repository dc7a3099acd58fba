// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Conjugacy classes and membership in the FC-center G^fin. Finiteness of a
// class is undecidable in general; a class that outgrows its budget is
// reported as evidence of an infinite class at that budget, never as proof.

#pragma once

#include <cstddef>
#include <unordered_set>
#include <vector>

#include "groups.hpp"

namespace vnfactor {

inline constexpr std::size_t default_class_budget = 10'000;

struct ConjugacyClass {
  Element              representative;
  std::vector<Element> elements;  // complete when !exceeded, partial otherwise
  bool                 exceeded      = false;
  std::size_t          budget        = 0;
  std::size_t          partial_count = 0;

  bool finite() const noexcept {
    return !exceeded;
  }
  std::size_t size() const noexcept {
    return elements.size();
  }
};

// Orbit of g under conjugation by the generators (and their inverses) that
// can move it. A finite orbit closed under every generator is the full class.
inline ConjugacyClass conjugacy_class(GroupHandle const& h, Element const& g,
                                      std::size_t budget = default_class_budget) {
  if (budget < 1) {
    throw ParameterError("class budget must be at least 1");
  }
  h.check(g);
  ConjugacyClass cls;
  cls.representative = g;
  cls.budget         = budget;
  std::unordered_set<Element, ElementHash> seen{g};
  cls.elements.push_back(g);
  for (std::size_t i = 0; i < cls.elements.size(); ++i) {
    auto const c = cls.elements[i];
    for (auto gi : h.group().conjugating_generators(c.code())) {
      auto const s = h.generator(gi);
      for (auto const& t : {s, h.inv(s)}) {
        auto y = h.conjugate(c, t);
        if (seen.insert(y).second) {
          cls.elements.push_back(std::move(y));
          if (cls.elements.size() > budget) {
            cls.exceeded      = true;
            cls.partial_count = cls.elements.size();
            return cls;
          }
        }
      }
    }
  }
  cls.partial_count = cls.elements.size();
  return cls;
}

struct FcVerdict {
  enum class Kind { fc, not_fc_evidence };
  Element     element;
  Kind        kind       = Kind::fc;
  std::size_t class_size = 0;  // when fc
  std::size_t budget     = 0;  // when not_fc_evidence

  bool is_fc() const noexcept {
    return kind == Kind::fc;
  }
};

inline FcVerdict fc_verdict(GroupHandle const& h, Element const& g,
                            std::size_t budget = default_class_budget) {
  auto cls = conjugacy_class(h, g, budget);
  if (cls.finite()) {
    return {g, FcVerdict::Kind::fc, cls.size(), budget};
  }
  return {g, FcVerdict::Kind::not_fc_evidence, 0, budget};
}

// Verdicts for the first n enumerated elements.
inline std::vector<FcVerdict> fc_filter(GroupHandle const& h, std::size_t n,
                                        std::size_t budget = default_class_budget) {
  if (n < 1) {
    throw ParameterError("fc_filter needs at least one element");
  }
  std::vector<FcVerdict> out;
  for (auto const& g : enumerate_elements(h, n)) {
    out.push_back(fc_verdict(h, g, budget));
  }
  return out;
}

}  // namespace vnfactor
