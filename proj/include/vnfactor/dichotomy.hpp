// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// The type I dichotomy for countable discrete groups. Abelian-by-finite
// groups are certified from a witness subgroup; FC groups that are not
// abelian-by-finite get an infinite sequence of commuting non-abelian finite
// subgroups G_i = <[g_i], [h_i]>, built by restricting to the kernel of the
// conjugation action on the classes already used, and the growth of the
// nonabelian part of the trace measure is attached as evidence.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fc_center.hpp"
#include "group_spec.hpp"
#include "groups.hpp"
#include "rational.hpp"
#include "spectrum.hpp"

namespace vnfactor {

////////////////////////////////////////////////////////////////////////
// Element streams and non-commuting pairs
////////////////////////////////////////////////////////////////////////

// Enumeration order filtered by a membership predicate; at most `budget`
// elements are drawn from the underlying enumerator.
class ElementStream {
 public:
  using Predicate = std::function<bool(Element const&)>;

  ElementStream(GroupHandle h, std::size_t budget, Predicate pred = {})
      : _handle(h), _enum(std::move(h)), _budget(budget), _pred(std::move(pred)) {}

  GroupHandle const& handle() const noexcept {
    return _handle;
  }

  std::optional<Element> next() {
    while (_drawn < _budget) {
      auto e = _enum.next();
      if (!e) {
        return std::nullopt;
      }
      ++_drawn;
      if (!_pred || _pred(*e)) {
        ++_accepted;
        return e;
      }
    }
    return std::nullopt;
  }

  // Every element of the group was drawn.
  bool exhaustive() const noexcept {
    return _enum.exhausted();
  }
  std::size_t drawn() const noexcept {
    return _drawn;
  }
  std::size_t accepted() const noexcept {
    return _accepted;
  }
  std::size_t budget() const noexcept {
    return _budget;
  }

 private:
  GroupHandle _handle;
  Enumerator  _enum;
  std::size_t _budget;
  Predicate   _pred;
  std::size_t _drawn    = 0;
  std::size_t _accepted = 0;
};

struct NoncommutingPair {
  Element     g;
  Element     h;
  std::size_t examined = 0;
};

struct AbelianEvidence {
  std::size_t examined   = 0;
  bool        exhaustive = false;  // true: proof that the stream is abelian
  std::size_t budget     = 0;
};

using PairSearch = std::variant<NoncommutingPair, AbelianEvidence>;

// First pair (x_i, x_j), i < j, in stream order with x_i x_j != x_j x_i;
// scanned by j ascending, then i ascending.
inline PairSearch find_noncommuting_pair(ElementStream& stream) {
  auto const&          h = stream.handle();
  std::vector<Element> seen;
  while (auto y = stream.next()) {
    for (auto const& x : seen) {
      if (!h.commute(x, *y)) {
        return NoncommutingPair{x, *y, seen.size() + 1};
      }
    }
    if (!h.is_identity(*y)) {
      seen.push_back(*y);
    }
  }
  if (stream.accepted() == 0) {
    throw ParameterError("empty element stream");
  }
  return AbelianEvidence{stream.accepted(), stream.exhaustive(), stream.budget()};
}

// Whether g acts trivially by conjugation on K. K must be stable under g.
inline bool kernel_membership(GroupHandle const& h, Element const& g,
                              ElementSet const& k) {
  std::unordered_set<Element, ElementHash> set(k.begin(), k.end());
  bool trivial = true;
  for (auto const& b : k) {
    auto c = h.conjugate(b, g);
    if (!set.count(c)) {
      throw PreconditionViolation("set is not stable under conjugation by "
                                  + h.format(g) + ": " + h.format(b) + " -> "
                                  + h.format(c));
    }
    trivial = trivial && c == b;
  }
  return trivial;
}

////////////////////////////////////////////////////////////////////////
// Commuting witnesses
////////////////////////////////////////////////////////////////////////

struct CommutingWitness {
  std::vector<std::pair<Element, Element>> pairs;
  std::vector<ElementSet>                  generator_sets;  // [g_i] u [h_i]
  // commutation[i][j] = 1 iff all generators of G_i and G_j commute (i != j)
  std::vector<std::vector<int>> commutation;
  bool                          commutators_nontrivial = false;
  bool                          pairwise_commuting     = false;
  bool                          classes_stable         = false;
  bool                          complete               = false;
  std::size_t                   requested              = 0;
  std::vector<std::size_t>      examined;  // elements drawn per step
  std::vector<std::string>      diagnostics;

  bool invariants_hold() const {
    return commutators_nontrivial && pairwise_commuting && classes_stable;
  }
};

// Exhaustive recheck of the witness invariants on its generator sets.
inline void verify_witness(GroupHandle const& h, CommutingWitness& w) {
  auto const n = w.pairs.size();
  w.commutators_nontrivial = true;
  for (auto const& [g, k] : w.pairs) {
    w.commutators_nontrivial = w.commutators_nontrivial && !h.commute(g, k);
  }
  w.commutation.assign(n, std::vector<int>(n, 0));
  w.pairwise_commuting = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        continue;
      }
      bool ok = true;
      for (auto const& a : w.generator_sets[i]) {
        for (auto const& b : w.generator_sets[j]) {
          ok = ok && h.commute(a, b);
        }
      }
      w.commutation[i][j] = ok ? 1 : 0;
      w.pairwise_commuting = w.pairwise_commuting && ok;
    }
  }
  w.classes_stable = true;
  for (auto const& set : w.generator_sets) {
    std::unordered_set<Element, ElementHash> s(set.begin(), set.end());
    for (auto const& x : set) {
      for (auto gi : h.group().conjugating_generators(x.code())) {
        auto const t = h.generator(gi);
        for (auto const& u : {t, h.inv(t)}) {
          w.classes_stable = w.classes_stable && s.count(h.conjugate(x, u)) != 0;
        }
      }
    }
  }
}

struct Lemma10Budgets {
  std::size_t stream = default_closure_budget;  // elements drawn per step
  std::size_t klass  = default_class_budget;
};

// Incremental construction: each step picks the first non-commuting pair
// among stream elements centralizing every class chosen so far.
class Lemma10Builder {
 public:
  Lemma10Builder(GroupHandle h, Lemma10Budgets budgets)
      : _handle(std::move(h)), _budgets(budgets) {}

  CommutingWitness const& witness() const noexcept {
    return _w;
  }
  CommutingWitness& witness() noexcept {
    return _w;
  }

  bool step() {
    auto const& h = _handle;
    ++_w.requested;
    ElementSet const k = _k;
    ElementStream stream(h, _budgets.stream, [&](Element const& g) {
      return k.empty() || kernel_membership(h, g, k);
    });
    PairSearch found;
    try {
      found = find_noncommuting_pair(stream);
    } catch (PreconditionViolation const& e) {
      _w.diagnostics.push_back(std::string("step ") + std::to_string(_w.requested)
                               + ": " + e.what());
      return false;
    }
    _w.examined.push_back(stream.drawn());
    if (auto* ev = std::get_if<AbelianEvidence>(&found)) {
      _w.diagnostics.push_back(
          "step " + std::to_string(_w.requested)
          + ": no non-commuting pair among " + std::to_string(ev->examined)
          + " kernel elements"
          + (ev->exhaustive ? " (exhaustive)"
                            : " within budget " + std::to_string(ev->budget)));
      return false;
    }
    auto const& p  = std::get<NoncommutingPair>(found);
    auto const  cg = conjugacy_class(h, p.g, _budgets.klass);
    auto const  ch = conjugacy_class(h, p.h, _budgets.klass);
    if (!cg.finite() || !ch.finite()) {
      _w.diagnostics.push_back("step " + std::to_string(_w.requested)
                               + ": class exceeded budget "
                               + std::to_string(_budgets.klass)
                               + "; element is not in the FC-center");
      return false;
    }
    ElementSet gens = cg.elements;
    for (auto const& x : ch.elements) {
      if (std::find(gens.begin(), gens.end(), x) == gens.end()) {
        gens.push_back(x);
      }
    }
    for (auto const& x : gens) {
      if (std::find(_k.begin(), _k.end(), x) == _k.end()) {
        _k.push_back(x);
      }
    }
    _w.pairs.emplace_back(p.g, p.h);
    _w.generator_sets.push_back(std::move(gens));
    return true;
  }

 private:
  GroupHandle      _handle;
  Lemma10Budgets   _budgets;
  CommutingWitness _w;
  ElementSet       _k;
};

inline CommutingWitness lemma10_sequence(GroupHandle const& h, std::size_t count,
                                         Lemma10Budgets budgets = {}) {
  if (count < 1) {
    throw ParameterError("count must be at least 1");
  }
  Lemma10Builder b(h, budgets);
  bool           ok = true;
  for (std::size_t i = 0; i < count && ok; ++i) {
    ok = b.step();
  }
  auto w      = b.witness();
  w.requested = count;
  verify_witness(h, w);
  w.complete = ok && w.pairs.size() == count && w.invariants_hold();
  return w;
}

////////////////////////////////////////////////////////////////////////
// Certificates
////////////////////////////////////////////////////////////////////////

enum class Verdict { type_I, not_type_I, inconclusive };

inline char const* to_string(Verdict v) {
  switch (v) {
    case Verdict::type_I:
      return "type_I";
    case Verdict::not_type_I:
      return "not_type_I";
    default:
      return "inconclusive";
  }
}

struct ClassifyOptions {
  unsigned      k            = 2;
  Rational      epsilon      = Rational(1, 20);
  std::size_t   budget       = default_closure_budget;
  std::size_t   class_budget = default_class_budget;
  std::size_t   max_pairs    = 6;
  std::size_t   max_order    = default_max_character_order;
  std::uint64_t seed         = 0;
};

struct AbelianWitness {
  std::vector<Element> generators;
  std::uint64_t        index = 0;
  std::string          source;  // finite | metadata | abelian
};

struct DichotomyCertificate {
  nlohmann::json                spec;
  GroupHandle                   handle;  // empty when the spec is invalid
  ClassifyOptions               options;
  Verdict                       verdict = Verdict::inconclusive;
  std::optional<AbelianWitness> abelian;
  std::optional<CommutingWitness> commuting;
  std::optional<GrowthResult>   growth;
  std::vector<std::string>      notes;
};

namespace detail {

  inline nlohmann::json element_json(GroupHandle const& h, Element const& e) {
    return {{"code", e.code()}, {"text", h.format(e)}};
  }

  inline Element element_from_json(GroupHandle const& h, nlohmann::json const& j) {
    return h.element(j.at("code").get<Code>());
  }

  inline nlohmann::json rational_json(Rational const& q) {
    return to_string(q);
  }

  inline nlohmann::json growth_json(GrowthResult const& g) {
    nlohmann::json hist = nlohmann::json::array();
    for (auto const& s : g.history) {
      hist.push_back({{"n", s.n}, {"order", s.order}, {"measure", to_string(s.measure)}});
    }
    nlohmann::json j{{"found", g.found},
                     {"k", g.k},
                     {"epsilon", to_string(g.epsilon)},
                     {"threshold", to_string(g.threshold)},
                     {"dim_threshold", g.dim_threshold},
                     {"history", hist}};
    if (g.found) {
      j["n"]       = g.n;
      j["measure"] = to_string(g.measure);
    } else {
      j["reason"] = g.reason;
    }
    return j;
  }

  inline nlohmann::json witness_json(GroupHandle const& h, CommutingWitness const& w) {
    nlohmann::json pairs = nlohmann::json::array();
    for (auto const& [g, k] : w.pairs) {
      pairs.push_back({{"g", element_json(h, g)}, {"h", element_json(h, k)}});
    }
    nlohmann::json sets = nlohmann::json::array();
    for (auto const& s : w.generator_sets) {
      nlohmann::json arr = nlohmann::json::array();
      for (auto const& e : s) {
        arr.push_back(e.code());
      }
      sets.push_back(arr);
    }
    return {{"pairs", pairs},
            {"generator_sets", sets},
            {"commutation", w.commutation},
            {"commutators_nontrivial", w.commutators_nontrivial},
            {"pairwise_commuting", w.pairwise_commuting},
            {"classes_stable", w.classes_stable},
            {"complete", w.complete},
            {"requested", w.requested},
            {"examined", w.examined},
            {"diagnostics", w.diagnostics}};
  }

}  // namespace detail

inline nlohmann::json to_json(DichotomyCertificate const& c) {
  auto const& h = c.handle;
  nlohmann::json j;
  j["verdict"] = to_string(c.verdict);
  j["spec"]    = c.spec;
  j["options"] = {{"k", c.options.k},
                  {"epsilon", to_string(c.options.epsilon)},
                  {"budget", c.options.budget},
                  {"class_budget", c.options.class_budget},
                  {"max_pairs", c.options.max_pairs},
                  {"max_order", c.options.max_order},
                  {"seed", c.options.seed}};
  if (c.abelian) {
    nlohmann::json gens = nlohmann::json::array();
    for (auto const& g : c.abelian->generators) {
      gens.push_back(detail::element_json(h, g));
    }
    j["abelian_by_finite"] = {{"generators", gens},
                              {"index", c.abelian->index},
                              {"source", c.abelian->source}};
  }
  if (c.commuting) {
    j["commuting_witness"] = detail::witness_json(h, *c.commuting);
  }
  if (c.growth) {
    j["growth"] = detail::growth_json(*c.growth);
  }
  j["notes"] = c.notes;
  return j;
}

// Runs the dichotomy on a group spec. Failures never throw; they become an
// inconclusive verdict with notes.
inline DichotomyCertificate classify(nlohmann::json const& spec,
                                     ClassifyOptions const& opt = {}) {
  DichotomyCertificate c;
  c.spec    = spec;
  c.options = opt;
  try {
    c.handle = construct_group(spec);
  } catch (std::exception const& e) {
    c.notes.push_back(std::string("invalid spec: ") + e.what());
    return c;
  }
  auto const& h = c.handle;
  auto const f  = h.finiteness();
  auto const md = h.metadata();

  if (f.is_finite()) {
    c.verdict = Verdict::type_I;
    c.abelian = AbelianWitness{{}, f.order, "finite"};
    c.notes.push_back("finite group: the trivial subgroup is abelian of index "
                      + std::to_string(f.order));
    return c;
  }
  if (md.abelian_by_finite) {
    AbelianWitness w;
    w.index  = md.abelian_by_finite->index;
    w.source = "metadata";
    for (auto const& code : md.abelian_by_finite->generators) {
      w.generators.push_back(h.element(code));
    }
    bool commute = true;
    for (auto const& a : w.generators) {
      for (auto const& b : w.generators) {
        commute = commute && h.commute(a, b);
      }
    }
    if (!commute) {
      c.notes.push_back("declared abelian subgroup generators do not commute");
      return c;
    }
    c.verdict = Verdict::type_I;
    for (auto const& g : w.generators) {
      auto v = fc_verdict(h, g, opt.class_budget);
      c.notes.push_back("witness generator " + h.format(g)
                        + (v.is_fc() ? " has a finite class of size "
                                           + std::to_string(v.class_size)
                                     : " has no finite class within budget "
                                           + std::to_string(opt.class_budget)));
    }
    c.notes.push_back("abelian subgroup of index " + std::to_string(w.index)
                      + " declared by family metadata");
    c.abelian = std::move(w);
    return c;
  }
  if (h.group().is_abelian().value_or(false)) {
    c.verdict = Verdict::type_I;
    c.abelian = AbelianWitness{{}, 1, "abelian"};
    c.notes.push_back("abelian group: index 1");
    return c;
  }
  if (md.fc_center == std::optional<std::string>("trivial")) {
    c.notes.push_back("FC-center is trivial (icc); no finite commuting "
                      "subgroups to build, no abelian-by-finite witness");
    return c;
  }
  if (md.fc_center != std::optional<std::string>("all")) {
    c.notes.push_back("FC-center not declared as the whole group; the "
                      "commuting-subgroup construction needs G = G^fin");
    return c;
  }

  if (!(opt.epsilon > 0 && opt.epsilon < 1) || opt.k < 1 || opt.k > 6) {
    c.notes.push_back("options out of range: need 0 < epsilon < 1 and 1 <= k <= 6");
    return c;
  }
  Lemma10Builder builder(h, {opt.budget, opt.class_budget});
  GrowthResult   g;
  g.k             = opt.k;
  g.epsilon       = opt.epsilon;
  g.dim_threshold = growth_dimension_threshold(opt.k);
  g.threshold     = growth_threshold(opt.epsilon);
  for (std::size_t n = 1; n <= opt.max_pairs; ++n) {
    if (!builder.step()) {
      g.reason = "commuting-subgroup construction stopped at step "
                 + std::to_string(n);
      break;
    }
    std::vector<std::vector<Element>> tower(
        builder.witness().generator_sets.begin(),
        builder.witness().generator_sets.end());
    GrowthStep step;
    try {
      step = growth_step(h, tower, n, opt.k, opt.max_order);
    } catch (std::exception const& e) {
      g.reason = e.what();
      break;
    }
    g.history.push_back(step);
    if (step.measure > g.threshold) {
      g.found   = true;
      g.n       = n;
      g.measure = step.measure;
      break;
    }
  }
  if (!g.found && g.reason.empty()) {
    g.reason = "no witness within " + std::to_string(opt.max_pairs) + " subgroups";
  }
  auto w      = builder.witness();
  w.requested = w.pairs.size();
  verify_witness(h, w);
  w.complete = w.invariants_hold() && !w.pairs.empty();
  c.commuting = w;
  c.growth    = g;
  c.notes.insert(c.notes.end(), w.diagnostics.begin(), w.diagnostics.end());
  if (g.found && w.complete) {
    c.verdict = Verdict::not_type_I;
    c.notes.push_back("commuting non-abelian finite subgroups with growing "
                      "nonabelian measure; the hypothesis that G is not "
                      "abelian-by-finite is assumed, not decided");
  } else {
    c.notes.push_back("growth evidence incomplete: " + g.reason);
  }
  return c;
}

struct ReplayReport {
  bool                                      ok = false;
  std::vector<std::pair<std::string, bool>> checks;

  void add(std::string name, bool pass) {
    checks.emplace_back(std::move(name), pass);
  }
};

// Re-runs every check embedded in a serialized certificate, without any
// search: the witness elements are read back from their canonical codes.
inline ReplayReport replay_certificate(nlohmann::json const& j) {
  ReplayReport r;
  try {
    auto const h       = construct_group(j.at("spec"));
    auto const verdict = j.at("verdict").get<std::string>();
    if (verdict == "type_I") {
      auto const& w      = j.at("abelian_by_finite");
      auto const  source = w.at("source").get<std::string>();
      std::vector<Element> gens;
      for (auto const& e : w.at("generators")) {
        gens.push_back(detail::element_from_json(h, e));
      }
      bool commute = true;
      for (auto const& a : gens) {
        for (auto const& b : gens) {
          commute = commute && h.commute(a, b);
        }
      }
      r.add("witness generators commute", commute);
      auto const index = w.at("index").get<std::uint64_t>();
      if (source == "finite") {
        r.add("index equals the group order",
              h.finiteness().is_finite() && h.finiteness().order == index && gens.empty());
      } else if (source == "metadata") {
        auto const& md = h.metadata().abelian_by_finite;
        bool        same = md && md->index == index && md->generators.size() == gens.size();
        for (std::size_t i = 0; same && i < gens.size(); ++i) {
          same = md->generators[i] == gens[i].code();
        }
        r.add("witness matches family metadata", same);
      } else {
        r.add("group is abelian", h.group().is_abelian().value_or(false) && index == 1);
      }
    } else if (verdict == "not_type_I") {
      auto const&      cw = j.at("commuting_witness");
      CommutingWitness w;
      for (auto const& p : cw.at("pairs")) {
        w.pairs.emplace_back(detail::element_from_json(h, p.at("g")),
                             detail::element_from_json(h, p.at("h")));
      }
      for (auto const& s : cw.at("generator_sets")) {
        ElementSet set;
        for (auto const& code : s) {
          set.push_back(h.element(code.get<Code>()));
        }
        w.generator_sets.push_back(std::move(set));
      }
      bool contains = w.pairs.size() == w.generator_sets.size();
      for (std::size_t i = 0; contains && i < w.pairs.size(); ++i) {
        auto const& s = w.generator_sets[i];
        contains = std::find(s.begin(), s.end(), w.pairs[i].first) != s.end()
                   && std::find(s.begin(), s.end(), w.pairs[i].second) != s.end();
      }
      r.add("generator sets contain their pairs", contains);
      verify_witness(h, w);
      r.add("pairs do not commute", w.commutators_nontrivial);
      r.add("subgroups commute pairwise", w.pairwise_commuting);
      r.add("generator sets are conjugation-stable", w.classes_stable);
      r.add("commutation matrix matches",
            cw.at("commutation").get<std::vector<std::vector<int>>>() == w.commutation);

      auto const& gj        = j.at("growth");
      auto const  k         = gj.at("k").get<unsigned>();
      auto const  threshold = parse_rational(gj.at("threshold").get<std::string>());
      auto const  eps       = parse_rational(gj.at("epsilon").get<std::string>());
      r.add("threshold is max(0, 1/2 - epsilon)", threshold == growth_threshold(eps));
      r.add("dimension threshold is 2^(2^(k-1))",
            gj.at("dim_threshold").get<std::uint64_t>() == growth_dimension_threshold(k));
      std::vector<std::vector<Element>> tower(w.generator_sets.begin(),
                                              w.generator_sets.end());
      auto const n         = gj.at("n").get<std::size_t>();
      auto const max_order = j.at("options").at("max_order").get<std::size_t>();
      bool       history_ok = gj.at("history").size() == n;
      for (auto const& s : gj.at("history")) {
        auto const m    = s.at("n").get<std::size_t>();
        auto const step = growth_step(h, tower, m, k, max_order);
        bool const ok   = step.order == s.at("order").get<std::uint64_t>()
                        && step.measure == parse_rational(s.at("measure").get<std::string>())
                        && ((m == n) == (step.measure > threshold));
        history_ok = history_ok && ok;
      }
      r.add("growth measures recompute exactly", history_ok);
      r.add("final measure exceeds threshold",
            parse_rational(gj.at("measure").get<std::string>()) > threshold);
    } else {
      r.add("certificate is conclusive", false);
    }
  } catch (std::exception const& e) {
    r.add(std::string("certificate parses: ") + e.what(), false);
  }
  r.ok = !r.checks.empty();
  for (auto const& [name, pass] : r.checks) {
    r.ok = r.ok && pass;
  }
  return r;
}

}  // namespace vnfactor
