// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Command-line front end. Every command loads a group spec, runs one
// verifier, and prints a RunReport as JSON or as flattened "path: value"
// text lines carrying the same content.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or input error,
// 3 inconclusive.

#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "characters.hpp"
#include "dichotomy.hpp"
#include "fc_center.hpp"
#include "group_spec.hpp"
#include "numerical.hpp"
#include "spectrum.hpp"

namespace vnfactor::cli {

enum ExitCode : int { pass = 0, failure = 1, usage = 2, inconclusive = 3 };

struct Options {
  std::string   spec_path;
  std::size_t   budget       = default_closure_budget;
  std::size_t   class_budget = default_class_budget;
  std::string   epsilon      = "1/20";
  unsigned      k            = 2;
  std::uint64_t seed         = 0;
  double        tolerance    = 1e-9;
  std::string   format       = "text";
  std::size_t   count        = 0;  // 0: command default
  std::uint64_t n0           = 2;
  std::uint64_t n1           = 2;
  bool          timing       = false;
};

struct RunReport {
  std::string           command;
  std::string           spec_digest;
  nlohmann::json        options = nlohmann::json::object();
  nlohmann::json        results = nlohmann::json::object();
  std::string           status;  // pass | fail | inconclusive | error
  int                   exit_code = ExitCode::pass;
  std::optional<double> wall_time;  // seconds, only with --timing

  nlohmann::json to_json() const {
    nlohmann::json j{{"command", command},
                     {"spec_digest", spec_digest},
                     {"options", options},
                     {"results", results},
                     {"summary", {{"status", status}, {"exit_code", exit_code}}},
                     {"scope", "supported families: symmetric, cyclic, dihedral, "
                               "quaternion8, heisenberg, cayley, product, "
                               "central_product, restricted_sum, free, "
                               "dihedral_infinite"}};
    if (wall_time) {
      j["wall_time_seconds"] = *wall_time;
    }
    return j;
  }

  static RunReport from_json(nlohmann::json const& j) {
    RunReport r;
    r.command     = j.at("command").get<std::string>();
    r.spec_digest = j.at("spec_digest").get<std::string>();
    r.options     = j.at("options");
    r.results     = j.at("results");
    r.status      = j.at("summary").at("status").get<std::string>();
    r.exit_code   = j.at("summary").at("exit_code").get<int>();
    if (j.contains("wall_time_seconds")) {
      r.wall_time = j.at("wall_time_seconds").get<double>();
    }
    return r;
  }

  friend bool operator==(RunReport const& a, RunReport const& b) {
    return a.command == b.command && a.spec_digest == b.spec_digest
           && a.options == b.options && a.results == b.results
           && a.status == b.status && a.exit_code == b.exit_code
           && a.wall_time == b.wall_time;
  }
};

// FNV-1a over the compact serialization of the spec.
inline std::string spec_digest(nlohmann::json const& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : spec.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// "a.b[2].c: value" lines, one per scalar.
inline void flatten(nlohmann::json const& j, std::string const& path,
                    std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    if (j.empty()) {
      out << path << ": []\n";
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    }
  } else if (j.is_string()) {
    out << path << ": " << j.get<std::string>() << "\n";
  } else {
    out << path << ": " << j.dump() << "\n";
  }
}

////////////////////////////////////////////////////////////////////////
// Serializations
////////////////////////////////////////////////////////////////////////

inline nlohmann::json element_json(GroupHandle const& h, Element const& e) {
  return {{"code", e.code()}, {"text", h.format(e)}};
}

inline nlohmann::json spectrum_json(FactorSpectrum const& s) {
  nlohmann::json atoms = nlohmann::json::array();
  for (auto const& a : s.atoms) {
    atoms.push_back({{"label", a.label},
                     {"dim", a.dimension},
                     {"measure_num", to_int64(numerator_of(a.measure))},
                     {"measure_den", to_int64(denominator_of(a.measure))}});
  }
  return {{"order", s.order},
          {"atoms", atoms},
          {"total_measure", to_string(s.total_measure())},
          {"provenance", "exact-rational"}};
}

inline nlohmann::json table_json(CharacterTable const& t, ClassData const& cd,
                                 OrthogonalityReport const& v) {
  auto const&    h = cd.group.handle();
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t k = 0; k < cd.class_count(); ++k) {
    classes.push_back({{"size", cd.class_size(k)},
                       {"representative", h.format(cd.representative(k))},
                       {"element_order", cd.element_orders[k]}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    nlohmann::json values = nlohmann::json::array();
    for (auto const& v : t.values[i]) {
      auto clean = [](double x) { return std::abs(x) < 1e-12 ? 0.0 : x; };
      values.push_back({clean(v.real()), clean(v.imag())});
    }
    nlohmann::json row{{"degree", t.degrees[i]},
                       {"values", values},
                       {"provenance", to_string(t.provenance)}};
    if (t.is_exact()) {
      nlohmann::json exact = nlohmann::json::array();
      for (auto const& c : t.exact[i]) {
        exact.push_back(c.to_string());
      }
      row["exact"] = exact;
    }
    rows.push_back(row);
  }
  return {{"order", t.group_order},
          {"exponent", t.exponent},
          {"prime", t.prime},
          {"classes", classes},
          {"rows", rows},
          {"validation",
           {{"row_residual", v.row_residual},
            {"column_residual", v.column_residual},
            {"degree_sum_ok", v.degree_sum_ok},
            {"degrees_divide", v.degrees_divide},
            {"tolerance", v.tolerance},
            {"exact", v.exact},
            {"pass", v.pass}}}};
}

////////////////////////////////////////////////////////////////////////
// Commands
////////////////////////////////////////////////////////////////////////

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

  inline nlohmann::json load_spec(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw UsageError("cannot open spec file '" + path + "'");
    }
    try {
      return nlohmann::json::parse(in);
    } catch (nlohmann::json::parse_error const& e) {
      throw UsageError("spec file '" + path + "' is not valid JSON: " + e.what());
    }
  }

  inline FiniteSubgroup require_finite(GroupHandle const& h, Options const& o) {
    if (!h.finiteness().is_finite()) {
      throw UsageError("this command needs a finite group; " + h.family()
                       + " is not finite");
    }
    return FiniteSubgroup::whole(h, o.budget);
  }

  inline void set_status(RunReport& r, int code) {
    r.exit_code = code;
    switch (code) {
      case ExitCode::pass:
        r.status = "pass";
        break;
      case ExitCode::failure:
        r.status = "fail";
        break;
      case ExitCode::inconclusive:
        r.status = "inconclusive";
        break;
      default:
        r.status = "error";
    }
  }

  // Generators of the two factors of a product or central product.
  inline std::pair<std::vector<Element>, std::vector<Element>>
  factor_generators(GroupHandle const& h) {
    std::vector<Element> g0, g1;
    auto add = [&](auto const& grp, auto const& factors) {
      if (factors.size() != 2) {
        throw UsageError("lemma7 needs exactly two factors");
      }
      for (std::size_t f = 0; f < 2; ++f) {
        auto const& fac = *factors[f];
        auto const  n   = fac.generator_count().value_or(0);
        for (std::size_t i = 0; i < n; ++i) {
          (f == 0 ? g0 : g1).push_back(h.element(grp.embed(f, fac.generator(i))));
        }
      }
    };
    if (auto const* p = dynamic_cast<ProductGroup const*>(&h.group())) {
      add(*p, p->factors());
    } else if (auto const* c = dynamic_cast<CentralProductGroup const*>(&h.group())) {
      add(*c, c->factors());
    } else {
      throw UsageError("lemma7 needs a product or central_product spec");
    }
    return {g0, g1};
  }

  // Coordinate subgroups of a restricted sum, or the factors of a product.
  inline std::vector<std::vector<Element>> tower_of(GroupHandle const& h,
                                                    std::size_t count) {
    std::vector<std::vector<Element>> tower;
    if (auto const* r = dynamic_cast<RestrictedSumGroup const*>(&h.group())) {
      auto const m = r->factor().generator_count().value_or(0);
      for (std::size_t c = 0; c < count; ++c) {
        std::vector<Element> gens;
        for (std::size_t i = 0; i < m; ++i) {
          gens.push_back(h.element(r->embed(static_cast<std::int64_t>(c),
                                            r->factor().generator(i))));
        }
        tower.push_back(std::move(gens));
      }
    } else if (auto const* p = dynamic_cast<ProductGroup const*>(&h.group())) {
      for (std::size_t f = 0; f < p->factors().size() && f < count; ++f) {
        auto const& fac = *p->factors()[f];
        std::vector<Element> gens;
        for (std::size_t i = 0; i < fac.generator_count().value_or(0); ++i) {
          gens.push_back(h.element(p->embed(f, fac.generator(i))));
        }
        tower.push_back(std::move(gens));
      }
    } else {
      throw UsageError("growth needs a restricted_sum or product spec");
    }
    return tower;
  }

  inline Rational epsilon_of(Options const& o) {
    try {
      return parse_rational(o.epsilon);
    } catch (std::exception const&) {
      throw UsageError("--epsilon expects a rational such as 1/20 or 0.05");
    }
  }

}  // namespace detail

inline void run_command(std::string const& cmd, Options const& o,
                        nlohmann::json const& spec, RunReport& r) {
  auto const h   = construct_group(spec);
  auto&      res = r.results;
  res["family"]  = h.family();

  if (cmd == "chartab") {
    auto const cd = class_data(detail::require_finite(h, o));
    auto const t  = character_table(cd);
    auto const v  = validate_orthogonality(t, cd, o.tolerance);
    res["table"]  = table_json(t, cd, v);
    detail::set_status(r, v.pass ? ExitCode::pass : ExitCode::failure);
  } else if (cmd == "spectrum") {
    auto const h0 = detail::require_finite(h, o);
    auto const s  = factor_spectrum(h0);
    res["spectrum"] = spectrum_json(s);
    bool ok = s.total_measure() == 1;
    if (h0.order() <= max_numerical_order) {
      auto const     nd = numerical_decomposition(h0, o.seed);
      nlohmann::json blocks = nlohmann::json::array();
      std::vector<std::pair<std::uint64_t, double>> num, ex;
      for (auto const& b : nd.blocks) {
        blocks.push_back({{"dim", b.dimension}, {"measure", b.measure}});
        num.emplace_back(b.dimension, b.measure);
      }
      for (auto const& a : s.atoms) {
        ex.emplace_back(a.dimension, to_double(a.measure));
      }
      std::sort(num.begin(), num.end());
      std::sort(ex.begin(), ex.end());
      bool agree = num.size() == ex.size();
      for (std::size_t i = 0; agree && i < num.size(); ++i) {
        agree = num[i].first == ex[i].first
                && std::abs(num[i].second - ex[i].second) <= 1e-6;
      }
      res["oracle"] = {{"blocks", blocks},
                       {"agree", agree},
                       {"max_residual", nd.max_residual()},
                       {"seed_used", nd.seed_used},
                       {"tolerance", 1e-6},
                       {"provenance", "float"}};
      ok = ok && agree && nd.max_residual() <= 1e-6;
    } else {
      res["oracle"] = {{"skipped", "order exceeds "
                                       + std::to_string(max_numerical_order)}};
    }
    detail::set_status(r, ok ? ExitCode::pass : ExitCode::failure);
  } else if (cmd == "lemma6") {
    auto const h0       = detail::require_finite(h, o);
    auto const s        = factor_spectrum(h0);
    auto const measure  = nonabelian_measure(s);
    bool const abelian  = h0.is_abelian();
    bool const holds    = abelian ? measure == 0 : measure >= Rational(1, 2);
    res["order"]             = h0.order();
    res["abelian"]           = abelian;
    res["nonabelian_measure"] = to_string(measure);
    res["bound"]             = abelian ? "0 (abelian)" : "1/2";
    res["bound_holds"]       = holds;
    res["provenance"]        = "exact-rational";
    detail::set_status(r, holds ? ExitCode::pass : ExitCode::failure);
  } else if (cmd == "lemma7") {
    auto const [g0, g1] = detail::factor_generators(h);
    auto const rep = product_projection_spectrum(h, g0, g1, o.n0, o.n1, o.tolerance);
    nlohmann::json atoms = nlohmann::json::array();
    for (auto const& a : rep.supported) {
      atoms.push_back({{"label", a.label},
                       {"dim", a.dimension},
                       {"weight", a.weight},
                       {"meets_bound", a.meets_bound}});
    }
    res["orders"]          = {rep.order0, rep.order1, rep.order};
    res["n0"]              = rep.n0;
    res["n1"]              = rep.n1;
    res["provenance"]      = rep.exact ? "exact-cyclotomic" : "float";
    res["residuals"]       = {{"p0", rep.p0_residual},
                              {"p1", rep.p1_residual},
                              {"commute", rep.commute_residual},
                              {"central", rep.central_residual}};
    res["product_trace"]   = rep.product_trace;
    res["supported_atoms"] = atoms;
    res["spectrum_degrees"] = rep.spectrum_degrees;
    if (rep.numeric_checked) {
      res["matrix_units"] = {{"supported_dims", rep.numeric_supported_dims},
                             {"agrees", rep.numeric_agrees},
                             {"max_residual", rep.unit_residual},
                             {"tolerance", 1e-6}};
    }
    detail::set_status(r, rep.pass ? ExitCode::pass : ExitCode::failure);
  } else if (cmd == "growth") {
    auto const tower = detail::tower_of(h, o.count == 0 ? 8 : o.count);
    auto const g     = growth_search(h, tower, o.k, detail::epsilon_of(o));
    res["growth"]    = vnfactor::detail::growth_json(g);
    res["provenance"] = "exact-rational";
    detail::set_status(r, g.found ? ExitCode::pass : ExitCode::inconclusive);
  } else if (cmd == "lemma10") {
    auto const w = lemma10_sequence(h, o.count == 0 ? 5 : o.count,
                                    {o.budget, o.class_budget});
    res["witness"] = vnfactor::detail::witness_json(h, w);
    detail::set_status(r, w.complete ? ExitCode::pass : ExitCode::inconclusive);
  } else if (cmd == "fc") {
    nlohmann::json verdicts = nlohmann::json::array();
    for (auto const& v : fc_filter(h, o.count == 0 ? 20 : o.count, o.class_budget)) {
      nlohmann::json j{{"element", element_json(h, v.element)},
                       {"verdict", v.is_fc() ? "fc" : "not_fc_evidence"}};
      if (v.is_fc()) {
        j["class_size"] = v.class_size;
      } else {
        j["budget"] = v.budget;
      }
      verdicts.push_back(j);
    }
    res["verdicts"] = verdicts;
    detail::set_status(r, ExitCode::pass);
  } else if (cmd == "icc-check") {
    try {
      auto const rep = icc_orthonormality_check(h, o.count == 0 ? 50 : o.count,
                                                o.class_budget);
      res["count"]                = rep.count;
      res["identity_gram"]        = rep.identity_gram;
      res["off_diagonal_nonzero"] = rep.off_diagonal_nonzero;
      res["diagonal_mismatch"]    = rep.diagonal_mismatch;
      res["not_fc_evidence"]      = rep.not_fc_count;
      res["provenance"]           = "exact-rational";
      detail::set_status(r, rep.identity_gram ? ExitCode::pass : ExitCode::failure);
    } catch (InconsistencyError const& e) {
      res["inconsistency"] = e.what();
      detail::set_status(r, ExitCode::failure);
    }
  } else if (cmd == "classify") {
    ClassifyOptions co;
    co.k            = o.k;
    co.epsilon      = detail::epsilon_of(o);
    co.budget       = o.budget;
    co.class_budget = o.class_budget;
    co.seed         = o.seed;
    auto const cert = classify(spec, co);
    auto const j    = to_json(cert);
    res["certificate"] = j;
    if (cert.verdict == Verdict::inconclusive) {
      detail::set_status(r, ExitCode::inconclusive);
    } else {
      auto const rep = replay_certificate(j);
      nlohmann::json checks = nlohmann::json::array();
      for (auto const& [name, ok] : rep.checks) {
        checks.push_back({{"check", name}, {"pass", ok}});
      }
      res["replay"] = {{"ok", rep.ok}, {"checks", checks}};
      detail::set_status(r, rep.ok ? ExitCode::pass : ExitCode::failure);
    }
  }
}

inline std::vector<std::string> const& commands() {
  static std::vector<std::string> const names{
      "classify", "spectrum", "chartab", "lemma6", "lemma7",
      "growth",   "lemma10",  "fc",      "icc-check"};
  return names;
}

inline int run(int argc, char const* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"vnfactor: factor spectra and type I certificates for group "
               "von Neumann algebras"};
  app.require_subcommand(1, 1);
  Options o;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  std::vector<std::pair<std::string, std::string>> help{
      {"classify", "type I dichotomy certificate"},
      {"spectrum", "factor spectrum of a finite group, with numerical oracle"},
      {"chartab", "character table with orthogonality validation"},
      {"lemma6", "nonabelian trace measure of a finite group (bound 1/2)"},
      {"lemma7", "product projection of two commuting factors"},
      {"growth", "measure growth along coordinate subgroups"},
      {"lemma10", "commuting non-abelian subgroups in an FC group"},
      {"fc", "FC-center verdicts for enumerated elements"},
      {"icc-check", "orthonormality of group unitaries in an icc group"}};
  for (auto const& [name, text] : help) {
    auto* s = app.add_subcommand(name, text);
    s->add_option("--spec", o.spec_path, "group spec JSON file")->required();
    s->add_option("--budget", o.budget, "closure and stream budget")
        ->default_val(o.budget);
    s->add_option("--class-budget", o.class_budget, "conjugacy class budget")
        ->default_val(o.class_budget);
    s->add_option("--epsilon", o.epsilon, "slack epsilon (rational)")
        ->default_val(o.epsilon);
    s->add_option("--k", o.k, "growth level k")->default_val(o.k);
    s->add_option("--seed", o.seed, "random seed")->default_val(o.seed);
    s->add_option("--tolerance", o.tolerance, "float tolerance")
        ->default_val(o.tolerance);
    s->add_option("--format", o.format, "text or json")
        ->default_val(o.format)
        ->check(CLI::IsMember({"text", "json"}));
    s->add_option("--count", o.count, "elements, pairs, or tower members");
    s->add_option("--n0", o.n0, "lemma7 threshold for the first factor")
        ->default_val(o.n0);
    s->add_option("--n1", o.n1, "lemma7 threshold for the second factor")
        ->default_val(o.n1);
    s->add_flag("--timing", o.timing, "include wall time in the report");
    subs.emplace_back(name, s);
  }
  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const&) {
    out << app.help();
    return ExitCode::pass;
  } catch (CLI::ParseError const& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return ExitCode::pass;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return ExitCode::usage;
  }
  std::string cmd;
  for (auto const& [name, s] : subs) {
    if (s->parsed()) {
      cmd = name;
    }
  }

  RunReport r;
  r.command = cmd;
  r.options = {{"budget", o.budget},         {"class_budget", o.class_budget},
               {"epsilon", o.epsilon},       {"k", o.k},
               {"seed", o.seed},             {"tolerance", o.tolerance},
               {"count", o.count},           {"n0", o.n0},
               {"n1", o.n1}};
  auto const start = std::chrono::steady_clock::now();
  try {
    auto const spec = detail::load_spec(o.spec_path);
    r.spec_digest   = spec_digest(spec);
    run_command(cmd, o, spec, r);
  } catch (UsageError const& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (SpecError const& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (ParameterError const& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (RequiresFinite const& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (InternalConsistencyError const& e) {
    r.results["internal_consistency"] = {{"relation", e.relation()}, {"message", e.what()}};
    detail::set_status(r, ExitCode::failure);
  } catch (std::exception const& e) {
    r.results["error"] = e.what();
    detail::set_status(r, ExitCode::failure);
  }
  if (o.timing) {
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
  }
  if (o.format == "json") {
    out << r.to_json().dump(2) << "\n";
  } else {
    flatten(r.to_json(), "", out);
  }
  return r.exit_code;
}

}  // namespace vnfactor::cli
