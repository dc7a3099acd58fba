// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Group-spec documents:
//
//   {"family": <string>, "n": <int?>, "p": <int?>, "rank": <int?>,
//    "factors": [<spec>...]?, "factor": <spec>?, "table": [[<int>...]...]?,
//    "metadata": {"fc_center": <string>?,
//                 "abelian_by_finite": {"generators": [...], "index": <int>}?}}
//
// Metadata generators are canonical codes (JSON integer arrays). Supported
// families are those with decidable canonical forms.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groups.hpp"

namespace vnfactor {

class SpecError : public GroupError {
 public:
  SpecError(std::string const& field, std::string const& what)
      : GroupError("spec field '" + field + "': " + what), _field(field) {}
  std::string const& field() const noexcept {
    return _field;
  }

 private:
  std::string _field;
};

class UnsupportedFamily : public SpecError {
 public:
  UnsupportedFamily(std::string const& field, std::string const& name)
      : SpecError(field, "unsupported family '" + name + "'") {}
};

inline std::vector<std::string> const& supported_families() {
  static std::vector<std::string> const names{
      "symmetric", "dihedral",        "quaternion8",    "heisenberg",
      "cyclic",    "cayley",          "product",        "central_product",
      "restricted_sum", "free",       "dihedral_infinite"};
  return names;
}

namespace detail {

  inline std::string join_path(std::string const& base, std::string const& f) {
    return base.empty() ? f : base + "." + f;
  }

  inline std::int64_t int_field(nlohmann::json const& spec,
                                std::string const&    path,
                                std::string const&    key) {
    auto const full = join_path(path, key);
    if (!spec.contains(key)) {
      throw SpecError(full, "required integer is missing");
    }
    auto const& v = spec.at(key);
    if (!v.is_number_integer()) {
      throw SpecError(full, "expected an integer");
    }
    return v.get<std::int64_t>();
  }

  inline void allow_only(nlohmann::json const&           spec,
                         std::string const&              path,
                         std::vector<std::string> const& keys) {
    for (auto it = spec.begin(); it != spec.end(); ++it) {
      if (it.key() == "family" || it.key() == "metadata") {
        continue;
      }
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
        throw SpecError(join_path(path, it.key()),
                        "field not accepted by this family");
      }
    }
  }

  inline Code parse_code(nlohmann::json const& v, std::string const& path) {
    if (!v.is_array()) {
      throw SpecError(path, "expected an integer array (canonical form)");
    }
    Code c;
    for (auto const& x : v) {
      if (!x.is_number_integer()) {
        throw SpecError(path, "expected an integer array (canonical form)");
      }
      c.push_back(x.get<std::int64_t>());
    }
    return c;
  }

  inline std::shared_ptr<Group const> build_group(nlohmann::json const& spec,
                                                  std::string const&    path) {
    if (!spec.is_object()) {
      throw SpecError(path.empty() ? "<root>" : path, "expected an object");
    }
    auto const fpath = join_path(path, "family");
    if (!spec.contains("family") || !spec.at("family").is_string()) {
      throw SpecError(fpath, "required string is missing");
    }
    auto const family = spec.at("family").get<std::string>();
    try {
      if (family == "symmetric") {
        allow_only(spec, path, {"n"});
        auto n = int_field(spec, path, "n");
        if (n < 1 || n > 20) {
          throw SpecError(join_path(path, "n"), "must be in [1, 20]");
        }
        return std::make_shared<SymmetricGroup>(static_cast<unsigned>(n));
      }
      if (family == "cyclic") {
        allow_only(spec, path, {"n"});
        auto n = int_field(spec, path, "n");
        if (n < 1) {
          throw SpecError(join_path(path, "n"), "must be positive");
        }
        return std::make_shared<CyclicGroup>(n);
      }
      if (family == "dihedral") {
        allow_only(spec, path, {"n"});
        auto n = int_field(spec, path, "n");
        if (n < 1) {
          throw SpecError(join_path(path, "n"), "must be positive");
        }
        return std::make_shared<DihedralGroup>(n);
      }
      if (family == "quaternion8") {
        allow_only(spec, path, {});
        return std::make_shared<Quaternion8>();
      }
      if (family == "heisenberg") {
        allow_only(spec, path, {"p"});
        auto p = int_field(spec, path, "p");
        if (p < 2 || p > 1000) {
          throw SpecError(join_path(path, "p"), "must be in [2, 1000]");
        }
        return std::make_shared<HeisenbergGroup>(p);
      }
      if (family == "free") {
        allow_only(spec, path, {"rank"});
        auto r = int_field(spec, path, "rank");
        if (r < 0 || r > 64) {
          throw SpecError(join_path(path, "rank"), "must be in [0, 64]");
        }
        return std::make_shared<FreeGroup>(r);
      }
      if (family == "dihedral_infinite") {
        allow_only(spec, path, {});
        return std::make_shared<InfiniteDihedralGroup>();
      }
      if (family == "cayley") {
        allow_only(spec, path, {"table"});
        auto const tpath = join_path(path, "table");
        if (!spec.contains("table") || !spec.at("table").is_array()) {
          throw SpecError(tpath, "required array of rows is missing");
        }
        std::vector<std::vector<std::int64_t>> table;
        for (auto const& row : spec.at("table")) {
          if (!row.is_array()) {
            throw SpecError(tpath, "rows must be integer arrays");
          }
          std::vector<std::int64_t> r;
          for (auto const& x : row) {
            if (!x.is_number_integer()) {
              throw SpecError(tpath, "entries must be integers");
            }
            r.push_back(x.get<std::int64_t>());
          }
          table.push_back(std::move(r));
        }
        try {
          return std::make_shared<CayleyGroup>(std::move(table));
        } catch (ParameterError const& e) {
          throw SpecError(tpath, e.what());
        }
      }
      if (family == "product" || family == "central_product") {
        allow_only(spec, path, {"factors"});
        auto const fp = join_path(path, "factors");
        if (!spec.contains("factors") || !spec.at("factors").is_array()) {
          throw SpecError(fp, "required array of specs is missing");
        }
        std::vector<std::shared_ptr<Group const>> factors;
        std::size_t                               i = 0;
        for (auto const& f : spec.at("factors")) {
          factors.push_back(build_group(f, fp + "[" + std::to_string(i++) + "]"));
        }
        if (family == "central_product") {
          if (factors.size() != 2) {
            throw SpecError(fp, "central_product takes exactly two factors");
          }
          return std::make_shared<CentralProductGroup>(factors[0], factors[1]);
        }
        if (factors.empty()) {
          throw SpecError(fp, "product needs at least one factor");
        }
        return std::make_shared<ProductGroup>(std::move(factors));
      }
      if (family == "restricted_sum") {
        allow_only(spec, path, {"factor"});
        auto const fp = join_path(path, "factor");
        if (!spec.contains("factor")) {
          throw SpecError(fp, "required spec is missing");
        }
        return std::make_shared<RestrictedSumGroup>(
            build_group(spec.at("factor"), fp));
      }
    } catch (ParameterError const& e) {
      throw SpecError(path.empty() ? "family" : path, e.what());
    }
    throw UnsupportedFamily(fpath, family);
  }

  inline FamilyMetadata parse_metadata(nlohmann::json const& spec,
                                       Group const&          g,
                                       FamilyMetadata        base) {
    if (!spec.contains("metadata")) {
      return base;
    }
    auto const& md = spec.at("metadata");
    if (!md.is_object()) {
      throw SpecError("metadata", "expected an object");
    }
    for (auto it = md.begin(); it != md.end(); ++it) {
      if (it.key() != "fc_center" && it.key() != "abelian_by_finite") {
        throw SpecError("metadata." + it.key(), "unknown metadata field");
      }
    }
    if (md.contains("fc_center")) {
      if (!md.at("fc_center").is_string()) {
        throw SpecError("metadata.fc_center", "expected a string");
      }
      base.fc_center = md.at("fc_center").get<std::string>();
    }
    if (md.contains("abelian_by_finite")) {
      auto const& abf = md.at("abelian_by_finite");
      if (!abf.is_object()) {
        throw SpecError("metadata.abelian_by_finite", "expected an object");
      }
      FamilyMetadata::AbelianByFinite w;
      if (!abf.contains("generators") || !abf.at("generators").is_array()) {
        throw SpecError("metadata.abelian_by_finite.generators",
                        "required array is missing");
      }
      std::size_t i = 0;
      for (auto const& c : abf.at("generators")) {
        auto const p = "metadata.abelian_by_finite.generators["
                       + std::to_string(i++) + "]";
        auto code = parse_code(c, p);
        if (!g.is_valid(code)) {
          throw SpecError(p, "not a canonical form of this family");
        }
        w.generators.push_back(std::move(code));
      }
      if (!abf.contains("index") || !abf.at("index").is_number_integer()
          || abf.at("index").get<std::int64_t>() < 1) {
        throw SpecError("metadata.abelian_by_finite.index",
                        "expected a positive integer");
      }
      w.index               = abf.at("index").get<std::uint64_t>();
      base.abelian_by_finite = std::move(w);
    }
    return base;
  }

}  // namespace detail

// Builds a handle from a group-spec document. Throws SpecError naming the
// offending field, or UnsupportedFamily.
inline GroupHandle construct_group(nlohmann::json const& spec) {
  auto g  = detail::build_group(spec, "");
  auto md = detail::parse_metadata(spec, *g, g->builtin_metadata());
  return GroupHandle(std::move(g), std::move(md));
}

// Spec builders.
namespace specs {

  inline nlohmann::json symmetric(int n) {
    return {{"family", "symmetric"}, {"n", n}};
  }
  inline nlohmann::json cyclic(int n) {
    return {{"family", "cyclic"}, {"n", n}};
  }
  inline nlohmann::json dihedral(int n) {
    return {{"family", "dihedral"}, {"n", n}};
  }
  inline nlohmann::json quaternion8() {
    return {{"family", "quaternion8"}};
  }
  inline nlohmann::json heisenberg(int p) {
    return {{"family", "heisenberg"}, {"p", p}};
  }
  inline nlohmann::json free(int rank) {
    return {{"family", "free"}, {"rank", rank}};
  }
  inline nlohmann::json dihedral_infinite() {
    return {{"family", "dihedral_infinite"}};
  }
  inline nlohmann::json product(std::vector<nlohmann::json> factors) {
    return {{"family", "product"}, {"factors", std::move(factors)}};
  }
  inline nlohmann::json central_product(nlohmann::json a, nlohmann::json b) {
    return {{"family", "central_product"},
            {"factors", nlohmann::json::array({std::move(a), std::move(b)})}};
  }
  inline nlohmann::json restricted_sum(nlohmann::json factor) {
    return {{"family", "restricted_sum"}, {"factor", std::move(factor)}};
  }
  inline nlohmann::json cayley(std::vector<std::vector<std::int64_t>> table) {
    return {{"family", "cayley"}, {"table", std::move(table)}};
  }

}  // namespace specs

}  // namespace vnfactor
