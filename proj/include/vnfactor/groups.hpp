// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Uniform group abstraction. Every element is a canonical code (a vector of
// 64-bit integers whose meaning is fixed per family) tagged with the id of the
// group it belongs to; equal elements have identical codes. Families:
//
//   symmetric(n)        one-line images, 0-based; (ab)(x) = a(b(x))
//   cyclic(n)           [k], k mod n
//   dihedral(n)         [k, s] = r^k s^s, order 2n
//   quaternion8         [unit, sign], unit in {1,i,j,k} as 0..3, sign in {0,1}
//   heisenberg(p)       [a, b, c] upper unitriangular matrices mod p
//   cayley(table)       [index] into the multiplication table
//   product(factors)    concatenation of [len, code...] blocks
//   central_product     product code of (a, b) modulo the diagonal central
//                       involution; the lexicographically smaller
//                       representative is canonical
//   restricted_sum(F)   sorted [coord, len, code...] blocks of the non-identity
//                       coordinates
//   free(rank)          freely reduced word, letters +-(i+1)
//   dihedral_infinite   [n, s] with (n,s)(m,t) = (n + (-1)^s m, s xor t)

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

namespace vnfactor {

using Code = std::vector<std::int64_t>;

class GroupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainMismatch : public GroupError {
 public:
  using GroupError::GroupError;
};

class RequiresFinite : public GroupError {
 public:
  using GroupError::GroupError;
};

class ParameterError : public GroupError {
 public:
  using GroupError::GroupError;
};

class PreconditionViolation : public GroupError {
 public:
  using GroupError::GroupError;
};

struct Finiteness {
  enum class Kind { finite, infinite, unknown };
  Kind          kind  = Kind::unknown;
  std::uint64_t order = 0;

  bool is_finite() const noexcept {
    return kind == Kind::finite;
  }

  static Finiteness finite(std::uint64_t n) {
    return {Kind::finite, n};
  }
  static Finiteness infinite() {
    return {Kind::infinite, 0};
  }
  static Finiteness unknown() {
    return {Kind::unknown, 0};
  }
};

class Element {
 public:
  Element() = default;
  Element(std::uint64_t domain, Code code)
      : _domain(domain), _code(std::move(code)) {}

  std::uint64_t domain() const noexcept {
    return _domain;
  }

  Code const& code() const noexcept {
    return _code;
  }

  friend bool operator==(Element const& a, Element const& b) {
    return a._domain == b._domain && a._code == b._code;
  }
  friend bool operator!=(Element const& a, Element const& b) {
    return !(a == b);
  }
  friend bool operator<(Element const& a, Element const& b) {
    if (a._domain != b._domain) {
      return a._domain < b._domain;
    }
    return a._code < b._code;
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = 1469598103934665603ULL ^ _domain;
    for (auto x : _code) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6)
           + (h >> 2);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  std::uint64_t _domain = 0;
  Code          _code;
};

struct ElementHash {
  std::size_t operator()(Element const& e) const noexcept {
    return e.hash();
  }
};

using ElementSet = std::vector<Element>;

// Declared structure that cannot be decided from the group oracle alone.
struct FamilyMetadata {
  struct AbelianByFinite {
    std::vector<Code> generators;
    std::uint64_t     index = 0;
  };
  // "all" (G^fin = G), "trivial" (icc), or a family-specific subgroup name.
  std::optional<std::string>     fc_center;
  std::optional<AbelianByFinite> abelian_by_finite;
};

////////////////////////////////////////////////////////////////////////
// Group oracle
////////////////////////////////////////////////////////////////////////

class Group {
 public:
  Group() : _id(next_id()) {}
  Group(Group const&)            = delete;
  Group& operator=(Group const&) = delete;
  virtual ~Group()               = default;

  std::uint64_t id() const noexcept {
    return _id;
  }

  virtual std::string family() const                                  = 0;
  virtual Finiteness  finiteness() const                              = 0;
  virtual Code        identity() const                                = 0;
  virtual Code        multiply(Code const& a, Code const& b) const    = 0;
  virtual Code        invert(Code const& a) const                     = 0;
  virtual bool        is_valid(Code const& a) const                   = 0;
  virtual std::string format(Code const& a) const                     = 0;
  // nullopt means countably many generators, listed lazily.
  virtual std::optional<std::size_t> generator_count() const         = 0;
  virtual Code                       generator(std::size_t i) const  = 0;

  // Number of leading generators visible at enumeration stage s; only
  // consulted for infinitely generated groups.
  virtual std::size_t generator_window(std::size_t stage) const {
    return generator_count().value_or(stage);
  }

  // Indices of generators whose conjugation action can move g. Conjugating
  // by any other generator fixes g.
  virtual std::vector<std::size_t> conjugating_generators(Code const&) const {
    std::vector<std::size_t> out(generator_count().value_or(0));
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = i;
    }
    return out;
  }

  // true/false when known without search.
  virtual std::optional<bool> is_abelian() const {
    return std::nullopt;
  }

  virtual FamilyMetadata builtin_metadata() const {
    auto f = finiteness();
    if (f.is_finite()) {
      FamilyMetadata m;
      m.fc_center         = "all";
      m.abelian_by_finite = FamilyMetadata::AbelianByFinite{{}, f.order};
      return m;
    }
    return {};
  }

  // Membership in the subgroup named by builtin_metadata().fc_center when it
  // is family specific; nullopt when not applicable.
  virtual std::optional<bool> in_named_fc_center(Code const&) const {
    return std::nullopt;
  }

 private:
  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter++;
  }

  std::uint64_t _id;
};

namespace detail {

  inline std::uint64_t factorial(unsigned n) {
    std::uint64_t r = 1;
    for (unsigned i = 2; i <= n; ++i) {
      r *= i;
    }
    return r;
  }

  inline std::int64_t mod(std::int64_t a, std::int64_t n) {
    auto r = a % n;
    return r < 0 ? r + n : r;
  }

  inline std::string letter_name(std::size_t i) {
    static char const* names[] = {"x", "y", "z", "w"};
    if (i < 4) {
      return names[i];
    }
    return "a" + std::to_string(i + 1);
  }

  // Decomposes a concatenation of [len, code...] blocks.
  inline std::vector<Code> split_blocks(Code const& code, std::size_t count) {
    std::vector<Code> out;
    std::size_t       pos = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (pos >= code.size() || code[pos] < 0) {
        throw GroupError("malformed product code");
      }
      auto len = static_cast<std::size_t>(code[pos++]);
      if (pos + len > code.size()) {
        throw GroupError("malformed product code");
      }
      out.emplace_back(code.begin() + pos, code.begin() + pos + len);
      pos += len;
    }
    if (pos != code.size()) {
      throw GroupError("malformed product code");
    }
    return out;
  }

  inline Code join_blocks(std::vector<Code> const& parts) {
    Code out;
    for (auto const& p : parts) {
      out.push_back(static_cast<std::int64_t>(p.size()));
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }

  // Finite groups from which every element can be listed by closure.
  std::vector<Code> all_codes(Group const& g, std::size_t limit);

}  // namespace detail

////////////////////////////////////////////////////////////////////////
// Families
////////////////////////////////////////////////////////////////////////

class SymmetricGroup final : public Group {
 public:
  explicit SymmetricGroup(unsigned n) : _n(n) {
    if (n < 1 || n > 20) {
      throw ParameterError("symmetric: degree must be in [1, 20]");
    }
  }

  unsigned degree() const noexcept {
    return _n;
  }

  std::string family() const override {
    return "symmetric";
  }
  Finiteness finiteness() const override {
    return Finiteness::finite(detail::factorial(_n));
  }
  Code identity() const override {
    Code c(_n);
    for (unsigned i = 0; i < _n; ++i) {
      c[i] = i;
    }
    return c;
  }
  Code multiply(Code const& a, Code const& b) const override {
    Code c(_n);
    for (unsigned i = 0; i < _n; ++i) {
      c[i] = a[static_cast<std::size_t>(b[i])];
    }
    return c;
  }
  Code invert(Code const& a) const override {
    Code c(_n);
    for (unsigned i = 0; i < _n; ++i) {
      c[static_cast<std::size_t>(a[i])] = i;
    }
    return c;
  }
  bool is_valid(Code const& a) const override {
    if (a.size() != _n) {
      return false;
    }
    std::vector<bool> seen(_n, false);
    for (auto x : a) {
      if (x < 0 || x >= static_cast<std::int64_t>(_n) || seen[x]) {
        return false;
      }
      seen[x] = true;
    }
    return true;
  }
  // Cycle notation with points 1..n.
  std::string format(Code const& a) const override {
    std::ostringstream os;
    std::vector<bool>  seen(_n, false);
    bool               any = false;
    for (unsigned i = 0; i < _n; ++i) {
      if (seen[i] || a[i] == static_cast<std::int64_t>(i)) {
        continue;
      }
      any = true;
      os << "(";
      unsigned j     = i;
      bool     first = true;
      while (!seen[j]) {
        seen[j] = true;
        os << (first ? "" : " ") << (j + 1);
        first = false;
        j     = static_cast<unsigned>(a[j]);
      }
      os << ")";
    }
    return any ? os.str() : "()";
  }
  std::optional<std::size_t> generator_count() const override {
    return _n < 2 ? 0 : (_n == 2 ? 1 : 2);
  }
  // (1 2), then the n-cycle (1 2 ... n).
  Code generator(std::size_t i) const override {
    Code c = identity();
    if (i == 0) {
      std::swap(c[0], c[1]);
    } else {
      for (unsigned k = 0; k < _n; ++k) {
        c[k] = (k + 1) % _n;
      }
    }
    return c;
  }
  std::optional<bool> is_abelian() const override {
    return _n <= 2;
  }

 private:
  unsigned _n;
};

class CyclicGroup final : public Group {
 public:
  explicit CyclicGroup(std::int64_t n) : _n(n) {
    if (n < 1) {
      throw ParameterError("cyclic: order must be positive");
    }
  }
  std::string family() const override {
    return "cyclic";
  }
  Finiteness finiteness() const override {
    return Finiteness::finite(static_cast<std::uint64_t>(_n));
  }
  Code identity() const override {
    return {0};
  }
  Code multiply(Code const& a, Code const& b) const override {
    return {(a[0] + b[0]) % _n};
  }
  Code invert(Code const& a) const override {
    return {(_n - a[0]) % _n};
  }
  bool is_valid(Code const& a) const override {
    return a.size() == 1 && a[0] >= 0 && a[0] < _n;
  }
  std::string format(Code const& a) const override {
    if (a[0] == 0) {
      return "e";
    }
    return a[0] == 1 ? "c" : "c^" + std::to_string(a[0]);
  }
  std::optional<std::size_t> generator_count() const override {
    return _n > 1 ? 1 : 0;
  }
  Code generator(std::size_t) const override {
    return {1 % _n};
  }
  std::optional<bool> is_abelian() const override {
    return true;
  }

 private:
  std::int64_t _n;
};

class DihedralGroup final : public Group {
 public:
  explicit DihedralGroup(std::int64_t n) : _n(n) {
    if (n < 1) {
      throw ParameterError("dihedral: n must be positive");
    }
  }
  std::string family() const override {
    return "dihedral";
  }
  Finiteness finiteness() const override {
    return Finiteness::finite(static_cast<std::uint64_t>(2 * _n));
  }
  Code identity() const override {
    return {0, 0};
  }
  Code multiply(Code const& a, Code const& b) const override {
    std::int64_t k = a[1] == 0 ? a[0] + b[0] : a[0] - b[0];
    return {detail::mod(k, _n), a[1] ^ b[1]};
  }
  Code invert(Code const& a) const override {
    if (a[1] == 1) {
      return a;
    }
    return {detail::mod(-a[0], _n), 0};
  }
  bool is_valid(Code const& a) const override {
    return a.size() == 2 && a[0] >= 0 && a[0] < _n && (a[1] == 0 || a[1] == 1);
  }
  std::string format(Code const& a) const override {
    std::string r;
    if (a[0] != 0) {
      r = a[0] == 1 ? "r" : "r^" + std::to_string(a[0]);
    }
    if (a[1] == 1) {
      r += r.empty() ? "s" : " s";
    }
    return r.empty() ? "e" : r;
  }
  std::optional<std::size_t> generator_count() const override {
    return 2;
  }
  Code generator(std::size_t i) const override {
    return i == 0 ? Code{1 % _n, 0} : Code{0, 1};
  }
  std::optional<bool> is_abelian() const override {
    return _n <= 2;
  }

 private:
  std::int64_t _n;
};

class Quaternion8 final : public Group {
 public:
  std::string family() const override {
    return "quaternion8";
  }
  Finiteness finiteness() const override {
    return Finiteness::finite(8);
  }
  Code identity() const override {
    return {0, 0};
  }
  Code multiply(Code const& a, Code const& b) const override {
    // unit products: i*j = k, j*k = i, k*i = j, i*i = -1, ...
    static constexpr int unit[4][4] = {
        {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static constexpr int sign[4][4] = {
        {0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
    auto u = static_cast<std::size_t>(a[0]);
    auto v = static_cast<std::size_t>(b[0]);
    return {unit[u][v], (a[1] + b[1] + sign[u][v]) % 2};
  }
  Code invert(Code const& a) const override {
    if (a[0] == 0) {
      return a;
    }
    return {a[0], 1 - a[1]};
  }
  bool is_valid(Code const& a) const override {
    return a.size() == 2 && a[0] >= 0 && a[0] < 4 && (a[1] == 0 || a[1] == 1);
  }
  std::string format(Code const& a) const override {
    static char const* names[] = {"1", "i", "j", "k"};
    return std::string(a[1] == 1 ? "-" : "") + names[a[0]];
  }
  std::optional<std::size_t> generator_count() const override {
    return 2;
  }
  Code generator(std::size_t i) const override {
    return {static_cast<std::int64_t>(i + 1), 0};
  }
  std::optional<bool> is_abelian() const override {
    return false;
  }
};

class HeisenbergGroup final : public Group {
 public:
  explicit HeisenbergGroup(std::int64_t p) : _p(p) {
    if (p < 2) {
      throw ParameterError("heisenberg: p must be at least 2");
    }
  }
  std::string family() const override {
    return "heisenberg";
  }
  Finiteness finiteness() const override {
    auto p = static_cast<std::uint64_t>(_p);
    return Finiteness::finite(p * p * p);
  }
  Code identity() const override {
    return {0, 0, 0};
  }
  Code multiply(Code const& a, Code const& b) const override {
    return {(a[0] + b[0]) % _p, (a[1] + b[1]) % _p,
            (a[2] + b[2] + a[0] * b[1]) % _p};
  }
  Code invert(Code const& a) const override {
    return {detail::mod(-a[0], _p), detail::mod(-a[1], _p),
            detail::mod(-a[2] + a[0] * a[1], _p)};
  }
  bool is_valid(Code const& a) const override {
    return a.size() == 3
           && std::all_of(a.begin(), a.end(),
                          [&](auto x) { return x >= 0 && x < _p; });
  }
  std::string format(Code const& a) const override {
    return "[" + std::to_string(a[0]) + "," + std::to_string(a[1]) + ","
           + std::to_string(a[2]) + "]";
  }
  std::optional<std::size_t> generator_count() const override {
    return 2;
  }
  Code generator(std::size_t i) const override {
    return i == 0 ? Code{1, 0, 0} : Code{0, 1, 0};
  }
  std::optional<bool> is_abelian() const override {
    return false;
  }

 private:
  std::int64_t _p;
};

class CayleyGroup final : public Group {
 public:
  explicit CayleyGroup(std::vector<std::vector<std::int64_t>> table)
      : _table(std::move(table)) {
    auto const n = _table.size();
    if (n == 0) {
      throw ParameterError("cayley: table must be non-empty");
    }
    if (n > 512) {
      throw ParameterError("cayley: tables larger than 512 are not supported");
    }
    for (auto const& row : _table) {
      if (row.size() != n) {
        throw ParameterError("cayley: table must be square");
      }
      for (auto x : row) {
        if (x < 0 || x >= static_cast<std::int64_t>(n)) {
          throw ParameterError("cayley: entry out of range");
        }
      }
    }
    std::optional<std::size_t> id;
    for (std::size_t e = 0; e < n && !id; ++e) {
      bool ok = true;
      for (std::size_t x = 0; x < n && ok; ++x) {
        ok = _table[e][x] == static_cast<std::int64_t>(x)
             && _table[x][e] == static_cast<std::int64_t>(x);
      }
      if (ok) {
        id = e;
      }
    }
    if (!id) {
      throw ParameterError("cayley: no identity element");
    }
    _identity = static_cast<std::int64_t>(*id);
    _inverse.assign(n, -1);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (_table[x][y] == _identity) {
          _inverse[x] = static_cast<std::int64_t>(y);
          break;
        }
      }
      if (_inverse[x] < 0
          || _table[static_cast<std::size_t>(_inverse[x])][x] != _identity) {
        throw ParameterError("cayley: element without two-sided inverse");
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        auto ab = static_cast<std::size_t>(_table[a][b]);
        for (std::size_t c = 0; c < n; ++c) {
          auto bc = static_cast<std::size_t>(_table[b][c]);
          if (_table[ab][c] != _table[a][bc]) {
            throw ParameterError("cayley: table is not associative");
          }
        }
      }
    }
    // Greedy generating set: smallest index outside the current closure.
    std::vector<bool> in(n, false);
    in[*id] = true;
    std::vector<std::size_t> members{*id};
    for (std::size_t g = 0; g < n; ++g) {
      if (in[g]) {
        continue;
      }
      _generators.push_back(static_cast<std::int64_t>(g));
      std::vector<std::size_t> frontier = members;
      while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (auto x : frontier) {
          for (auto s : _generators) {
            auto y = static_cast<std::size_t>(_table[x][s]);
            if (!in[y]) {
              in[y] = true;
              members.push_back(y);
              next.push_back(y);
            }
          }
        }
        frontier = std::move(next);
      }
    }
  }
  std::string family() const override {
    return "cayley";
  }
  Finiteness finiteness() const override {
    return Finiteness::finite(_table.size());
  }
  Code identity() const override {
    return {_identity};
  }
  Code multiply(Code const& a, Code const& b) const override {
    return {_table[a[0]][b[0]]};
  }
  Code invert(Code const& a) const override {
    return {_inverse[a[0]]};
  }
  bool is_valid(Code const& a) const override {
    return a.size() == 1 && a[0] >= 0
           && a[0] < static_cast<std::int64_t>(_table.size());
  }
  std::string format(Code const& a) const override {
    return a[0] == _identity ? "e" : "g" + std::to_string(a[0]);
  }
  std::optional<std::size_t> generator_count() const override {
    return _generators.size();
  }
  Code generator(std::size_t i) const override {
    return {_generators[i]};
  }

 private:
  std::vector<std::vector<std::int64_t>> _table;
  std::vector<std::int64_t>              _inverse;
  std::vector<std::int64_t>              _generators;
  std::int64_t                           _identity = 0;
};

class ProductGroup final : public Group {
 public:
  explicit ProductGroup(std::vector<std::shared_ptr<Group const>> factors)
      : _factors(std::move(factors)) {
    for (auto const& f : _factors) {
      if (!f->generator_count()) {
        throw ParameterError("product: factors must be finitely generated");
      }
      _offsets.push_back(_total_gens);
      _total_gens += *f->generator_count();
    }
  }
  std::vector<std::shared_ptr<Group const>> const& factors() const noexcept {
    return _factors;
  }
  std::string family() const override {
    return "product";
  }
  Finiteness finiteness() const override {
    std::uint64_t order = 1;
    bool          unknown = false;
    for (auto const& f : _factors) {
      auto fi = f->finiteness();
      if (fi.kind == Finiteness::Kind::infinite) {
        return Finiteness::infinite();
      }
      if (fi.kind == Finiteness::Kind::unknown) {
        unknown = true;
      } else {
        order *= fi.order;
      }
    }
    return unknown ? Finiteness::unknown() : Finiteness::finite(order);
  }
  Code identity() const override {
    std::vector<Code> parts;
    for (auto const& f : _factors) {
      parts.push_back(f->identity());
    }
    return detail::join_blocks(parts);
  }
  Code multiply(Code const& a, Code const& b) const override {
    auto pa = detail::split_blocks(a, _factors.size());
    auto pb = detail::split_blocks(b, _factors.size());
    for (std::size_t i = 0; i < _factors.size(); ++i) {
      pa[i] = _factors[i]->multiply(pa[i], pb[i]);
    }
    return detail::join_blocks(pa);
  }
  Code invert(Code const& a) const override {
    auto pa = detail::split_blocks(a, _factors.size());
    for (std::size_t i = 0; i < _factors.size(); ++i) {
      pa[i] = _factors[i]->invert(pa[i]);
    }
    return detail::join_blocks(pa);
  }
  bool is_valid(Code const& a) const override {
    try {
      auto pa = detail::split_blocks(a, _factors.size());
      for (std::size_t i = 0; i < _factors.size(); ++i) {
        if (!_factors[i]->is_valid(pa[i])) {
          return false;
        }
      }
      return true;
    } catch (GroupError const&) {
      return false;
    }
  }
  std::string format(Code const& a) const override {
    auto        pa = detail::split_blocks(a, _factors.size());
    std::string out = "<";
    for (std::size_t i = 0; i < pa.size(); ++i) {
      out += (i ? ", " : "") + _factors[i]->format(pa[i]);
    }
    return out + ">";
  }
  std::optional<std::size_t> generator_count() const override {
    return _total_gens;
  }
  Code generator(std::size_t i) const override {
    std::size_t f = 0;
    while (f + 1 < _offsets.size() && _offsets[f + 1] <= i) {
      ++f;
    }
    return embed(f, _factors[f]->generator(i - _offsets[f]));
  }
  Code embed(std::size_t factor, Code const& c) const {
    std::vector<Code> parts;
    for (std::size_t j = 0; j < _factors.size(); ++j) {
      parts.push_back(j == factor ? c : _factors[j]->identity());
    }
    return detail::join_blocks(parts);
  }
  std::optional<bool> is_abelian() const override {
    bool all = true;
    for (auto const& f : _factors) {
      auto ab = f->is_abelian();
      if (!ab) {
        return std::nullopt;
      }
      all = all && *ab;
    }
    return all;
  }
  FamilyMetadata builtin_metadata() const override {
    if (finiteness().is_finite()) {
      return Group::builtin_metadata();
    }
    FamilyMetadata m;
    bool           all_fc = true, all_trivial = true;
    for (auto const& f : _factors) {
      auto fm = f->builtin_metadata();
      all_fc  = all_fc && fm.fc_center == std::optional<std::string>("all");
      all_trivial
          = all_trivial && fm.fc_center == std::optional<std::string>("trivial");
    }
    if (all_fc) {
      m.fc_center = "all";
    } else if (all_trivial) {
      m.fc_center = "trivial";
    }
    return m;
  }

 private:
  std::vector<std::shared_ptr<Group const>> _factors;
  std::vector<std::size_t>                  _offsets;
  std::size_t                               _total_gens = 0;
};

// (A x B) / <(z_A, z_B)> for the unique central involutions z_A, z_B.
class CentralProductGroup final : public Group {
 public:
  CentralProductGroup(std::shared_ptr<Group const> a,
                      std::shared_ptr<Group const> b)
      : _a(std::move(a)), _b(std::move(b)) {
    if (!_a->finiteness().is_finite() || !_b->finiteness().is_finite()) {
      throw ParameterError("central_product: factors must be finite");
    }
    _za = central_involution(*_a);
    _zb = central_involution(*_b);
  }
  std::vector<std::shared_ptr<Group const>> factors() const {
    return {_a, _b};
  }
  std::string family() const override {
    return "central_product";
  }
  Finiteness finiteness() const override {
    return Finiteness::finite(_a->finiteness().order * _b->finiteness().order
                              / 2);
  }
  Code identity() const override {
    return normalize(_a->identity(), _b->identity());
  }
  Code multiply(Code const& x, Code const& y) const override {
    auto px = detail::split_blocks(x, 2);
    auto py = detail::split_blocks(y, 2);
    return normalize(_a->multiply(px[0], py[0]), _b->multiply(px[1], py[1]));
  }
  Code invert(Code const& x) const override {
    auto px = detail::split_blocks(x, 2);
    return normalize(_a->invert(px[0]), _b->invert(px[1]));
  }
  bool is_valid(Code const& x) const override {
    try {
      auto px = detail::split_blocks(x, 2);
      return _a->is_valid(px[0]) && _b->is_valid(px[1])
             && normalize(px[0], px[1]) == x;
    } catch (GroupError const&) {
      return false;
    }
  }
  std::string format(Code const& x) const override {
    auto px = detail::split_blocks(x, 2);
    return "<" + _a->format(px[0]) + " . " + _b->format(px[1]) + ">";
  }
  std::optional<std::size_t> generator_count() const override {
    return *_a->generator_count() + *_b->generator_count();
  }
  Code generator(std::size_t i) const override {
    auto na = *_a->generator_count();
    if (i < na) {
      return normalize(_a->generator(i), _b->identity());
    }
    return normalize(_a->identity(), _b->generator(i - na));
  }
  Code embed(std::size_t factor, Code const& c) const {
    return factor == 0 ? normalize(c, _b->identity())
                       : normalize(_a->identity(), c);
  }

 private:
  static Code central_involution(Group const& g) {
    auto                   elems = detail::all_codes(g, 100000);
    std::optional<Code>    found;
    auto const             e = g.identity();
    for (auto const& z : elems) {
      if (z == e || g.multiply(z, z) != e) {
        continue;
      }
      bool central = true;
      for (std::size_t i = 0; i < *g.generator_count() && central; ++i) {
        auto s  = g.generator(i);
        central = g.multiply(z, s) == g.multiply(s, z);
      }
      if (central) {
        if (found) {
          throw ParameterError(
              "central_product: factor has more than one central involution");
        }
        found = z;
      }
    }
    if (!found) {
      throw ParameterError("central_product: factor has no central involution");
    }
    return *found;
  }

  Code normalize(Code const& x, Code const& y) const {
    Code c1 = detail::join_blocks({x, y});
    Code c2 = detail::join_blocks({_a->multiply(x, _za), _b->multiply(y, _zb)});
    return std::min(c1, c2);
  }

  std::shared_ptr<Group const> _a, _b;
  Code                         _za, _zb;
};

// Finitely supported maps N -> F.
class RestrictedSumGroup final : public Group {
 public:
  explicit RestrictedSumGroup(std::shared_ptr<Group const> factor)
      : _factor(std::move(factor)) {
    if (!_factor->generator_count()) {
      throw ParameterError("restricted_sum: factor must be finitely generated");
    }
    _m = *_factor->generator_count();
  }
  Group const& factor() const noexcept {
    return *_factor;
  }
  std::string family() const override {
    return "restricted_sum";
  }
  Finiteness finiteness() const override {
    if (_m == 0) {
      return Finiteness::finite(1);
    }
    return Finiteness::infinite();
  }
  Code identity() const override {
    return {};
  }
  Code multiply(Code const& a, Code const& b) const override {
    auto ea = entries(a);
    auto eb = entries(b);
    std::vector<std::pair<std::int64_t, Code>> out;
    std::size_t i = 0, j = 0;
    Code const  fe = _factor->identity();
    while (i < ea.size() || j < eb.size()) {
      if (j == eb.size() || (i < ea.size() && ea[i].first < eb[j].first)) {
        out.push_back(std::move(ea[i++]));
      } else if (i == ea.size() || eb[j].first < ea[i].first) {
        out.push_back(std::move(eb[j++]));
      } else {
        auto c = _factor->multiply(ea[i].second, eb[j].second);
        if (c != fe) {
          out.emplace_back(ea[i].first, std::move(c));
        }
        ++i;
        ++j;
      }
    }
    return pack(out);
  }
  Code invert(Code const& a) const override {
    auto ea = entries(a);
    for (auto& [coord, c] : ea) {
      c = _factor->invert(c);
    }
    return pack(ea);
  }
  bool is_valid(Code const& a) const override {
    try {
      auto         ea   = entries(a);
      std::int64_t last = -1;
      for (auto const& [coord, c] : ea) {
        if (coord <= last || !_factor->is_valid(c) || c == _factor->identity()) {
          return false;
        }
        last = coord;
      }
      return true;
    } catch (GroupError const&) {
      return false;
    }
  }
  std::string format(Code const& a) const override {
    auto ea = entries(a);
    if (ea.empty()) {
      return "e";
    }
    std::string out = "[";
    for (std::size_t i = 0; i < ea.size(); ++i) {
      out += (i ? ", " : "") + std::to_string(ea[i].first) + ":"
             + _factor->format(ea[i].second);
    }
    return out + "]";
  }
  std::optional<std::size_t> generator_count() const override {
    if (_m == 0) {
      return 0;
    }
    return std::nullopt;
  }
  Code generator(std::size_t i) const override {
    return embed(static_cast<std::int64_t>(i / _m), _factor->generator(i % _m));
  }
  std::size_t generator_window(std::size_t stage) const override {
    return stage * _m;
  }
  std::vector<std::size_t> conjugating_generators(Code const& a) const override {
    std::vector<std::size_t> out;
    for (auto const& [coord, c] : entries(a)) {
      for (std::size_t k = 0; k < _m; ++k) {
        out.push_back(static_cast<std::size_t>(coord) * _m + k);
      }
    }
    return out;
  }
  std::optional<bool> is_abelian() const override {
    return _factor->is_abelian();
  }
  FamilyMetadata builtin_metadata() const override {
    FamilyMetadata m;
    auto           fm = _factor->builtin_metadata();
    if (fm.fc_center == std::optional<std::string>("all")) {
      m.fc_center = "all";
    }
    return m;
  }

  Code embed(std::int64_t coord, Code const& c) const {
    if (c == _factor->identity()) {
      return {};
    }
    return pack({{coord, c}});
  }

  std::vector<std::pair<std::int64_t, Code>> entries(Code const& a) const {
    std::vector<std::pair<std::int64_t, Code>> out;
    std::size_t                                pos = 0;
    while (pos < a.size()) {
      if (pos + 2 > a.size() || a[pos + 1] < 0) {
        throw GroupError("malformed restricted_sum code");
      }
      auto coord = a[pos];
      auto len   = static_cast<std::size_t>(a[pos + 1]);
      pos += 2;
      if (pos + len > a.size()) {
        throw GroupError("malformed restricted_sum code");
      }
      out.emplace_back(coord, Code(a.begin() + pos, a.begin() + pos + len));
      pos += len;
    }
    return out;
  }

 private:
  static Code pack(std::vector<std::pair<std::int64_t, Code>> const& e) {
    Code out;
    for (auto const& [coord, c] : e) {
      out.push_back(coord);
      out.push_back(static_cast<std::int64_t>(c.size()));
      out.insert(out.end(), c.begin(), c.end());
    }
    return out;
  }

  std::shared_ptr<Group const> _factor;
  std::size_t                  _m = 0;
};

class FreeGroup final : public Group {
 public:
  explicit FreeGroup(std::int64_t rank) : _rank(rank) {
    if (rank < 0 || rank > 64) {
      throw ParameterError("free: rank must be in [0, 64]");
    }
  }
  std::string family() const override {
    return "free";
  }
  Finiteness finiteness() const override {
    return _rank == 0 ? Finiteness::finite(1) : Finiteness::infinite();
  }
  Code identity() const override {
    return {};
  }
  Code multiply(Code const& a, Code const& b) const override {
    Code out = a;
    for (auto x : b) {
      if (!out.empty() && out.back() == -x) {
        out.pop_back();
      } else {
        out.push_back(x);
      }
    }
    return out;
  }
  Code invert(Code const& a) const override {
    Code out(a.rbegin(), a.rend());
    for (auto& x : out) {
      x = -x;
    }
    return out;
  }
  bool is_valid(Code const& a) const override {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0 || a[i] > _rank || a[i] < -_rank) {
        return false;
      }
      if (i > 0 && a[i] == -a[i - 1]) {
        return false;
      }
    }
    return true;
  }
  std::string format(Code const& a) const override {
    if (a.empty()) {
      return "e";
    }
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      out += (i ? " " : "")
             + detail::letter_name(static_cast<std::size_t>(std::abs(a[i]) - 1))
             + (a[i] < 0 ? "^-1" : "");
    }
    return out;
  }
  std::optional<std::size_t> generator_count() const override {
    return static_cast<std::size_t>(_rank);
  }
  Code generator(std::size_t i) const override {
    return {static_cast<std::int64_t>(i + 1)};
  }
  std::optional<bool> is_abelian() const override {
    return _rank <= 1;
  }
  FamilyMetadata builtin_metadata() const override {
    FamilyMetadata m;
    if (_rank <= 1) {
      m.fc_center = "all";
      m.abelian_by_finite
          = FamilyMetadata::AbelianByFinite{_rank == 1 ? std::vector<Code>{{1}}
                                                       : std::vector<Code>{},
                                            1};
    } else {
      m.fc_center = "trivial";
    }
    return m;
  }

 private:
  std::int64_t _rank;
};

class InfiniteDihedralGroup final : public Group {
 public:
  std::string family() const override {
    return "dihedral_infinite";
  }
  Finiteness finiteness() const override {
    return Finiteness::infinite();
  }
  Code identity() const override {
    return {0, 0};
  }
  Code multiply(Code const& a, Code const& b) const override {
    return {a[1] == 0 ? a[0] + b[0] : a[0] - b[0], a[1] ^ b[1]};
  }
  Code invert(Code const& a) const override {
    if (a[1] == 1) {
      return a;
    }
    return {-a[0], 0};
  }
  bool is_valid(Code const& a) const override {
    return a.size() == 2 && (a[1] == 0 || a[1] == 1);
  }
  std::string format(Code const& a) const override {
    return "(" + std::to_string(a[0]) + "," + std::to_string(a[1]) + ")";
  }
  std::optional<std::size_t> generator_count() const override {
    return 2;
  }
  // translation (1,0), reflection (0,1)
  Code generator(std::size_t i) const override {
    return i == 0 ? Code{1, 0} : Code{0, 1};
  }
  std::optional<bool> is_abelian() const override {
    return false;
  }
  FamilyMetadata builtin_metadata() const override {
    FamilyMetadata m;
    m.fc_center         = "translations";
    m.abelian_by_finite = FamilyMetadata::AbelianByFinite{{{1, 0}}, 2};
    return m;
  }
  std::optional<bool> in_named_fc_center(Code const& a) const override {
    return a[1] == 0;
  }
};

////////////////////////////////////////////////////////////////////////
// Handles
////////////////////////////////////////////////////////////////////////

class GroupHandle {
 public:
  GroupHandle() = default;
  explicit GroupHandle(std::shared_ptr<Group const> group,
                       std::optional<FamilyMetadata> metadata = std::nullopt)
      : _group(std::move(group)),
        _metadata(metadata ? std::move(*metadata)
                           : _group->builtin_metadata()) {}

  Group const& group() const {
    return *_group;
  }
  std::shared_ptr<Group const> const& group_ptr() const noexcept {
    return _group;
  }
  std::uint64_t id() const {
    return _group->id();
  }
  std::string family() const {
    return _group->family();
  }
  Finiteness finiteness() const {
    return _group->finiteness();
  }
  FamilyMetadata const& metadata() const noexcept {
    return _metadata;
  }

  Element identity() const {
    return {id(), _group->identity()};
  }

  // Validates the code against the family's canonical form.
  Element element(Code code) const {
    if (!_group->is_valid(code)) {
      throw GroupError("invalid canonical form for family "
                       + _group->family());
    }
    return {id(), std::move(code)};
  }

  Element mul(Element const& a, Element const& b) const {
    check(a);
    check(b);
    return {id(), _group->multiply(a.code(), b.code())};
  }

  Element inv(Element const& a) const {
    check(a);
    return {id(), _group->invert(a.code())};
  }

  // h g h^-1
  Element conjugate(Element const& g, Element const& h) const {
    return mul(mul(h, g), inv(h));
  }

  // g h g^-1 h^-1
  Element commutator(Element const& g, Element const& h) const {
    return mul(mul(g, h), mul(inv(g), inv(h)));
  }

  bool commute(Element const& g, Element const& h) const {
    return mul(g, h) == mul(h, g);
  }

  bool is_identity(Element const& g) const {
    check(g);
    return g.code() == _group->identity();
  }

  std::string format(Element const& g) const {
    check(g);
    return _group->format(g.code());
  }

  std::optional<std::size_t> generator_count() const {
    return _group->generator_count();
  }

  Element generator(std::size_t i) const {
    return {id(), _group->generator(i)};
  }

  // First min(limit, count) generators.
  std::vector<Element> generators(std::size_t limit) const {
    auto                 n = std::min(limit, generator_count().value_or(limit));
    std::vector<Element> out;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(generator(i));
    }
    return out;
  }

  void check(Element const& a) const {
    if (a.domain() != id()) {
      throw DomainMismatch("element does not belong to group "
                           + _group->family());
    }
  }

 private:
  std::shared_ptr<Group const> _group;
  FamilyMetadata               _metadata;
};

enum class GroupOp { mul, inv };

inline Element group_law(GroupHandle const& h, Element const& a,
                         Element const& b, GroupOp op) {
  if (op == GroupOp::inv) {
    h.check(b);
    return h.inv(a);
  }
  return h.mul(a, b);
}

////////////////////////////////////////////////////////////////////////
// Enumeration and closure
////////////////////////////////////////////////////////////////////////

namespace detail {

  // Generators followed by their inverses, identity and repeats dropped.
  inline std::vector<Element> letters(GroupHandle const&          h,
                                      std::vector<Element> const& gens) {
    std::vector<Element>                         out;
    std::unordered_set<Element, ElementHash> seen;
    for (auto const& g : gens) {
      for (auto const& x : {g, h.inv(g)}) {
        if (!h.is_identity(x) && seen.insert(x).second) {
          out.push_back(x);
        }
      }
    }
    return out;
  }

}  // namespace detail

// Fair enumeration: breadth-first by word length in the generators, letters
// ordered g_0, g_0^-1, g_1, g_1^-1, ... For infinitely generated groups stage
// s emits the new elements of the radius-s ball in the first
// generator_window(s) generators.
class Enumerator {
 public:
  explicit Enumerator(GroupHandle handle) : _handle(std::move(handle)) {
    auto e = _handle.identity();
    _seen.insert(e);
    _pending.push_back(e);
    if (auto n = _handle.generator_count()) {
      _letters = detail::letters(_handle, _handle.generators(*n));
      _frontier.push_back(e);
    }
  }

  std::optional<Element> next() {
    while (_pending.empty()) {
      if (!advance()) {
        return std::nullopt;
      }
    }
    auto e = std::move(_pending.front());
    _pending.pop_front();
    ++_emitted;
    return e;
  }

  bool exhausted() const noexcept {
    return _pending.empty() && _done;
  }

  std::size_t emitted() const noexcept {
    return _emitted;
  }

 private:
  bool advance() {
    if (_done) {
      return false;
    }
    if (_handle.generator_count()) {
      // next BFS level
      std::vector<Element> level;
      for (auto const& x : _frontier) {
        for (auto const& s : _letters) {
          auto y = _handle.mul(x, s);
          if (_seen.insert(y).second) {
            level.push_back(y);
          }
        }
      }
      if (level.empty()) {
        _done = true;
        return false;
      }
      _frontier = level;
      for (auto& y : level) {
        _pending.push_back(std::move(y));
      }
      return true;
    }
    ++_stage;
    auto const           window = _handle.group().generator_window(_stage);
    std::vector<Element> gens;
    for (std::size_t i = 0; i < window; ++i) {
      gens.push_back(_handle.generator(i));
    }
    auto                                     letters = detail::letters(_handle, gens);
    std::unordered_set<Element, ElementHash> ball{_handle.identity()};
    std::vector<Element>                     frontier{_handle.identity()};
    for (std::size_t r = 0; r < _stage; ++r) {
      std::vector<Element> level;
      for (auto const& x : frontier) {
        for (auto const& s : letters) {
          auto y = _handle.mul(x, s);
          if (ball.insert(y).second) {
            level.push_back(y);
            if (_seen.insert(y).second) {
              _pending.push_back(y);
            }
          }
        }
      }
      frontier = std::move(level);
    }
    return true;
  }

  GroupHandle                              _handle;
  std::unordered_set<Element, ElementHash> _seen;
  std::deque<Element>                      _pending;
  std::vector<Element>                     _letters;
  std::vector<Element>                     _frontier;
  std::size_t                              _stage   = 0;
  std::size_t                              _emitted = 0;
  bool                                     _done    = false;
};

inline std::vector<Element> enumerate_elements(GroupHandle const& h,
                                               std::size_t        n) {
  Enumerator           en(h);
  std::vector<Element> out;
  while (out.size() < n) {
    auto e = en.next();
    if (!e) {
      break;
    }
    out.push_back(std::move(*e));
  }
  return out;
}

struct BudgetExceeded {
  std::size_t budget        = 0;
  std::size_t partial_count = 0;
};

using ClosureResult = std::variant<ElementSet, BudgetExceeded>;

inline constexpr std::size_t default_closure_budget = 1'000'000;

// Breadth-first closure of gens under multiplication and inversion; the
// identity comes first and insertion order is deterministic.
inline ClosureResult generate_closure(GroupHandle const&          h,
                                      std::vector<Element> const& gens,
                                      std::size_t budget = default_closure_budget) {
  if (budget < 1) {
    throw ParameterError("closure budget must be at least 1");
  }
  auto const                               letters = detail::letters(h, gens);
  std::unordered_set<Element, ElementHash> seen{h.identity()};
  ElementSet                               out{h.identity()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (auto const& s : letters) {
      auto y = h.mul(out[i], s);
      if (seen.insert(y).second) {
        out.push_back(std::move(y));
        if (out.size() > budget) {
          return BudgetExceeded{budget, out.size()};
        }
      }
    }
  }
  return out;
}

// A finite subgroup listed element by element, with index lookup.
class FiniteSubgroup {
 public:
  FiniteSubgroup() = default;

  static FiniteSubgroup closure_of(GroupHandle                 h,
                                   std::vector<Element> const& gens,
                                   std::size_t budget = default_closure_budget) {
    auto res = generate_closure(h, gens, budget);
    if (auto* ex = std::get_if<BudgetExceeded>(&res)) {
      throw RequiresFinite("subgroup closure exceeded budget "
                           + std::to_string(ex->budget));
    }
    FiniteSubgroup s;
    s._handle   = std::move(h);
    s._elements = std::move(std::get<ElementSet>(res));
    for (auto const& g : gens) {
      if (!s._handle.is_identity(g)
          && std::find(s._generators.begin(), s._generators.end(), g)
                 == s._generators.end()) {
        s._generators.push_back(g);
      }
    }
    for (std::size_t i = 0; i < s._elements.size(); ++i) {
      s._index.emplace(s._elements[i], i);
    }
    return s;
  }

  // The whole group of a handle with finitely many generators.
  static FiniteSubgroup whole(GroupHandle const& h,
                              std::size_t budget = default_closure_budget) {
    if (!h.generator_count() || h.finiteness().kind == Finiteness::Kind::infinite) {
      throw RequiresFinite("group " + h.family() + " is not finite");
    }
    return closure_of(h, h.generators(*h.generator_count()), budget);
  }

  GroupHandle const& handle() const noexcept {
    return _handle;
  }
  std::size_t order() const noexcept {
    return _elements.size();
  }
  ElementSet const& elements() const noexcept {
    return _elements;
  }
  Element const& element(std::size_t i) const {
    return _elements.at(i);
  }
  std::vector<Element> const& generators() const noexcept {
    return _generators;
  }
  std::optional<std::size_t> index_of(Element const& g) const {
    auto it = _index.find(g);
    if (it == _index.end()) {
      return std::nullopt;
    }
    return it->second;
  }
  bool contains(Element const& g) const {
    return _index.count(g) != 0;
  }
  std::size_t mul_index(std::size_t a, std::size_t b) const {
    return _index.at(_handle.mul(_elements[a], _elements[b]));
  }
  std::size_t inv_index(std::size_t a) const {
    return _index.at(_handle.inv(_elements[a]));
  }
  bool is_abelian() const {
    for (std::size_t i = 0; i < _generators.size(); ++i) {
      for (std::size_t j = i + 1; j < _generators.size(); ++j) {
        if (!_handle.commute(_generators[i], _generators[j])) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  GroupHandle                                           _handle;
  std::vector<Element>                                  _generators;
  ElementSet                                            _elements;
  std::unordered_map<Element, std::size_t, ElementHash> _index;
};

namespace detail {

  inline std::vector<Code> all_codes(Group const& g, std::size_t limit) {
    auto const           n = g.generator_count().value_or(0);
    std::vector<Code>    out{g.identity()};
    std::vector<Code>    letters;
    for (std::size_t i = 0; i < n; ++i) {
      letters.push_back(g.generator(i));
      letters.push_back(g.invert(letters.back()));
    }
    std::unordered_set<Element, ElementHash> seen{Element(0, g.identity())};
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (auto const& s : letters) {
        auto y = g.multiply(out[i], s);
        if (seen.insert(Element(0, y)).second) {
          out.push_back(std::move(y));
          if (out.size() > limit) {
            throw RequiresFinite("group exceeds listing limit");
          }
        }
      }
    }
    return out;
  }

}  // namespace detail

}  // namespace vnfactor
