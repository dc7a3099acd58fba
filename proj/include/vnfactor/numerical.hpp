// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Independent floating-point decomposition of a finite group algebra inside
// its right regular representation: the center is found by solving the
// commutation equations, a random self-adjoint central element separates the
// blocks, and matrix units are built inside each block.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "group_algebra.hpp"
#include "groups.hpp"

namespace vnfactor {

class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t max_numerical_order = 200;

// Right regular representation rho(g) e_y = e_{y g^-1}; the left one
// lambda(g) e_y = e_{g y} is kept for tests.
class RegularRep {
 public:
  explicit RegularRep(FiniteSubgroup h) : _group(std::move(h)) {
    auto const n = _group.order();
    _inv.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
      _inv[x] = _group.inv_index(x);
    }
    _right.resize(n * n);
    for (std::size_t g = 0; g < n; ++g) {
      for (std::size_t y = 0; y < n; ++y) {
        _right[g * n + y] = _group.mul_index(y, _inv[g]);
      }
    }
  }

  FiniteSubgroup const& group() const noexcept {
    return _group;
  }
  std::size_t dimension() const noexcept {
    return _group.order();
  }

  // Image index of basis vector y under rho(g).
  std::size_t right_action(std::size_t g, std::size_t y) const {
    return _right[g * dimension() + y];
  }

  Eigen::MatrixXcd right(std::size_t g) const {
    auto const       n = dimension();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t y = 0; y < n; ++y) {
      m(right_action(g, y), y) = 1.0;
    }
    return m;
  }

  Eigen::MatrixXcd left(std::size_t g) const {
    auto const       n = dimension();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t y = 0; y < n; ++y) {
      m(_group.mul_index(g, y), y) = 1.0;
    }
    return m;
  }

  // rho(sum_h x_h u_h) for a coefficient vector indexed like the subgroup.
  Eigen::MatrixXcd image(Eigen::VectorXcd const& x) const {
    auto const       n = dimension();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t g = 0; g < n; ++g) {
      if (x(g) == 0.0) {
        continue;
      }
      for (std::size_t y = 0; y < n; ++y) {
        m(right_action(g, y), y) += x(g);
      }
    }
    return m;
  }

  template <typename S>
  Eigen::MatrixXcd image(GroupAlgebraElement<S> const& a) const {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dimension());
    for (auto const& [g, c] : a.support()) {
      auto i = _group.index_of(g);
      if (!i) {
        throw DomainMismatch("algebra element is not supported in the subgroup");
      }
      x(*i) += ScalarTraits<S>::to_complex(c);
    }
    return image(x);
  }

  // tr(rho(a)) / n
  double normalized_trace(Eigen::MatrixXcd const& m) const {
    return m.trace().real() / static_cast<double>(dimension());
  }

 private:
  FiniteSubgroup           _group;
  std::vector<std::size_t> _inv;
  std::vector<std::size_t> _right;
};

struct MatrixUnitSystem {
  std::size_t size = 0;
  // Orthonormal basis (n x d^2) of the block's range; units act on it.
  Eigen::MatrixXcd basis;
  // units[j * size + k] = e_jk in compressed coordinates
  std::vector<Eigen::MatrixXcd> units;
  double product_residual = 0.0;  // max |e_jk e_lm - delta_kl e_jm|
  double adjoint_residual = 0.0;  // max |e_jk* - e_kj|
  double sum_residual     = 0.0;  // |sum_k e_kk - P|

  Eigen::MatrixXcd const& unit(std::size_t j, std::size_t k) const {
    return units.at(j * size + k);
  }
  // e_jk as an operator on the full regular representation space.
  Eigen::MatrixXcd full(std::size_t j, std::size_t k) const {
    return basis * unit(j, k) * basis.adjoint();
  }
  double max_residual() const {
    return std::max({product_residual, adjoint_residual, sum_residual});
  }
};

struct NumericalBlock {
  std::size_t      dimension = 0;  // d, the block is M_d(C)
  double           measure   = 0.0;
  double           eigenvalue = 0.0;
  Eigen::MatrixXcd projection;     // central projection in the regular rep
  double           projection_residual = 0.0;  // |P^2 - P| + |P* - P|
  MatrixUnitSystem units;
};

struct NumericalDecomposition {
  std::size_t                 order            = 0;
  std::size_t                 center_dimension = 0;
  std::uint64_t               seed_used        = 0;
  std::size_t                 attempts         = 0;
  double                      min_eigen_gap    = 0.0;
  std::vector<NumericalBlock> blocks;

  double max_residual() const {
    double m = 0.0;
    for (auto const& b : blocks) {
      m = std::max({m, b.projection_residual, b.units.max_residual()});
    }
    return m;
  }
};

namespace detail {

  inline double max_abs(Eigen::MatrixXcd const& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  }

  // Groups sorted eigenvalues into clusters of near-equal values.
  inline std::vector<std::vector<std::size_t>>
  cluster_eigenvalues(Eigen::VectorXd const& ev, double tol) {
    std::vector<std::vector<std::size_t>> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (out.empty() || ev(i) - ev(out.back().back()) > tol) {
        out.push_back({});
      }
      out.back().push_back(static_cast<std::size_t>(i));
    }
    return out;
  }

  inline Eigen::MatrixXcd columns(Eigen::MatrixXcd const&         v,
                                  std::vector<std::size_t> const& idx) {
    Eigen::MatrixXcd out(v.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
      out.col(static_cast<Eigen::Index>(c)) = v.col(static_cast<Eigen::Index>(idx[c]));
    }
    return out;
  }

  inline Eigen::VectorXcd random_complex(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXcd                       x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double re = u(rng);
      double im = u(rng);
      x(static_cast<Eigen::Index>(i)) = {re, im};
    }
    return x;
  }

  inline constexpr double cluster_tolerance = 1e-9;
  inline constexpr double min_gap           = 1e-8;

  // Matrix units of one block. w spans range(P); the block algebra is
  // {w* rho(a) w}. Returns false when the random draw was degenerate.
  inline bool build_matrix_units(RegularRep const& rep, Eigen::MatrixXcd const& w,
                                 std::size_t d, Eigen::MatrixXcd const& p,
                                 std::mt19937_64& rng, MatrixUnitSystem& out) {
    auto const n = rep.dimension();
    auto compress = [&](Eigen::VectorXcd const& x) -> Eigen::MatrixXcd {
      return w.adjoint() * rep.image(x) * w;
    };
    out.size  = d;
    out.basis = w;
    out.units.assign(d * d, Eigen::MatrixXcd());
    auto const dim = static_cast<Eigen::Index>(d * d);
    if (d == 1) {
      out.units[0] = Eigen::MatrixXcd::Identity(dim, dim);
    } else {
      Eigen::MatrixXcd y = compress(random_complex(n, rng));
      y                  = (y + y.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(y);
      auto clusters = cluster_eigenvalues(es.eigenvalues(), cluster_tolerance);
      if (clusters.size() != d) {
        return false;
      }
      for (std::size_t c = 0; c + 1 < clusters.size(); ++c) {
        auto const gap = es.eigenvalues()(static_cast<Eigen::Index>(clusters[c + 1].front()))
                         - es.eigenvalues()(static_cast<Eigen::Index>(clusters[c].back()));
        if (gap < min_gap) {
          return false;
        }
      }
      std::vector<Eigen::MatrixXcd> q;
      for (auto const& c : clusters) {
        if (c.size() != d) {
          return false;
        }
        auto v = columns(es.eigenvectors(), c);
        q.push_back(v * v.adjoint());
      }
      Eigen::MatrixXcd x = compress(random_complex(n, rng));
      out.units[0]       = q[0];
      for (std::size_t j = 1; j < d; ++j) {
        Eigen::MatrixXcd e = q[j] * x * q[0];
        // e* e = c Q_1 with c > 0
        double const c = (e.adjoint() * e).trace().real() / q[0].trace().real();
        if (!(c > 1e-12)) {
          return false;
        }
        out.units[j * d] = e / std::sqrt(c);
        out.units[j]     = out.units[j * d].adjoint();
      }
      for (std::size_t j = 1; j < d; ++j) {
        for (std::size_t k = 1; k < d; ++k) {
          out.units[j * d + k] = out.units[j * d] * out.units[k];
        }
      }
    }
    out.product_residual = 0.0;
    out.adjoint_residual = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        out.adjoint_residual = std::max(
            out.adjoint_residual,
            max_abs(out.unit(j, k).adjoint() - out.unit(k, j)));
        for (std::size_t l = 0; l < d; ++l) {
          for (std::size_t m = 0; m < d; ++m) {
            Eigen::MatrixXcd r = out.unit(j, k) * out.unit(l, m);
            if (k == l) {
              r -= out.unit(j, m);
            }
            out.product_residual = std::max(out.product_residual, max_abs(r));
          }
        }
      }
    }
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t k = 0; k < d; ++k) {
      s += out.unit(k, k);
    }
    out.sum_residual = max_abs(w * s * w.adjoint() - p);
    return true;
  }

}  // namespace detail

// Brute-force decomposition of the group algebra of a finite subgroup.
// Reseeds up to five times when a random draw is degenerate.
inline NumericalDecomposition numerical_decomposition(FiniteSubgroup const& h,
                                                      std::uint64_t         seed = 0) {
  auto const n = h.order();
  if (n > max_numerical_order) {
    throw ParameterError("numerical decomposition is limited to order "
                         + std::to_string(max_numerical_order) + ", got "
                         + std::to_string(n));
  }
  RegularRep const rep(h);

  // Center: coefficient vectors constant on conjugation orbits of the
  // generators, i.e. x_{s h s^-1} = x_h.
  std::vector<std::size_t> gens;
  for (auto const& g : h.generators()) {
    gens.push_back(*h.index_of(g));
  }
  auto const      ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd eqs
      = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(std::max<std::size_t>(1, gens.size() * n)), ni);
  for (std::size_t s = 0; s < gens.size(); ++s) {
    auto const sinv = h.inv_index(gens[s]);
    for (std::size_t x = 0; x < n; ++x) {
      auto const y   = h.mul_index(h.mul_index(gens[s], x), sinv);
      auto const row = static_cast<Eigen::Index>(s * n + x);
      eqs(row, static_cast<Eigen::Index>(y)) += 1.0;
      eqs(row, static_cast<Eigen::Index>(x)) -= 1.0;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(eqs);
  Eigen::MatrixXd                   center = lu.kernel();
  auto const                        r      = static_cast<std::size_t>(center.cols());

  NumericalDecomposition out;
  out.order            = n;
  out.center_dimension = r;
  std::uint64_t s      = seed;
  for (std::size_t attempt = 1; attempt <= 5; ++attempt, ++s) {
    out.attempts  = attempt;
    out.seed_used = s;
    out.blocks.clear();
    std::mt19937_64  rng(s);
    Eigen::VectorXcd c = detail::random_complex(r, rng);
    Eigen::VectorXcd x = center.cast<std::complex<double>>() * c;
    Eigen::MatrixXcd z = rep.image(x);
    z                  = (z + z.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(z);
    auto clusters = detail::cluster_eigenvalues(es.eigenvalues(),
                                                detail::cluster_tolerance);
    if (clusters.size() != r) {
      continue;
    }
    double gap = INFINITY;
    for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
      gap = std::min(gap, es.eigenvalues()(static_cast<Eigen::Index>(clusters[i + 1].front()))
                              - es.eigenvalues()(static_cast<Eigen::Index>(clusters[i].back())));
    }
    if (gap < detail::min_gap) {
      continue;
    }
    out.min_eigen_gap = r > 1 ? gap : 0.0;
    bool ok           = true;
    for (auto const& cl : clusters) {
      NumericalBlock b;
      auto const     rank = cl.size();
      auto const     d    = static_cast<std::size_t>(
          std::llround(std::sqrt(static_cast<double>(rank))));
      if (d * d != rank) {
        ok = false;
        break;
      }
      Eigen::MatrixXcd w = detail::columns(es.eigenvectors(), cl);
      b.dimension        = d;
      b.eigenvalue       = es.eigenvalues()(static_cast<Eigen::Index>(cl.front()));
      b.projection       = w * w.adjoint();
      b.measure          = rep.normalized_trace(b.projection);
      b.projection_residual
          = detail::max_abs(b.projection * b.projection - b.projection)
            + detail::max_abs(b.projection.adjoint() - b.projection);
      // r distinct eigenvalues: each eigenprojection is minimal central
      if (!detail::build_matrix_units(rep, w, d, b.projection, rng, b.units)) {
        ok = false;
        break;
      }
      out.blocks.push_back(std::move(b));
    }
    if (ok) {
      std::sort(out.blocks.begin(), out.blocks.end(),
                [](auto const& a, auto const& b) {
                  return a.dimension != b.dimension ? a.dimension < b.dimension
                                                    : a.eigenvalue < b.eigenvalue;
                });
      return out;
    }
  }
  throw DegenerateSpectrum("degenerate random central element after 5 seeds "
                           "starting at "
                           + std::to_string(seed));
}

}  // namespace vnfactor
