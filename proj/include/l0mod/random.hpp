// Copyright 2026 The l0mod Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/iso.hpp"
#include "l0mod/system.hpp"

// Seeded generators for randomized instances. Systems are built from a
// universe of coordinates per atom: coordinate u lives at index i iff
// birth <= i and not kill <= i, so the set of indices holding u is
// order-convex and coordinate selections compose. Norms are weighted
// p-norms seen through per-index basis changes.

namespace l0mod::random {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline AtomicMeasureSpace space(Rng& rng, std::size_t max_atoms = 3, const std::string& prefix = "a") {
  std::size_t n = pick(rng, 1, max_atoms);
  std::vector<std::string> ids;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(prefix + std::to_string(i));
    w.push_back(uniform(rng, 0.25, 2.0));
  }
  return AtomicMeasureSpace(std::move(ids), std::move(w));
}

inline PExponent exponent(Rng& rng) {
  switch (pick(rng, 0, 2)) {
    case 0: return PExponent::One;
    case 1: return PExponent::Two;
    default: return PExponent::Infinity;
  }
}

/// A well-conditioned random square matrix.
inline Matrix basis_change(Rng& rng, Eigen::Index d) {
  std::normal_distribution<double> normal;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Matrix g = Matrix::Identity(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) g(r, c) += 0.5 * normal(rng) / std::sqrt(static_cast<double>(d));
    }
    if (d == 0) return g;
    Eigen::JacobiSVD<Matrix> svd(g);
    auto s = svd.singularValues();
    if (s(s.size() - 1) > 0.2 && s(0) / s(s.size() - 1) < 8.0) return g;
  }
  return Matrix::Identity(d, d);
}

inline Fiber fiber(Rng& rng, std::size_t dim) {
  if (dim == 0) return Fiber::zero();
  auto d = static_cast<Eigen::Index>(dim);
  Vector w(d);
  for (Eigen::Index k = 0; k < d; ++k) w(k) = uniform(rng, 0.5, 2.0);
  auto p = exponent(rng);
  if (coin(rng)) return Fiber(dim, NormSpec::weighted(p, w));
  return Fiber(dim, NormSpec::framed(p, Matrix(w.asDiagonal()) * basis_change(rng, d)));
}

inline FiberModule module(Rng& rng, const AtomicMeasureSpace& sp, std::size_t max_dim = 4, std::size_t min_dim = 0) {
  std::vector<Fiber> fibers;
  for (std::size_t a = 0; a < sp.size(); ++a) fibers.push_back(fiber(rng, pick(rng, min_dim, max_dim)));
  return FiberModule(sp, std::move(fibers));
}

/// Random matrices rescaled per atom to operator norm at most `scale`.
inline ModuleMorphism admissible_morphism(Rng& rng, const FiberModule& source, const FiberModule& target, double scale = 1.0) {
  std::normal_distribution<double> normal;
  std::vector<Matrix> maps(source.atoms());
  for (std::size_t a = 0; a < maps.size(); ++a) {
    Matrix m(static_cast<Eigen::Index>(target.dim(a)), static_cast<Eigen::Index>(source.dim(a)));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = normal(rng);
    }
    maps[a] = std::move(m);
  }
  ModuleMorphism raw(source, target, maps);
  auto n = operator_pointwise_norm(raw);
  for (std::size_t a = 0; a < maps.size(); ++a) {
    if (n[a] > 0.0) maps[a] *= scale / n[a];
  }
  return ModuleMorphism(source, target, std::move(maps));
}

/// A finite directed poset with at most max_size elements: a random DAG on a
/// hidden topological order, closed off by a top element, with shuffled
/// labels.
inline IndexSet poset(Rng& rng, std::size_t max_size = 6) {
  std::size_t n = pick(rng, 1, max_size);
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = "i" + std::to_string(i);
  std::shuffle(names.begin(), names.end(), rng);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j + 1 < n; ++j) {
      if (coin(rng, 0.35)) pairs.emplace_back(names[i], names[j]);
    }
    pairs.emplace_back(names[i], names[n - 1]);
  }
  auto labels = names;
  std::shuffle(labels.begin(), labels.end(), rng);
  return IndexSet::finite_poset(std::move(labels), pairs);
}

inline TailSpec tail(Rng& rng, const AtomicMeasureSpace& sp) {
  switch (pick(rng, 0, 2)) {
    case 0: return TailSpec::identity();
    case 1: return TailSpec::harmonic();
    default: {
      std::vector<double> f(sp.size());
      for (auto& v : f) {
        switch (pick(rng, 0, 3)) {
          case 0: v = 1.0; break;
          case 1: v = 0.0; break;
          case 2: v = 0.5; break;
          default: v = uniform(rng, 0.05, 0.95);
        }
      }
      return TailSpec::scalar(L0Function(sp, std::move(f)));
    }
  }
}

inline IndexSet chain(Rng& rng, const AtomicMeasureSpace& sp, std::size_t max_last = 3) {
  return IndexSet::chain(pick(rng, 0, max_last), tail(rng, sp));
}

/// Number of elements strictly below i; strictly monotone along the order.
inline std::vector<std::size_t> heights(const IndexSet& idx) {
  std::vector<std::size_t> h(idx.size(), 0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (j != i && idx.leq(j, i)) ++h[i];
    }
  }
  return h;
}

/// Per-atom coordinate universe with lifetimes on an index set.
struct Universe {
  struct Coordinate {
    std::size_t birth;
    std::optional<std::size_t> kill;
    double weight;
  };
  IndexSet index;
  AtomicMeasureSpace space;
  std::vector<std::vector<Coordinate>> coords;

  bool present(std::size_t atom, std::size_t u, std::size_t i) const {
    const auto& c = coords[atom][u];
    return index.leq(c.birth, i) && !(c.kill && index.leq(*c.kill, i));
  }
  std::vector<std::size_t> live(std::size_t atom, std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < coords[atom].size(); ++u) {
      if (present(atom, u, i)) out.push_back(u);
    }
    return out;
  }
};

inline Universe::Coordinate coordinate(Rng& rng, const IndexSet& idx) {
  std::size_t b = pick(rng, 0, idx.size() - 1);
  std::optional<std::size_t> k;
  if (coin(rng, 0.4)) {
    std::vector<std::size_t> options;
    for (std::size_t d = 0; d < idx.size(); ++d) {
      if (!idx.leq(d, b)) options.push_back(d);
    }
    if (!options.empty()) k = options[pick(rng, 0, options.size() - 1)];
  }
  return {b, k, uniform(rng, 0.5, 2.0)};
}

inline Universe universe(Rng& rng, const IndexSet& idx, const AtomicMeasureSpace& sp, std::size_t max_coords = 4) {
  Universe u{idx, sp, {}};
  for (std::size_t a = 0; a < sp.size(); ++a) {
    std::vector<Universe::Coordinate> cs;
    std::size_t n = pick(rng, 1, max_coords);
    for (std::size_t k = 0; k < n; ++k) cs.push_back(coordinate(rng, idx));
    u.coords.push_back(std::move(cs));
  }
  return u;
}

/// Norm data per index and atom: the exponent, a scale, and a basis change
/// from universe coordinates to module coordinates.
struct Realization {
  std::vector<std::vector<PExponent>> p;
  std::vector<std::vector<double>> scale;
  std::vector<std::vector<Matrix>> basis;
};

/// Exponents and scales monotone along the order so that coordinate
/// selections contract: forward (direct) means p increasing and scales
/// decreasing, backward (inverse) the reverse.
inline Realization realization(Rng& rng, const Universe& u, bool forward) {
  auto h = heights(u.index);
  std::size_t top = *std::max_element(h.begin(), h.end());
  Realization r;
  r.p.assign(u.index.size(), {});
  r.scale.assign(u.index.size(), {});
  r.basis.assign(u.index.size(), {});
  for (std::size_t a = 0; a < u.space.size(); ++a) {
    std::size_t t1 = pick(rng, 0, top + 1);
    std::size_t t2 = pick(rng, t1, top + 1);
    double rho = coin(rng, 0.3) ? 1.0 : uniform(rng, 0.7, 1.0);
    bool rotate = coin(rng);
    for (std::size_t i = 0; i < u.index.size(); ++i) {
      std::size_t level = forward ? h[i] : top - h[i];
      r.p[i].push_back(level < t1 ? PExponent::One : level < t2 ? PExponent::Two : PExponent::Infinity);
      r.scale[i].push_back(std::pow(rho, static_cast<double>(level)));
      auto d = static_cast<Eigen::Index>(u.live(a, i).size());
      r.basis[i].push_back(rotate ? basis_change(rng, d) : Matrix(Matrix::Identity(d, d)));
    }
  }
  return r;
}

inline FiberModule realize_module(const Universe& u, const Realization& r, std::size_t i) {
  std::vector<Fiber> fibers;
  for (std::size_t a = 0; a < u.space.size(); ++a) {
    auto live = u.live(a, i);
    if (live.empty()) {
      fibers.push_back(Fiber::zero());
      continue;
    }
    auto d = static_cast<Eigen::Index>(live.size());
    Vector w(d);
    for (Eigen::Index k = 0; k < d; ++k) w(k) = u.coords[a][live[static_cast<std::size_t>(k)]].weight * r.scale[i][a];
    const auto& g = r.basis[i][a];
    if (g.isIdentity()) {
      fibers.emplace_back(live.size(), NormSpec::weighted(r.p[i][a], w));
    } else {
      fibers.emplace_back(live.size(), NormSpec::framed(r.p[i][a], Matrix(w.asDiagonal()) * g.inverse()));
    }
  }
  return FiberModule(u.space, std::move(fibers));
}

/// The coordinate selection from the live set at i to the live set at j,
/// expressed in module coordinates: G_j Sel G_i^{-1}.
inline Matrix selection(const Universe& u, const Realization& from_r, std::size_t i, const Realization& to_r, std::size_t j,
                        std::size_t atom, const Universe& to_u) {
  auto src = u.live(atom, i);
  auto dst = to_u.live(atom, j);
  Matrix sel = Matrix::Zero(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
  for (std::size_t r = 0; r < dst.size(); ++r) {
    for (std::size_t c = 0; c < src.size(); ++c) {
      if (dst[r] == src[c]) sel(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 1.0;
    }
  }
  return to_r.basis[j][atom] * sel * from_r.basis[i][atom].inverse();
}

inline ModuleMorphism selection_morphism(const Universe& u, const Realization& ur, std::size_t i, const Universe& v,
                                         const Realization& vr, std::size_t j) {
  std::vector<Matrix> maps;
  for (std::size_t a = 0; a < u.space.size(); ++a) maps.push_back(selection(u, ur, i, vr, j, a, v));
  return ModuleMorphism(realize_module(u, ur, i), realize_module(v, vr, j), std::move(maps));
}

inline DirectSystem direct_system(const Universe& u, const Realization& r) {
  std::vector<FiberModule> modules;
  for (std::size_t i = 0; i < u.index.size(); ++i) modules.push_back(realize_module(u, r, i));
  std::vector<Connecting> maps;
  for (auto [i, j] : u.index.strict_pairs()) maps.push_back({i, j, selection_morphism(u, r, i, u, r, j)});
  return DirectSystem(u.index, std::move(modules), std::move(maps));
}

inline InverseSystem inverse_system(const Universe& u, const Realization& r) {
  std::vector<FiberModule> modules;
  for (std::size_t i = 0; i < u.index.size(); ++i) modules.push_back(realize_module(u, r, i));
  std::vector<Connecting> maps;
  for (auto [i, j] : u.index.strict_pairs()) maps.push_back({i, j, selection_morphism(u, r, j, u, r, i)});
  return InverseSystem(u.index, std::move(modules), std::move(maps));
}

inline DirectSystem direct_system(Rng& rng, const IndexSet& idx, const AtomicMeasureSpace& sp, std::size_t max_coords = 4) {
  auto u = universe(rng, idx, sp, max_coords);
  return direct_system(u, realization(rng, u, true));
}

inline InverseSystem inverse_system(Rng& rng, const IndexSet& idx, const AtomicMeasureSpace& sp, std::size_t max_coords = 4) {
  auto u = universe(rng, idx, sp, max_coords);
  return inverse_system(u, realization(rng, u, false));
}

/// Copies the realization of the shared coordinates; fresh coordinates get
/// their own basis changes.
inline Realization rebase(Rng& rng, const Universe& v, const Realization& r) {
  Realization out = r;
  for (std::size_t i = 0; i < v.index.size(); ++i) {
    for (std::size_t a = 0; a < v.space.size(); ++a) {
      auto d = static_cast<Eigen::Index>(v.live(a, i).size());
      out.basis[i][a] = coin(rng) ? basis_change(rng, d) : Matrix(Matrix::Identity(d, d));
    }
  }
  return out;
}

template <class System>
struct MorphismInstance {
  System from;
  System to;
  SystemMorphism theta;
};

/// theta_i drops a random set of coordinates: every component has full
/// image.
inline MorphismInstance<DirectSystem> surjective_direct_morphism(Rng& rng, const IndexSet& idx, const AtomicMeasureSpace& sp) {
  auto u = universe(rng, idx, sp);
  auto r = realization(rng, u, true);
  // Dropped coordinates are never born, which keeps universe positions aligned.
  Universe v = u;
  for (std::size_t a = 0; a < v.coords.size(); ++a) {
    for (auto& c : v.coords[a]) {
      if (coin(rng, 0.4)) c.kill = c.birth;
    }
  }
  auto vr = rebase(rng, v, r);
  auto from = direct_system(u, r);
  auto to = direct_system(v, vr);
  SystemMorphism theta;
  for (std::size_t i = 0; i < idx.size(); ++i) theta.components.push_back(selection_morphism(u, r, i, v, vr, i));
  return {std::move(from), std::move(to), std::move(theta)};
}

/// theta_i embeds into a system with extra coordinates: every component has
/// trivial kernel.
inline MorphismInstance<InverseSystem> injective_inverse_morphism(Rng& rng, const IndexSet& idx, const AtomicMeasureSpace& sp) {
  auto v = universe(rng, idx, sp, 5);
  auto vr = realization(rng, v, false);
  Universe u = v;
  for (auto& cs : u.coords) {
    for (auto& c : cs) {
      if (coin(rng, 0.4)) c.kill = c.birth;
    }
  }
  auto ur = rebase(rng, u, vr);
  auto from = inverse_system(u, ur);
  auto to = inverse_system(v, vr);
  SystemMorphism theta;
  for (std::size_t i = 0; i < idx.size(); ++i) theta.components.push_back(selection_morphism(u, ur, i, v, vr, i));
  return {std::move(from), std::move(to), std::move(theta)};
}

/// A total map into `target` from a fresh space with up to max_atoms atoms.
inline AtomMap atom_map(Rng& rng, const AtomicMeasureSpace& target, std::size_t max_atoms = 4) {
  auto src = space(rng, max_atoms, "x");
  std::vector<std::size_t> image(src.size());
  for (auto& y : image) y = pick(rng, 0, target.size() - 1);
  return AtomMap(src, target, std::move(image));
}

}  // namespace l0mod::random
