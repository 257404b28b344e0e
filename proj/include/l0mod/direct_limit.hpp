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
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/iso.hpp"
#include "l0mod/limit.hpp"

namespace l0mod {

/// An element v of M_i standing for its class in the algebraic colimit.
struct ColimitClass {
  std::size_t stage;
  Element element;
};

/// |[v]| = ess inf of |w| over all representatives (j, w) of the class.
///
/// On a finite poset the infimum is attained at the forward image in the
/// top module, since connecting maps contract. On a chain the image at the
/// last stage is scaled by the tail limit, which is 1 or 0 per atom.
inline L0Function dl_seminorm(const DirectSystem& s, const ColimitClass& c) {
  std::size_t top = greatest_element(s.index());
  auto u = apply(s.map(c.stage, top), c.element);
  auto n = pointwise_norm(u);
  if (!s.index().is_chain()) return n;
  auto alive = tail_alive(s.index(), s.space());
  std::vector<double> out(n.size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = alive[a] ? n[a] : 0.0;
  return L0Function(s.space(), std::move(out));
}

/// The direct limit and its canonical morphisms.
///
/// Finite posets: the module at the greatest element. Chains: the module at
/// the last stage with fibers collapsed where the tail limit vanishes. In
/// both cases the quotient by null elements has finite-dimensional fibers and
/// is therefore already complete.
inline LimitPresentation direct_limit(const DirectSystem& s) {
  std::size_t top = greatest_element(s.index());
  std::vector<ModuleMorphism> canonical;
  if (!s.index().is_chain()) {
    for (std::size_t i = 0; i < s.size(); ++i) canonical.push_back(s.map(i, top));
    return {s.module(top), std::move(canonical), Provenance::GreatestElement, top};
  }
  auto masked = mask_module(s.module(top), tail_alive(s.index(), s.space()));
  auto proj = detail::mask_projection(masked);
  for (std::size_t i = 0; i < s.size(); ++i) canonical.push_back(compose(proj, s.map(i, top)));
  return {masked.module, std::move(canonical), Provenance::ChainTail, top};
}

namespace detail {

inline void check_direct_cone(const DirectSystem& s, const Cone& cone) {
  const auto& idx = s.index();
  if (cone.legs.size() != s.size()) {
    throw Error(ErrorKind::ShapeMismatch, "target needs one morphism per index");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!cone.legs[i].source().same_shape(s.module(i)) || !cone.legs[i].target().same_shape(cone.apex)) {
      throw Error(ErrorKind::ShapeMismatch, "target morphism at '" + idx.label(i) + "' has the wrong shape");
    }
    if (!is_morphism(cone.legs[i])) {
      throw Error(ErrorKind::Incompatible, "target morphism at '" + idx.label(i) + "' is not admissible");
    }
  }
  double worst = 0.0;
  std::string where;
  for (auto [i, j] : idx.strict_pairs()) {
    double d = compose(cone.legs[j], s.map(i, j)).max_deviation(cone.legs[i]);
    if (d > worst) {
      worst = d;
      where = pair_label(idx, i, j);
    }
  }
  if (worst > tolerance()) {
    std::ostringstream os;
    os << "target law fails at " << where << " with max entry deviation " << worst;
    throw Error(ErrorKind::Incompatible, os.str());
  }
  if (idx.is_chain()) {
    ValidationReport r;
    check_tail_growth(cone.legs[idx.last_stage()], TailSpec::identity(), idx.tail(), idx.last_stage(),
                      idx.label(idx.last_stage()), r);
    if (!r.ok()) throw Error(ErrorKind::Incompatible, "target does not extend over the chain tail: " + r.violations.front().message);
  }
}

}  // namespace detail

/// The unique Phi: lim -> apex with Phi o phi_i = psi_i, solved per atom from
/// the stacked canonical morphisms.
inline Factorization dl_universal_factorization(const DirectSystem& s, const LimitPresentation& limit, const Cone& target) {
  detail::check_direct_cone(s, target);
  const auto& space = s.space();
  std::vector<Matrix> maps(space.size());
  double residual = 0.0;
  bool unique = true;
  std::size_t worst_atom = 0;
  for (std::size_t a = 0; a < space.size(); ++a) {
    auto ld = static_cast<Eigen::Index>(limit.module.dim(a));
    auto td = static_cast<Eigen::Index>(target.apex.dim(a));
    Eigen::Index total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) total += static_cast<Eigen::Index>(s.module(i).dim(a));
    Matrix canon(ld, total);
    Matrix legs(td, total);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto w = static_cast<Eigen::Index>(s.module(i).dim(a));
      canon.middleCols(col, w) = limit.structure_maps[i].at(a);
      legs.middleCols(col, w) = target.legs[i].at(a);
      col += w;
    }
    Matrix phi = linalg::least_squares(canon.transpose(), legs.transpose()).transpose();
    double res = linalg::max_abs(phi * canon - legs);
    if (res > residual) {
      residual = res;
      worst_atom = a;
    }
    if (linalg::numeric_rank(canon) != static_cast<std::size_t>(ld)) unique = false;
    maps[a] = std::move(phi);
  }
  if (residual > tolerance()) {
    std::ostringstream os;
    os << "no factorization through the direct limit: residual " << residual << " at atom '" << space.id(worst_atom) << "'";
    throw Error(ErrorKind::NotFactorizable, os.str());
  }
  ModuleMorphism phi(limit.module, target.apex, std::move(maps));
  bool admissible = is_morphism(phi);
  return {std::move(phi), residual, unique, admissible};
}

inline Factorization dl_universal_factorization(const DirectSystem& s, const Cone& target) {
  return dl_universal_factorization(s, direct_limit(s), target);
}

/// lim theta: the morphism between the limits commuting with the canonical
/// morphisms.
inline ModuleMorphism dl_functor(const SystemMorphism& theta, const DirectSystem& from, const DirectSystem& to) {
  auto report = validate_direct_morphism(theta, from, to);
  if (!report.ok()) throw Error(ErrorKind::Incompatible, "not a morphism of direct systems: " + report.violations.front().message);
  auto lim_from = direct_limit(from);
  auto lim_to = direct_limit(to);
  Cone cone{lim_to.module, {}};
  for (std::size_t i = 0; i < from.size(); ++i) cone.legs.push_back(compose(lim_to.structure_maps[i], theta.at(i)));
  return dl_universal_factorization(from, lim_from, cone).map;
}

/// The finitely generated presentation of a module: stage n is the submodule
/// generated by the first n+1 generators, with inclusions as connecting maps.
struct FgPresentation {
  DirectSystem system;
  LimitPresentation limit;
  /// The factorization of the inclusions through the limit.
  ModuleMorphism comparison;
  bool is_identity = false;
  IsoCertificate certificate;
};

inline FgPresentation present_as_fg_limit(const FiberModule& m, const std::vector<Element>& gens, std::uint64_t seed = 0) {
  if (gens.empty()) throw Error(ErrorKind::InvalidArgument, "present_as_fg_limit needs at least one generator");
  std::vector<Submodule> stages;
  for (std::size_t n = 0; n < gens.size(); ++n) {
    std::vector<Element> prefix(gens.begin(), gens.begin() + static_cast<std::ptrdiff_t>(n + 1));
    stages.push_back(submodule_generated(m, prefix));
  }
  const auto& last = stages.back().module;
  std::ostringstream deficient;
  for (std::size_t a = 0; a < m.atoms(); ++a) {
    if (last.dim(a) != m.dim(a)) {
      deficient << " atom '" << m.space().id(a) << "' spans " << last.dim(a) << " of " << m.dim(a) << " dimensions;";
    }
  }
  if (!deficient.str().empty()) {
    throw Error(ErrorKind::Deficient, "generators do not exhaust the module:" + deficient.str());
  }
  std::vector<FiberModule> modules;
  std::vector<Connecting> maps;
  for (const auto& st : stages) modules.push_back(st.module);
  for (std::size_t n = 0; n + 1 < stages.size(); ++n) {
    std::vector<Matrix> incl(m.atoms());
    for (std::size_t a = 0; a < m.atoms(); ++a) {
      incl[a] = linalg::least_squares(stages[n + 1].inclusion.at(a), stages[n].inclusion.at(a));
    }
    maps.push_back({n, n + 1, ModuleMorphism(stages[n].module, stages[n + 1].module, std::move(incl))});
  }
  DirectSystem system(IndexSet::chain(stages.size() - 1, TailSpec::identity()), std::move(modules), std::move(maps));
  auto limit = direct_limit(system);
  Cone cone{m, {}};
  for (const auto& st : stages) cone.legs.push_back(st.inclusion);
  auto f = dl_universal_factorization(system, limit, cone);
  bool ident = f.map.source() == m && f.map.approx_equal(ModuleMorphism::identity(m));
  auto cert = certify_isometric_iso(f.map, seed);
  return {std::move(system), std::move(limit), std::move(f.map), ident, std::move(cert)};
}

struct PreservationReport {
  /// Every component (including induced tail components) has full image
  /// (for surjectivity) or trivial kernel (for injectivity).
  bool premise = false;
  /// The limit morphism has the same property.
  bool preserved = false;
  ModuleMorphism limit_map;
  std::vector<std::size_t> limit_ranks;
  std::vector<std::size_t> expected_ranks;
  std::optional<std::string> witness_atom;
};

/// Whether lim theta has full image when every theta_i does.
inline PreservationReport check_surjectivity_preservation(const SystemMorphism& theta, const DirectSystem& from,
                                                          const DirectSystem& to) {
  bool premise = std::all_of(theta.components.begin(), theta.components.end(),
                             [](const ModuleMorphism& t) { return is_surjective(t); });
  if (from.index().is_chain()) {
    for (std::size_t a = 0; a < from.space().size(); ++a) {
      auto r = tail_ratio(to.index().tail(), from.index().tail(), from.index().last_stage(), a);
      if (!r.positive && to.module(from.index().last_stage()).dim(a) > 0) premise = false;
    }
  }
  auto lim = dl_functor(theta, from, to);
  auto r = ranks(lim);
  auto want = lim.target().dims();
  std::optional<std::string> witness;
  for (std::size_t a = 0; a < r.size(); ++a) {
    if (r[a] != want[a] && !witness) witness = from.space().id(a);
  }
  return {premise, !witness, std::move(lim), std::move(r), std::move(want), std::move(witness)};
}

}  // namespace l0mod
