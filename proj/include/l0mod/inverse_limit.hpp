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
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/direct_limit.hpp"

namespace l0mod {

/// One element per explicit index.
struct Thread {
  std::vector<Element> components;
  const Element& at(std::size_t i) const { return components.at(i); }
};

struct IlNorm {
  L0Function value;
  /// false where the norm is +inf; value is meaningless there.
  std::vector<bool> finite;
  bool all_finite() const { return std::all_of(finite.begin(), finite.end(), [](bool b) { return b; }); }
};

/// |v| = ess sup of the component norms, extended over the chain tail.
///
/// Going backwards along the tail a component at stage N+j must satisfy
/// v_N = (prod of steps) v_{N+j}, so its norm grows by the reciprocal of the
/// step product. That is bounded exactly on atoms the tail keeps alive.
inline IlNorm il_norm(const InverseSystem& s, const Thread& t) {
  if (t.components.size() != s.size()) throw Error(ErrorKind::ShapeMismatch, "thread needs one component per index");
  std::size_t n = s.space().size();
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto ni = pointwise_norm(t.at(i));
    for (std::size_t a = 0; a < n; ++a) v[a] = std::max(v[a], ni[a]);
  }
  std::vector<bool> finite(n, true);
  if (s.index().is_chain()) {
    auto top = pointwise_norm(t.at(s.index().last_stage()));
    auto alive = tail_alive(s.index(), s.space());
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a] && top[a] > tolerance()) finite[a] = false;
    }
  }
  return {L0Function(s.space(), std::move(v)), std::move(finite)};
}

/// The inverse limit and its projections.
///
/// Finite posets: the module at the greatest element with projections
/// P_{i,top}. Chains: the module at the last stage with fibers dropped where
/// the tail does not keep them alive (all of them for a harmonic tail).
inline LimitPresentation inverse_limit(const InverseSystem& s) {
  std::size_t top = greatest_element(s.index());
  std::vector<ModuleMorphism> proj;
  if (!s.index().is_chain()) {
    for (std::size_t i = 0; i < s.size(); ++i) proj.push_back(s.map(i, top));
    return {s.module(top), std::move(proj), Provenance::GreatestElement, top};
  }
  auto masked = mask_module(s.module(top), tail_alive(s.index(), s.space()));
  for (std::size_t i = 0; i < s.size(); ++i) proj.push_back(compose(s.map(i, top), masked.inclusion));
  return {masked.module, std::move(proj), Provenance::ChainTail, top};
}

/// The unique limit element with P_i(v) = v_i.
inline Element thread_from_components(const InverseSystem& s, const LimitPresentation& limit, const Thread& t) {
  if (t.components.size() != s.size()) throw Error(ErrorKind::ShapeMismatch, "thread needs one component per index");
  const auto& idx = s.index();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!t.at(i).module().same_shape(s.module(i))) {
      throw Error(ErrorKind::ShapeMismatch, "thread component at '" + idx.label(i) + "' lives in the wrong module");
    }
  }
  double worst = 0.0;
  std::string where;
  for (auto [i, j] : idx.strict_pairs()) {
    double d = apply(s.map(i, j), t.at(j)).max_deviation(t.at(i));
    if (d > worst) {
      worst = d;
      where = detail::pair_label(idx, i, j);
    }
  }
  if (worst > tolerance()) {
    std::ostringstream os;
    os << "components are not compatible at " << where << ", max entry deviation " << worst;
    throw Error(ErrorKind::Incompatible, os.str());
  }
  auto norm = il_norm(s, t);
  if (!norm.all_finite()) {
    std::ostringstream os;
    os << "thread has infinite norm at atoms:";
    for (std::size_t a = 0; a < norm.finite.size(); ++a) {
      if (!norm.finite[a]) os << " '" << s.space().id(a) << "'";
    }
    throw Error(ErrorKind::Incompatible, os.str());
  }
  const auto& v = t.at(limit.base_index);
  std::vector<Vector> coords(s.space().size());
  for (std::size_t a = 0; a < coords.size(); ++a) {
    // projection at the base index is the (masked) inclusion, an isometry onto
    // its image
    coords[a] = limit.structure_maps[limit.base_index].at(a).transpose() * v.at(a);
  }
  return Element(limit.module, std::move(coords));
}

inline Element thread_from_components(const InverseSystem& s, const Thread& t) {
  return thread_from_components(s, inverse_limit(s), t);
}

namespace detail {

inline void check_inverse_cone(const InverseSystem& s, const Cone& cone) {
  const auto& idx = s.index();
  if (cone.legs.size() != s.size()) throw Error(ErrorKind::ShapeMismatch, "source needs one morphism per index");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!cone.legs[i].source().same_shape(cone.apex) || !cone.legs[i].target().same_shape(s.module(i))) {
      throw Error(ErrorKind::ShapeMismatch, "source morphism at '" + idx.label(i) + "' has the wrong shape");
    }
    if (!is_morphism(cone.legs[i])) {
      throw Error(ErrorKind::Incompatible, "source morphism at '" + idx.label(i) + "' is not admissible");
    }
  }
  double worst = 0.0;
  std::string where;
  for (auto [i, j] : idx.strict_pairs()) {
    double d = compose(s.map(i, j), cone.legs[j]).max_deviation(cone.legs[i]);
    if (d > worst) {
      worst = d;
      where = pair_label(idx, i, j);
    }
  }
  if (worst > tolerance()) {
    std::ostringstream os;
    os << "source law fails at " << where << " with max entry deviation " << worst;
    throw Error(ErrorKind::Incompatible, os.str());
  }
  if (idx.is_chain()) {
    ValidationReport r;
    check_tail_growth(cone.legs[idx.last_stage()], TailSpec::identity(), idx.tail(), idx.last_stage(),
                      idx.label(idx.last_stage()), r);
    if (!r.ok()) throw Error(ErrorKind::Incompatible, "source does not extend over the chain tail: " + r.violations.front().message);
  }
}

}  // namespace detail

namespace detail {

/// Solves P_i o Phi = Q_i per atom from the stacked projections, without
/// checking the source or the admissibility of the result.
inline Factorization solve_through_projections(const InverseSystem& s, const LimitPresentation& limit, const Cone& source) {
  const auto& space = s.space();
  std::vector<Matrix> maps(space.size());
  double residual = 0.0;
  bool unique = true;
  std::size_t worst_atom = 0;
  for (std::size_t a = 0; a < space.size(); ++a) {
    auto ld = static_cast<Eigen::Index>(limit.module.dim(a));
    auto sd = static_cast<Eigen::Index>(source.apex.dim(a));
    Eigen::Index total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) total += static_cast<Eigen::Index>(s.module(i).dim(a));
    Matrix proj(total, ld);
    Matrix legs(total, sd);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto h = static_cast<Eigen::Index>(s.module(i).dim(a));
      proj.middleRows(row, h) = limit.structure_maps[i].at(a);
      legs.middleRows(row, h) = source.legs[i].at(a);
      row += h;
    }
    Matrix phi = linalg::least_squares(proj, legs);
    double res = linalg::max_abs(proj * phi - legs);
    if (res > residual) {
      residual = res;
      worst_atom = a;
    }
    if (linalg::numeric_rank(proj) != static_cast<std::size_t>(ld)) unique = false;
    maps[a] = std::move(phi);
  }
  if (residual > tolerance()) {
    std::ostringstream os;
    os << "no factorization through the inverse limit: residual " << residual << " at atom '" << space.id(worst_atom) << "'";
    throw Error(ErrorKind::NotFactorizable, os.str());
  }
  return {ModuleMorphism(source.apex, limit.module, std::move(maps)), residual, unique, false};
}

}  // namespace detail

/// The unique Phi: apex -> lim with P_i o Phi = Q_i.
inline Factorization il_universal_factorization(const InverseSystem& s, const LimitPresentation& limit, const Cone& source) {
  detail::check_inverse_cone(s, source);
  auto f = detail::solve_through_projections(s, limit, source);
  f.admissible = is_morphism(f.map);
  return f;
}

inline Factorization il_universal_factorization(const InverseSystem& s, const Cone& source) {
  return il_universal_factorization(s, inverse_limit(s), source);
}

inline ModuleMorphism il_functor(const SystemMorphism& theta, const InverseSystem& from, const InverseSystem& to) {
  auto report = validate_inverse_morphism(theta, from, to);
  if (!report.ok()) throw Error(ErrorKind::Incompatible, "not a morphism of inverse systems: " + report.violations.front().message);
  auto lim_from = inverse_limit(from);
  auto lim_to = inverse_limit(to);
  Cone cone{lim_from.module, {}};
  for (std::size_t i = 0; i < from.size(); ++i) cone.legs.push_back(compose(theta.at(i), lim_from.structure_maps[i]));
  return il_universal_factorization(to, lim_to, cone).map;
}

namespace detail {

inline bool inverse_tail_nonzero(const SystemMorphism& theta, const InverseSystem& from, const InverseSystem& to) {
  if (!from.index().is_chain()) return true;
  for (std::size_t a = 0; a < from.space().size(); ++a) {
    auto r = tail_ratio(from.index().tail(), to.index().tail(), from.index().last_stage(), a);
    if (!r.positive && theta.components.back().source().dim(a) > 0) return false;
  }
  return true;
}

}  // namespace detail

/// Whether lim theta has trivial kernel when every theta_i does.
inline PreservationReport check_injectivity_preservation(const SystemMorphism& theta, const InverseSystem& from,
                                                         const InverseSystem& to) {
  bool premise = std::all_of(theta.components.begin(), theta.components.end(),
                             [](const ModuleMorphism& t) { return is_injective(t); }) &&
                 detail::inverse_tail_nonzero(theta, from, to);
  auto lim = il_functor(theta, from, to);
  auto r = ranks(lim);
  auto want = lim.source().dims();
  std::optional<std::string> witness;
  for (std::size_t a = 0; a < r.size(); ++a) {
    if (r[a] != want[a] && !witness) witness = from.space().id(a);
  }
  return {premise, !witness, std::move(lim), std::move(r), std::move(want), std::move(witness)};
}

/// Whether lim theta has full image when every theta_i does. This can fail
/// for inverse limits.
inline PreservationReport check_surjectivity_preservation(const SystemMorphism& theta, const InverseSystem& from,
                                                          const InverseSystem& to) {
  bool premise = std::all_of(theta.components.begin(), theta.components.end(),
                             [](const ModuleMorphism& t) { return is_surjective(t); }) &&
                 detail::inverse_tail_nonzero(theta, from, to);
  auto lim = il_functor(theta, from, to);
  auto r = ranks(lim);
  auto want = lim.target().dims();
  std::optional<std::string> witness;
  for (std::size_t a = 0; a < r.size(); ++a) {
    if (r[a] != want[a] && !witness) witness = from.space().id(a);
  }
  return {premise, !witness, std::move(lim), std::move(r), std::move(want), std::move(witness)};
}

}  // namespace l0mod
