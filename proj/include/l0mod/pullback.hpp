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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/direct_limit.hpp"
#include "l0mod/inverse_limit.hpp"
#include "l0mod/iso.hpp"

namespace l0mod {

namespace detail {

inline void require_pullable(const AtomMap& f, const FiberModule& m) {
  require_same_space(f.target(), m.space(), "pullback");
  if (!pushforward_check(f).absolutely_continuous) {
    throw Error(ErrorKind::InvalidArgument, "pushforward of the source measure is not absolutely continuous");
  }
}

}  // namespace detail

/// f*M: the fiber at x is the fiber of M at f(x).
inline FiberModule pullback_module(const AtomMap& f, const FiberModule& m) {
  detail::require_pullable(f, m);
  std::vector<Fiber> fibers(f.source().size());
  for (std::size_t x = 0; x < fibers.size(); ++x) fibers[x] = m.fiber(f(x));
  return FiberModule(f.source(), std::move(fibers));
}

/// f*v with (f*v)(x) = v(f(x)).
inline Element pullback_element(const AtomMap& f, const Element& v, const FiberModule& pulled) {
  std::vector<Vector> c(f.source().size());
  for (std::size_t x = 0; x < c.size(); ++x) c[x] = v.at(f(x));
  return Element(pulled, std::move(c));
}

inline Element pullback_element(const AtomMap& f, const Element& v) {
  return pullback_element(f, v, pullback_module(f, v.module()));
}

inline ModuleMorphism pullback_morphism(const AtomMap& f, const ModuleMorphism& phi) {
  auto src = pullback_module(f, phi.source());
  auto dst = pullback_module(f, phi.target());
  std::vector<Matrix> maps(f.source().size());
  for (std::size_t x = 0; x < maps.size(); ++x) maps[x] = phi.at(f(x));
  return ModuleMorphism(std::move(src), std::move(dst), std::move(maps));
}

namespace detail {

template <class System>
System pullback_system(const AtomMap& f, const System& s) {
  const auto& idx = s.index();
  std::vector<FiberModule> modules;
  for (const auto& m : s.modules()) modules.push_back(pullback_module(f, m));
  std::vector<Connecting> maps;
  for (auto [i, j] : idx.strict_pairs()) maps.push_back({i, j, pullback_morphism(f, s.map(i, j))});
  auto pulled = idx.is_chain() ? idx.with_tail(idx.tail().pulled_back(f)) : idx;
  return System(std::move(pulled), std::move(modules), std::move(maps));
}

}  // namespace detail

inline DirectSystem pullback_system(const AtomMap& f, const DirectSystem& s) { return detail::pullback_system(f, s); }
inline InverseSystem pullback_system(const AtomMap& f, const InverseSystem& s) { return detail::pullback_system(f, s); }

struct SectionsIso {
  AtomicMeasureSpace product;
  AtomMap projection;
  /// L0(Z, M) as a module over Z x Y.
  FiberModule sections;
  FiberModule pulled;
  ModuleMorphism comparison;
  IsoCertificate certificate;
};

/// Z x Y with atoms "(z,y)" (z-major) and product weights.
inline AtomicMeasureSpace product_space(const AtomicMeasureSpace& z, const AtomicMeasureSpace& y) {
  std::vector<std::string> ids;
  std::vector<double> w;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      ids.push_back("(" + z.id(i) + "," + y.id(j) + ")");
      w.push_back(z.weight(i) * y.weight(j));
    }
  }
  return AtomicMeasureSpace(std::move(ids), std::move(w));
}

/// The projection Z x Y -> Y.
inline AtomMap product_projection(const AtomicMeasureSpace& z, const AtomicMeasureSpace& y) {
  auto x = product_space(z, y);
  std::vector<std::size_t> image(x.size());
  for (std::size_t k = 0; k < image.size(); ++k) image[k] = k % y.size();
  return AtomMap(std::move(x), y, std::move(image));
}

/// L0(Z, M) built directly from its definition: a measurable (here: any)
/// choice of an M-element for each z, with fiber M(y) over (z, y).
inline FiberModule sections_module(const AtomicMeasureSpace& z, const FiberModule& m) {
  auto x = product_space(z, m.space());
  std::vector<Fiber> fibers;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < m.atoms(); ++j) fibers.push_back(m.fiber(j));
  }
  return FiberModule(std::move(x), std::move(fibers));
}

/// T(v): the section constant in z with value v.
inline Element constant_section(const AtomicMeasureSpace& z, const Element& v, const FiberModule& sections) {
  std::vector<Vector> c;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < v.module().atoms(); ++j) c.push_back(v.at(j));
  }
  return Element(sections, std::move(c));
}

inline SectionsIso sections_iso(const AtomicMeasureSpace& z, const FiberModule& m, std::uint64_t seed = 0) {
  auto pi = product_projection(z, m.space());
  auto sections = sections_module(z, m);
  auto pulled = pullback_module(pi, m);
  std::vector<Matrix> id(sections.atoms());
  for (std::size_t x = 0; x < id.size(); ++x) {
    auto d = static_cast<Eigen::Index>(sections.dim(x));
    id[x] = Matrix::Identity(d, d);
  }
  ModuleMorphism comparison(sections, pulled, std::move(id));
  auto cert = certify_isometric_iso(comparison, seed);
  return {pi.source(), pi, std::move(sections), std::move(pulled), std::move(comparison), std::move(cert)};
}

struct PullbackLimitComparison {
  /// Limit of the pulled-back system.
  LimitPresentation limit_of_pullback;
  /// Pullback of the limit, with f* of the structure maps.
  FiberModule pullback_of_limit;
  std::vector<ModuleMorphism> pulled_structure_maps;
  /// The canonical morphism between the two sides.
  ModuleMorphism comparison;
  double residual = 0.0;
  IsoCertificate certificate;
};

/// lim f*M_i -> f* lim M_i, the factorization of the pulled-back canonical
/// morphisms, certified as an isometric isomorphism.
inline PullbackLimitComparison dl_pullback_iso(const AtomMap& f, const DirectSystem& d, std::uint64_t seed = 0) {
  auto pulled_system = pullback_system(f, d);
  auto lhs = direct_limit(pulled_system);
  auto lim = direct_limit(d);
  auto rhs = pullback_module(f, lim.module);
  std::vector<ModuleMorphism> legs;
  for (const auto& c : lim.structure_maps) legs.push_back(pullback_morphism(f, c));
  auto fac = dl_universal_factorization(pulled_system, lhs, Cone{rhs, legs});
  auto cert = certify_isometric_iso(fac.map, seed);
  return {std::move(lhs), std::move(rhs), std::move(legs), std::move(fac.map), fac.residual, std::move(cert)};
}

struct InversePullbackComparison {
  PullbackLimitComparison data;
  bool isomorphic = false;
  std::string note;
};

/// f* lim M_i -> lim f*M_i. Reports whether it is an isometric isomorphism on
/// this instance; it is not claimed to be one in general.
inline InversePullbackComparison il_pullback_compare(const AtomMap& f, const InverseSystem& s, std::uint64_t seed = 0) {
  auto pulled_system = pullback_system(f, s);
  auto rhs = inverse_limit(pulled_system);
  auto lim = inverse_limit(s);
  auto lhs = pullback_module(f, lim.module);
  std::vector<ModuleMorphism> legs;
  for (const auto& p : lim.structure_maps) legs.push_back(pullback_morphism(f, p));
  auto fac = il_universal_factorization(pulled_system, rhs, Cone{lhs, legs});
  auto cert = certify_isometric_iso(fac.map, seed);
  bool iso = cert.ok();
  std::string note = iso ? "comparison is an isometric isomorphism on this instance; no counterexample found"
                         : "comparison is not an isometric isomorphism on this instance";
  note += "; known non-commuting examples need a non-atomic base and infinite-dimensional fibers, outside this representation";
  return {{std::move(rhs), std::move(lhs), std::move(legs), std::move(fac.map), fac.residual, std::move(cert)}, iso, std::move(note)};
}

}  // namespace l0mod
