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
#include <utility>
#include <vector>

#include "l0mod/hom_dual.hpp"
#include "l0mod/inverse_limit.hpp"
#include "l0mod/iso.hpp"

namespace l0mod {

/// Hom(M_i, N) with P_ij(T) = T o phi_ij, over the same index set and tail.
inline InverseSystem hom_inverse_system(const DirectSystem& d, const FiberModule& n) {
  std::vector<FiberModule> modules;
  for (std::size_t i = 0; i < d.size(); ++i) modules.push_back(hom_module(d.module(i), n).module());
  std::vector<Connecting> maps;
  for (auto [i, j] : d.index().strict_pairs()) maps.push_back({i, j, precompose(d.map(i, j), n)});
  return InverseSystem(d.index(), std::move(modules), std::move(maps));
}

struct HomLimitIso {
  InverseSystem system;
  /// lim Hom(M_i, N).
  LimitPresentation inverse_side;
  /// Hom(lim M_i, N).
  HomModule direct_side;
  /// T -> {T o phi_i}.
  ModuleMorphism comparison;
  IsoCertificate certificate;
};

/// Builds both sides independently and certifies the canonical comparison.
inline HomLimitIso hom_limit_iso(const DirectSystem& d, const FiberModule& n, std::uint64_t seed = 0) {
  auto system = hom_inverse_system(d, n);
  auto inv = inverse_limit(system);
  auto dl = direct_limit(d);
  HomModule hom(dl.module, n);
  Cone cone{hom.module(), {}};
  for (std::size_t i = 0; i < d.size(); ++i) cone.legs.push_back(precompose(dl.structure_maps[i], n));
  auto f = detail::solve_through_projections(system, inv, cone);
  auto cert = certify_isometric_iso(f.map, seed);
  return {std::move(system), std::move(inv), std::move(hom), std::move(f.map), std::move(cert)};
}

/// lim M_i* = (lim M_i)*, with the adjoints as connecting maps.
inline HomLimitIso dual_limit_iso(const DirectSystem& d, std::uint64_t seed = 0) {
  return hom_limit_iso(d, FiberModule::scalar(d.space()), seed);
}

}  // namespace l0mod
