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

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "l0mod/system.hpp"

namespace l0mod {

enum class Provenance { GreatestElement, ChainTail };

inline const char* to_string(Provenance p) {
  return p == Provenance::GreatestElement ? "greatest-element" : "chain-tail";
}

/// A limit or colimit object with its structure maps: canonical morphisms
/// M_i -> lim for a direct limit, projections lim -> M_i for an inverse
/// limit, one per explicit index.
struct LimitPresentation {
  FiberModule module;
  std::vector<ModuleMorphism> structure_maps;
  Provenance provenance;
  /// The index whose module the limit is carved from (top element or last
  /// chain stage).
  std::size_t base_index;
};

/// A target (for direct limits) or source (for inverse limits) of a system:
/// a module with one leg per explicit index.
struct Cone {
  FiberModule apex;
  std::vector<ModuleMorphism> legs;
};

struct Factorization {
  ModuleMorphism map;
  /// Largest entry residual of the factorization equations.
  double residual = 0.0;
  /// The structure maps jointly determine the factorization (canonical
  /// images span every limit fiber, or projections jointly separate it).
  bool unique = false;
  bool admissible = false;
};

namespace detail {

/// Projection of M onto its masked submodule.
inline ModuleMorphism mask_projection(const Submodule& masked) {
  std::vector<Matrix> maps(masked.inclusion.maps().size());
  for (std::size_t a = 0; a < maps.size(); ++a) maps[a] = masked.inclusion.at(a).transpose();
  return ModuleMorphism(masked.inclusion.target(), masked.module, std::move(maps));
}

inline std::string pair_label(const IndexSet& idx, std::size_t i, std::size_t j) {
  return "(" + idx.label(i) + "," + idx.label(j) + ")";
}

}  // namespace detail

}  // namespace l0mod
