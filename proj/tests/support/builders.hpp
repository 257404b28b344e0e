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

#include <initializer_list>
#include <string>
#include <vector>

#include "l0mod.hpp"

namespace build {

using namespace l0mod;

inline AtomicMeasureSpace space(std::vector<std::string> ids, std::vector<double> weights) {
  return AtomicMeasureSpace(std::move(ids), std::move(weights));
}

inline AtomicMeasureSpace dirac() { return space({"p"}, {1.0}); }

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

/// Row-major literal.
inline Matrix mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> xs) {
  Matrix m(rows, cols);
  auto it = xs.begin();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = *it++;
  }
  return m;
}

inline Fiber weighted(PExponent p, std::initializer_list<double> w) { return Fiber(NormSpec::weighted(p, vec(w))); }

inline FiberModule plane(const AtomicMeasureSpace& sp) { return FiberModule::uniform(sp, Fiber::euclidean(2)); }

inline Element element(const FiberModule& m, std::vector<Vector> coords) { return Element(m, std::move(coords)); }

inline ModuleMorphism morphism(const FiberModule& s, const FiberModule& t, const Matrix& m) {
  return ModuleMorphism(s, t, std::vector<Matrix>(s.atoms(), m));
}

}  // namespace build
