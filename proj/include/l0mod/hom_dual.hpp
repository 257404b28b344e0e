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
#include <utility>
#include <vector>

#include "l0mod/module.hpp"

namespace l0mod {

/// Hom(M, N) as a module whose fiber at each atom holds the flattened
/// (row-major) matrices with the operator norm between the two fibers.
class HomModule {
 public:
  HomModule(FiberModule source, FiberModule target)
      : source_(std::move(source)), target_(std::move(target)), module_(build(source_, target_)) {}

  const FiberModule& module() const { return module_; }
  const FiberModule& source() const { return source_; }
  const FiberModule& target() const { return target_; }

  /// The morphism a Hom element represents.
  ModuleMorphism as_morphism(const Element& t) const {
    if (!t.module().same_shape(module_)) throw Error(ErrorKind::ShapeMismatch, "element is not in this Hom module");
    std::vector<Matrix> maps(module_.atoms());
    for (std::size_t i = 0; i < maps.size(); ++i) {
      maps[i] = linalg::unvec_rows(t.at(i), static_cast<Eigen::Index>(target_.dim(i)),
                                   static_cast<Eigen::Index>(source_.dim(i)));
    }
    return ModuleMorphism(source_, target_, std::move(maps));
  }

  Element element(const ModuleMorphism& t) const {
    if (!t.source().same_shape(source_) || !t.target().same_shape(target_)) {
      throw Error(ErrorKind::ShapeMismatch, "morphism does not belong to this Hom module");
    }
    std::vector<Vector> c(module_.atoms());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = linalg::vec_rows(t.at(i));
    return Element(module_, std::move(c));
  }

 private:
  static FiberModule build(const FiberModule& s, const FiberModule& t) {
    require_same_space(s.space(), t.space(), "hom_module");
    std::vector<Fiber> fibers(s.atoms());
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      fibers[i] = Fiber(NormSpec::operator_norm(s.fiber(i), t.fiber(i)));
    }
    return FiberModule(s.space(), std::move(fibers));
  }

  FiberModule source_;
  FiberModule target_;
  FiberModule module_;
};

inline HomModule hom_module(const FiberModule& m, const FiberModule& n) { return HomModule(m, n); }

/// M* = Hom(M, L0(m)); fibers carry the dual norm.
inline HomModule dual_module(const FiberModule& m) { return HomModule(m, FiberModule::scalar(m.space())); }

/// <omega, v> per atom.
inline L0Function pairing(const Element& omega, const Element& v) {
  if (!omega.module().same_shape(v.module())) {
    throw Error(ErrorKind::ShapeMismatch, "pairing: covector and vector have different shapes");
  }
  std::vector<double> out(v.module().atoms());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = omega.at(i).dot(v.at(i));
  return L0Function(v.module().space(), std::move(out));
}

/// omega -> omega o phi, from dual(target) to dual(source): the per-atom
/// transpose.
inline ModuleMorphism adjoint(const ModuleMorphism& phi) {
  auto src = dual_module(phi.target()).module();
  auto dst = dual_module(phi.source()).module();
  std::vector<Matrix> maps(phi.maps().size());
  for (std::size_t i = 0; i < maps.size(); ++i) maps[i] = phi.at(i).transpose();
  return ModuleMorphism(std::move(src), std::move(dst), std::move(maps));
}

/// T -> T o phi as a morphism Hom(B, N) -> Hom(A, N) for phi: A -> B. In
/// row-major coordinates this is kron(I_t, phi^T).
inline ModuleMorphism precompose(const ModuleMorphism& phi, const FiberModule& n) {
  HomModule from(phi.target(), n);
  HomModule to(phi.source(), n);
  std::vector<Matrix> maps(phi.maps().size());
  for (std::size_t i = 0; i < maps.size(); ++i) {
    auto t = static_cast<Eigen::Index>(n.dim(i));
    auto a = static_cast<Eigen::Index>(phi.source().dim(i));
    auto b = static_cast<Eigen::Index>(phi.target().dim(i));
    Matrix k = Matrix::Zero(t * a, t * b);
    for (Eigen::Index r = 0; r < t; ++r) k.block(r * a, r * b, a, b) = phi.at(i).transpose();
    maps[i] = std::move(k);
  }
  return ModuleMorphism(from.module(), to.module(), std::move(maps));
}

}  // namespace l0mod
