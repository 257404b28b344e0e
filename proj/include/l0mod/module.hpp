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
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/error.hpp"
#include "l0mod/linalg.hpp"
#include "l0mod/measure_space.hpp"
#include "l0mod/norm.hpp"

namespace l0mod {

/// A normed L0(m)-module, realized as one finite-dimensional normed fiber
/// per atom. Fibers are finite-dimensional, so completeness is automatic.
class FiberModule {
 public:
  FiberModule(AtomicMeasureSpace space, std::vector<Fiber> fibers)
      : space_(std::move(space)), fibers_(std::move(fibers)) {
    if (fibers_.size() != space_.size()) {
      throw Error(ErrorKind::ShapeMismatch, "module needs exactly one fiber per atom");
    }
  }

  static FiberModule uniform(const AtomicMeasureSpace& space, const Fiber& fiber) {
    return FiberModule(space, std::vector<Fiber>(space.size(), fiber));
  }
  /// L0(m) itself: absolute value on every fiber.
  static FiberModule scalar(const AtomicMeasureSpace& space) { return uniform(space, Fiber::scalar()); }
  static FiberModule zero(const AtomicMeasureSpace& space) { return uniform(space, Fiber::zero()); }

  const AtomicMeasureSpace& space() const { return space_; }
  std::size_t atoms() const { return fibers_.size(); }
  const Fiber& fiber(std::size_t atom) const { return fibers_.at(atom); }
  const std::vector<Fiber>& fibers() const { return fibers_; }
  std::size_t dim(std::size_t atom) const { return fibers_.at(atom).dim(); }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d(fibers_.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = fibers_[i].dim();
    return d;
  }

  bool is_zero() const {
    return std::all_of(fibers_.begin(), fibers_.end(), [](const Fiber& f) { return f.dim() == 0; });
  }

  bool same_shape(const FiberModule& other) const {
    return space_ == other.space_ && dims() == other.dims();
  }

  friend bool operator==(const FiberModule& a, const FiberModule& b) {
    return a.space_ == b.space_ && a.fibers_ == b.fibers_;
  }

 private:
  AtomicMeasureSpace space_;
  std::vector<Fiber> fibers_;
};

class Element {
 public:
  Element(FiberModule module, std::vector<Vector> coords)
      : module_(std::move(module)), coords_(std::move(coords)) {
    if (coords_.size() != module_.atoms()) {
      throw Error(ErrorKind::ShapeMismatch, "element needs one coordinate vector per atom");
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (static_cast<std::size_t>(coords_[i].size()) != module_.dim(i)) {
        throw Error(ErrorKind::ShapeMismatch, "element coordinates do not match fiber dimension at atom '" +
                                                  module_.space().id(i) + "'");
      }
    }
  }

  static Element zero(const FiberModule& m) {
    std::vector<Vector> c(m.atoms());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = Vector::Zero(static_cast<Eigen::Index>(m.dim(i)));
    return Element(m, std::move(c));
  }

  const FiberModule& module() const { return module_; }
  const Vector& at(std::size_t atom) const { return coords_.at(atom); }
  const std::vector<Vector>& coords() const { return coords_; }

  /// f . v, acting per atom.
  Element scaled(const L0Function& f) const {
    require_same_space(f.space(), module_.space(), "Element::scaled");
    auto c = coords_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= f[i];
    return Element(module_, std::move(c));
  }

  friend Element operator+(const Element& a, const Element& b) {
    a.require_same_module(b);
    auto c = a.coords_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.coords_[i];
    return Element(a.module_, std::move(c));
  }

  friend Element operator-(const Element& a, const Element& b) {
    a.require_same_module(b);
    auto c = a.coords_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.coords_[i];
    return Element(a.module_, std::move(c));
  }

  /// Largest absolute coordinate difference over all atoms.
  double max_deviation(const Element& other) const {
    require_same_module(other);
    double d = 0.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) d = std::max(d, linalg::max_abs(coords_[i] - other.coords_[i]));
    return d;
  }

 private:
  void require_same_module(const Element& other) const {
    if (!module_.same_shape(other.module_)) {
      throw Error(ErrorKind::ShapeMismatch, "elements live in different modules");
    }
  }

  FiberModule module_;
  std::vector<Vector> coords_;
};

/// An L0-linear map between modules over the same space: one matrix per atom.
/// Admissibility (contraction of the pointwise norm) is checked by
/// is_morphism, not assumed.
class ModuleMorphism {
 public:
  ModuleMorphism(FiberModule source, FiberModule target, std::vector<Matrix> maps)
      : source_(std::move(source)), target_(std::move(target)), maps_(std::move(maps)) {
    require_same_space(source_.space(), target_.space(), "morphism");
    if (maps_.size() != source_.atoms()) {
      throw Error(ErrorKind::ShapeMismatch, "morphism needs one matrix per atom");
    }
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (static_cast<std::size_t>(maps_[i].rows()) != target_.dim(i) ||
          static_cast<std::size_t>(maps_[i].cols()) != source_.dim(i)) {
        throw Error(ErrorKind::ShapeMismatch, "morphism matrix has wrong shape at atom '" +
                                                  source_.space().id(i) + "'");
      }
    }
  }

  static ModuleMorphism identity(const FiberModule& m) {
    std::vector<Matrix> maps(m.atoms());
    for (std::size_t i = 0; i < maps.size(); ++i) {
      auto d = static_cast<Eigen::Index>(m.dim(i));
      maps[i] = Matrix::Identity(d, d);
    }
    return ModuleMorphism(m, m, std::move(maps));
  }

  static ModuleMorphism zero(const FiberModule& source, const FiberModule& target) {
    std::vector<Matrix> maps(source.atoms());
    for (std::size_t i = 0; i < maps.size(); ++i) {
      maps[i] = Matrix::Zero(static_cast<Eigen::Index>(target.dim(i)), static_cast<Eigen::Index>(source.dim(i)));
    }
    return ModuleMorphism(source, target, std::move(maps));
  }

  const FiberModule& source() const { return source_; }
  const FiberModule& target() const { return target_; }
  const Matrix& at(std::size_t atom) const { return maps_.at(atom); }
  const std::vector<Matrix>& maps() const { return maps_; }

  /// f . T, acting per atom.
  ModuleMorphism scaled(const L0Function& f) const {
    auto m = maps_;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] *= f[i];
    return ModuleMorphism(source_, target_, std::move(m));
  }

  ModuleMorphism with_target(const FiberModule& target) const {
    return ModuleMorphism(source_, target, maps_);
  }

  /// Largest absolute entry difference over all atoms.
  double max_deviation(const ModuleMorphism& other) const {
    if (!source_.same_shape(other.source_) || !target_.same_shape(other.target_)) {
      throw Error(ErrorKind::ShapeMismatch, "comparing morphisms of different shapes");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < maps_.size(); ++i) d = std::max(d, linalg::max_abs(maps_[i] - other.maps_[i]));
    return d;
  }

  bool approx_equal(const ModuleMorphism& other) const { return max_deviation(other) <= tolerance(); }

 private:
  FiberModule source_;
  FiberModule target_;
  std::vector<Matrix> maps_;
};

/// |v| as a function on the atoms.
inline L0Function pointwise_norm(const Element& v) {
  std::vector<double> out(v.module().atoms());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = norm_eval(v.module().fiber(i).norm(), v.at(i));
  return L0Function(v.module().space(), std::move(out));
}

/// Integral of min(|v - w|, 1) against the normalized reference measure.
inline double module_distance(const Element& v, const Element& w) {
  if (!(v.module() == w.module())) throw Error(ErrorKind::ShapeMismatch, "module_distance: different modules");
  auto diff = pointwise_norm(v - w);
  return l0_distance(diff, L0Function::constant(diff.space(), 0.0));
}

inline Element apply(const ModuleMorphism& phi, const Element& v) {
  if (!phi.source().same_shape(v.module())) {
    throw Error(ErrorKind::ShapeMismatch, "apply: element is not in the morphism's source");
  }
  std::vector<Vector> c(v.module().atoms());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = phi.at(i) * v.at(i);
  return Element(phi.target(), std::move(c));
}

/// psi o phi.
inline ModuleMorphism compose(const ModuleMorphism& psi, const ModuleMorphism& phi) {
  if (!psi.source().same_shape(phi.target())) {
    throw Error(ErrorKind::ShapeMismatch, "compose: source of the outer map differs from target of the inner map");
  }
  std::vector<Matrix> m(phi.maps().size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = psi.at(i) * phi.at(i);
  return ModuleMorphism(phi.source(), psi.target(), std::move(m));
}

inline ModuleMorphism identity(const FiberModule& m) { return ModuleMorphism::identity(m); }

struct PointwiseOperatorNorm {
  L0Function value;
  /// Per atom, a source vector of norm <= 1 attaining the value.
  std::vector<Vector> maximizers;
};

inline PointwiseOperatorNorm operator_pointwise_norm_detailed(const ModuleMorphism& t) {
  std::vector<double> vals(t.maps().size());
  std::vector<Vector> args(t.maps().size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    auto r = operator_norm(t.source().fiber(i), t.target().fiber(i), t.at(i));
    vals[i] = r.value;
    args[i] = std::move(r.maximizer);
  }
  return {L0Function(t.source().space(), std::move(vals)), std::move(args)};
}

/// |T| = ess sup { |T v| : |v| <= 1 }, computed exactly per atom.
inline L0Function operator_pointwise_norm(const ModuleMorphism& t) {
  return operator_pointwise_norm_detailed(t).value;
}

inline bool is_morphism(const ModuleMorphism& t) {
  auto n = operator_pointwise_norm(t);
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] > 1.0 + tolerance()) return false;
  }
  return true;
}

struct Submodule {
  FiberModule module;
  ModuleMorphism inclusion;
};

/// Restricts a fiber to the column space of an orthonormal basis. A basis that
/// spans the whole fiber keeps the fiber (and its coordinates) unchanged.
inline std::pair<Fiber, Matrix> restrict_fiber(const Fiber& f, const Matrix& basis) {
  auto d = static_cast<Eigen::Index>(f.dim());
  if (basis.cols() == d) return {f, Matrix::Identity(d, d)};
  if (basis.cols() == 0) return {Fiber::zero(), Matrix::Zero(d, 0)};
  return {Fiber(NormSpec::restricted(f.norm(), basis)), basis};
}

inline Submodule submodule_from_bases(const FiberModule& m, const std::vector<Matrix>& bases) {
  std::vector<Fiber> fibers(m.atoms());
  std::vector<Matrix> incl(m.atoms());
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    auto [fiber, basis] = restrict_fiber(m.fiber(i), bases[i]);
    fibers[i] = std::move(fiber);
    incl[i] = std::move(basis);
  }
  FiberModule sub(m.space(), std::move(fibers));
  ModuleMorphism inclusion(sub, m, std::move(incl));
  return {std::move(sub), std::move(inclusion)};
}

/// The smallest submodule containing the generators. Per atom this is the
/// span of the generators' coordinates; in finite dimensions the L0-span is
/// already closed.
inline Submodule submodule_generated(const FiberModule& m, const std::vector<Element>& gens) {
  std::vector<Matrix> bases(m.atoms());
  for (std::size_t i = 0; i < m.atoms(); ++i) {
    Matrix cols(static_cast<Eigen::Index>(m.dim(i)), static_cast<Eigen::Index>(gens.size()));
    for (std::size_t g = 0; g < gens.size(); ++g) {
      if (!gens[g].module().same_shape(m)) {
        throw Error(ErrorKind::ShapeMismatch, "submodule_generated: generator is not in the module");
      }
      cols.col(static_cast<Eigen::Index>(g)) = gens[g].at(i);
    }
    bases[i] = linalg::column_space_basis(cols);
  }
  return submodule_from_bases(m, bases);
}

struct KernelImage {
  Submodule kernel;
  Submodule image;
};

inline KernelImage kernel_image(const ModuleMorphism& phi) {
  std::vector<Matrix> ker(phi.maps().size());
  std::vector<Matrix> im(phi.maps().size());
  for (std::size_t i = 0; i < ker.size(); ++i) {
    ker[i] = linalg::null_space_basis(phi.at(i));
    im[i] = linalg::column_space_basis(phi.at(i));
  }
  return {submodule_from_bases(phi.source(), ker), submodule_from_bases(phi.target(), im)};
}

/// Per-atom rank of a morphism.
inline std::vector<std::size_t> ranks(const ModuleMorphism& phi) {
  std::vector<std::size_t> r(phi.maps().size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = linalg::numeric_rank(phi.at(i));
  return r;
}

inline bool is_surjective(const ModuleMorphism& phi) { return ranks(phi) == phi.target().dims(); }
inline bool is_injective(const ModuleMorphism& phi) { return ranks(phi) == phi.source().dims(); }

/// The submodule of M whose fibers are kept where alive[i] and zeroed elsewhere.
inline Submodule mask_module(const FiberModule& m, const std::vector<bool>& alive) {
  std::vector<Matrix> bases(m.atoms());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    auto d = static_cast<Eigen::Index>(m.dim(i));
    bases[i] = alive[i] ? Matrix(Matrix::Identity(d, d)) : Matrix(Matrix::Zero(d, 0));
  }
  return submodule_from_bases(m, bases);
}

/// Outcome of solving lhs o X = rhs for an unknown morphism X.
struct LiftResult {
  bool solvable = true;
  std::optional<ModuleMorphism> solution;
  /// First atom where the system has no solution, with the ranks that
  /// witness it.
  std::optional<std::size_t> witness_atom;
  std::size_t rank_lhs = 0;
  std::size_t rank_rhs = 0;
  double residual = 0.0;
};

/// Solves lhs o X = rhs per atom (X maps rhs.source() to lhs.source()). A
/// solution exists iff the columns of rhs lie in the image of lhs.
inline LiftResult lift_through(const ModuleMorphism& lhs, const ModuleMorphism& rhs) {
  if (!lhs.target().same_shape(rhs.target())) {
    throw Error(ErrorKind::ShapeMismatch, "lift_through: morphisms have different targets");
  }
  LiftResult out;
  std::vector<Matrix> x(lhs.maps().size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = linalg::least_squares(lhs.at(i), rhs.at(i));
    double res = linalg::max_abs(lhs.at(i) * x[i] - rhs.at(i));
    out.residual = std::max(out.residual, res);
    if (out.solvable && res > tolerance()) {
      out.solvable = false;
      out.witness_atom = i;
      out.rank_lhs = linalg::numeric_rank(lhs.at(i));
      out.rank_rhs = linalg::numeric_rank(rhs.at(i));
    }
  }
  if (out.solvable) out.solution = ModuleMorphism(rhs.source(), lhs.source(), std::move(x));
  return out;
}

}  // namespace l0mod
