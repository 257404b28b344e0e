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

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/error.hpp"
#include "l0mod/linalg.hpp"

namespace l0mod {

enum class PExponent { One, Two, Infinity };

inline const char* to_string(PExponent p) {
  switch (p) {
    case PExponent::One: return "1";
    case PExponent::Two: return "2";
    case PExponent::Infinity: return "inf";
  }
  return "?";
}

class Fiber;

namespace detail {
struct NormNode;
}

/// Realization of a pointwise norm on a single finite-dimensional fiber.
///
/// Variants:
///  - WeightedP(p, w):    x -> ||diag(w) x||_p
///  - FramedP(p, A):      x -> ||A x||_p, A injective
///  - DualOf(inner):      xi -> sup { <xi, x> : inner(x) <= 1 }
///  - OperatorNorm(S, T): flattened (row-major) t x s matrices with the
///                        operator norm between the two fibers
///  - Restricted(inner, B): x -> inner(B x), B injective; the restriction of
///                        a norm to the column space of B
///
/// Double duals are flattened and operator norms into the scalar fiber are
/// stored as DualOf(source), so DualOf never nests.
class NormSpec {
 public:
  enum class Kind { WeightedP, FramedP, DualOf, OperatorNorm, Restricted };

  /// The norm of the zero-dimensional space.
  NormSpec();

  static NormSpec weighted(PExponent p, Vector weights);
  static NormSpec euclidean(std::size_t dim) {
    return weighted(PExponent::Two, Vector::Ones(static_cast<Eigen::Index>(dim)));
  }
  static NormSpec framed(PExponent p, Matrix frame);
  static NormSpec dual_of(const NormSpec& inner);
  static NormSpec operator_norm(const Fiber& source, const Fiber& target);
  static NormSpec restricted(const NormSpec& inner, Matrix basis);

  std::size_t dim() const;
  Kind kind() const;
  PExponent p() const;
  const Vector& weights() const;
  const Matrix& frame() const;
  const NormSpec& inner() const;
  const Fiber& op_source() const;
  const Fiber& op_target() const;
  const Matrix& basis() const;

  std::string describe() const;

  const detail::NormNode& node() const { return *node_; }

  friend bool operator==(const NormSpec& a, const NormSpec& b);

 private:
  explicit NormSpec(std::shared_ptr<const detail::NormNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::NormNode> node_;
};

/// A finite-dimensional normed space attached to one atom.
class Fiber {
 public:
  Fiber() = default;
  explicit Fiber(NormSpec norm) : dim_(norm.dim()), norm_(std::move(norm)) {}
  Fiber(std::size_t dim, NormSpec norm) : dim_(dim), norm_(std::move(norm)) {
    if (norm_.dim() != dim_) {
      throw Error(ErrorKind::ShapeMismatch, "fiber dimension does not match its norm");
    }
  }

  static Fiber zero() { return Fiber(); }
  static Fiber euclidean(std::size_t dim) { return Fiber(NormSpec::euclidean(dim)); }
  /// Absolute value on the real line.
  static Fiber scalar() { return Fiber(NormSpec::weighted(PExponent::One, Vector::Ones(1))); }

  std::size_t dim() const { return dim_; }
  const NormSpec& norm() const { return norm_; }

  bool is_scalar() const;

  friend bool operator==(const Fiber& a, const Fiber& b) {
    return a.dim_ == b.dim_ && a.norm_ == b.norm_;
  }

 private:
  std::size_t dim_ = 0;
  NormSpec norm_;
};

namespace detail {

/// Points whose convex hull is a unit ball, listed up to sign.
struct VertexSet {
  bool available = false;
  bool capped = false;
  std::vector<Vector> points;
};

struct NormNode {
  NormSpec::Kind kind = NormSpec::Kind::WeightedP;
  std::size_t dim = 0;
  PExponent p = PExponent::Two;
  Vector weights;
  Matrix frame;
  std::optional<NormSpec> inner;
  std::optional<Fiber> source;
  std::optional<Fiber> target;
  Matrix basis;

  mutable std::once_flag ball_once;
  mutable std::once_flag dual_ball_once;
  mutable VertexSet ball_cache;
  mutable VertexSet dual_ball_cache;
};

inline constexpr std::size_t kMaxVertexDim = 12;
inline constexpr double kMaxVertexCandidates = 1 << 21;

}  // namespace detail

inline NormSpec::NormSpec() {
  static const auto zero = [] {
    auto node = std::make_shared<detail::NormNode>();
    node->weights = Vector::Zero(0);
    node->frame = Matrix::Zero(0, 0);
    return std::shared_ptr<const detail::NormNode>(std::move(node));
  }();
  node_ = zero;
}

inline NormSpec NormSpec::weighted(PExponent p, Vector weights) {
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights(i) > 0.0) || !std::isfinite(weights(i))) {
      throw Error(ErrorKind::InvalidArgument, "weighted norm needs strictly positive weights");
    }
  }
  auto node = std::make_shared<detail::NormNode>();
  node->kind = Kind::WeightedP;
  node->dim = static_cast<std::size_t>(weights.size());
  node->p = p;
  node->frame = weights.asDiagonal();
  node->weights = std::move(weights);
  return NormSpec(std::move(node));
}

inline NormSpec NormSpec::framed(PExponent p, Matrix frame) {
  if (frame.cols() > 0 && linalg::numeric_rank(frame) != static_cast<std::size_t>(frame.cols())) {
    throw Error(ErrorKind::InvalidArgument, "framed norm needs a matrix of full column rank");
  }
  auto node = std::make_shared<detail::NormNode>();
  node->kind = Kind::FramedP;
  node->dim = static_cast<std::size_t>(frame.cols());
  node->p = p;
  node->frame = std::move(frame);
  return NormSpec(std::move(node));
}

inline NormSpec NormSpec::dual_of(const NormSpec& inner) {
  if (inner.dim() == 0) return NormSpec();
  if (inner.kind() == Kind::DualOf) return inner.inner();
  auto node = std::make_shared<detail::NormNode>();
  node->kind = Kind::DualOf;
  node->dim = inner.dim();
  node->inner = inner;
  return NormSpec(std::move(node));
}

inline NormSpec NormSpec::restricted(const NormSpec& inner, Matrix basis) {
  if (static_cast<std::size_t>(basis.rows()) != inner.dim()) {
    throw Error(ErrorKind::ShapeMismatch, "restriction basis has wrong row count");
  }
  if (basis.cols() == 0) return NormSpec();
  if (linalg::numeric_rank(basis) != static_cast<std::size_t>(basis.cols())) {
    throw Error(ErrorKind::InvalidArgument, "restriction basis must have full column rank");
  }
  if (inner.kind() == Kind::WeightedP || inner.kind() == Kind::FramedP) {
    return framed(inner.p(), inner.frame() * basis);
  }
  if (inner.kind() == Kind::Restricted) {
    return restricted(inner.inner(), inner.basis() * basis);
  }
  auto node = std::make_shared<detail::NormNode>();
  node->kind = Kind::Restricted;
  node->dim = static_cast<std::size_t>(basis.cols());
  node->inner = inner;
  node->basis = std::move(basis);
  return NormSpec(std::move(node));
}

inline std::size_t NormSpec::dim() const { return node_->dim; }
inline NormSpec::Kind NormSpec::kind() const { return node_->kind; }
inline PExponent NormSpec::p() const { return node_->p; }
inline const Vector& NormSpec::weights() const { return node_->weights; }
inline const Matrix& NormSpec::frame() const { return node_->frame; }
inline const NormSpec& NormSpec::inner() const { return *node_->inner; }
inline const Fiber& NormSpec::op_source() const { return *node_->source; }
inline const Fiber& NormSpec::op_target() const { return *node_->target; }
inline const Matrix& NormSpec::basis() const { return node_->basis; }

inline bool operator==(const NormSpec& a, const NormSpec& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.dim != y.dim) return false;
  switch (x.kind) {
    case NormSpec::Kind::WeightedP:
      return x.dim == 0 || (x.p == y.p && x.weights == y.weights);
    case NormSpec::Kind::FramedP:
      return x.p == y.p && x.frame.rows() == y.frame.rows() && x.frame == y.frame;
    case NormSpec::Kind::DualOf:
      return x.inner == y.inner;
    case NormSpec::Kind::OperatorNorm:
      return *x.source == *y.source && *x.target == *y.target;
    case NormSpec::Kind::Restricted:
      return x.inner == y.inner && x.basis.rows() == y.basis.rows() && x.basis == y.basis;
  }
  return false;
}

namespace detail {

inline void describe_matrix(std::ostringstream& os, const Matrix& m) {
  os << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << ';';
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << m(r, c);
    }
  }
  os << ']';
}

}  // namespace detail

inline std::string NormSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::WeightedP:
      if (n.dim == 0) return "zero";
      os << "weighted(p=" << to_string(n.p) << ",w=";
      detail::describe_matrix(os, n.weights.transpose());
      os << ')';
      break;
    case Kind::FramedP:
      os << "framed(p=" << to_string(n.p) << ",A=";
      detail::describe_matrix(os, n.frame);
      os << ')';
      break;
    case Kind::DualOf:
      os << "dual(" << n.inner->describe() << ')';
      break;
    case Kind::OperatorNorm:
      os << "operator(" << n.source->norm().describe() << "->" << n.target->norm().describe() << ')';
      break;
    case Kind::Restricted:
      os << "restricted(" << n.inner->describe() << ",B=";
      detail::describe_matrix(os, n.basis);
      os << ')';
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation kernel
// ---------------------------------------------------------------------------

double norm_eval(const NormSpec& spec, const Vector& x);

struct OperatorNormResult {
  double value = 0.0;
  /// A source vector of norm <= 1 with target norm of T x equal to value.
  Vector maximizer;
  const char* method = "zero";
};

OperatorNormResult operator_norm(const Fiber& source, const Fiber& target, const Matrix& map);

namespace detail {

inline double p_norm(PExponent p, const Vector& y) {
  if (y.size() == 0) return 0.0;
  switch (p) {
    case PExponent::One: return y.lpNorm<1>();
    case PExponent::Two: return y.norm();
    case PExponent::Infinity: return y.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

/// C with N(x) = ||C x||_2, when the unit ball is an ellipsoid.
inline std::optional<Matrix> ellipsoid_factor(const NormSpec& spec) {
  switch (spec.kind()) {
    case NormSpec::Kind::WeightedP:
    case NormSpec::Kind::FramedP:
      if (spec.p() == PExponent::Two) return spec.frame();
      return std::nullopt;
    case NormSpec::Kind::DualOf: {
      auto c = ellipsoid_factor(spec.inner());
      if (!c) return std::nullopt;
      Eigen::HouseholderQR<Matrix> qr(*c);
      Matrix r = qr.matrixQR().topRows(c->cols()).triangularView<Eigen::Upper>();
      // dual of x -> ||R x|| is xi -> ||R^{-T} xi||
      Matrix rinv_t = r.transpose().triangularView<Eigen::Lower>().solve(
          Matrix::Identity(r.rows(), r.cols()));
      return rinv_t;
    }
    case NormSpec::Kind::Restricted: {
      auto c = ellipsoid_factor(spec.inner());
      if (!c) return std::nullopt;
      return Matrix(*c * spec.basis());
    }
    case NormSpec::Kind::OperatorNorm:
      return std::nullopt;
  }
  return std::nullopt;
}

/// A with N(x) = ||A x||_1.
inline std::optional<Matrix> polyone_factor(const NormSpec& spec) {
  switch (spec.kind()) {
    case NormSpec::Kind::WeightedP:
    case NormSpec::Kind::FramedP:
      if (spec.p() == PExponent::One) return spec.frame();
      return std::nullopt;
    case NormSpec::Kind::Restricted: {
      auto a = polyone_factor(spec.inner());
      if (!a) return std::nullopt;
      return Matrix(*a * spec.basis());
    }
    default:
      return std::nullopt;
  }
}

const VertexSet& ball_vertices(const NormSpec& spec);
const VertexSet& dual_ball_vertices(const NormSpec& spec);

inline Matrix stack_rows(const std::vector<Vector>& pts, Eigen::Index dim) {
  Matrix g(static_cast<Eigen::Index>(pts.size()), dim);
  for (std::size_t i = 0; i < pts.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return g;
}

/// G with N(x) = ||G x||_inf, when the dual ball is a polytope with known
/// vertices.
inline std::optional<Matrix> polyinf_factor(const NormSpec& spec) {
  auto d = static_cast<Eigen::Index>(spec.dim());
  switch (spec.kind()) {
    case NormSpec::Kind::WeightedP:
    case NormSpec::Kind::FramedP:
      if (spec.p() == PExponent::Infinity) return spec.frame();
      return std::nullopt;
    case NormSpec::Kind::DualOf: {
      const auto& vs = ball_vertices(spec.inner());
      if (!vs.available) return std::nullopt;
      return stack_rows(vs.points, d);
    }
    case NormSpec::Kind::Restricted: {
      auto g = polyinf_factor(spec.inner());
      if (!g) return std::nullopt;
      return Matrix(*g * spec.basis());
    }
    case NormSpec::Kind::OperatorNorm: {
      const auto& vs = dual_ball_vertices(spec);
      if (!vs.available) return std::nullopt;
      return stack_rows(vs.points, d);
    }
  }
  return std::nullopt;
}

/// Vertices of {x : ||G x||_inf <= 1}: each is cut out by dim independent
/// active rows.
inline VertexSet enumerate_inf_ball(const Matrix& g) {
  VertexSet out;
  auto m = static_cast<std::size_t>(g.rows());
  auto n = static_cast<std::size_t>(g.cols());
  if (n > kMaxVertexDim ||
      linalg::binomial(m, n) * std::ldexp(1.0, static_cast<int>(n) - 1) > kMaxVertexCandidates) {
    out.capped = true;
    return out;
  }
  out.available = true;
  const double slack = 1.0 + 1e-12;
  linalg::for_each_subset(m, n, [&](const std::vector<std::size_t>& rows) {
    Matrix sub(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) sub.row(static_cast<Eigen::Index>(i)) = g.row(static_cast<Eigen::Index>(rows[i]));
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return true;
    std::size_t patterns = std::size_t{1} << (n - 1);
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      Vector s(static_cast<Eigen::Index>(n));
      s(0) = 1.0;
      for (std::size_t i = 1; i < n; ++i) s(static_cast<Eigen::Index>(i)) = (mask >> (i - 1)) & 1u ? -1.0 : 1.0;
      Vector x = lu.solve(s);
      if ((g * x).lpNorm<Eigen::Infinity>() <= slack) out.points.push_back(std::move(x));
    }
    return true;
  });
  return out;
}

/// Vertices of {x : ||A x||_1 <= 1}. Every vertex lies on a ray cut out by
/// dim-1 independent hyperplanes a_i . x = 0.
inline VertexSet enumerate_one_ball(const Matrix& a) {
  VertexSet out;
  auto m = static_cast<std::size_t>(a.rows());
  auto n = static_cast<std::size_t>(a.cols());
  if (n > kMaxVertexDim || linalg::binomial(m, n - 1) > kMaxVertexCandidates) {
    out.capped = true;
    return out;
  }
  out.available = true;
  if (n == 1) {
    Vector x(1);
    x(0) = 1.0 / a.col(0).lpNorm<1>();
    out.points.push_back(x);
    return out;
  }
  linalg::for_each_subset(m, n - 1, [&](const std::vector<std::size_t>& rows) {
    Matrix sub(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i + 1 < n; ++i) sub.row(static_cast<Eigen::Index>(i)) = a.row(static_cast<Eigen::Index>(rows[i]));
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-12);
    if (lu.rank() != static_cast<Eigen::Index>(n - 1)) return true;
    Vector d = lu.kernel().col(0);
    double scale = (a * d).lpNorm<1>();
    out.points.push_back(d / scale);
    return true;
  });
  return out;
}

inline VertexSet compute_dual_ball(const NormSpec& spec) {
  VertexSet out;
  if (spec.dim() == 0) {
    out.available = true;
    return out;
  }
  if (spec.kind() == NormSpec::Kind::DualOf) return ball_vertices(spec.inner());
  if (spec.kind() == NormSpec::Kind::OperatorNorm) {
    const auto& xs = ball_vertices(spec.op_source().norm());
    const auto& etas = dual_ball_vertices(spec.op_target().norm());
    if (!xs.available || !etas.available) {
      out.capped = xs.capped || etas.capped;
      return out;
    }
    out.available = true;
    for (const auto& eta : etas.points) {
      for (const auto& x : xs.points) out.points.push_back(linalg::vec_rows(eta * x.transpose()));
    }
    return out;
  }
  if (auto g = polyinf_factor(spec)) {
    out.available = true;
    for (Eigen::Index r = 0; r < g->rows(); ++r) out.points.push_back(g->row(r).transpose());
    return out;
  }
  if (auto a = polyone_factor(spec)) {
    auto m = static_cast<std::size_t>(a->rows());
    if (m > kMaxVertexDim + 8) {
      out.capped = true;
      return out;
    }
    out.available = true;
    std::size_t patterns = std::size_t{1} << (m - 1);
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      Vector s(static_cast<Eigen::Index>(m));
      s(0) = 1.0;
      for (std::size_t i = 1; i < m; ++i) s(static_cast<Eigen::Index>(i)) = (mask >> (i - 1)) & 1u ? -1.0 : 1.0;
      out.points.push_back(a->transpose() * s);
    }
    return out;
  }
  return out;
}

inline VertexSet compute_ball(const NormSpec& spec) {
  VertexSet out;
  if (spec.dim() == 0) {
    out.available = true;
    return out;
  }
  if (spec.kind() == NormSpec::Kind::DualOf) return dual_ball_vertices(spec.inner());
  if (auto a = polyone_factor(spec)) return enumerate_one_ball(*a);
  if (auto g = polyinf_factor(spec)) return enumerate_inf_ball(*g);
  return out;
}

inline const VertexSet& ball_vertices(const NormSpec& spec) {
  const auto& node = spec.node();
  std::call_once(node.ball_once, [&] { node.ball_cache = compute_ball(spec); });
  return node.ball_cache;
}

inline const VertexSet& dual_ball_vertices(const NormSpec& spec) {
  const auto& node = spec.node();
  std::call_once(node.dual_ball_once, [&] { node.dual_ball_cache = compute_dual_ball(spec); });
  return node.dual_ball_cache;
}

/// Evaluates the dual norm when a closed form or vertex list is known.
inline std::optional<double> dual_eval(const NormSpec& spec, const Vector& xi) {
  if (spec.dim() == 0) return 0.0;
  if (spec.kind() == NormSpec::Kind::DualOf) return norm_eval(spec.inner(), xi);
  if (auto c = ellipsoid_factor(NormSpec::dual_of(spec))) return (*c * xi).norm();
  const auto& vs = ball_vertices(spec);
  if (vs.available) {
    double best = 0.0;
    for (const auto& v : vs.points) best = std::max(best, std::abs(v.dot(xi)));
    return best;
  }
  return std::nullopt;
}

}  // namespace detail

inline bool Fiber::is_scalar() const {
  if (dim_ != 1) return false;
  Vector one = Vector::Ones(1);
  if (norm_.kind() == NormSpec::Kind::OperatorNorm) return false;
  return std::abs(norm_eval(norm_, one) - 1.0) <= tolerance();
}

inline NormSpec NormSpec::operator_norm(const Fiber& source, const Fiber& target) {
  if (source.dim() == 0 || target.dim() == 0) return NormSpec();
  if (target.is_scalar()) return dual_of(source.norm());
  auto node = std::make_shared<detail::NormNode>();
  node->kind = Kind::OperatorNorm;
  node->dim = source.dim() * target.dim();
  node->source = source;
  node->target = target;
  return NormSpec(std::move(node));
}

/// Evaluates the norm exactly (closed form or vertex enumeration).
inline double norm_eval(const NormSpec& spec, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != spec.dim()) {
    throw Error(ErrorKind::ShapeMismatch, "norm_eval: dimension mismatch");
  }
  switch (spec.kind()) {
    case NormSpec::Kind::WeightedP:
    case NormSpec::Kind::FramedP:
      if (spec.dim() == 0) return 0.0;
      return detail::p_norm(spec.p(), spec.frame() * x);
    case NormSpec::Kind::DualOf: {
      auto v = detail::dual_eval(spec.inner(), x);
      if (!v) {
        throw Error(ErrorKind::Unsupported,
                    "dual of '" + spec.inner().describe() + "' has no exact evaluation");
      }
      return *v;
    }
    case NormSpec::Kind::OperatorNorm: {
      const auto& s = spec.op_source();
      const auto& t = spec.op_target();
      return operator_norm(s, t, linalg::unvec_rows(x, static_cast<Eigen::Index>(t.dim()),
                                                    static_cast<Eigen::Index>(s.dim())))
          .value;
    }
    case NormSpec::Kind::Restricted:
      return norm_eval(spec.inner(), spec.basis() * x);
  }
  return 0.0;
}

/// max { target(T x) : source(x) <= 1 }.
///
/// Routes, in order: vertex enumeration of the source ball; enumeration of
/// the target dual ball against an ellipsoidal source; the largest singular
/// value when both balls are ellipsoids. Anything else is bracketed by
/// sampling and rejected, since no upper bound is available.
inline OperatorNormResult operator_norm(const Fiber& source, const Fiber& target, const Matrix& map) {
  const auto s = static_cast<Eigen::Index>(source.dim());
  const auto t = static_cast<Eigen::Index>(target.dim());
  if (map.rows() != t || map.cols() != s) {
    throw Error(ErrorKind::ShapeMismatch, "operator_norm: map shape does not match fibers");
  }
  OperatorNormResult out;
  out.maximizer = Vector::Zero(s);
  if (s == 0 || t == 0 || linalg::max_abs(map) == 0.0) return out;

  const auto& ball = detail::ball_vertices(source.norm());
  if (ball.available) {
    out.method = "source-vertices";
    for (const auto& v : ball.points) {
      double val = norm_eval(target.norm(), map * v);
      if (val > out.value) {
        out.value = val;
        out.maximizer = v;
      }
    }
    return out;
  }

  auto ellipse = detail::ellipsoid_factor(source.norm());
  if (ellipse) {
    Eigen::HouseholderQR<Matrix> qr(*ellipse);
    Matrix r = qr.matrixQR().topRows(s).triangularView<Eigen::Upper>();
    auto upper = r.triangularView<Eigen::Upper>();
    const auto& dual = detail::dual_ball_vertices(target.norm());
    if (dual.available) {
      out.method = "target-dual-vertices";
      for (const auto& w : dual.points) {
        Vector xi = map.transpose() * w;
        Vector y = upper.transpose().solve(xi);
        double val = y.norm();
        if (val > out.value) {
          out.value = val;
          out.maximizer = upper.solve(y) / val;
        }
      }
      return out;
    }
    if (auto ct = detail::ellipsoid_factor(target.norm())) {
      out.method = "spectral";
      Matrix rinv = upper.solve(Matrix::Identity(s, s));
      Matrix k = *ct * map * rinv;
      Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullV);
      out.value = svd.singularValues()(0);
      out.maximizer = rinv * svd.matrixV().col(0);
      return out;
    }
  }

  // Sampled lower bound only; the bracket is [lower, +inf).
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  double lower = 0.0;
  for (int k = 0; k < 2000; ++k) {
    Vector x(s);
    for (Eigen::Index i = 0; i < s; ++i) x(i) = gauss(rng);
    double nx = norm_eval(source.norm(), x);
    if (nx <= 0.0) continue;
    lower = std::max(lower, norm_eval(target.norm(), map * x) / nx);
  }
  bool capped = ball.capped || detail::dual_ball_vertices(target.norm()).capped;
  std::ostringstream os;
  os << "operator norm bracket [" << lower << ", inf) exceeds tolerance for "
     << source.norm().describe() << " -> " << target.norm().describe();
  if (capped) {
    throw Error(ErrorKind::DimensionCap, os.str() + " (vertex enumeration cap exceeded)");
  }
  throw Error(ErrorKind::BracketTooWide, os.str());
}

}  // namespace l0mod
