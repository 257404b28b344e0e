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
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/module.hpp"

namespace l0mod {

/// A random element with standard normal coordinates.
inline Element sample_element(const FiberModule& m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<Vector> c(m.atoms());
  for (std::size_t a = 0; a < c.size(); ++a) {
    c[a] = Vector(static_cast<Eigen::Index>(m.dim(a)));
    for (Eigen::Index k = 0; k < c[a].size(); ++k) c[a](k) = normal(rng);
  }
  return Element(m, std::move(c));
}

/// The standard basis of a module, one element per coordinate of the widest
/// fiber (shorter fibers get zeros).
inline std::vector<Element> basis_elements(const FiberModule& m) {
  std::size_t width = 0;
  for (auto d : m.dims()) width = std::max(width, d);
  std::vector<Element> out;
  for (std::size_t k = 0; k < width; ++k) {
    std::vector<Vector> c(m.atoms());
    for (std::size_t a = 0; a < c.size(); ++a) {
      c[a] = Vector::Zero(static_cast<Eigen::Index>(m.dim(a)));
      if (k < m.dim(a)) c[a](static_cast<Eigen::Index>(k)) = 1.0;
    }
    out.emplace_back(m, std::move(c));
  }
  return out;
}

struct IsoCertificate {
  bool bijective = false;
  /// |Phi v| = |v| on basis and sampled elements, both directions.
  bool isometric = false;
  double max_norm_deviation = 0.0;
  std::optional<std::string> witness_atom;
  std::optional<ModuleMorphism> inverse;
  /// Operator norms of Phi and its inverse, when the norm kernel can
  /// compute them.
  std::optional<double> forward_opnorm;
  std::optional<double> inverse_opnorm;

  bool ok() const { return bijective && isometric; }
};

namespace detail {

inline std::optional<double> try_opnorm(const ModuleMorphism& m) {
  try {
    auto n = operator_pointwise_norm(m);
    double worst = 0.0;
    for (auto v : n.values()) worst = std::max(worst, v);
    return worst;
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline void compare_norms(const ModuleMorphism& phi, const Element& v, IsoCertificate& cert) {
  auto lhs = pointwise_norm(apply(phi, v));
  auto rhs = pointwise_norm(v);
  for (std::size_t a = 0; a < lhs.size(); ++a) {
    double d = std::abs(lhs[a] - rhs[a]);
    if (d > cert.max_norm_deviation) {
      cert.max_norm_deviation = d;
      cert.witness_atom = v.module().space().id(a);
    }
  }
}

}  // namespace detail

/// Certifies that phi is an isometric isomorphism: per-atom bijectivity, and
/// norm preservation on the basis plus `samples` random elements each way.
inline IsoCertificate certify_isometric_iso(const ModuleMorphism& phi, std::uint64_t seed = 0, std::size_t samples = 8) {
  IsoCertificate cert;
  auto r = ranks(phi);
  cert.bijective = phi.source().dims() == phi.target().dims() && r == phi.source().dims();
  if (!cert.bijective) {
    for (std::size_t a = 0; a < r.size(); ++a) {
      if (r[a] != phi.source().dim(a) || r[a] != phi.target().dim(a)) {
        cert.witness_atom = phi.source().space().id(a);
        break;
      }
    }
    return cert;
  }
  std::vector<Matrix> inv(phi.maps().size());
  for (std::size_t a = 0; a < inv.size(); ++a) inv[a] = phi.at(a).fullPivLu().inverse();
  cert.inverse = ModuleMorphism(phi.target(), phi.source(), std::move(inv));
  std::mt19937_64 rng(seed);
  for (const auto& v : basis_elements(phi.source())) detail::compare_norms(phi, v, cert);
  for (const auto& w : basis_elements(phi.target())) detail::compare_norms(*cert.inverse, w, cert);
  for (std::size_t k = 0; k < samples; ++k) {
    detail::compare_norms(phi, sample_element(phi.source(), rng), cert);
    detail::compare_norms(*cert.inverse, sample_element(phi.target(), rng), cert);
  }
  cert.isometric = cert.max_norm_deviation <= tolerance();
  cert.forward_opnorm = detail::try_opnorm(phi);
  cert.inverse_opnorm = detail::try_opnorm(*cert.inverse);
  return cert;
}

}  // namespace l0mod
