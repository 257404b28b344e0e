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


#include <catch_amalgamated.hpp>

#include <cmath>

#include "l0mod/random.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace l0mod;
using build::mat;
using build::vec;
using Catch::Matchers::WithinAbs;
namespace rnd = l0mod::random;

namespace {

Element covector(const FiberModule& m, std::vector<Vector> c) { return Element(dual_module(m).module(), std::move(c)); }

}  // namespace

TEST_CASE("Hom modules", "[hom]") {
  auto sp = build::space({"a", "b"}, {1.0, 2.0});
  auto line = FiberModule::uniform(sp, Fiber::euclidean(1));
  auto h = hom_module(line, line);
  CHECK(h.module().dims() == std::vector<std::size_t>{1, 1});
  auto t = Element(h.module(), {vec({-3}), vec({0.5})});
  auto n = pointwise_norm(t);
  CHECK_THAT(n[0], WithinAbs(3.0, 1e-12));
  CHECK_THAT(n[1], WithinAbs(0.5, 1e-12));

  auto plane = build::plane(sp);
  auto h2 = hom_module(plane, line);
  CHECK(h2.module().dims() == std::vector<std::size_t>{2, 2});
  CHECK(h2.module().fiber(0).norm().kind() == NormSpec::Kind::DualOf);

  auto src = FiberModule::uniform(sp, build::weighted(PExponent::One, {1, 2}));
  auto h3 = hom_module(src, line);
  Vector xi = vec({1.5, -4});
  CHECK_THAT(norm_eval(h3.module().fiber(0).norm(), xi), WithinAbs(oracle::norm(h3.module().fiber(0).norm(), xi), 1e-12));

  CHECK(hom_module(FiberModule::zero(sp), plane).module().dims() == std::vector<std::size_t>{0, 0});
  CHECK_THROWS_AS(hom_module(plane, build::plane(build::dirac())), Error);
}

TEST_CASE("Hom elements are morphisms with their operator norm", "[hom][property]") {
  rnd::Rng rng(21);
  for (int k = 0; k < 60; ++k) {
    auto sp = rnd::space(rng, 3);
    auto a = rnd::module(rng, sp, 3);
    auto b = rnd::module(rng, sp, 3);
    auto t = rnd::admissible_morphism(rng, a, b, rnd::uniform(rng, 0.1, 3.0));
    HomModule h(a, b);
    auto e = h.element(t);
    CHECK(h.as_morphism(e).max_deviation(t) == 0.0);
    auto n = pointwise_norm(e);
    auto op = operator_pointwise_norm(t);
    for (std::size_t i = 0; i < sp.size(); ++i) CHECK_THAT(n[i], WithinAbs(op[i], 1e-9 * std::max(1.0, op[i])));
  }
}

TEST_CASE("dual modules", "[hom]") {
  auto sp = build::dirac();
  auto w1 = FiberModule::uniform(sp, build::weighted(PExponent::One, {1, 2}));
  CHECK_THAT(pointwise_norm(covector(w1, {vec({2, 2})}))[0], WithinAbs(2.0, 1e-12));
  auto e2 = build::plane(sp);
  CHECK_THAT(pointwise_norm(covector(e2, {vec({3, 4})}))[0], WithinAbs(5.0, 1e-12));
  CHECK(dual_module(FiberModule::zero(sp)).module().dims() == std::vector<std::size_t>{0});
}

TEST_CASE("dual norms agree with the independent dual oracle", "[hom][oracle]") {
  rnd::Rng rng(22);
  for (int k = 0; k < 100; ++k) {
    auto f = rnd::fiber(rng, rnd::pick(rng, 1, 4));
    Vector xi = Vector::Random(static_cast<Eigen::Index>(f.dim()));
    auto dual = NormSpec::dual_of(f.norm());
    double via_dual = norm_eval(dual, xi);
    CHECK_THAT(via_dual, WithinAbs(oracle::norm(dual, xi), 1e-9 * std::max(1.0, via_dual)));
    Matrix row = xi.transpose();
    double via_operator = operator_norm(f, Fiber::scalar(), row).value;
    CHECK_THAT(via_operator, WithinAbs(via_dual, 1e-9 * std::max(1.0, via_dual)));
  }
}

TEST_CASE("pairing", "[hom]") {
  auto sp = build::dirac();
  auto m = build::plane(sp);
  auto v = build::element(m, {vec({3, 1})});
  CHECK(pairing(Element::zero(dual_module(m).module()), v).values() == std::vector<double>{0.0});
  CHECK(pairing(covector(m, {vec({1, 2})}), v).values() == std::vector<double>{5.0});

  rnd::Rng rng(23);
  for (int k = 0; k < 60; ++k) {
    auto s = rnd::space(rng, 3);
    auto a = rnd::module(rng, s, 3);
    auto d = dual_module(a).module();
    auto omega = sample_element(d, rng);
    auto x = sample_element(a, rng);
    std::vector<double> f(s.size());
    for (auto& c : f) c = rnd::uniform(rng, -2.0, 2.0);
    L0Function fn(s, f);
    auto lhs = pairing(omega.scaled(fn), x);
    auto rhs = pairing(omega, x);
    auto no = pointwise_norm(omega);
    auto nx = pointwise_norm(x);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK_THAT(lhs[i], WithinAbs(f[i] * rhs[i], 1e-12));
      CHECK(std::abs(rhs[i]) <= no[i] * nx[i] + 1e-9);
    }
  }
}

TEST_CASE("adjoints", "[hom]") {
  auto sp = build::dirac();
  auto m = build::plane(sp);
  CHECK(adjoint(identity(m)).max_deviation(identity(dual_module(m).module())) == 0.0);
  auto phi = build::morphism(m, m, mat(2, 2, {0, 1, 0, 0}));
  CHECK(adjoint(phi).at(0) == mat(2, 2, {0, 0, 1, 0}));
}

TEST_CASE("adjoint properties", "[hom][property]") {
  rnd::Rng rng(24);
  for (int k = 0; k < 60; ++k) {
    auto sp = rnd::space(rng, 3);
    auto a = rnd::module(rng, sp, 3);
    auto b = rnd::module(rng, sp, 3);
    auto c = rnd::module(rng, sp, 3);
    auto phi = rnd::admissible_morphism(rng, a, b);
    auto psi = rnd::admissible_morphism(rng, b, c);
    auto adj = adjoint(phi);
    CHECK(is_morphism(adj));
    auto n1 = operator_pointwise_norm(phi);
    auto n2 = operator_pointwise_norm(adj);
    for (std::size_t i = 0; i < sp.size(); ++i) CHECK_THAT(n2[i], WithinAbs(n1[i], 1e-9));
    CHECK(adjoint(compose(psi, phi)).max_deviation(compose(adjoint(phi), adjoint(psi))) <= 1e-12);
    auto omega = sample_element(dual_module(b).module(), rng);
    auto v = sample_element(a, rng);
    auto lhs = pairing(apply(adj, omega), v);
    auto rhs = pairing(omega, apply(phi, v));
    for (std::size_t i = 0; i < sp.size(); ++i) CHECK_THAT(lhs[i], WithinAbs(rhs[i], 1e-12));
  }
}

TEST_CASE("precomposition on Hom modules", "[hom][property]") {
  rnd::Rng rng(25);
  for (int k = 0; k < 40; ++k) {
    auto sp = rnd::space(rng, 2);
    auto a = rnd::module(rng, sp, 3);
    auto b = rnd::module(rng, sp, 3);
    auto n = rnd::module(rng, sp, 2);
    auto phi = rnd::admissible_morphism(rng, a, b);
    auto t = rnd::admissible_morphism(rng, b, n);
    HomModule hb(b, n);
    HomModule ha(a, n);
    auto pre = precompose(phi, n);
    auto image = ha.as_morphism(apply(pre, hb.element(t)));
    CHECK(image.max_deviation(compose(t, phi)) <= 1e-12);
  }
}

TEST_CASE("norm specifications", "[norm]") {
  auto w = NormSpec::weighted(PExponent::Infinity, vec({1, 3}));
  CHECK(w.dim() == 2);
  CHECK_THAT(norm_eval(w, vec({1, 1})), WithinAbs(3.0, 1e-15));
  auto f = NormSpec::framed(PExponent::Two, mat(2, 2, {1, 1, 0, 1}));
  CHECK_THAT(norm_eval(f, vec({1, -1})), WithinAbs(1.0, 1e-15));
  auto r = NormSpec::restricted(NormSpec::euclidean(3), mat(3, 1, {0, 1, 0}));
  CHECK(r.dim() == 1);
  CHECK_THAT(norm_eval(r, vec({-2})), WithinAbs(2.0, 1e-15));
  CHECK_THROWS_AS(NormSpec::restricted(NormSpec::euclidean(3), mat(2, 1, {0, 1})), Error);
  CHECK(NormSpec::dual_of(NormSpec::dual_of(w)) == w);
  CHECK_FALSE(w.describe().empty());
  CHECK(Fiber::scalar().is_scalar());
  CHECK_FALSE(Fiber::euclidean(2).is_scalar());
}

TEST_CASE("operator norm routes and limits", "[norm]") {
  auto l1 = Fiber(NormSpec::weighted(PExponent::One, Vector::Ones(13)));
  try {
    operator_norm(l1, Fiber::scalar(), Matrix::Ones(1, 13) + Matrix::Identity(1, 13));
    FAIL("expected the vertex cap to be reported");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionCap);
  }
  auto e2 = Fiber::euclidean(2);
  auto linf = Fiber(NormSpec::weighted(PExponent::Infinity, vec({1, 1})));
  auto r = operator_norm(e2, linf, mat(2, 2, {1, 1, 1, -1}));
  CHECK_THAT(r.value, WithinAbs(std::sqrt(2.0), 1e-12));
  CHECK_THROWS_AS(operator_norm(e2, linf, Matrix::Ones(3, 2)), Error);
  CHECK(operator_norm(e2, linf, Matrix::Zero(2, 2)).value == 0.0);
}

TEST_CASE("scoped tolerance", "[norm]") {
  double before = tolerance();
  {
    ScopedTolerance t(1e-3);
    CHECK(tolerance() == 1e-3);
  }
  CHECK(tolerance() == before);
  CHECK_THROWS_AS(set_tolerance(-1.0), Error);
}
