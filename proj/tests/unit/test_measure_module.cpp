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

TEST_CASE("measure spaces reject invalid data", "[measure]") {
  CHECK_THROWS_AS(AtomicMeasureSpace({}, {}), Error);
  CHECK_THROWS_AS(build::space({"a", "b"}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(build::space({"a"}, {-2.0}), Error);
  CHECK_THROWS_AS(build::space({"a", "a"}, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(build::space({"a"}, {1.0, 2.0}), Error);
  try {
    build::space({"a", "b"}, {1.0, -1.0});
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
}

TEST_CASE("normalized reference measure", "[measure]") {
  CHECK(normalized_reference(build::space({"a"}, {2.0})).values() == std::vector<double>{1.0});
  CHECK(normalized_reference(build::space({"a", "b"}, {1.0, 1.0})).values() == std::vector<double>{0.5, 0.5});
  CHECK(normalized_reference(build::space({"a", "b"}, {1.0, 3.0})).values() == std::vector<double>{0.25, 0.75});

  rnd::Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    auto sp = rnd::space(rng, 6);
    auto p = normalized_reference(sp);
    double sum = 0.0;
    for (double v : p.values()) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("L0 distance", "[measure]") {
  auto sp = build::space({"a", "b"}, {1.0, 1.0});
  L0Function zero(sp, {0.0, 0.0});
  CHECK(l0_distance(zero, zero) == 0.0);
  CHECK_THAT(l0_distance(zero, L0Function(sp, {3.0, 1.0})), WithinAbs(1.0, 1e-15));
  CHECK_THAT(l0_distance(zero, L0Function(sp, {0.5, 0.0})), WithinAbs(0.25, 1e-15));
  CHECK_THROWS_AS(l0_distance(zero, L0Function(build::space({"c", "d"}, {1.0, 1.0}), {0.0, 0.0})), Error);

  rnd::Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    auto s = rnd::space(rng, 4);
    auto draw = [&] {
      std::vector<double> v(s.size());
      for (auto& x : v) x = rnd::coin(rng, 0.2) ? 0.0 : rnd::uniform(rng, -3.0, 3.0);
      return L0Function(s, v);
    };
    auto f = draw();
    auto g = draw();
    auto h = draw();
    CHECK(l0_distance(f, g) == l0_distance(g, f));
    CHECK(l0_distance(f, f) == 0.0);
    if (f.values() != g.values()) CHECK(l0_distance(f, g) > 0.0);
    CHECK(l0_distance(f, h) <= l0_distance(f, g) + l0_distance(g, h) + 1e-15);
  }
}

TEST_CASE("essential extrema", "[measure]") {
  auto sp = build::space({"a", "b"}, {1.0, 1.0});
  std::vector<L0Function> fam{L0Function(sp, {1.0, 2.0}), L0Function(sp, {3.0, 0.0})};
  CHECK(ess_extremum(fam, Extremum::Sup).values() == std::vector<double>{3.0, 2.0});
  std::vector<L0Function> single{L0Function(sp, {4.0, -1.0})};
  CHECK(ess_extremum(single, Extremum::Inf).values() == single[0].values());

  std::vector<L0Function> prefix{L0Function(sp, {1.0, 0.5})};
  FamilyTail geometric{FamilyTail::Kind::Geometric, {1.0, 0.5}};
  CHECK(ess_extremum(prefix, geometric, Extremum::Inf).values() == std::vector<double>{1.0, 0.0});
  CHECK(ess_extremum(prefix, FamilyTail{FamilyTail::Kind::Harmonic, {}}, Extremum::Sup).values() ==
        std::vector<double>{1.0, 0.5});

  std::vector<L0Function> empty;
  CHECK_THROWS_AS(ess_extremum(empty, Extremum::Sup), Error);
  try {
    ess_extremum(prefix, std::nullopt, Extremum::Sup);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unsupported);
  }

  rnd::Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    auto s = rnd::space(rng, 4);
    std::vector<L0Function> f;
    for (std::size_t n = rnd::pick(rng, 1, 5); n > 0; --n) {
      std::vector<double> v(s.size());
      for (auto& x : v) x = rnd::uniform(rng, -1.0, 1.0);
      f.emplace_back(s, v);
    }
    auto sup = ess_extremum(f, Extremum::Sup);
    for (std::size_t a = 0; a < s.size(); ++a) {
      bool attained = false;
      for (const auto& g : f) {
        CHECK(g[a] <= sup[a]);
        attained = attained || g[a] == sup[a];
      }
      CHECK(attained);
    }
  }
}

TEST_CASE("pushforward of measures", "[measure]") {
  auto x = build::space({"a", "b"}, {1.0, 1.0});
  auto y = build::space({"c"}, {5.0});
  auto r = pushforward_check(AtomMap(x, y, {0, 0}));
  CHECK(r.pushforward.values() == std::vector<double>{2.0});
  CHECK(r.absolutely_continuous);

  auto id = pushforward_check(AtomMap::identity(x));
  CHECK(id.pushforward.values() == std::vector<double>{1.0, 1.0});
  CHECK(id.absolutely_continuous);

  auto single = build::space({"a"}, {1.0});
  auto two = build::space({"c", "d"}, {1.0, 1.0});
  auto r2 = pushforward_check(AtomMap::from_table(single, two, {{"a", "c"}}));
  CHECK(r2.pushforward.values() == std::vector<double>{1.0, 0.0});
  CHECK(r2.absolutely_continuous);
  CHECK_THROWS_AS(AtomMap::from_table(single, two, {{"a", "e"}}), Error);
}

TEST_CASE("norm evaluation", "[module]") {
  auto w = NormSpec::weighted(PExponent::One, vec({1, 2}));
  CHECK_THAT(norm_eval(w, vec({1, 1})), WithinAbs(3.0, 1e-15));
  CHECK(norm_eval(w, vec({0, 0})) == 0.0);
  CHECK(norm_eval(NormSpec::euclidean(3), Vector::Zero(3)) == 0.0);
  CHECK(norm_eval(NormSpec::dual_of(w), vec({0, 0})) == 0.0);
  CHECK_THAT(norm_eval(NormSpec::dual_of(w), vec({2, 2})), WithinAbs(2.0, 1e-12));
  CHECK_THROWS_AS(norm_eval(w, vec({1, 1, 1})), Error);
  CHECK_THROWS_AS(NormSpec::weighted(PExponent::Two, vec({1, 0})), Error);
  CHECK_THROWS_AS(NormSpec::framed(PExponent::Two, mat(2, 2, {1, 1, 1, 1})), Error);
}

TEST_CASE("norm evaluation agrees with the frame oracle", "[module][oracle]") {
  rnd::Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    auto f = rnd::fiber(rng, rnd::pick(rng, 1, 4));
    Vector x = Vector::Random(static_cast<Eigen::Index>(f.dim()));
    CHECK_THAT(norm_eval(f.norm(), x), WithinAbs(oracle::norm(f.norm(), x), 1e-9));
    auto dual = NormSpec::dual_of(f.norm());
    CHECK_THAT(norm_eval(dual, x), WithinAbs(oracle::norm(dual, x), 1e-9));
  }
}

TEST_CASE("pointwise norms", "[module]") {
  auto sp = build::space({"a", "b"}, {1.0, 1.0});
  auto m = build::plane(sp);
  CHECK(pointwise_norm(Element::zero(m)).values() == std::vector<double>{0.0, 0.0});
  auto v = build::element(m, {vec({3, 4}), vec({0, 1})});
  auto n = pointwise_norm(v);
  CHECK_THAT(n[0], WithinAbs(5.0, 1e-15));
  CHECK_THAT(n[1], WithinAbs(1.0, 1e-15));
  auto s = pointwise_norm(v.scaled(L0Function(sp, {2.0, 0.0})));
  CHECK_THAT(s[0], WithinAbs(10.0, 1e-15));
  CHECK(s[1] == 0.0);
}

TEST_CASE("pointwise norm axioms on random modules", "[module][property]") {
  rnd::Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    auto sp = rnd::space(rng, 3);
    auto m = rnd::module(rng, sp, 4);
    auto v = sample_element(m, rng);
    auto w = sample_element(m, rng);
    std::vector<double> f(sp.size());
    for (auto& x : f) x = rnd::uniform(rng, -3.0, 3.0);
    L0Function fn(sp, f);
    auto nv = pointwise_norm(v);
    auto nw = pointwise_norm(w);
    auto nsum = pointwise_norm(v + w);
    auto nscaled = pointwise_norm(v.scaled(fn));
    for (std::size_t a = 0; a < sp.size(); ++a) {
      CHECK(nsum[a] <= nv[a] + nw[a] + 1e-9);
      CHECK_THAT(nscaled[a], WithinAbs(std::abs(f[a]) * nv[a], 1e-9 * std::max(1.0, nscaled[a])));
    }
  }
}

TEST_CASE("module distance", "[module]") {
  auto one = build::space({"a"}, {1.0});
  auto line = FiberModule::uniform(one, Fiber::euclidean(1));
  auto z = Element::zero(line);
  CHECK(module_distance(z, z) == 0.0);
  CHECK_THAT(module_distance(z, build::element(line, {vec({3})})), WithinAbs(1.0, 1e-15));

  auto two = build::space({"a", "b"}, {1.0, 1.0});
  auto l2 = FiberModule::uniform(two, Fiber::euclidean(1));
  auto v = build::element(l2, {vec({0.5}), vec({2})});
  CHECK_THAT(module_distance(Element::zero(l2), v), WithinAbs(0.75, 1e-15));
  CHECK_THROWS_AS(module_distance(z, v), Error);
}

TEST_CASE("apply, compose and identity", "[module]") {
  auto sp = build::dirac();
  auto m = build::plane(sp);
  auto v = build::element(m, {vec({3, 4})});
  CHECK(apply(identity(m), v).at(0) == v.at(0));
  auto swap = build::morphism(m, m, mat(2, 2, {0, 1, 1, 0}));
  CHECK(apply(swap, v).at(0) == vec({4, 3}));
  CHECK(compose(swap, identity(m)).at(0) == swap.at(0));
  CHECK_THROWS_AS(compose(swap, build::morphism(FiberModule::scalar(sp), FiberModule::scalar(sp), mat(1, 1, {1}))),
                  Error);

  rnd::Rng rng(6);
  for (int k = 0; k < 50; ++k) {
    auto s = rnd::space(rng, 3);
    auto a = rnd::module(rng, s, 3);
    auto b = rnd::module(rng, s, 3);
    auto phi = rnd::admissible_morphism(rng, a, b);
    auto x = sample_element(a, rng);
    std::vector<double> f(s.size());
    for (auto& c : f) c = rnd::uniform(rng, -2.0, 2.0);
    L0Function fn(s, f);
    CHECK(apply(phi, x.scaled(fn)).max_deviation(apply(phi, x).scaled(fn)) <= 1e-12);
  }
}

TEST_CASE("operator pointwise norm examples", "[module]") {
  auto sp = build::dirac();
  auto e2 = build::plane(sp);
  CHECK_THAT(operator_pointwise_norm(identity(e2))[0], WithinAbs(1.0, 1e-12));
  auto half = build::morphism(e2, e2, mat(2, 2, {1, 0, 0, 0.5}));
  CHECK_THAT(operator_pointwise_norm(half)[0], WithinAbs(1.0, 1e-9));
  CHECK_THAT(oracle::power_iteration(half.at(0)), WithinAbs(1.0, 1e-9));
  auto linf = FiberModule::uniform(sp, build::weighted(PExponent::Infinity, {1, 1}));
  auto sum = build::morphism(linf, FiberModule::scalar(sp), mat(1, 2, {1, 1}));
  CHECK_THAT(operator_pointwise_norm(sum)[0], WithinAbs(2.0, 1e-9));

  CHECK(is_morphism(identity(e2)));
  CHECK_FALSE(is_morphism(build::morphism(e2, e2, mat(2, 2, {2, 0, 0, 2}))));
  CHECK(is_morphism(half));
}

TEST_CASE("operator norm agrees with oracles", "[module][oracle]") {
  rnd::Rng rng(7);
  for (int k = 0; k < 60; ++k) {
    auto sp = rnd::space(rng, 2);
    auto a = rnd::module(rng, sp, 3, 1);
    auto b = rnd::module(rng, sp, 3, 1);
    auto t = rnd::admissible_morphism(rng, a, b, rnd::uniform(rng, 0.1, 4.0));
    auto detailed = operator_pointwise_norm_detailed(t);
    for (std::size_t i = 0; i < sp.size(); ++i) {
      double exact = detailed.value[i];
      auto s = oracle::sampled_operator_norm(a.fiber(i).norm(), b.fiber(i).norm(), t.at(i), rng, 3000);
      CHECK(s.lower <= exact * (1 + 1e-9) + 1e-12);
      CHECK(s.refined <= exact * (1 + 1e-9) + 1e-12);
      CHECK_THAT(s.refined, WithinAbs(exact, 1e-6 * std::max(1.0, exact)));
      const auto& x = detailed.maximizers[i];
      CHECK(norm_eval(a.fiber(i).norm(), x) <= 1.0 + 1e-9);
      CHECK_THAT(norm_eval(b.fiber(i).norm(), t.at(i) * x), WithinAbs(exact, 1e-9 * std::max(1.0, exact)));
    }
  }
}

TEST_CASE("Euclidean operator norms match power iteration", "[module][oracle]") {
  rnd::Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    auto sp = build::dirac();
    auto d = static_cast<Eigen::Index>(rnd::pick(rng, 1, 5));
    auto e = static_cast<Eigen::Index>(rnd::pick(rng, 1, 5));
    Matrix m = Matrix::Random(e, d);
    auto t = build::morphism(FiberModule::uniform(sp, Fiber::euclidean(static_cast<std::size_t>(d))),
                             FiberModule::uniform(sp, Fiber::euclidean(static_cast<std::size_t>(e))), m);
    CHECK_THAT(operator_pointwise_norm(t)[0], WithinAbs(oracle::power_iteration(m), 1e-8));
  }
}

TEST_CASE("operator norm properties", "[module][property]") {
  rnd::Rng rng(9);
  for (int k = 0; k < 60; ++k) {
    auto sp = rnd::space(rng, 3);
    auto a = rnd::module(rng, sp, 3);
    auto b = rnd::module(rng, sp, 3);
    auto c = rnd::module(rng, sp, 3);
    auto phi = rnd::admissible_morphism(rng, a, b, rnd::uniform(rng, 0.2, 2.0));
    auto psi = rnd::admissible_morphism(rng, b, c, rnd::uniform(rng, 0.2, 2.0));
    auto np = operator_pointwise_norm(phi);
    auto nq = operator_pointwise_norm(psi);
    auto nc = operator_pointwise_norm(compose(psi, phi));
    auto v = sample_element(a, rng);
    auto nv = pointwise_norm(v);
    auto nphiv = pointwise_norm(apply(phi, v));
    for (std::size_t i = 0; i < sp.size(); ++i) {
      CHECK(nc[i] <= np[i] * nq[i] + 1e-9);
      CHECK(nphiv[i] <= np[i] * nv[i] + 1e-9);
    }
  }
}

TEST_CASE("generated submodules", "[module]") {
  auto sp = build::space({"a", "b"}, {1.0, 1.0});
  auto m = build::plane(sp);
  auto full = submodule_generated(m, basis_elements(m));
  CHECK(full.module.dims() == m.dims());
  CHECK(submodule_generated(m, {Element::zero(m)}).module.dims() == std::vector<std::size_t>{0, 0});
  auto g = submodule_generated(m, {build::element(m, {vec({1, 0}), vec({0, 0})})});
  CHECK(g.module.dims() == std::vector<std::size_t>{1, 0});
  CHECK_THAT(operator_pointwise_norm(g.inclusion)[0], WithinAbs(1.0, 1e-9));
}

TEST_CASE("kernel and image", "[module]") {
  auto sp = build::dirac();
  auto m = build::plane(sp);
  auto id = kernel_image(identity(m));
  CHECK(id.kernel.module.dims() == std::vector<std::size_t>{0});
  CHECK(id.image.module.dims() == m.dims());
  auto z = kernel_image(ModuleMorphism::zero(m, m));
  CHECK(z.kernel.module.dims() == m.dims());
  CHECK(z.image.module.dims() == std::vector<std::size_t>{0});
  auto p = kernel_image(build::morphism(m, m, mat(2, 2, {1, 0, 0, 0})));
  CHECK(p.kernel.module.dims() == std::vector<std::size_t>{1});
  CHECK(p.image.module.dims() == std::vector<std::size_t>{1});
}

TEST_CASE("submodule properties", "[module][property]") {
  rnd::Rng rng(10);
  for (int k = 0; k < 60; ++k) {
    auto sp = rnd::space(rng, 3);
    auto a = rnd::module(rng, sp, 4);
    auto b = rnd::module(rng, sp, 4);
    auto phi = rnd::admissible_morphism(rng, a, b);
    auto ki = kernel_image(phi);
    CHECK(is_morphism(ki.kernel.inclusion));
    CHECK(is_morphism(ki.image.inclusion));
    for (std::size_t i = 0; i < sp.size(); ++i) {
      CHECK(ki.kernel.module.dim(i) + ki.image.module.dim(i) == a.dim(i));
    }

    std::vector<Element> gens{sample_element(a, rng)};
    if (rnd::coin(rng)) gens.push_back(sample_element(a, rng));
    auto sub = submodule_generated(a, gens);
    auto x = sample_element(sub.module, rng);
    auto y = sample_element(sub.module, rng);
    double inside = module_distance(x, y);
    double outside = module_distance(apply(sub.inclusion, x), apply(sub.inclusion, y));
    CHECK_THAT(inside, WithinAbs(outside, 1e-12));
  }
}
