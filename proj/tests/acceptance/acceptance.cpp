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


#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "l0mod.hpp"
#include "l0mod/harness/checks.hpp"
#include "l0mod/random.hpp"
#include "support/oracles.hpp"

using namespace l0mod;
namespace rnd = l0mod::random;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) note << what;
    ok = ok && cond;
  }
};

harness::Document fixture(const std::string& name) {
  return harness::load_document_file(std::string(L0MOD_FIXTURES) + "/" + name + ".json");
}

const harness::CheckEntry& entry(const harness::Document& doc, const std::string& id) {
  for (const auto& c : doc.checks) {
    if (c.id == id) return c;
  }
  throw std::runtime_error("no check '" + id + "'");
}

bool all_pass(const harness::Document& doc, const std::string& kind, Outcome& out) {
  auto results = harness::run_checks(doc, {}, kind);
  for (const auto& r : results) out.require(r.verdict == harness::Verdict::Pass, r.id + ": " + r.summary);
  return !results.empty();
}

IndexSet random_index(rnd::Rng& rng, const AtomicMeasureSpace& sp, bool chain) {
  return chain ? rnd::chain(rng, sp) : rnd::poset(rng);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void criterion1(Outcome& out) {
  auto doc = fixture("remark-faithful");
  const auto& theta = doc.system_morphism("Theta");
  const auto& eta = doc.system_morphism("Eta");
  const auto& m = doc.system("M").direct();
  const auto& n = doc.system("N").direct();
  bool differ = false;
  for (std::size_t i = 0; i < theta.morphism.components.size(); ++i) {
    differ = differ || theta.morphism.at(i).max_deviation(eta.morphism.at(i)) > 1e-9;
  }
  out.require(differ, "Theta and Eta agree componentwise");
  auto a = dl_functor(theta.morphism, m, n);
  auto b = dl_functor(eta.morphism, m, n);
  Matrix proj(2, 2);
  proj << 1, 0, 0, 0;
  out.require(linalg::max_abs(a.at(0) - proj) <= 1e-9, "lim Theta is not (x,y) -> (x,0)");
  out.require(linalg::max_abs(b.at(0) - proj) <= 1e-9, "lim Eta is not (x,y) -> (x,0)");
  auto r = harness::run_check(doc, entry(doc, "06-not-faithful-not-full"));
  out.require(r.verdict == harness::Verdict::Pass, "square check: " + r.summary);
  out.require(r.summary.find("square unsolvable") != std::string::npos, "square reported solvable: " + r.summary);
  out.note << "lim Theta = lim Eta = (x,y) -> (x,0); " << r.summary;
}

void criterion2(Outcome& out) {
  auto doc = fixture("harmonic-inverse");
  auto lim = inverse_limit(doc.system("H").inverse());
  for (auto d : lim.module.dims()) out.require(d == 0, "fixture limit has a nonzero fiber");
  rnd::Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    auto sp = rnd::space(rng, 4);
    auto m = rnd::module(rng, sp, 4, 1);
    std::size_t last = rnd::pick(rng, 0, 4);
    std::vector<FiberModule> mods(last + 1, m);
    std::vector<Connecting> maps;
    for (std::size_t k = 0; k < last; ++k) {
      double c = static_cast<double>(k + 1) / static_cast<double>(k + 2);
      maps.push_back({k, k + 1, ModuleMorphism::identity(m).scaled(L0Function::constant(sp, c))});
    }
    InverseSystem s(IndexSet::chain(last, TailSpec::harmonic()), std::move(mods), std::move(maps));
    out.require(validate_inverse_system(s).ok(), "harmonic system fails validation");
    auto l = inverse_limit(s);
    for (auto d : l.module.dims()) out.require(d == 0, "harmonic limit has a nonzero fiber");
  }
  out.note << "fixture and 100 random modules: every limit fiber has dimension 0";
}

void criterion3(Outcome& out) {
  auto doc = fixture("scaling-surjectivity");
  const auto& m = doc.system_morphism("Scale");
  const auto& from = doc.system(m.source).inverse();
  const auto& to = doc.system(m.target).inverse();
  for (const auto& c : m.morphism.components) out.require(is_surjective(c), "a component is not onto");
  auto lim = il_functor(m.morphism, from, to);
  for (auto r : ranks(lim)) out.require(r == 0, "limit image is not the zero module");
  auto rep = check_surjectivity_preservation(m.morphism, from, to);
  out.require(rep.premise, "premise not met");
  out.require(!rep.preserved, "surjectivity reported preserved");
  auto r = harness::run_check(doc, entry(doc, "05-surjectivity-lost"));
  out.require(r.verdict == harness::Verdict::Pass, r.summary);
  out.note << "every theta_n onto, image of the limit map is zero; " << r.summary;
}

bool is_identity_on(const ModuleMorphism& f, const FiberModule& m) {
  return f.source().same_shape(m) && f.target().same_shape(m) && f.approx_equal(ModuleMorphism::identity(m));
}

void criterion4(Outcome& out) {
  rnd::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto sp = rnd::space(rng, 3);
    auto idx = rnd::poset(rng, 6);
    std::size_t top = greatest_element(idx);
    auto d = rnd::direct_system(rng, idx, sp, 4);
    out.require(validate_direct_system(d).ok(), "random direct system invalid");
    auto dl = direct_limit(d);
    out.require(dl.provenance == Provenance::GreatestElement, "direct provenance");
    out.require(dl.module == d.module(top), "direct limit is not M_top");
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.require(dl.structure_maps[i].max_deviation(d.map(i, top)) <= 1e-9, "canonical map differs from phi_i,top");
    }
    Cone cone{d.module(top), {}};
    for (std::size_t i = 0; i < idx.size(); ++i) cone.legs.push_back(d.map(i, top));
    auto f = dl_universal_factorization(d, dl, cone);
    out.require(f.unique && f.admissible && f.residual <= 1e-9, "direct factorization not unique/admissible");
    out.require(is_identity_on(f.map, d.module(top)), "direct factorization is not the identity");

    auto s = rnd::inverse_system(rng, idx, sp, 4);
    out.require(validate_inverse_system(s).ok(), "random inverse system invalid");
    auto il = inverse_limit(s);
    out.require(il.provenance == Provenance::GreatestElement, "inverse provenance");
    out.require(il.module == s.module(top), "inverse limit is not M_top");
    Cone src{s.module(top), {}};
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.require(il.structure_maps[i].max_deviation(s.map(i, top)) <= 1e-9, "projection differs from P_i,top");
      src.legs.push_back(s.map(i, top));
    }
    auto g = il_universal_factorization(s, il, src);
    out.require(g.unique && g.admissible && g.residual <= 1e-9, "inverse factorization not unique/admissible");
    out.require(is_identity_on(g.map, s.module(top)), "inverse factorization is not the identity");
  }
  out.note << "100 posets, both directions, unique factorization each time";
}

void criterion5(Outcome& out) {
  rnd::Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto sp = rnd::space(rng, 3);
    auto d = rnd::direct_system(rng, rnd::poset(rng, 5), sp, 3);
    for (int k = 0; k < 3; ++k) {
      std::size_t i = rnd::pick(rng, 0, d.size() - 1);
      auto v = sample_element(d.module(i), rng);
      auto got = dl_seminorm(d, {i, v});
      auto want = oracle::colimit_seminorm(d, i, v);
      for (std::size_t a = 0; a < sp.size(); ++a) worst = std::max(worst, std::abs(got[a] - want[a]));
    }
  }
  out.require(worst <= 1e-9, "seminorm deviates from brute force");
  out.note << "300 classes over 100 systems, max deviation " << worst;
}

void criterion6(Outcome& out) {
  rnd::Rng rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto sp = rnd::space(rng, 3);
    auto idx = random_index(rng, sp, trial % 2 == 1);
    auto d = rnd::direct_system(rng, idx, sp, 3);
    auto f = rnd::atom_map(rng, sp, 4);
    auto c = dl_pullback_iso(f, d, static_cast<std::uint64_t>(trial));
    out.require(c.certificate.ok(), "pullback comparison not an isometric isomorphism");
    for (int k = 0; k < 4; ++k) {
      auto v = sample_element(c.comparison.source(), rng);
      auto lhs = pointwise_norm(apply(c.comparison, v));
      auto rhs = pointwise_norm(v);
      for (std::size_t a = 0; a < lhs.size(); ++a) worst = std::max(worst, rel(lhs[a], rhs[a]));
    }
  }
  out.require(worst <= 1e-9, "pointwise norm not preserved");
  auto doc = fixture("pullback-commute");
  out.require(all_pass(doc, "pullback-commute", out), "fixture has no pullback checks");
  out.note << "100 instances plus fixture, max norm deviation " << worst;
}

void criterion7(Outcome& out) {
  rnd::Rng rng(7);
  int chains = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto sp = rnd::space(rng, 3);
    bool chain = trial % 2 == 1;
    chains += chain;
    auto d = rnd::direct_system(rng, random_index(rng, sp, chain), sp, 3);
    auto h = dual_limit_iso(d, static_cast<std::uint64_t>(trial));
    out.require(h.certificate.ok(), "dual comparison not an isometric isomorphism");
    out.require(h.inverse_side.module.dims() == h.direct_side.module().dims(), "dual sides differ in shape");
  }
  out.note << "50 systems (" << chains << " chains with tails)";
}

void criterion8(Outcome& out) {
  auto doc = fixture("sections-product");
  const auto& z = doc.space("Z");
  const auto& m = doc.module("M");
  auto s = sections_iso(z, m);
  out.require(s.certificate.ok(), "sections comparison not an isometric isomorphism");
  for (const char* id : {"v", "w"}) {
    const auto& v = doc.element(id);
    auto tv = apply(s.comparison, constant_section(z, v, s.sections));
    auto lhs = pointwise_norm(tv);
    auto rhs = s.projection.pull(pointwise_norm(v));
    for (std::size_t a = 0; a < lhs.size(); ++a) {
      out.require(lhs[a] == rhs[a], std::string("|T(") + id + ")| differs from |" + id + "| o pi");
    }
  }
  out.require(all_pass(doc, "sections-iso", out), "fixture has no sections check");
  out.note << "|T(v)| = |v| o pi exactly on every product atom";
}

void criterion9(Outcome& out) {
  rnd::Rng rng(9);
  int onto = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto sp = rnd::space(rng, 3);
    auto idx = random_index(rng, sp, trial % 2 == 1);
    auto inst = rnd::surjective_direct_morphism(rng, idx, sp);
    out.require(validate_direct_morphism(inst.theta, inst.from, inst.to).ok(), "direct morphism invalid");
    auto r = check_surjectivity_preservation(inst.theta, inst.from, inst.to);
    out.require(!r.premise || r.preserved, "direct limit lost surjectivity");
    onto += r.premise;
  }
  int premises = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto sp = rnd::space(rng, 3);
    auto idx = random_index(rng, sp, trial % 2 == 1);
    auto inst = rnd::injective_inverse_morphism(rng, idx, sp);
    out.require(validate_inverse_morphism(inst.theta, inst.from, inst.to).ok(), "inverse morphism invalid");
    auto r = check_injectivity_preservation(inst.theta, inst.from, inst.to);
    premises += r.premise;
    out.require(!r.premise || r.preserved, "inverse limit gained a kernel");
  }
  auto scaling = fixture("scaling-surjectivity");
  auto neg = harness::run_check(scaling, entry(scaling, "05-surjectivity-lost"));
  out.require(neg.verdict == harness::Verdict::Pass, "scaling counterexample: " + neg.summary);
  auto remark = fixture("remark-faithful");
  harness::CheckEntry l2{"l2", "injectivity-preserved", harness::Json{{"morphism", "OntoAxis"}}, {}, {}};
  auto r = harness::run_check(remark, l2);
  out.require(r.verdict == harness::Verdict::Error && r.summary.find("outside this representation") != std::string::npos,
              "direct kernel case not reported as out of scope: " + r.summary);
  out.note << "100 + 100 instances (premise met " << onto << " + " << premises << " times); negative cases as designed";
}

void criterion10(Outcome& out) {
  auto sp = AtomicMeasureSpace({"a"}, {1.0});
  Matrix half(2, 2);
  half << 1, 0, 0, 0.5;
  FiberModule e2 = FiberModule::uniform(sp, Fiber::euclidean(2));
  auto n1 = operator_pointwise_norm(ModuleMorphism(e2, e2, {half}));
  out.require(std::abs(n1[0] - 1.0) <= 1e-9, "diag(1,1/2) Euclidean is not 1");
  out.require(std::abs(oracle::power_iteration(half) - 1.0) <= 1e-9, "power iteration oracle disagrees");
  FiberModule linf = FiberModule::uniform(sp, Fiber(NormSpec::weighted(PExponent::Infinity, Vector::Ones(2))));
  Matrix sum(1, 2);
  sum << 1, 1;
  auto n2 = operator_pointwise_norm(ModuleMorphism(linf, FiberModule::scalar(sp), {sum}));
  out.require(std::abs(n2[0] - 2.0) <= 1e-9, "x+y from inf-norm is not 2");
  auto n3 = operator_pointwise_norm(ModuleMorphism::identity(linf));
  out.require(std::abs(n3[0] - 1.0) <= 1e-9, "identity is not 1");
  Vector w(2);
  w << 1, 2;
  Vector xi(2);
  xi << 2, 2;
  out.require(std::abs(norm_eval(NormSpec::dual_of(NormSpec::weighted(PExponent::One, w)), xi) - 2.0) <= 1e-9,
              "dual of weighted-1 on (2,2) is not 2");

  rnd::Rng rng(10);
  double worst_gap = 0.0;
  double worst_over = 0.0;
  int atoms = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto s = rnd::space(rng, 2);
    auto src = rnd::module(rng, s, 3, 1);
    auto dst = rnd::module(rng, s, 3, 1);
    auto t = rnd::admissible_morphism(rng, src, dst, rnd::uniform(rng, 0.2, 3.0));
    auto exact = operator_pointwise_norm(t);
    for (std::size_t a = 0; a < s.size(); ++a) {
      auto sampled = oracle::sampled_operator_norm(src.fiber(a).norm(), dst.fiber(a).norm(), t.at(a), rng, 10000);
      worst_over = std::max(worst_over, (std::max(sampled.lower, sampled.refined) - exact[a]) / std::max(1.0, exact[a]));
      worst_gap = std::max(worst_gap, std::abs(sampled.refined - exact[a]) / std::max(1e-300, exact[a]));
      ++atoms;
    }
  }
  out.require(worst_over <= 1e-9, "sampled lower bound exceeds the exact norm");
  out.require(worst_gap <= 1e-6, "sampled norm not within 1e-6 relative");
  out.note << "hand values exact; " << atoms << " atoms, worst relative gap " << worst_gap;
}

void criterion11(Outcome& out) {
  rnd::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto sp = rnd::space(rng, 4);
    auto m = rnd::module(rng, sp, 5, 0);
    std::size_t top = 0;
    for (auto d : m.dims()) top = std::max(top, d);
    std::size_t count = std::max<std::size_t>(1, top + rnd::pick(rng, 0, 2));
    std::vector<Element> gens;
    for (std::size_t k = 0; k < count; ++k) gens.push_back(sample_element(m, rng));
    auto p = present_as_fg_limit(m, gens, static_cast<std::uint64_t>(trial));
    out.require(p.is_identity, "comparison is not the identity");
    out.require(p.certificate.ok(), "comparison not an isometric isomorphism");
    out.require(validate_direct_system(p.system).ok(), "presentation system invalid");
  }
  out.note << "50 modules round-trip via the identity";
}

}  // namespace

int main() {
  const std::vector<std::function<void(Outcome&)>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                               criterion5, criterion6, criterion7, criterion8,
                                                               criterion9, criterion10, criterion11};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[k](out);
    } catch (const std::exception& e) {
      out.ok = false;
      out.note << " exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.ok;
    std::printf("criterion %zu: %s  %s (%.2f s)\n", k + 1, out.ok ? "PASS" : "FAIL", out.note.str().c_str(), secs);
  }
  return failures == 0 ? 0 : 1;
}
