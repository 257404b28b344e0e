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
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/index_set.hpp"
#include "l0mod/module.hpp"

namespace l0mod {

/// One connecting map of a system, given by index positions.
struct Connecting {
  std::size_t from;
  std::size_t to;
  ModuleMorphism map;
};

namespace detail {

/// Shared storage for direct and inverse systems. For a direct system the
/// map stored under (i, j) goes M_i -> M_j; for an inverse system M_j -> M_i.
class SystemBase {
 public:
  const IndexSet& index() const { return index_; }
  const FiberModule& module(std::size_t i) const { return modules_.at(i); }
  const std::vector<FiberModule>& modules() const { return modules_; }
  const AtomicMeasureSpace& space() const { return modules_.front().space(); }
  std::size_t size() const { return modules_.size(); }

  /// Explicit identity maps supplied by the caller, if any.
  const std::map<std::size_t, ModuleMorphism>& supplied_identities() const { return diagonal_; }

 protected:
  SystemBase(IndexSet index, std::vector<FiberModule> modules, std::vector<Connecting> maps, bool forward)
      : index_(std::move(index)), modules_(std::move(modules)) {
    if (modules_.size() != index_.size()) {
      throw Error(ErrorKind::ShapeMismatch, "system needs one module per index");
    }
    for (const auto& m : modules_) require_same_space(modules_.front().space(), m.space(), "system");
    if (index_.is_chain() && index_.tail().factor()) {
      require_same_space(index_.tail().factor()->space(), space(), "chain tail");
    }
    for (auto& c : maps) {
      if (c.from >= size() || c.to >= size() || !index_.leq(c.from, c.to)) {
        throw Error(ErrorKind::InvalidArgument, "connecting map between unrelated indices");
      }
      const auto& src = forward ? modules_[c.from] : modules_[c.to];
      const auto& dst = forward ? modules_[c.to] : modules_[c.from];
      if (!c.map.source().same_shape(src) || !c.map.target().same_shape(dst)) {
        throw Error(ErrorKind::ShapeMismatch, "connecting map (" + index_.label(c.from) + "," +
                                                  index_.label(c.to) + ") has the wrong source or target");
      }
      if (c.from == c.to) {
        diagonal_.insert_or_assign(c.from, std::move(c.map));
      } else {
        maps_.insert_or_assign({c.from, c.to}, std::move(c.map));
      }
    }
    if (index_.is_chain()) {
      // Consecutive maps are required; longer ones are composed when absent.
      for (std::size_t i = 0; i + 1 < size(); ++i) {
        if (!maps_.count({i, i + 1})) {
          throw Error(ErrorKind::InvalidArgument, "chain is missing the map (" + index_.label(i) + "," +
                                                      index_.label(i + 1) + ")");
        }
      }
      for (std::size_t len = 2; len < size(); ++len) {
        for (std::size_t i = 0; i + len < size(); ++i) {
          std::size_t j = i + len;
          if (maps_.count({i, j})) continue;
          const auto& a = maps_.at({i, j - 1});
          const auto& b = maps_.at({j - 1, j});
          maps_.insert_or_assign({i, j}, forward ? compose(b, a) : compose(a, b));
        }
      }
    } else {
      for (auto [i, j] : index_.strict_pairs()) {
        if (!maps_.count({i, j})) {
          throw Error(ErrorKind::InvalidArgument, "system is missing the map (" + index_.label(i) + "," +
                                                      index_.label(j) + ")");
        }
      }
    }
    for (std::size_t i = 0; i < size(); ++i) identities_.emplace(i, ModuleMorphism::identity(modules_[i]));
  }

  const ModuleMorphism& stored(std::size_t i, std::size_t j) const {
    if (i == j) return identities_.at(i);
    auto it = maps_.find({i, j});
    if (it == maps_.end()) {
      throw Error(ErrorKind::InvalidArgument, "no connecting map between '" + index_.label(i) + "' and '" +
                                                  index_.label(j) + "'");
    }
    return it->second;
  }

  IndexSet index_;
  std::vector<FiberModule> modules_;
  std::map<std::pair<std::size_t, std::size_t>, ModuleMorphism> maps_;
  std::map<std::size_t, ModuleMorphism> diagonal_;
  std::map<std::size_t, ModuleMorphism> identities_;
};

}  // namespace detail

/// Modules M_i with maps phi_ij: M_i -> M_j for i <= j.
class DirectSystem : public detail::SystemBase {
 public:
  DirectSystem(IndexSet index, std::vector<FiberModule> modules, std::vector<Connecting> maps)
      : SystemBase(std::move(index), std::move(modules), std::move(maps), true) {}

  /// phi_ij; the identity when i == j.
  const ModuleMorphism& map(std::size_t i, std::size_t j) const { return stored(i, j); }
};

/// Modules M_i with maps P_ij: M_j -> M_i for i <= j.
class InverseSystem : public detail::SystemBase {
 public:
  InverseSystem(IndexSet index, std::vector<FiberModule> modules, std::vector<Connecting> maps)
      : SystemBase(std::move(index), std::move(modules), std::move(maps), false) {}

  /// P_ij: M_j -> M_i; the identity when i == j.
  const ModuleMorphism& map(std::size_t i, std::size_t j) const { return stored(i, j); }
};

/// theta_i: M_i -> N_i for every explicit index. On a chain the components
/// past the last stage are induced by the two tails.
struct SystemMorphism {
  std::vector<ModuleMorphism> components;

  const ModuleMorphism& at(std::size_t i) const { return components.at(i); }
};

struct Violation {
  std::string kind;
  std::vector<std::string> indices;
  std::optional<std::string> atom;
  double deviation = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::optional<std::string> worst_atom(const ModuleMorphism& a, const ModuleMorphism& b) {
  double worst = -1.0;
  std::optional<std::string> id;
  for (std::size_t i = 0; i < a.maps().size(); ++i) {
    double d = linalg::max_abs(a.at(i) - b.at(i));
    if (d > worst) {
      worst = d;
      id = a.source().space().id(i);
    }
  }
  return id;
}

inline void check_admissible(const ModuleMorphism& m, std::vector<std::string> indices, ValidationReport& report) {
  auto n = operator_pointwise_norm(m);
  double worst = 0.0;
  std::size_t worst_i = 0;
  for (std::size_t a = 0; a < n.size(); ++a) {
    if (n[a] > worst) {
      worst = n[a];
      worst_i = a;
    }
  }
  if (worst > 1.0 + tolerance()) {
    std::ostringstream os;
    os << "operator norm " << worst << " exceeds 1";
    report.violations.push_back({"admissibility", std::move(indices), m.source().space().id(worst_i), worst, os.str()});
  }
}

template <class System, class Composer>
ValidationReport validate_system(const System& s, Composer composite) {
  ValidationReport report;
  const auto& idx = s.index();
  for (const auto& [i, m] : s.supplied_identities()) {
    double d = m.max_deviation(ModuleMorphism::identity(s.module(i)));
    if (d > tolerance()) {
      report.violations.push_back({"identity", {idx.label(i), idx.label(i)}, worst_atom(m, ModuleMorphism::identity(s.module(i))), d,
                                   "connecting map at a single index is not the identity"});
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j || !idx.leq(i, j)) continue;
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (k == j || !idx.leq(j, k) || k == i) continue;
        ModuleMorphism via = composite(i, j, k);
        const auto& direct = s.map(i, k);
        double d = direct.max_deviation(via);
        if (d > tolerance()) {
          std::ostringstream os;
          os << "cocycle law fails with max entry deviation " << d;
          report.violations.push_back({"cocycle", {idx.label(i), idx.label(j), idx.label(k)}, worst_atom(direct, via), d, os.str()});
        }
      }
    }
  }
  for (auto [i, j] : idx.strict_pairs()) check_admissible(s.map(i, j), {idx.label(i), idx.label(j)}, report);
  return report;
}

inline bool same_order(const IndexSet& a, const IndexSet& b) {
  if (a.kind() != b.kind() || a.labels() != b.labels()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a.leq(i, j) != b.leq(i, j)) return false;
    }
  }
  return true;
}

inline void check_tail_growth(const ModuleMorphism& last, const TailSpec& num, const TailSpec& den,
                              std::size_t last_stage, const std::string& label, ValidationReport& report) {
  auto n = operator_pointwise_norm(last);
  for (std::size_t a = 0; a < n.size(); ++a) {
    auto r = tail_ratio(num, den, last_stage, a);
    double bound = n[a] <= tolerance() ? 0.0 : n[a] * r.sup;
    if (bound > 1.0 + tolerance()) {
      std::ostringstream os;
      os << "tail components grow to operator norm " << bound << " past stage " << label;
      report.violations.push_back({"tail", {label}, last.source().space().id(a), bound, os.str()});
    }
  }
}

}  // namespace detail

/// Checks the identity law, the cocycle law phi_ik = phi_jk o phi_ij and
/// admissibility of every connecting map.
inline ValidationReport validate_direct_system(const DirectSystem& s) {
  return detail::validate_system(s, [&](std::size_t i, std::size_t j, std::size_t k) {
    return compose(s.map(j, k), s.map(i, j));
  });
}

/// Mirror of validate_direct_system: P_ik = P_ij o P_jk.
inline ValidationReport validate_inverse_system(const InverseSystem& s) {
  return detail::validate_system(s, [&](std::size_t i, std::size_t j, std::size_t k) {
    return compose(s.map(i, j), s.map(j, k));
  });
}

/// Squares psi_ij o theta_i = theta_j o phi_ij, admissibility of every
/// component and, on chains, boundedness of the induced tail components.
inline ValidationReport validate_direct_morphism(const SystemMorphism& theta, const DirectSystem& from, const DirectSystem& to) {
  ValidationReport report;
  const auto& idx = from.index();
  if (!detail::same_order(idx, to.index()) || theta.components.size() != idx.size()) {
    report.violations.push_back({"shape", {}, std::nullopt, 0.0, "systems are indexed differently"});
    return report;
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& t = theta.at(i);
    if (!t.source().same_shape(from.module(i)) || !t.target().same_shape(to.module(i))) {
      report.violations.push_back({"shape", {idx.label(i)}, std::nullopt, 0.0, "component has the wrong source or target"});
      return report;
    }
    detail::check_admissible(t, {idx.label(i)}, report);
  }
  for (auto [i, j] : idx.strict_pairs()) {
    auto lhs = compose(to.map(i, j), theta.at(i));
    auto rhs = compose(theta.at(j), from.map(i, j));
    double d = lhs.max_deviation(rhs);
    if (d > tolerance()) {
      std::ostringstream os;
      os << "square does not commute, max entry deviation " << d;
      report.violations.push_back({"square", {idx.label(i), idx.label(j)}, detail::worst_atom(lhs, rhs), d, os.str()});
    }
  }
  if (idx.is_chain()) {
    auto n = idx.last_stage();
    detail::check_tail_growth(theta.at(n), to.index().tail(), idx.tail(), n, idx.label(n), report);
  }
  return report;
}

/// Squares Q_ij o theta_j = theta_i o P_ij, plus the same component checks.
inline ValidationReport validate_inverse_morphism(const SystemMorphism& theta, const InverseSystem& from, const InverseSystem& to) {
  ValidationReport report;
  const auto& idx = from.index();
  if (!detail::same_order(idx, to.index()) || theta.components.size() != idx.size()) {
    report.violations.push_back({"shape", {}, std::nullopt, 0.0, "systems are indexed differently"});
    return report;
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& t = theta.at(i);
    if (!t.source().same_shape(from.module(i)) || !t.target().same_shape(to.module(i))) {
      report.violations.push_back({"shape", {idx.label(i)}, std::nullopt, 0.0, "component has the wrong source or target"});
      return report;
    }
    detail::check_admissible(t, {idx.label(i)}, report);
  }
  for (auto [i, j] : idx.strict_pairs()) {
    auto lhs = compose(to.map(i, j), theta.at(j));
    auto rhs = compose(theta.at(i), from.map(i, j));
    double d = lhs.max_deviation(rhs);
    if (d > tolerance()) {
      std::ostringstream os;
      os << "square does not commute, max entry deviation " << d;
      report.violations.push_back({"square", {idx.label(i), idx.label(j)}, detail::worst_atom(lhs, rhs), d, os.str()});
    }
  }
  if (idx.is_chain()) {
    auto n = idx.last_stage();
    detail::check_tail_growth(theta.at(n), idx.tail(), to.index().tail(), n, idx.label(n), report);
  }
  return report;
}

/// Per-atom flags: true where the chain tail keeps the fiber in the limit.
inline std::vector<bool> tail_alive(const IndexSet& index, const AtomicMeasureSpace& space) {
  std::vector<bool> alive(space.size(), true);
  if (!index.is_chain()) return alive;
  for (std::size_t a = 0; a < alive.size(); ++a) alive[a] = index.tail().alive(a);
  return alive;
}

}  // namespace l0mod
