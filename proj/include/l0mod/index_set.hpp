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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "l0mod/error.hpp"
#include "l0mod/measure_space.hpp"

namespace l0mod {

/// Finite presentation of the connecting maps of a chain beyond its last
/// explicit stage N. For k >= N the module is M_N and the step k -> k+1 is
/// tau_k * identity with
///   Identity: tau_k = 1
///   Scalar:   tau_k = f (per atom, 0 <= f <= 1)
///   Harmonic: tau_k = (k+1)/(k+2)
class TailSpec {
 public:
  enum class Kind { Identity, Scalar, Harmonic };

  static TailSpec identity() { return TailSpec(Kind::Identity, std::nullopt); }
  static TailSpec harmonic() { return TailSpec(Kind::Harmonic, std::nullopt); }
  static TailSpec scalar(L0Function f) {
    for (double v : f.values()) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "scalar tail values must lie in [0, 1]");
      }
    }
    return TailSpec(Kind::Scalar, std::move(f));
  }

  Kind kind() const { return kind_; }
  const std::optional<L0Function>& factor() const { return factor_; }

  /// tau_k at the given atom.
  double step(std::size_t atom, std::size_t k) const {
    switch (kind_) {
      case Kind::Identity: return 1.0;
      case Kind::Scalar: return (*factor_)[atom];
      case Kind::Harmonic: return static_cast<double>(k + 1) / static_cast<double>(k + 2);
    }
    return 1.0;
  }

  /// lim_K prod_{k=N}^{K} tau_k: 1 where the tail is the identity, 0 otherwise.
  bool alive(std::size_t atom) const {
    switch (kind_) {
      case Kind::Identity: return true;
      case Kind::Scalar: return (*factor_)[atom] >= 1.0 - tolerance();
      case Kind::Harmonic: return false;
    }
    return true;
  }

  /// Tail of the same kind with its factor re-expressed on another space.
  TailSpec pulled_back(const AtomMap& f) const {
    if (kind_ != Kind::Scalar) return *this;
    return scalar(f.pull(*factor_));
  }

  const char* name() const {
    switch (kind_) {
      case Kind::Identity: return "identity";
      case Kind::Scalar: return "scalar";
      case Kind::Harmonic: return "harmonic";
    }
    return "?";
  }

 private:
  TailSpec(Kind kind, std::optional<L0Function> f) : kind_(kind), factor_(std::move(f)) {}
  Kind kind_;
  std::optional<L0Function> factor_;
};

/// sup_{j >= 0} prod_{k=N}^{N+j-1} num_k / den_k at one atom, where num and
/// den are tail step factors. Returns +inf when unbounded. 0/0 steps count as
/// 0: the corresponding tail component is unconstrained and taken to be zero.
struct TailRatio {
  double sup = 1.0;
  /// Every ratio in the product is nonzero.
  bool positive = true;
};

inline TailRatio tail_ratio(const TailSpec& num, const TailSpec& den, std::size_t last_stage, std::size_t atom) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto parts = [&](const TailSpec& t) {
    // step = c * h_k^e with h_k = (k+1)/(k+2)
    if (t.kind() == TailSpec::Kind::Harmonic) return std::pair<double, int>{1.0, 1};
    return std::pair<double, int>{t.step(atom, 0), 0};
  };
  auto [cn, en] = parts(num);
  auto [cd, ed] = parts(den);
  TailRatio out;
  if (cd == 0.0) {
    if (cn == 0.0) {
      out.positive = false;
      return out;
    }
    out.sup = inf;
    return out;
  }
  double c = cn / cd;
  int e = en - ed;
  if (c == 0.0) {
    out.positive = false;
    return out;
  }
  const double eps = tolerance();
  if (e >= 0) {
    // e == 0: c^j; e == 1: c^j (N+1)/(N+1+j); both bounded by 1 iff c <= 1.
    if (c > 1.0 + eps) out.sup = inf;
    return out;
  }
  // e == -1: r_j = c^j (N+1+j)/(N+1), unbounded for c >= 1, unimodal otherwise.
  if (c >= 1.0 - eps) {
    out.sup = inf;
    return out;
  }
  double n1 = static_cast<double>(last_stage + 1);
  double r = 1.0;
  double best = 1.0;
  for (std::size_t j = 0;; ++j) {
    double next = r * c * (n1 + static_cast<double>(j) + 1.0) / (n1 + static_cast<double>(j));
    if (next <= r) break;
    r = next;
    best = std::max(best, r);
  }
  out.sup = best;
  return out;
}

/// A directed index set: either a finite directed poset or the chain
/// 0 <= 1 <= ... with stages 0..N explicit and a declared tail.
class IndexSet {
 public:
  enum class Kind { FinitePoset, Chain };

  /// Builds the reflexive-transitive closure of the given pairs (a <= b) and
  /// checks antisymmetry and directedness.
  static IndexSet finite_poset(std::vector<std::string> labels,
                               const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (labels.empty()) throw Error(ErrorKind::InvalidArgument, "index set needs at least one element");
    IndexSet s;
    s.kind_ = Kind::FinitePoset;
    s.labels_ = std::move(labels);
    const std::size_t n = s.labels_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (s.labels_[i] == s.labels_[j]) throw Error(ErrorKind::InvalidArgument, "duplicate index label '" + s.labels_[i] + "'");
      }
    }
    s.leq_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) s.leq_[i][i] = true;
    for (const auto& [a, b] : pairs) {
      auto i = s.find(a);
      auto j = s.find(b);
      if (!i || !j) throw Error(ErrorKind::InvalidArgument, "relation mentions unknown index '" + (i ? b : a) + "'");
      s.leq_[*i][*j] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!s.leq_[i][k]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (s.leq_[k][j]) s.leq_[i][j] = true;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && s.leq_[i][j] && s.leq_[j][i]) {
          throw Error(ErrorKind::InvalidArgument,
                      "relation is not antisymmetric: '" + s.labels_[i] + "' and '" + s.labels_[j] + "'");
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        bool bounded = false;
        for (std::size_t k = 0; k < n && !bounded; ++k) bounded = s.leq_[i][k] && s.leq_[j][k];
        if (!bounded) {
          throw Error(ErrorKind::InvalidArgument,
                      "index set is not directed: '" + s.labels_[i] + "' and '" + s.labels_[j] + "' have no upper bound");
        }
      }
    }
    return s;
  }

  static IndexSet chain(std::size_t last_stage, TailSpec tail) {
    IndexSet s;
    s.kind_ = Kind::Chain;
    s.tail_ = std::move(tail);
    const std::size_t n = last_stage + 1;
    for (std::size_t i = 0; i < n; ++i) s.labels_.push_back(std::to_string(i));
    s.leq_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) s.leq_[i][j] = true;
    }
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_chain() const { return kind_ == Kind::Chain; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool leq(std::size_t i, std::size_t j) const { return leq_.at(i).at(j); }
  /// Last explicit stage of a chain.
  std::size_t last_stage() const { return labels_.size() - 1; }
  const TailSpec& tail() const { return tail_; }

  std::optional<std::size_t> find(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return i;
    }
    return std::nullopt;
  }

  /// All explicit pairs i <= j, i != j.
  std::vector<std::pair<std::size_t, std::size_t>> strict_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t j = 0; j < size(); ++j) {
        if (i != j && leq_[i][j]) out.emplace_back(i, j);
      }
    }
    return out;
  }

  /// Same order and labels, another tail (chains only).
  IndexSet with_tail(TailSpec tail) const {
    IndexSet s = *this;
    s.tail_ = std::move(tail);
    return s;
  }

 private:
  IndexSet() = default;
  Kind kind_ = Kind::FinitePoset;
  std::vector<std::string> labels_;
  std::vector<std::vector<bool>> leq_;
  TailSpec tail_ = TailSpec::identity();
};

/// The maximum of a finite directed poset, found by folding pairwise upper
/// bounds; for a chain, its last explicit stage.
inline std::size_t greatest_element(const IndexSet& index) {
  if (index.is_chain()) return index.last_stage();
  std::size_t top = 0;
  for (std::size_t i = 1; i < index.size(); ++i) {
    if (index.leq(top, i)) {
      top = i;
      continue;
    }
    if (index.leq(i, top)) continue;
    std::optional<std::size_t> bound;
    for (std::size_t k = 0; k < index.size() && !bound; ++k) {
      if (index.leq(top, k) && index.leq(i, k)) bound = k;
    }
    if (!bound) throw Error(ErrorKind::InvalidArgument, "index set is not directed");
    top = *bound;
  }
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (!index.leq(i, top)) throw Error(ErrorKind::InvalidArgument, "index set has no greatest element");
  }
  return top;
}

}  // namespace l0mod
