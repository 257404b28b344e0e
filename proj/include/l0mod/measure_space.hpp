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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "l0mod/error.hpp"

namespace l0mod {

/// A finite measure space whose every atom carries strictly positive mass.
/// The sigma-algebra is the full power set, so "m-a.e." reduces to
/// "at every atom".
class AtomicMeasureSpace {
 public:
  AtomicMeasureSpace(std::vector<std::string> atom_ids, std::vector<double> weights) {
    if (atom_ids.empty()) {
      throw Error(ErrorKind::InvalidArgument, "measure space needs at least one atom");
    }
    if (atom_ids.size() != weights.size()) {
      throw Error(ErrorKind::InvalidArgument, "atom id count differs from weight count");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < atom_ids.size(); ++i) {
      if (!seen.insert(atom_ids[i]).second) {
        throw Error(ErrorKind::InvalidArgument, "duplicate atom id '" + atom_ids[i] + "'");
      }
      if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
        throw Error(ErrorKind::InvalidArgument,
                    "atom '" + atom_ids[i] + "' has non-positive weight");
      }
    }
    data_ = std::make_shared<const Data>(Data{std::move(atom_ids), std::move(weights)});
  }

  std::size_t size() const { return data_->ids.size(); }
  const std::string& id(std::size_t atom) const { return data_->ids.at(atom); }
  double weight(std::size_t atom) const { return data_->weights.at(atom); }
  const std::vector<std::string>& ids() const { return data_->ids; }
  const std::vector<double>& weights() const { return data_->weights; }

  std::optional<std::size_t> index_of(const std::string& atom_id) const {
    auto it = std::find(data_->ids.begin(), data_->ids.end(), atom_id);
    if (it == data_->ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - data_->ids.begin());
  }

  double total_mass() const {
    double s = 0.0;
    for (double w : data_->weights) s += w;
    return s;
  }

  friend bool operator==(const AtomicMeasureSpace& a, const AtomicMeasureSpace& b) {
    return a.data_ == b.data_ ||
           (a.data_->ids == b.data_->ids && a.data_->weights == b.data_->weights);
  }

 private:
  struct Data {
    std::vector<std::string> ids;
    std::vector<double> weights;
  };
  std::shared_ptr<const Data> data_;
};

inline void require_same_space(const AtomicMeasureSpace& a, const AtomicMeasureSpace& b,
                               const char* what) {
  if (!(a == b)) throw Error(ErrorKind::SpaceMismatch, std::string(what) + ": base spaces differ");
}

/// A measurable function, i.e. one real value per atom.
class L0Function {
 public:
  L0Function(AtomicMeasureSpace space, std::vector<double> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (values_.size() != space_.size()) {
      throw Error(ErrorKind::ShapeMismatch, "L0 function value count differs from atom count");
    }
  }

  static L0Function constant(const AtomicMeasureSpace& space, double c) {
    return L0Function(space, std::vector<double>(space.size(), c));
  }

  const AtomicMeasureSpace& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t atom) const { return values_.at(atom); }
  const std::vector<double>& values() const { return values_; }

  /// Per-atom equality within the global tolerance.
  bool approx_equal(const L0Function& other) const {
    require_same_space(space_, other.space_, "approx_equal");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (std::abs(values_[i] - other.values_[i]) > tolerance()) return false;
    }
    return true;
  }

  /// Per-atom "<=" within the global tolerance.
  bool approx_le(const L0Function& other) const {
    require_same_space(space_, other.space_, "approx_le");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] > other.values_[i] + tolerance()) return false;
    }
    return true;
  }

  friend L0Function operator*(const L0Function& a, const L0Function& b) {
    require_same_space(a.space_, b.space_, "product");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values_[i] * b.values_[i];
    return L0Function(a.space_, std::move(v));
  }

 private:
  AtomicMeasureSpace space_;
  std::vector<double> values_;
};

/// The probability measure m' = m / m(X), returned as per-atom masses.
inline L0Function normalized_reference(const AtomicMeasureSpace& space) {
  double total = space.total_mass();
  std::vector<double> p(space.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = space.weight(i) / total;
  return L0Function(space, std::move(p));
}

/// d(f, g) = sum_i m'_i * min(|f_i - g_i|, 1).
inline double l0_distance(const L0Function& f, const L0Function& g) {
  require_same_space(f.space(), g.space(), "l0_distance");
  auto ref = normalized_reference(f.space());
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    d += ref[i] * std::min(std::abs(f[i] - g[i]), 1.0);
  }
  return d;
}

enum class Extremum { Sup, Inf };

/// Per-atom supremum or infimum of a finite, nonempty family.
inline L0Function ess_extremum(std::span<const L0Function> family, Extremum mode) {
  if (family.empty()) throw Error(ErrorKind::InvalidArgument, "ess_extremum of an empty family");
  std::vector<double> out = family.front().values();
  for (const auto& f : family.subspan(1)) {
    require_same_space(family.front().space(), f.space(), "ess_extremum");
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = mode == Extremum::Sup ? std::max(out[i], f[i]) : std::min(out[i], f[i]);
    }
  }
  return L0Function(family.front().space(), std::move(out));
}

/// Multiplicative tail law of an infinite family f_0, f_1, ...: past the
/// last explicit member f_K, f_{K+j} = f_K * prod_{k=K}^{K+j-1} c_k with
/// c_k = ratio (constant, per atom, in [0, 1]) or c_k = (k+1)/(k+2).
struct FamilyTail {
  enum class Kind { Constant, Geometric, Harmonic };
  Kind kind = Kind::Constant;
  std::vector<double> ratio;  // Geometric only, one per atom
};

/// Supremum or infimum over a chain family given by explicit members and a
/// recognized monotone tail law. The tail is monotone starting at the last
/// explicit member, so the extremum is attained on the explicit prefix or in
/// the per-atom limit.
inline L0Function ess_extremum(std::span<const L0Function> prefix,
                               const std::optional<FamilyTail>& tail, Extremum mode) {
  if (prefix.empty()) throw Error(ErrorKind::InvalidArgument, "ess_extremum of an empty family");
  if (!tail) {
    throw Error(ErrorKind::Unsupported, "infinite family without a recognized tail rule");
  }
  const L0Function& last = prefix.back();
  std::vector<double> limit(last.size());
  for (std::size_t i = 0; i < limit.size(); ++i) {
    switch (tail->kind) {
      case FamilyTail::Kind::Constant: limit[i] = last[i]; break;
      case FamilyTail::Kind::Harmonic: limit[i] = 0.0; break;
      case FamilyTail::Kind::Geometric: {
        if (tail->ratio.size() != last.size()) {
          throw Error(ErrorKind::ShapeMismatch, "geometric tail ratio has wrong length");
        }
        double r = tail->ratio[i];
        if (r < 0.0 || r > 1.0) {
          throw Error(ErrorKind::Unsupported, "geometric tail ratio outside [0, 1]");
        }
        limit[i] = r == 1.0 ? last[i] : 0.0;
        break;
      }
    }
  }
  std::vector<L0Function> all(prefix.begin(), prefix.end());
  all.emplace_back(last.space(), std::move(limit));
  return ess_extremum(std::span<const L0Function>(all), mode);
}

/// A total map between the atoms of two spaces, stored as an index table.
class AtomMap {
 public:
  AtomMap(AtomicMeasureSpace source, AtomicMeasureSpace target, std::vector<std::size_t> image)
      : source_(std::move(source)), target_(std::move(target)), image_(std::move(image)) {
    if (image_.size() != source_.size()) {
      throw Error(ErrorKind::ShapeMismatch, "atom map must be total on the source atoms");
    }
    for (auto y : image_) {
      if (y >= target_.size()) throw Error(ErrorKind::InvalidArgument, "atom map image out of range");
    }
  }

  static AtomMap from_table(const AtomicMeasureSpace& source, const AtomicMeasureSpace& target,
                            const std::map<std::string, std::string>& table) {
    std::vector<std::size_t> image(source.size());
    for (std::size_t x = 0; x < source.size(); ++x) {
      auto it = table.find(source.id(x));
      if (it == table.end()) {
        throw Error(ErrorKind::InvalidArgument, "atom map has no image for '" + source.id(x) + "'");
      }
      auto y = target.index_of(it->second);
      if (!y) {
        throw Error(ErrorKind::InvalidArgument, "atom map sends '" + source.id(x) +
                                                    "' to unknown atom '" + it->second + "'");
      }
      image[x] = *y;
    }
    for (const auto& [from, to] : table) {
      if (!source.index_of(from)) {
        throw Error(ErrorKind::InvalidArgument, "atom map mentions unknown source atom '" + from + "'");
      }
    }
    return AtomMap(source, target, std::move(image));
  }

  static AtomMap identity(const AtomicMeasureSpace& space) {
    std::vector<std::size_t> image(space.size());
    for (std::size_t i = 0; i < image.size(); ++i) image[i] = i;
    return AtomMap(space, space, std::move(image));
  }

  const AtomicMeasureSpace& source() const { return source_; }
  const AtomicMeasureSpace& target() const { return target_; }
  std::size_t operator()(std::size_t x) const { return image_.at(x); }
  const std::vector<std::size_t>& image() const { return image_; }

  /// g o f as a function on the source atoms.
  L0Function pull(const L0Function& g) const {
    require_same_space(g.space(), target_, "AtomMap::pull");
    std::vector<double> v(source_.size());
    for (std::size_t x = 0; x < v.size(); ++x) v[x] = g[image_[x]];
    return L0Function(source_, std::move(v));
  }

 private:
  AtomicMeasureSpace source_;
  AtomicMeasureSpace target_;
  std::vector<std::size_t> image_;
};

struct PushforwardCheck {
  L0Function pushforward;
  bool absolutely_continuous;
};

/// f_* m_X as weights on Y, and whether f_* m_X << m_Y.
inline PushforwardCheck pushforward_check(const AtomMap& f) {
  const auto& y = f.target();
  std::vector<double> mass(y.size(), 0.0);
  for (std::size_t x = 0; x < f.source().size(); ++x) mass[f(x)] += f.source().weight(x);
  bool ac = true;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (mass[j] > 0.0 && !(y.weight(j) > 0.0)) ac = false;
  }
  return {L0Function(y, std::move(mass)), ac};
}

}  // namespace l0mod
