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

#include <atomic>
#include <stdexcept>
#include <string>

namespace l0mod {

enum class ErrorKind {
  InvalidArgument,
  SpaceMismatch,
  ShapeMismatch,
  Unsupported,
  BracketTooWide,
  DimensionCap,
  NotFactorizable,
  Incompatible,
  Deficient,
  Schema,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::SpaceMismatch: return "space-mismatch";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::BracketTooWide: return "bracket-too-wide";
    case ErrorKind::DimensionCap: return "dimension-cap";
    case ErrorKind::NotFactorizable: return "not-factorizable";
    case ErrorKind::Incompatible: return "incompatible";
    case ErrorKind::Deficient: return "deficient";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
inline std::atomic<double>& tolerance_storage() {
  static std::atomic<double> value{1e-9};
  return value;
}
}  // namespace detail

/// Global comparison tolerance. Every "almost everywhere" comparison in the
/// library is a per-atom comparison within this value.
inline double tolerance() { return detail::tolerance_storage().load(); }

inline void set_tolerance(double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  }
  detail::tolerance_storage().store(eps);
}

/// Overrides the global tolerance for the lifetime of the guard.
class ScopedTolerance {
 public:
  explicit ScopedTolerance(double eps) : saved_(tolerance()) { set_tolerance(eps); }
  ~ScopedTolerance() { detail::tolerance_storage().store(saved_); }
  ScopedTolerance(const ScopedTolerance&) = delete;
  ScopedTolerance& operator=(const ScopedTolerance&) = delete;

 private:
  double saved_;
};

}  // namespace l0mod
