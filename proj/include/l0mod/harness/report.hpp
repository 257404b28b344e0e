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

#include <cstdint>
#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

#include "l0mod/harness/checks.hpp"

namespace l0mod::harness {

enum class Format { Text, Structured };

/// Structured reports leave out wall-clock time so that equal inputs give
/// byte-identical output.
inline Json report_json(const std::vector<CheckResult>& results, const RunOptions& opts) {
  Json out = Json::object();
  out["format_version"] = kFormatVersion;
  out["tolerance"] = opts.tolerance;
  out["seed"] = opts.seed;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t errors = 0;
  Json checks = Json::array();
  for (const auto& r : results) {
    (r.verdict == Verdict::Pass ? passed : r.verdict == Verdict::Fail ? failed : errors) += 1;
    Json c = Json::object();
    c["id"] = r.id;
    c["kind"] = r.kind;
    c["verdict"] = to_string(r.verdict);
    c["summary"] = r.summary;
    c["tolerance"] = r.tolerance;
    c["seed"] = r.seed;
    c["provenance"] = r.provenance;
    c["witness"] = r.witness;
    checks.push_back(std::move(c));
  }
  Json totals = Json::object();
  totals["pass"] = passed;
  totals["fail"] = failed;
  totals["error"] = errors;
  out["totals"] = totals;
  out["checks"] = checks;
  return out;
}

inline std::string format_text(const std::vector<CheckResult>& results, const RunOptions& opts) {
  std::string out = "l0mod report (format_version " + std::to_string(kFormatVersion) + ") tolerance=" +
                    Json(opts.tolerance).dump() + " seed=" + std::to_string(opts.seed) + "\n";
  for (const auto& r : results) {
    char time[32];
    std::snprintf(time, sizeof time, "%.3f s", r.seconds);
    std::string verdict = to_string(r.verdict);
    for (auto& ch : verdict) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    out += verdict + "  " + r.id + " [" + r.kind + "] " + r.summary;
    if (!r.provenance.empty()) {
      out += " {";
      for (std::size_t k = 0; k < r.provenance.size(); ++k) out += (k ? "," : "") + r.provenance[k];
      out += "}";
    }
    out += " (" + std::string(time) + ")\n";
  }
  return out;
}

inline std::string emit_report(const std::vector<CheckResult>& results, Format format, const RunOptions& opts) {
  if (format == Format::Structured) return report_json(results, opts).dump(2) + "\n";
  return format_text(results, opts);
}

}  // namespace l0mod::harness
