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

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "l0mod/harness/report.hpp"

namespace {

using namespace l0mod;
using namespace l0mod::harness;

CheckEntry synthetic(const std::string& id, const std::string& kind, const std::string& system) {
  CheckEntry c;
  c.id = id;
  c.kind = kind;
  c.params = Json::object();
  c.params["system"] = system;
  return c;
}

std::vector<CheckResult> validate_all(const Document& doc, const RunOptions& opts) {
  std::vector<CheckResult> out;
  for (const auto& [id, s] : doc.systems) out.push_back(run_check(doc, synthetic("system:" + id, "validate-system", id), opts));
  for (const auto& [id, m] : doc.system_morphisms) {
    CheckResult r;
    r.id = "morphism:" + id;
    r.kind = "validate-morphism";
    r.tolerance = opts.tolerance;
    r.seed = opts.seed;
    ScopedTolerance scope(opts.tolerance);
    const auto& a = doc.system(m.source);
    const auto& b = doc.system(m.target);
    auto report = a.kind == SystemKind::Direct ? validate_direct_morphism(m.morphism, a.direct(), b.direct())
                                               : validate_inverse_morphism(m.morphism, a.inverse(), b.inverse());
    r.witness["violations"] = report.violations.size();
    if (report.ok()) {
      r.verdict = Verdict::Pass;
      r.summary = "squares commute and components are admissible";
    } else {
      r.verdict = Verdict::Fail;
      r.witness["first"] = harness::detail::violation_json(report.violations.front());
      r.summary = report.violations.front().message;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normed L0-module systems: validation, limits and checks"};
  app.require_subcommand(1);
  RunOptions opts;
  std::string format = "text";
  app.add_option("--tol", opts.tolerance, "Global tolerance")->capture_default_str();
  app.add_option("--seed", opts.seed, "Seed for randomized sampling")->capture_default_str();
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "structured"}))->capture_default_str();

  std::string path;
  auto* validate = app.add_subcommand("validate", "Load a document and validate its systems and system morphisms");
  validate->add_option("document", path, "Document path")->required();

  std::string kind;
  std::string system;
  auto* limit = app.add_subcommand("limit", "Compute direct or inverse limits of the document's systems");
  limit->add_option("document", path, "Document path")->required();
  limit->add_option("--kind", kind, "direct or inverse")->required()->check(CLI::IsMember({"direct", "inverse"}));
  limit->add_option("--system", system, "Only this system");

  std::string name;
  auto* check = app.add_subcommand("check", "Run the document's checks of one kind");
  check->add_option("document", path, "Document path")->required();
  check->add_option("--name", name, "Check kind")->required()->check(CLI::IsMember(check_kinds()));

  auto* report = app.add_subcommand("report", "Run every check in the document");
  report->add_option("document", path, "Document path")->required();

  auto* canon = app.add_subcommand("format", "Print the canonical form of a document");
  canon->add_option("document", path, "Document path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    set_tolerance(opts.tolerance);
    auto doc = load_document_file(path);
    if (canon->parsed()) {
      std::cout << serialize(doc);
      return 0;
    }
    std::vector<CheckResult> results;
    if (validate->parsed()) {
      results = validate_all(doc, opts);
    } else if (limit->parsed()) {
      auto want = kind == "direct" ? SystemKind::Direct : SystemKind::Inverse;
      if (!system.empty() && doc.system(system).kind != want) throw Error(ErrorKind::InvalidArgument, "system '" + system + "' is not " + kind);
      for (const auto& [id, s] : doc.systems) {
        if (s.kind != want || (!system.empty() && id != system)) continue;
        results.push_back(run_check(doc, synthetic("limit:" + id, kind + "-limit", id), opts));
      }
    } else if (check->parsed()) {
      results = run_checks(doc, opts, name);
    } else {
      results = run_checks(doc, opts);
    }
    std::cout << emit_report(results, format == "structured" ? Format::Structured : Format::Text, opts);
    return exit_code(results);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
