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
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "l0mod.hpp"

namespace l0mod::harness {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// A read cursor into a JSON document that reports schema errors with the
/// path of the offending node.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const Json& json() const { return *j_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Schema, (path_.empty() ? std::string("/") : path_) + ": " + msg);
  }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Node operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end()) fail("missing field '" + key + "'");
    return Node(*it, path_ + "/" + key);
  }

  Node operator[](std::size_t i) const { return Node(j_->at(i), path_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  std::vector<Node> items() const {
    std::vector<Node> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
    return out;
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  std::size_t count() const {
    if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<std::int64_t>() >= 0)) {
      fail("expected a nonnegative integer");
    }
    return j_->get<std::size_t>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  /// A decimal number or an exact rational written as "p/q".
  double number() const {
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_string()) {
      auto s = j_->get<std::string>();
      auto slash = s.find('/');
      try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
          double v = std::stod(s, &used);
          if (used == s.size()) return v;
        } else {
          double p = std::stod(s.substr(0, slash), &used);
          if (used != slash) fail("malformed rational '" + s + "'");
          auto rest = s.substr(slash + 1);
          double q = std::stod(rest, &used);
          if (used != rest.size()) fail("malformed rational '" + s + "'");
          if (q == 0.0) fail("rational with zero denominator '" + s + "'");
          return p / q;
        }
      } catch (const std::logic_error&) {
      }
      fail("malformed number '" + s + "'");
    }
    fail("expected a number");
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (const auto& n : items()) out.push_back(n.number());
    return out;
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto& n : items()) out.push_back(n.str());
    return out;
  }

  Vector vector() const {
    auto v = numbers();
    return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  /// A matrix written as a list of rows; `cols` fixes the width so that
  /// empty matrices keep their shape.
  Matrix matrix(std::size_t rows, std::size_t cols) const {
    if (this->size() != rows) fail("expected " + std::to_string(rows) + " rows");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = (*this)[r];
      if (row.size() != cols) row.fail("expected " + std::to_string(cols) + " entries");
      for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].number();
    }
    return m;
  }

  /// A matrix whose shape is read from the data.
  Matrix matrix() const {
    std::size_t rows = size();
    std::size_t cols = rows ? (*this)[std::size_t{0}].size() : 0;
    return matrix(rows, cols);
  }

 private:
  const Json* j_;
  std::string path_;
};

enum class SystemKind { Direct, Inverse };

struct SystemEntry {
  SystemKind kind;
  std::variant<DirectSystem, InverseSystem> system;
  const DirectSystem& direct() const { return std::get<DirectSystem>(system); }
  const InverseSystem& inverse() const { return std::get<InverseSystem>(system); }
};

struct SystemMorphismEntry {
  std::string source;
  std::string target;
  SystemMorphism morphism;
};

struct CheckEntry {
  std::string id;
  std::string kind;
  Json params;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
};

inline const std::vector<std::string>& check_kinds() {
  static const std::vector<std::string> kinds = {
      "validate-system",  "direct-limit",      "inverse-limit",          "universal-direct",
      "universal-inverse", "functor-square",   "pullback-commute",       "sections-iso",
      "dual-iso",         "hom-iso",           "greatest-element",       "surjectivity-preserved",
      "injectivity-preserved", "il-pullback-compare"};
  return kinds;
}

/// A loaded document: the parsed source (kept for canonical re-emission) and
/// the typed objects it defines, keyed by id.
struct Document {
  Json source;
  std::map<std::string, AtomicMeasureSpace> spaces;
  std::map<std::string, NormSpec> norms;
  std::map<std::string, FiberModule> modules;
  std::map<std::string, Element> elements;
  std::map<std::string, ModuleMorphism> morphisms;
  std::map<std::string, IndexSet> index_sets;
  std::map<std::string, SystemEntry> systems;
  std::map<std::string, SystemMorphismEntry> system_morphisms;
  std::map<std::string, AtomMap> atom_maps;
  std::vector<CheckEntry> checks;

  template <class T>
  static const T& lookup(const std::map<std::string, T>& table, const std::string& id, const char* what) {
    auto it = table.find(id);
    if (it == table.end()) throw Error(ErrorKind::Schema, std::string("unknown ") + what + " '" + id + "'");
    return it->second;
  }

  const AtomicMeasureSpace& space(const std::string& id) const { return lookup(spaces, id, "space"); }
  const FiberModule& module(const std::string& id) const { return lookup(modules, id, "module"); }
  const Element& element(const std::string& id) const { return lookup(elements, id, "element"); }
  const ModuleMorphism& morphism(const std::string& id) const { return lookup(morphisms, id, "morphism"); }
  const IndexSet& index_set(const std::string& id) const { return lookup(index_sets, id, "index set"); }
  const SystemEntry& system(const std::string& id) const { return lookup(systems, id, "system"); }
  const SystemMorphismEntry& system_morphism(const std::string& id) const {
    return lookup(system_morphisms, id, "system morphism");
  }
  const AtomMap& atom_map(const std::string& id) const { return lookup(atom_maps, id, "atom map"); }
};

namespace detail {

template <class T>
void insert_unique(std::map<std::string, T>& table, const Node& at, const std::string& id, T value) {
  if (table.count(id)) at.fail("duplicate id '" + id + "'");
  table.emplace(id, std::move(value));
}

template <class F>
auto at_path(const Node& n, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Schema) throw;
    throw Error(e.kind(), (n.path().empty() ? std::string("/") : n.path()) + ": " + e.what());
  }
}

inline PExponent parse_exponent(const Node& n) {
  std::string s = n.json().is_string() ? n.str() : n.json().dump();
  if (s == "1") return PExponent::One;
  if (s == "2") return PExponent::Two;
  if (s == "inf") return PExponent::Infinity;
  n.fail("exponent must be 1, 2 or \"inf\"");
}

inline Fiber parse_fiber(const Node& n, const Document& doc) {
  auto dim = n["dim"].count();
  if (dim == 0) {
    if (n.has("norm")) n["norm"].fail("a zero fiber takes no norm");
    return Fiber::zero();
  }
  auto id = n["norm"].str();
  auto it = doc.norms.find(id);
  if (it == doc.norms.end()) n["norm"].fail("unknown norm '" + id + "'");
  return at_path(n, [&] { return Fiber(dim, it->second); });
}

inline NormSpec parse_norm(const Node& n, const Document& doc) {
  auto kind = n["kind"].str();
  if (kind == "weighted") return at_path(n, [&] { return NormSpec::weighted(parse_exponent(n["p"]), n["weights"].vector()); });
  if (kind == "framed") return at_path(n, [&] { return NormSpec::framed(parse_exponent(n["p"]), n["frame"].matrix()); });
  auto ref = [&](const Node& r) {
    auto id = r.str();
    auto it = doc.norms.find(id);
    if (it == doc.norms.end()) r.fail("unknown norm '" + id + "' (norms may only refer to earlier norms)");
    return it->second;
  };
  if (kind == "dual") return at_path(n, [&] { return NormSpec::dual_of(ref(n["of"])); });
  if (kind == "restricted") {
    auto inner = ref(n["of"]);
    return at_path(n, [&] { return NormSpec::restricted(inner, n["basis"].matrix()); });
  }
  if (kind == "operator") {
    auto s = parse_fiber(n["source"], doc);
    auto t = parse_fiber(n["target"], doc);
    return at_path(n, [&] { return NormSpec::operator_norm(s, t); });
  }
  n["kind"].fail("unknown norm kind '" + kind + "'");
}

inline TailSpec parse_tail(const Node& n, const Document& doc) {
  auto kind = n["kind"].str();
  if (kind == "identity") return TailSpec::identity();
  if (kind == "harmonic") return TailSpec::harmonic();
  if (kind == "scalar") {
    const auto& sp = doc.space(n["space"].str());
    auto values = n["values"].numbers();
    if (values.size() != sp.size()) n["values"].fail("expected one value per atom");
    return at_path(n, [&] { return TailSpec::scalar(L0Function(sp, std::move(values))); });
  }
  n["kind"].fail("unknown tail kind '" + kind + "'");
}

inline std::size_t index_of(const Node& n, const IndexSet& idx) {
  auto label = n.str();
  auto i = idx.find(label);
  if (!i) n.fail("unknown index '" + label + "'");
  return *i;
}

template <class F>
void each(const Json& root, const char* section, F&& f) {
  if (!root.contains(section)) return;
  Node sec(root.at(section), std::string("/") + section);
  for (const auto& item : sec.items()) f(item);
}

}  // namespace detail

/// Builds every object in a parsed document, enforcing all invariants.
/// Objects may only refer to objects defined in earlier sections (and, for
/// norms, earlier entries).
inline Document load_document(const Json& root) {
  Node top(root, "");
  if (!root.is_object()) top.fail("document must be an object");
  if (top["format_version"].count() != static_cast<std::size_t>(kFormatVersion)) {
    top["format_version"].fail("unsupported format_version");
  }
  static const std::vector<std::string> sections = {"format_version", "spaces",   "norms",   "modules",
                                                    "elements",       "morphisms", "index_sets", "systems",
                                                    "system_morphisms", "atom_maps", "checks"};
  for (const auto& [key, value] : root.items()) {
    if (std::find(sections.begin(), sections.end(), key) == sections.end()) top.fail("unknown section '" + key + "'");
  }
  Document doc;
  doc.source = root;
  detail::each(root, "spaces", [&](const Node& n) {
    auto id = n["id"].str();
    auto atoms = n["atoms"].strings();
    auto weights = n["weights"].numbers();
    if (weights.size() != atoms.size()) n["weights"].fail("expected one weight per atom");
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (!(weights[a] > 0.0)) n["weights"][a].fail("weight of atom '" + atoms[a] + "' must be positive");
    }
    detail::insert_unique(doc.spaces, n, id, detail::at_path(n, [&] { return AtomicMeasureSpace(atoms, weights); }));
  });
  detail::each(root, "norms", [&](const Node& n) {
    detail::insert_unique(doc.norms, n, n["id"].str(), detail::parse_norm(n, doc));
  });
  detail::each(root, "modules", [&](const Node& n) {
    const auto& sp = doc.space(n["space"].str());
    auto fibers_node = n["fibers"];
    if (fibers_node.size() != sp.size()) fibers_node.fail("expected one fiber per atom");
    std::vector<Fiber> fibers;
    for (const auto& f : fibers_node.items()) fibers.push_back(detail::parse_fiber(f, doc));
    detail::insert_unique(doc.modules, n, n["id"].str(), FiberModule(sp, std::move(fibers)));
  });
  detail::each(root, "elements", [&](const Node& n) {
    const auto& m = doc.module(n["module"].str());
    auto coords_node = n["coords"];
    if (coords_node.size() != m.atoms()) coords_node.fail("expected one coordinate vector per atom");
    std::vector<Vector> coords;
    for (std::size_t a = 0; a < m.atoms(); ++a) {
      auto v = coords_node[a].vector();
      if (static_cast<std::size_t>(v.size()) != m.dim(a)) coords_node[a].fail("dimension does not match the fiber");
      coords.push_back(std::move(v));
    }
    detail::insert_unique(doc.elements, n, n["id"].str(), Element(m, std::move(coords)));
  });
  detail::each(root, "morphisms", [&](const Node& n) {
    const auto& s = doc.module(n["source"].str());
    const auto& t = doc.module(n["target"].str());
    auto maps_node = n["maps"];
    if (maps_node.size() != s.atoms()) maps_node.fail("expected one matrix per atom");
    std::vector<Matrix> maps;
    for (std::size_t a = 0; a < s.atoms(); ++a) maps.push_back(maps_node[a].matrix(t.dim(a), s.dim(a)));
    detail::insert_unique(doc.morphisms, n, n["id"].str(),
                          detail::at_path(n, [&] { return ModuleMorphism(s, t, std::move(maps)); }));
  });
  detail::each(root, "index_sets", [&](const Node& n) {
    auto kind = n["kind"].str();
    if (kind == "poset") {
      auto labels = n["elements"].strings();
      std::vector<std::pair<std::string, std::string>> pairs;
      for (const auto& r : n["relations"].items()) {
        if (r.size() != 2) r.fail("a relation is a pair [lower, upper]");
        pairs.emplace_back(r[std::size_t{0}].str(), r[std::size_t{1}].str());
      }
      detail::insert_unique(doc.index_sets, n, n["id"].str(),
                            detail::at_path(n, [&] { return IndexSet::finite_poset(labels, pairs); }));
    } else if (kind == "chain") {
      auto tail = detail::parse_tail(n["tail"], doc);
      detail::insert_unique(doc.index_sets, n, n["id"].str(), IndexSet::chain(n["last_stage"].count(), std::move(tail)));
    } else {
      n["kind"].fail("index set kind must be \"poset\" or \"chain\"");
    }
  });
  detail::each(root, "systems", [&](const Node& n) {
    auto kind = n["kind"].str();
    if (kind != "direct" && kind != "inverse") n["kind"].fail("system kind must be \"direct\" or \"inverse\"");
    const auto& idx = doc.index_set(n["index"].str());
    auto mods = n["modules"];
    if (mods.size() != idx.size()) mods.fail("expected one module per index, in index order");
    std::vector<FiberModule> modules;
    for (const auto& m : mods.items()) modules.push_back(doc.module(m.str()));
    std::vector<Connecting> maps;
    for (const auto& c : n["maps"].items()) {
      maps.push_back({detail::index_of(c["from"], idx), detail::index_of(c["to"], idx), doc.morphism(c["morphism"].str())});
    }
    auto id = n["id"].str();
    if (kind == "direct") {
      auto s = detail::at_path(n, [&] { return DirectSystem(idx, std::move(modules), std::move(maps)); });
      detail::insert_unique(doc.systems, n, id, SystemEntry{SystemKind::Direct, std::move(s)});
    } else {
      auto s = detail::at_path(n, [&] { return InverseSystem(idx, std::move(modules), std::move(maps)); });
      detail::insert_unique(doc.systems, n, id, SystemEntry{SystemKind::Inverse, std::move(s)});
    }
  });
  detail::each(root, "system_morphisms", [&](const Node& n) {
    auto src = n["source"].str();
    auto dst = n["target"].str();
    const auto& a = doc.system(src);
    const auto& b = doc.system(dst);
    if (a.kind != b.kind) n.fail("source and target systems are of different kinds");
    std::size_t size = a.kind == SystemKind::Direct ? a.direct().size() : a.inverse().size();
    auto comps = n["components"];
    if (comps.size() != size) comps.fail("expected one component per index");
    SystemMorphism theta;
    for (const auto& c : comps.items()) theta.components.push_back(doc.morphism(c.str()));
    detail::insert_unique(doc.system_morphisms, n, n["id"].str(), SystemMorphismEntry{src, dst, std::move(theta)});
  });
  detail::each(root, "atom_maps", [&](const Node& n) {
    const auto& s = doc.space(n["source"].str());
    const auto& t = doc.space(n["target"].str());
    std::map<std::string, std::string> table;
    auto tab = n["table"];
    if (!tab.json().is_object()) tab.fail("expected an object mapping source atoms to target atoms");
    for (const auto& [k, v] : tab.json().items()) table[k] = tab[k].str();
    detail::insert_unique(doc.atom_maps, n, n["id"].str(), detail::at_path(n, [&] { return AtomMap::from_table(s, t, table); }));
  });
  std::map<std::string, bool> seen;
  detail::each(root, "checks", [&](const Node& n) {
    CheckEntry c;
    c.id = n["id"].str();
    if (seen[c.id]) n["id"].fail("duplicate check id '" + c.id + "'");
    seen[c.id] = true;
    c.kind = n["kind"].str();
    const auto& kinds = check_kinds();
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) n["kind"].fail("unknown check kind '" + c.kind + "'");
    c.params = n.has("params") ? n["params"].json() : Json::object();
    if (!c.params.is_object()) n["params"].fail("expected an object");
    if (n.has("tolerance")) c.tolerance = n["tolerance"].number();
    if (n.has("seed")) c.seed = n["seed"].count();
    doc.checks.push_back(std::move(c));
  });
  return doc;
}

inline Json parse_text(const std::string& text, const std::string& origin = "document") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Schema, origin + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Document load_document_file(const std::string& path) { return load_document(parse_text(read_file(path), path)); }

/// Canonical text of a document: sections in schema order, two-space
/// indentation, numbers and "p/q" strings exactly as written.
inline std::string serialize(const Document& doc) {
  static const std::vector<std::string> order = {"format_version", "spaces",   "norms",   "modules",
                                                 "elements",       "morphisms", "index_sets", "systems",
                                                 "system_morphisms", "atom_maps", "checks"};
  Json out = Json::object();
  for (const auto& key : order) {
    if (doc.source.contains(key)) out[key] = doc.source.at(key);
  }
  return out.dump(2) + "\n";
}

}  // namespace l0mod::harness
