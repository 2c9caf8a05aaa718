#pragma once

// JSON documents describing an algebra with named effects, states and
// contexts, and the JSON encodings of effects, states and matrices used in
// reports. Complex entries are always [re, im] pairs.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosea/backends.hpp"

namespace cosea {

using Json = nlohmann::json;

struct AlgebraDocument {
  Algebra algebra = Algebra::classical(1);
  std::map<std::string, Effect> effects;
  std::map<std::string, State> states;
  std::map<std::string, Context> contexts;
  std::optional<Tolerances> tolerances;  // as written in the file
  std::optional<std::uint64_t> seed;
};

namespace io {

// ---------------------------------------------------------------- encoding

inline Json encode(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json encode(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

inline Json encode(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back({v(k).real(), v(k).imag()});
  return out;
}

inline Json encode(const Component& c) {
  if (const auto* v = std::get_if<RealVector>(&c)) return encode(*v);
  return encode(std::get<Matrix>(c));
}

/// A single-summand effect is its payload; a direct sum is the list of payloads.
inline Json encode(const Algebra& E, const Effect& a) {
  if (E.arity() == 1) return encode(a[0]);
  Json out = Json::array();
  for (const Component& c : a.components()) out.push_back(encode(c));
  return out;
}

inline Json encode(const Algebra& E, const State& w) {
  if (E.arity() == 1) return encode(w.parts()[0]);
  const StateDecomposition d = ds_state_decompose(E, w);
  Json parts = Json::array();
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (d.parts[i]) {
      parts.push_back(encode(d.parts[i]->parts()[0]));
    } else {
      // Zero weight: any normalized state will do; write the uniform one.
      const Summand& s = E.summand(i);
      const auto n = detail::idx(s.dim);
      if (s.backend == Backend::classical) {
        parts.push_back(encode(RealVector(RealVector::Constant(n, 1.0 / static_cast<double>(n)))));
      } else {
        parts.push_back(encode(Matrix(Matrix::Identity(n, n) / static_cast<double>(n))));
      }
    }
  }
  return {{"weights", d.weights}, {"parts", std::move(parts)}};
}

inline Json encode(const Context& A) {
  Json rays = Json::array();
  for (const Ray& r : A.rays()) rays.push_back({{"block", r.block}, {"vector", encode(r.vector)}});
  return {{"rays", std::move(rays)}};
}

inline Json encode(const Tolerances& t) {
  return {{"eq", t.eq}, {"psd", t.psd}, {"cluster", t.cluster}, {"rank", t.rank}};
}

inline Json encode_summand(const Summand& s) {
  if (s.backend == Backend::classical) return {{"backend", "classical"}, {"n", s.dim}};
  Json j = {{"backend", "hilbertian"}, {"d", s.dim}};
  if (!s.generators.empty()) {
    Json g = Json::array();
    for (const Matrix& m : s.generators) g.push_back(encode(m));
    j["generators"] = std::move(g);
  }
  return j;
}

inline Json encode(const Algebra& E) {
  if (E.arity() == 1) return encode_summand(E.summand(0));
  Json parts = Json::array();
  for (const Summand& s : E.summands()) parts.push_back(encode_summand(s));
  return {{"backend", "direct_sum"}, {"parts", std::move(parts)}};
}

inline Json encode(const AlgebraDocument& doc) {
  Json j = encode(doc.algebra);
  const Algebra& E = doc.algebra;
  if (!doc.effects.empty()) {
    Json e = Json::object();
    for (const auto& [name, a] : doc.effects) e[name] = encode(E, a);
    j["effects"] = std::move(e);
  }
  if (!doc.states.empty()) {
    Json s = Json::object();
    for (const auto& [name, w] : doc.states) s[name] = encode(E, w);
    j["states"] = std::move(s);
  }
  if (!doc.contexts.empty()) {
    Json c = Json::object();
    for (const auto& [name, A] : doc.contexts) c[name] = encode(A);
    j["contexts"] = std::move(c);
  }
  if (doc.tolerances) j["tolerances"] = encode(*doc.tolerances);
  if (doc.seed) j["seed"] = *doc.seed;
  return j;
}

// ---------------------------------------------------------------- decoding

/// Validation failure for the object at `where` (e.g. "effect 'b'").
[[noreturn]] inline void invalid(const std::string& where, const std::string& why) {
  fail(ErrorCode::validation_error, where + ": " + why);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) invalid(where, "expected a number");
  return j.get<double>();
}

inline std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 1) invalid(where, "expected a positive integer");
  return j.get<std::size_t>();
}

inline Complex complex_entry(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) invalid(where, "complex entries are [re, im] pairs");
  return {number(j[0], where), number(j[1], where)};
}

inline Matrix decode_matrix(const Json& j, std::size_t d, const std::string& where) {
  const auto n = detail::idx(d);
  if (!j.is_array() || j.size() != d) invalid(where, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != d) invalid(where, "row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = complex_entry(row[static_cast<std::size_t>(k)], where);
  }
  return m;
}

inline RealVector decode_real_vector(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) invalid(where, "expected " + std::to_string(n) + " real entries");
  RealVector v(detail::idx(n));
  for (std::size_t k = 0; k < n; ++k) v(detail::idx(k)) = number(j[k], where);
  return v;
}

inline CVector decode_complex_vector(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) invalid(where, "expected " + std::to_string(n) + " complex entries");
  CVector v(detail::idx(n));
  for (std::size_t k = 0; k < n; ++k) v(detail::idx(k)) = complex_entry(j[k], where);
  return v;
}

inline Component decode_component(const Summand& s, const Json& j, const std::string& where) {
  if (s.backend == Backend::classical) return decode_real_vector(j, s.dim, where);
  return decode_matrix(j, s.dim, where);
}

inline std::vector<Component> decode_components(const Algebra& E, const Json& j, const std::string& where) {
  if (E.arity() == 1) return {decode_component(E.summand(0), j, where)};
  if (!j.is_array() || j.size() != E.arity()) {
    invalid(where, "expected one payload per summand (" + std::to_string(E.arity()) + ")");
  }
  std::vector<Component> out;
  for (std::size_t i = 0; i < E.arity(); ++i) out.push_back(decode_component(E.summand(i), j[i], where));
  return out;
}

/// Runs `build`, re-labelling library errors with the object they concern.
/// Runs `build`, tagging any error with the document object `name`.
template <typename F>
auto naming(const std::string& name, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    throw e.about(name);
  }
}

template <typename F>
auto validated(const std::string& where, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::validation_error) throw;
    invalid(where, e.what());
  }
}

inline Effect decode_effect(const Algebra& E, const Json& j, const std::string& where) {
  return validated(where, [&] { return make_effect(E, decode_components(E, j, where)); });
}

inline State decode_state(const Algebra& E, const Json& j, const std::string& where) {
  if (E.arity() == 1) {
    return validated(where, [&] { return make_state(E, {decode_component(E.summand(0), j, where)}); });
  }
  if (!j.is_object() || !j.contains("weights") || !j.contains("parts")) {
    invalid(where, "direct-sum states are {\"weights\": [...], \"parts\": [...]}");
  }
  const Json& w = j.at("weights");
  const Json& p = j.at("parts");
  if (!w.is_array() || w.size() != E.arity() || !p.is_array() || p.size() != E.arity()) {
    invalid(where, "expected one weight and one part per summand");
  }
  std::vector<double> weights;
  std::vector<State> parts;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    weights.push_back(number(w[i], where));
    const Algebra part = summand_algebra(E, i);
    parts.push_back(validated(where + " part " + std::to_string(i),
                              [&] { return make_state(part, {decode_component(E.summand(i), p[i], where)}); }));
  }
  return validated(where, [&] { return ds_state(E, weights, parts); });
}

inline Context decode_context(const Algebra& E, const Json& j, const std::string& where) {
  if (!j.is_object()) invalid(where, "contexts are objects with \"unitary\" or \"rays\"");
  if (j.contains("unitary")) {
    if (E.arity() != 1) invalid(where, "\"unitary\" needs a single-summand algebra; use \"rays\"");
    const Matrix u = decode_matrix(j.at("unitary"), E.total_dim(), where);
    return validated(where, [&] { return context_from_unitary(E, u); });
  }
  if (!j.contains("rays") || !j.at("rays").is_array()) invalid(where, "missing \"unitary\" or \"rays\"");
  std::vector<Ray> rays;
  for (const Json& r : j.at("rays")) {
    if (!r.is_object() || !r.contains("block") || !r.contains("vector")) {
      invalid(where, "rays are {\"block\": i, \"vector\": [...]}");
    }
    const Json& b = r.at("block");
    if (!b.is_number_integer() || b.get<long long>() < 0 || b.get<std::size_t>() >= E.arity()) {
      invalid(where, "ray block out of range");
    }
    const std::size_t block = b.get<std::size_t>();
    rays.push_back({block, decode_complex_vector(r.at("vector"), E.summand(block).dim, where)});
  }
  return validated(where, [&] { return make_context(E, std::move(rays)); });
}

inline Tolerances decode_tolerances(const Json& j, Tolerances base = {}) {
  if (!j.is_object()) invalid("tolerances", "expected an object");
  for (const auto& [key, value] : j.items()) {
    validated("tolerances", [&] {
      base.set(key, number(value, "tolerance '" + key + "'"));
      return 0;
    });
  }
  validated("tolerances", [&] {
    base.validate();
    return 0;
  });
  return base;
}

inline std::vector<Summand> decode_summands(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("backend") || !j.at("backend").is_string()) {
    invalid(where, "missing \"backend\" (classical, hilbertian or direct_sum)");
  }
  const std::string backend = j.at("backend").get<std::string>();
  if (backend == "classical") {
    if (!j.contains("n")) invalid(where, "classical algebras need \"n\"");
    return {Summand{Backend::classical, count(j.at("n"), where + " n"), {}}};
  }
  if (backend == "hilbertian") {
    if (!j.contains("d")) invalid(where, "hilbertian algebras need \"d\"");
    const std::size_t d = count(j.at("d"), where + " d");
    std::vector<Matrix> gens;
    if (j.contains("generators")) {
      const Json& g = j.at("generators");
      if (!g.is_array()) invalid(where, "\"generators\" must be a list of matrices");
      for (std::size_t k = 0; k < g.size(); ++k) gens.push_back(decode_matrix(g[k], d, where + " generator " + std::to_string(k)));
    }
    const Algebra h = validated(where, [&] { return Algebra::hilbertian(d, gens); });
    return {h.summand(0)};
  }
  if (backend == "direct_sum") {
    if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").size() < 2) {
      invalid(where, "direct sums need at least two \"parts\"");
    }
    std::vector<Summand> out;
    for (std::size_t k = 0; k < j.at("parts").size(); ++k) {
      std::vector<Summand> more = decode_summands(j.at("parts")[k], where + " part " + std::to_string(k));
      out.insert(out.end(), more.begin(), more.end());
    }
    return out;
  }
  invalid(where, "unknown backend '" + backend + "'");
}

/// Line and column (1-based) of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports the offset one past the offending byte.
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    const auto cut = msg.find(": ");
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    fail(ErrorCode::parse_error, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
}

}  // namespace io

inline AlgebraDocument parse_algebra_json(const Json& j, const std::optional<Tolerances>& overrides = std::nullopt) {
  if (!j.is_object()) io::invalid("document", "top level must be an object");
  static const char* const known[] = {"backend", "n", "d", "generators", "parts", "effects",
                                      "states", "contexts", "tolerances", "seed"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) io::invalid("document", "unknown key '" + key + "'");
  }
  AlgebraDocument doc;
  Tolerances tol;
  if (j.contains("tolerances")) {
    doc.tolerances = io::decode_tolerances(j.at("tolerances"));
    tol = *doc.tolerances;
  }
  if (overrides) tol = *overrides;
  doc.algebra = io::validated("algebra", [&] { return Algebra::from_summands(io::decode_summands(j, "algebra"), tol); });
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) io::invalid("seed", "expected a non-negative integer");
    doc.seed = j.at("seed").get<std::uint64_t>();
  }
  auto section = [&](const char* key) -> const Json* {
    if (!j.contains(key)) return nullptr;
    if (!j.at(key).is_object()) io::invalid(key, "expected an object of named entries");
    return &j.at(key);
  };
  if (const Json* e = section("effects")) {
    for (const auto& [name, v] : e->items()) {
      doc.effects.emplace(name, io::naming(name, [&] { return io::decode_effect(doc.algebra, v, "effect '" + name + "'"); }));
    }
  }
  if (const Json* s = section("states")) {
    for (const auto& [name, v] : s->items()) {
      doc.states.emplace(name, io::naming(name, [&] { return io::decode_state(doc.algebra, v, "state '" + name + "'"); }));
    }
  }
  if (const Json* c = section("contexts")) {
    for (const auto& [name, v] : c->items()) {
      doc.contexts.emplace(name, io::naming(name, [&] { return io::decode_context(doc.algebra, v, "context '" + name + "'"); }));
    }
  }
  return doc;
}

/// Parses document text. Throws ParseError (with line and column) or ValidationError.
inline AlgebraDocument parse_algebra_text(const std::string& text,
                                          const std::optional<Tolerances>& overrides = std::nullopt) {
  return parse_algebra_json(io::parse_json(text), overrides);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::io_error, "write to '" + path + "' failed");
}

inline AlgebraDocument parse_algebra_file(const std::string& path,
                                          const std::optional<Tolerances>& overrides = std::nullopt) {
  return parse_algebra_text(read_file(path), overrides);
}

inline std::string serialize(const AlgebraDocument& doc) { return io::encode(doc).dump(2) + "\n"; }

/// Structural equality of two documents within the equality tolerance.
inline bool same_document(const AlgebraDocument& x, const AlgebraDocument& y) {
  const Algebra& E = x.algebra;
  if (!(E == y.algebra) || x.seed != y.seed || x.tolerances != y.tolerances) return false;
  if (x.effects.size() != y.effects.size() || x.states.size() != y.states.size() ||
      x.contexts.size() != y.contexts.size()) {
    return false;
  }
  for (const auto& [name, a] : x.effects) {
    auto it = y.effects.find(name);
    if (it == y.effects.end() || distance(E, a, it->second) > E.tol().eq) return false;
  }
  for (const auto& [name, w] : x.states) {
    auto it = y.states.find(name);
    if (it == y.states.end() || state_distance(E, w, it->second) > E.tol().eq) return false;
  }
  for (const auto& [name, A] : x.contexts) {
    auto it = y.contexts.find(name);
    if (it == y.contexts.end() || it->second.size() != A.size()) return false;
    for (std::size_t k = 0; k < A.size(); ++k) {
      if (distance(E, A.members()[k], it->second.members()[k]) > E.tol().eq) return false;
    }
  }
  return true;
}

}  // namespace cosea
