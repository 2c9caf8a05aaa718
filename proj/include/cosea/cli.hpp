#pragma once

// Command dispatch for the cosea tool: each subcommand turns a parsed
// document into a deterministic JSON report plus a human summary.

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cosea/io.hpp"
#include "cosea/representation.hpp"
#include "cosea/theorems.hpp"

namespace cosea::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 7;

enum ExitCode : int { exit_pass = 0, exit_failure = 1, exit_input_error = 2 };

struct RunOptions {
  std::string command;
  std::string file;
  std::vector<std::string> args;  // positional names after FILE
  std::string suite = "all";
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> env_seed;  // COSEA_SEED, read by the caller
  std::vector<std::pair<std::string, double>> tol;
  std::optional<std::string> anchor;
};

struct Report {
  Json body;
  int exit_code = exit_pass;
  std::string summary;  // human-readable; the caller may append timing
};

inline std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

/// Infinite residuals (from exceptions) are written as the string "inf".
inline Json residual_json(double r) { return std::isfinite(r) ? Json(r) : Json("inf"); }

inline Json encode(const Algebra& E, const Input& in) {
  if (const auto* d = std::get_if<double>(&in.value)) return *d;
  if (const auto* a = std::get_if<Effect>(&in.value)) return {{"effect", io::encode(E, *a)}};
  return {{"state", io::encode(E, std::get<State>(in.value))}};
}

inline Json encode(const Algebra& E, const CheckResult& c) {
  Json w = Json::array();
  for (const Witness& x : c.witnesses) {
    Json inputs = Json::object();
    for (const Input& in : x.inputs) inputs[in.name] = encode(E, in);
    w.push_back({{"index", x.index}, {"seed", x.seed}, {"residual", residual_json(x.residual)},
                 {"note", x.note}, {"inputs", std::move(inputs)}});
  }
  return {{"name", c.name},
          {"status", c.ok() ? "pass" : "fail"},
          {"instances", c.instances},
          {"passed", c.passed},
          {"skipped", c.skipped},
          {"failed", c.failed()},
          {"max_residual", residual_json(c.max_residual)},
          {"witnesses", std::move(w)}};
}

/// A single-instance check built from a computed residual.
inline CheckResult single_check(std::string name, double residual, double tol, std::string note = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.instances = 1;
  c.max_residual = residual;
  if (residual <= tol) {
    c.passed = 1;
  } else {
    c.witnesses.push_back({0, 0, residual, std::move(note), {}});
  }
  return c;
}

/// Error raised while a command works on specific named objects.
struct ObjectError {
  std::string object;
  std::string code;
  std::string message;
};

class Session {
 public:
  Session(RunOptions opts, AlgebraDocument doc, std::string digest)
      : opts_(std::move(opts)), doc_(std::move(doc)), digest_(std::move(digest)) {
    if (opts_.seed) {
      seed_ = *opts_.seed;
    } else if (doc_.seed) {
      seed_ = *doc_.seed;
    } else if (opts_.env_seed) {
      seed_ = *opts_.env_seed;
    } else {
      seed_ = kDefaultSeed;
    }
  }

  Report run() {
    const Algebra& E = doc_.algebra;
    results_ = Json::object();
    const std::string& cmd = opts_.command;
    if (cmd == "check") {
      check();
    } else if (cmd == "decompose") {
      decompose();
    } else if (cmd == "spectrum") {
      spectrum();
    } else if (cmd == "condition") {
      condition_cmd();
    } else if (cmd == "represent") {
      represent();
    } else if (cmd == "audit-inverse") {
      audit_inverse();
    } else {
      fail(ErrorCode::unknown_name, "unknown command '" + cmd + "'");
    }
    Json checks = Json::array();
    bool failed = !errors_.empty();
    for (const CheckResult& c : checks_) {
      checks.push_back(encode(E, c));
      failed = failed || !c.ok();
    }
    Json errors = Json::array();
    for (const ObjectError& e : errors_) errors.push_back({{"object", e.object}, {"code", e.code}, {"message", e.message}});
    Report r;
    r.body = {{"tool", "cosea"},
              {"version", kVersion},
              {"command", cmd},
              {"arguments", opts_.args},
              {"input_digest", "fnv1a64:" + digest_},
              {"algebra", E.describe()},
              {"seed", seed_},
              {"samples", samples_},
              {"tolerances", io::encode(E.tol())},
              {"status", !errors_.empty() ? "error" : failed ? "fail" : "pass"},
              {"checks", std::move(checks)},
              {"results", results_},
              {"errors", std::move(errors)}};
    r.exit_code = failed ? exit_failure : exit_pass;
    r.summary = summarize(r.body);
    return r;
  }

  static std::string summarize(const Json& body) {
    std::string s = "cosea " + body.at("command").get<std::string>() + " on " + body.at("algebra").get<std::string>() +
                    " (seed " + std::to_string(body.at("seed").get<std::uint64_t>()) + "): " +
                    body.at("status").get<std::string>() + "\n";
    for (const Json& c : body.at("checks")) {
      char line[256];
      const Json& m = c.at("max_residual");
      std::snprintf(line, sizeof line, "  %-4s %-28s %zu/%zu passed, %zu skipped, max residual %s\n",
                    c.at("status") == "pass" ? "PASS" : "FAIL", c.at("name").get<std::string>().c_str(),
                    c.at("passed").get<std::size_t>(), c.at("instances").get<std::size_t>(),
                    c.at("skipped").get<std::size_t>(), m.is_number() ? std::to_string(m.get<double>()).c_str() : "inf");
      s += line;
    }
    for (const Json& e : body.at("errors")) {
      s += "  ERROR " + e.at("object").get<std::string>() + ": " + e.at("message").get<std::string>() + "\n";
    }
    return s;
  }

 private:
  std::size_t samples_or(std::size_t fallback) {
    samples_ = opts_.samples.value_or(fallback);
    return samples_;
  }

  const std::string& arg(std::size_t k, const char* what) const {
    if (k >= opts_.args.size()) fail(ErrorCode::unknown_name, std::string("missing ") + what + " name");
    return opts_.args[k];
  }

  const Effect& effect(const std::string& name) const {
    auto it = doc_.effects.find(name);
    if (it == doc_.effects.end()) fail(ErrorCode::unknown_name, "no effect named '" + name + "'");
    return it->second;
  }

  const State& state(const std::string& name) const {
    auto it = doc_.states.find(name);
    if (it == doc_.states.end()) fail(ErrorCode::unknown_name, "no state named '" + name + "'");
    return it->second;
  }

  /// Runs `body`; library errors become report errors tagged with `object`.
  template <typename F>
  void guarded(const std::string& object, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::unknown_name) throw;
      errors_.push_back({object, std::string(to_string(e.code())), e.what()});
    }
  }

  void check() {
    const Algebra& E = doc_.algebra;
    const std::string& suite = opts_.suite;
    if (suite != "axioms" && suite != "theorems" && suite != "all") {
      fail(ErrorCode::unknown_name, "unknown suite '" + suite + "' (axioms, theorems, all)");
    }
    const std::size_t n = samples_or(100);
    std::vector<CheckSpec> specs;
    if (suite != "theorems") {
      specs = axiom_checks(E, standard_product());
      std::vector<CheckSpec> more = product_property_checks(E, standard_product());
      specs.insert(specs.end(), more.begin(), more.end());
    }
    if (suite != "axioms") {
      std::vector<CheckSpec> more = theorem_checks(E);
      specs.insert(specs.end(), more.begin(), more.end());
    }
    const AxiomReport rep = run_checks(E, specs, n, seed_);
    checks_ = rep.checks;
    results_["suite"] = suite;
  }

  void decompose() {
    const Algebra& E = doc_.algebra;
    const double eq = E.tol().eq;
    samples_or(8);
    guarded("algebra", [&] {
      const FactorDecomposition f = factorize(E, seed_, samples_);
      Json factors = Json::array();
      for (std::size_t k = 0; k < f.factors.size(); ++k) {
        const Carving& c = f.factors[k];
        factors.push_back({{"dimension", c.algebra.total_dim()},
                           {"algebra", io::encode(c.algebra)},
                           {"unit", io::encode(E, c.unit)}});
        checks_.push_back(single_check("factor_" + std::to_string(k) + "_is_factor", is_factor(c.algebra) ? 0.0 : 1.0,
                                       0.0, "carved part has a nontrivial center"));
      }
      results_["is_factor"] = is_factor(E);
      results_["center_dimension"] = center_basis(E).size();
      results_["dimensions"] = f.dimensions();
      results_["factors"] = std::move(factors);
      checks_.push_back(single_check("reconstruction", f.reconstruction_residual, eq));
      checks_.push_back(single_check("additivity", f.additivity_residual, eq));
      checks_.push_back(single_check("unit_preservation", f.unit_residual, eq));
      const bool injective = samples_ < 2 || f.injectivity_margin > eq;
      checks_.push_back(single_check("injectivity", injective ? 0.0 : 1.0, 0.0, "two panel effects share an image"));
      results_["injectivity_margin"] = samples_ < 2 ? Json(nullptr) : Json(f.injectivity_margin);
    });
  }

  void spectrum() {
    const Algebra& E = doc_.algebra;
    const std::string& name = arg(0, "effect");
    const Effect& b = effect(name);
    guarded("effect '" + name + "'", [&] {
      const SpectralForm f = spectral_form(E, b);
      const SpectrumStats st = spectrum_stats(E, b);
      Json terms = Json::array();
      for (const SpectralTerm& t : f.terms) {
        terms.push_back({{"value", t.value}, {"multiplicity", t.multiplicity()}, {"eigeneffect", io::encode(E, t.eigeneffect)}});
      }
      results_["effect"] = name;
      results_["terms"] = std::move(terms);
      results_["spectrum"] = st.spectrum;
      results_["min"] = st.min;
      results_["max"] = st.max;
      results_["norm"] = st.norm;
      results_["lambda"] = f.lambda;
      results_["invertible"] = is_invertible(E, b);
      results_["ceiling"] = io::encode(E, ceiling(E, b));
      results_["certainty"] = to_string(unique_certainty_state(E, b).kind);
      if (f.lambda > 0.0) {
        const PseudoInverse p = pseudo_inverse(E, b);
        results_["pseudo_inverse"] = {{"inverse", io::encode(E, p.inverse)}, {"lambda", p.lambda}};
      }
      checks_.push_back(single_check("spectral_reconstruction", distance(E, b, reconstruct(E, f)), E.tol().eq));
    });
  }

  void condition_cmd() {
    const Algebra& E = doc_.algebra;
    const std::string& sname = arg(0, "state");
    const std::string& ename = arg(1, "effect");
    const State& w = state(sname);
    const Effect& b = effect(ename);
    const double eq = E.tol().eq;
    guarded("state '" + sname + "', effect '" + ename + "'", [&] {
      const double p = evaluate(E, w, b);
      results_["state"] = sname;
      results_["effect"] = ename;
      results_["probability"] = p;
      const DispersionReport d = dispersion_analysis(E, w, b);
      Json disp = {{"dispersion", d.dispersion}, {"dispersion_free", d.dispersion_free}, {"constant_ae", d.constant_ae}};
      if (d.decomposition) {
        const ConstantDecomposition& k = *d.decomposition;
        disp["decomposition"] = {{"lambda", k.lambda},
                                 {"a", io::encode(E, k.a)},
                                 {"c", io::encode(E, k.c)},
                                 {"mass", k.mass},
                                 {"a_sharp", k.a_sharp},
                                 {"orthogonality_residual", k.orthogonality_residual},
                                 {"reconstruction_residual", k.reconstruction_residual}};
      }
      results_["dispersion"] = std::move(disp);
      checks_.push_back(single_check("dispersion_verdict", d.dispersion_free == d.constant_ae ? 0.0 : 1.0, 0.0,
                                     "variance test and decomposition disagree"));
      const State cw = condition(E, w, b);
      results_["conditioned"] = io::encode(E, cw);
      checks_.push_back(single_check("conditioned_normalized", std::abs(cw.mass() - 1.0), eq));
    });
  }

  void represent() {
    const Algebra& E = doc_.algebra;
    const double eq = E.tol().eq;
    if (!opts_.anchor) fail(ErrorCode::unknown_name, "represent needs --anchor CONTEXT");
    const std::string& anchor_name = *opts_.anchor;
    if (!doc_.contexts.count(anchor_name)) fail(ErrorCode::unknown_name, "no context named '" + anchor_name + "'");
    const std::size_t n = samples_or(50);
    guarded("context '" + anchor_name + "'", [&] {
      std::vector<Context> family;
      std::size_t anchor = 0;
      for (const auto& [name, A] : doc_.contexts) {
        if (name == anchor_name) anchor = family.size();
        family.push_back(A);
      }
      ComparabilityData base = canonical_unitaries(E, family);
      const ComparabilityReport rb = validate_comparability(base, E);
      checks_.push_back(single_check("comparability", rb.max(), eq));

      // Panel: document effects followed by sampled ones; the family is
      // extended with the eigencontexts J needs.
      Sampler s(E, mix_seed(seed_, "represent", 0));
      std::vector<Effect> panel;
      for (const auto& [name, b] : doc_.effects) panel.push_back(b);
      for (std::size_t k = 0; k < n; ++k) panel.push_back(s.effect());
      std::vector<Effect> partners, products, sums;
      std::vector<double> scales;
      std::vector<Context> extra;
      for (const Effect& b : panel) {
        partners.push_back(audit::orthogonal_to(E, s, b));
        sums.push_back(oplus(E, b, partners.back()));
        products.push_back(seq(E, b, partners.back()));
        scales.push_back(s.scalar());
        for (const Effect* x : std::initializer_list<const Effect*>{&b, &partners.back(), &sums.back(), &products.back()}) {
          extra.push_back(context_representation(E, *x).context);
        }
      }
      ComparabilityData data = with_contexts(E, base, extra);
      const ComparabilityReport rx = validate_comparability(data, E);
      checks_.push_back(single_check("extended_comparability", rx.max(), eq));

      const Matrix W = detail::frame(E, data.contexts[anchor]);
      double conj = 0.0, additive = 0.0, scalar_res = 0.0, indep = 0.0, product = 0.0, isometry = 0.0;
      std::vector<Matrix> images;
      for (std::size_t k = 0; k < panel.size(); ++k) {
        const Matrix J = represent_J(E, data, anchor, panel[k]);
        images.push_back(J);
        conj = std::max(conj, (J - W.adjoint() * embed(E, panel[k]) * W).norm());
        for (const Matrix& c : J_candidates(E, data, anchor, panel[k])) indep = std::max(indep, (c - J).norm());
        const Matrix Jp = represent_J(E, data, anchor, partners[k]);
        additive = std::max(additive, (represent_J(E, data, anchor, sums[k]) - J - Jp).norm());
        scalar_res = std::max(scalar_res,
                              (represent_J(E, data, anchor, scalar(E, scales[k], panel[k])) - scales[k] * J).norm());
        product = std::max(product, transported_product(E, data, anchor, panel[k], partners[k]).residual);
      }
      for (std::size_t i = 0; i < panel.size(); ++i) {
        for (std::size_t j = i + 1; j < panel.size(); ++j) {
          const double dj = (images[i] - images[j]).norm();
          const double de = (embed(E, panel[i]) - embed(E, panel[j])).norm();
          isometry = std::max(isometry, std::abs(dj - de));
        }
      }
      results_["anchor"] = anchor_name;
      results_["family_size"] = family.size();
      results_["extended_family_size"] = data.contexts.size();
      results_["panel_size"] = panel.size();
      results_["comparability"] = {{"transition", rb.transition}, {"cocycle", rb.cocycle}, {"identity", rb.identity},
                                   {"adjoint", rb.adjoint}, {"overlap", rb.overlap}};
      results_["conjugating_unitary"] = io::encode(W);
      checks_.push_back(single_check("context_independence", indep, eq));
      checks_.push_back(single_check("conjugation", conj, 1e-8));
      checks_.push_back(single_check("additivity", additive, eq));
      checks_.push_back(single_check("scalar_preservation", scalar_res, eq));
      checks_.push_back(single_check("injectivity", isometry, 1e-8, "J changes distances between panel effects"));
      checks_.push_back(single_check("transported_product", product, eq));
    });
  }

  void audit_inverse() {
    const Algebra& E = doc_.algebra;
    const std::size_t n = samples_or(100);
    Json pairs = Json::array();
    std::size_t exact_failures = 0;
    double law = 0.0;
    for (const auto& [an, a] : doc_.effects) {
      for (const auto& [bn, b] : doc_.effects) {
        if (!is_invertible(E, a) || !is_invertible(E, b)) continue;
        guarded("effects '" + an + "', '" + bn + "'", [&] {
          const InverseAudit r = audit_inverse_preserving(E, a, b);
          if (!r.exact) ++exact_failures;
          law = std::max({law, r.proportional ? 0.0 : r.proportional_residual,
                          std::max(0.0, r.lambda_a * r.lambda_b - r.lambda_ab - 1e-12)});
          pairs.push_back({{"a", an},
                           {"b", bn},
                           {"exact", r.exact},
                           {"proportional", r.proportional},
                           {"scalar", r.scalar},
                           {"lambda_a", r.lambda_a},
                           {"lambda_b", r.lambda_b},
                           {"lambda_ab", r.lambda_ab},
                           {"exact_residual", r.exact_residual},
                           {"proportional_residual", r.proportional_residual}});
        });
      }
    }
    results_["pairs"] = std::move(pairs);
    results_["exact_failures"] = exact_failures;
    checks_.push_back(single_check("named_pairs_law", law, 0.0, "proportionality or eigenvalue bound violated"));
    std::vector<CheckSpec> sweep;
    for (CheckSpec& c : theorem_checks(E)) {
      if (c.name == "inverse_audit_law") sweep.push_back(std::move(c));
    }
    const AxiomReport rep = run_checks(E, sweep, n, seed_);
    checks_.insert(checks_.end(), rep.checks.begin(), rep.checks.end());
  }

  RunOptions opts_;
  AlgebraDocument doc_;
  std::string digest_;
  std::uint64_t seed_ = kDefaultSeed;
  std::size_t samples_ = 0;
  std::vector<CheckResult> checks_;
  std::vector<ObjectError> errors_;
  Json results_;
};

inline Report input_error_report(const RunOptions& opts, const std::string& digest, const Error& e) {
  Report r;
  r.exit_code = exit_input_error;
  r.body = {{"tool", "cosea"},
            {"version", kVersion},
            {"command", opts.command},
            {"arguments", opts.args},
            {"input_digest", digest.empty() ? Json(nullptr) : Json("fnv1a64:" + digest)},
            {"status", "error"},
            {"checks", Json::array()},
            {"results", Json::object()},
            {"errors", Json::array({{{"object", e.object().empty() ? "input" : e.object()}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}}})}};
  r.summary = "cosea " + opts.command + ": input error: " + e.what() + "\n";
  return r;
}

/// Reads and validates the document, applies tolerance overrides (flags win
/// over the file), and runs the command. Never throws.
inline Report run_command(const RunOptions& opts) {
  std::string digest;
  try {
    const std::string text = read_file(opts.file);
    digest = fnv1a64(text);
    const Json j = io::parse_json(text);
    Tolerances tol;
    if (j.is_object() && j.contains("tolerances")) tol = io::decode_tolerances(j.at("tolerances"));
    for (const auto& [name, value] : opts.tol) tol.set(name, value);
    tol.validate();
    AlgebraDocument doc = parse_algebra_json(j, tol);
    Session session(opts, std::move(doc), digest);
    return session.run();
  } catch (const Error& e) {
    return input_error_report(opts, digest, e);
  }
}

}  // namespace cosea::cli
