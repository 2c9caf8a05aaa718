#include <cstdio>
#include <filesystem>
#include <string>

#include "helpers.hpp"
#include "cosea/cli.hpp"
#include "cosea/io.hpp"

using namespace th;

namespace {

const std::string kData = COSEA_TEST_DATA;

std::string doc_path(const std::string& name) { return kData + "/" + name; }

TEST(Parse, MinimalClassical) {
  const AlgebraDocument doc = parse_algebra_text(R"({"backend": "classical", "n": 2})");
  EXPECT_TRUE(doc.algebra == Algebra::classical(2));
  EXPECT_TRUE(doc.effects.empty());
  EXPECT_FALSE(doc.seed.has_value());
}

TEST(Parse, HilbertianEffect) {
  const AlgebraDocument doc = parse_algebra_file(doc_path("qubit.json"));
  ASSERT_EQ(doc.effects.count("b"), 1u);
  EXPECT_TRUE(equal(doc.algebra, doc.effects.at("b"), H(real({{0.5, 0.25}, {0.25, 0.5}}))));
  EXPECT_EQ(doc.contexts.size(), 2u);
  EXPECT_NEAR(evaluate(doc.algebra, doc.states.at("mixed"), doc.effects.at("b")), 0.5, 1e-15);
}

TEST(Parse, ValidationErrorNamesTheEffect) {
  try {
    parse_algebra_file(doc_path("bad_eigenvalue.json"));
    ADD_FAILURE() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation_error);
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos) << e.what();
    EXPECT_EQ(e.object(), "b");
  }
}

TEST(Parse, SyntaxErrorHasPosition) {
  try {
    parse_algebra_text("{\n  \"backend\": \"classical\",\n  \"n\": 2,\n}");
    ADD_FAILURE() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 4, column 1"), std::string::npos) << e.what();
  }
  expect_code([] { parse_algebra_text(R"({"backend": "classical", "n": 2, "colour": 1})"); },
              ErrorCode::validation_error);
  expect_code([] { parse_algebra_text(R"({"backend": "quaternionic", "n": 2})"); }, ErrorCode::validation_error);
}

TEST(Parse, ToleranceOverridesWin) {
  const std::string text = R"({"backend": "classical", "n": 2, "tolerances": {"eq": 5e-9}})";
  EXPECT_EQ(parse_algebra_text(text).algebra.tol().eq, 5e-9);
  Tolerances t;
  t.set("eq", 2e-9);
  EXPECT_EQ(parse_algebra_text(text, t).algebra.tol().eq, 2e-9);
  expect_code([] {
    Tolerances bad;
    bad.set("eq", -1.0);
    bad.validate();
  }, ErrorCode::invalid_tolerance);
  expect_code([] { Tolerances().set("epsilon", 1e-9); }, ErrorCode::invalid_tolerance);
}

TEST(RoundTrip, EveryDocumentInTheCorpus) {
  for (const char* name : {"classical3.json", "block6.json", "qubit.json", "qutrit_contexts.json",
                           "inverse_classical.json", "inverse_qubit.json"}) {
    const AlgebraDocument doc = parse_algebra_file(doc_path(name));
    const AlgebraDocument again = parse_algebra_text(serialize(doc));
    EXPECT_TRUE(same_document(doc, again)) << name;
    EXPECT_EQ(serialize(doc), serialize(again)) << name;
  }
}

TEST(RoundTrip, DirectSumStatesWithEmptyParts) {
  const Algebra E = direct_sum({Algebra::hilbertian(2), Algebra::classical(2)});
  AlgebraDocument doc;
  doc.algebra = E;
  Sampler s(Algebra::hilbertian(2), 5);
  doc.states.emplace("left", ds_state(E, {1.0, 0.0}, {s.state(), classical_state(vec({0.5, 0.5}))}));
  doc.effects.emplace("e", Sampler(E, 6).effect());
  doc.seed = 12;
  const AlgebraDocument again = parse_algebra_text(serialize(doc));
  EXPECT_TRUE(same_document(doc, again));
  EXPECT_EQ(again.seed, std::optional<std::uint64_t>(12));
}

cli::RunOptions options(std::string command, std::string file, std::vector<std::string> args = {}) {
  cli::RunOptions o;
  o.command = std::move(command);
  o.file = doc_path(file);
  o.args = std::move(args);
  return o;
}

TEST(Cli, CheckClassicalPasses) {
  cli::RunOptions o = options("check", "classical3.json");
  o.suite = "axioms";
  o.samples = 100;
  o.seed = 7;
  const cli::Report r = cli::run_command(o);
  EXPECT_EQ(r.exit_code, cli::exit_pass);
  EXPECT_EQ(r.body.at("status"), "pass");
  // The fourteen axioms plus the eight derived product properties.
  EXPECT_EQ(r.body.at("checks").size(), 22u);
  EXPECT_EQ(r.body.at("seed"), 7);
}

TEST(Cli, SeedPriority) {
  cli::RunOptions o = options("check", "block6.json");
  o.suite = "axioms";
  o.samples = 2;
  EXPECT_EQ(cli::run_command(o).body.at("seed"), 3);  // from the document
  o.env_seed = 40;
  EXPECT_EQ(cli::run_command(o).body.at("seed"), 3);
  o.seed = 41;
  EXPECT_EQ(cli::run_command(o).body.at("seed"), 41);
  cli::RunOptions p = options("check", "classical3.json");
  p.suite = "axioms";
  p.samples = 2;
  EXPECT_EQ(cli::run_command(p).body.at("seed"), cli::kDefaultSeed);
  p.env_seed = 40;
  EXPECT_EQ(cli::run_command(p).body.at("seed"), 40);
}

TEST(Cli, Deterministic) {
  cli::RunOptions o = options("check", "block6.json");
  o.samples = 10;
  o.seed = 11;
  EXPECT_EQ(cli::run_command(o).body.dump(), cli::run_command(o).body.dump());
}

TEST(Cli, Decompose) {
  const cli::Report r = cli::run_command(options("decompose", "block6.json"));
  EXPECT_EQ(r.exit_code, cli::exit_pass);
  std::vector<std::size_t> dims;
  for (const auto& f : r.body.at("results").at("factors")) dims.push_back(f.at("dimension"));
  std::sort(dims.begin(), dims.end());
  EXPECT_EQ(dims, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Cli, Spectrum) {
  const cli::Report r = cli::run_command(options("spectrum", "qubit.json", {"b"}));
  ASSERT_EQ(r.exit_code, cli::exit_pass);
  const Json& res = r.body.at("results");
  EXPECT_NEAR(res.at("norm").get<double>(), 0.75, 1e-12);
  ASSERT_EQ(res.at("spectrum").size(), 2u);
  EXPECT_NEAR(res.at("spectrum")[0].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(res.at("spectrum")[1].get<double>(), 0.75, 1e-12);
}

TEST(Cli, Condition) {
  const cli::Report r = cli::run_command(options("condition", "qubit.json", {"mixed", "b"}));
  ASSERT_EQ(r.exit_code, cli::exit_pass);
  EXPECT_NEAR(r.body.at("results").at("probability").get<double>(), 0.5, 1e-12);
}

TEST(Cli, Represent) {
  cli::RunOptions o = options("represent", "qutrit_contexts.json");
  o.anchor = "fourier";
  o.samples = 10;
  const cli::Report r = cli::run_command(o);
  EXPECT_EQ(r.exit_code, cli::exit_pass) << r.body.dump(2);
}

TEST(Cli, AuditInverseFlagsTheNamedPair) {
  cli::RunOptions o = options("audit-inverse", "inverse_qubit.json");
  o.samples = 20;
  const cli::Report r = cli::run_command(o);
  EXPECT_EQ(r.exit_code, cli::exit_pass);
  const std::string dump = r.body.dump();
  EXPECT_NE(dump.find("exact_failures"), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(cli::run_command(options("spectrum", "bad_eigenvalue.json", {"b"})).exit_code, cli::exit_input_error);
  EXPECT_EQ(cli::run_command(options("spectrum", "bad_syntax.json", {"b"})).exit_code, cli::exit_input_error);
  EXPECT_EQ(cli::run_command(options("spectrum", "qubit.json", {"missing"})).exit_code, cli::exit_input_error);
  EXPECT_EQ(cli::run_command(options("spectrum", "no_such_file.json", {"b"})).exit_code, cli::exit_input_error);
  cli::RunOptions o = options("check", "qubit.json");
  o.tol = {{"bogus", 1.0}};
  EXPECT_EQ(cli::run_command(o).exit_code, cli::exit_input_error);
  const cli::Report r = cli::run_command(options("spectrum", "bad_eigenvalue.json", {"b"}));
  EXPECT_EQ(r.body.at("status"), "error");
  EXPECT_EQ(r.body.at("errors")[0].at("object"), "b");
}

TEST(Cli, ModuleErrorsExitOne) {
  // The zero effect has no pseudo-inverse but the spectrum report still completes;
  // conditioning on an impossible effect is a module error.
  const std::string path = (std::filesystem::temp_directory_path() / "cosea_zero_prob.json").string();
  write_file(path, R"({"backend": "classical", "n": 2,
    "effects": {"z": [0, 1]}, "states": {"pt": [1, 0]}})");
  cli::RunOptions o;
  o.command = "condition";
  o.file = path;
  o.args = {"pt", "z"};
  const cli::Report r = cli::run_command(o);
  EXPECT_EQ(r.exit_code, cli::exit_failure);
  EXPECT_EQ(r.body.at("errors")[0].at("code"), "ZeroProbability");
  std::remove(path.c_str());
}

TEST(Cli, Digest) {
  EXPECT_EQ(cli::fnv1a64(""), "cbf29ce484222325");
  EXPECT_EQ(cli::fnv1a64("a"), "af63dc4c8601ec8c");
}

}  // namespace
