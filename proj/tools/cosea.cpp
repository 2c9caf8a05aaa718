#include <chrono>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "cosea/cli.hpp"

namespace {

std::pair<std::string, double> parse_tolerance(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--tol", "expected NAME=VALUE, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const std::string value = spec.substr(eq + 1);
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return {spec.substr(0, eq), v};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--tol", "'" + spec + "' does not have a numeric value");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit and analyse convex sequential effect algebras described in JSON documents."};
  app.require_subcommand(1);
  app.set_version_flag("--version", cosea::cli::kVersion);

  cosea::cli::RunOptions opts;
  std::vector<std::string> tol_specs;
  std::string out_path;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("FILE", opts.file, "Algebra document (JSON)")->required();
    sub->add_option("--samples", samples, "Number of sampled instances");
    sub->add_option("--seed", seed, "Sampling seed (default: document seed, then COSEA_SEED, then 7)");
    sub->add_option("--tol", tol_specs, "Tolerance override NAME=VALUE (eq, psd, cluster, rank)");
    sub->add_option("--out", out_path, "Write the machine-readable report here");
  };

  CLI::App* check = app.add_subcommand("check", "Run the axiom and theorem audit suites");
  common(check);
  check->add_option("--suite", opts.suite, "axioms, theorems or all")->check(CLI::IsMember({"axioms", "theorems", "all"}));

  CLI::App* decompose = app.add_subcommand("decompose", "Factor decomposition through the center");
  common(decompose);

  CLI::App* spectrum = app.add_subcommand("spectrum", "Spectral form and statistics of an effect");
  common(spectrum);
  spectrum->add_option("EFFECT", opts.args, "Effect name")->required()->expected(1);

  CLI::App* condition = app.add_subcommand("condition", "Condition a state on an effect and test dispersion");
  common(condition);
  condition->add_option("NAMES", opts.args, "STATE EFFECT")->required()->expected(2);

  CLI::App* represent = app.add_subcommand("represent", "Comparability unitaries and the representation self-test");
  common(represent);
  std::string anchor;
  represent->add_option("--anchor", anchor, "Anchor context name")->required();

  CLI::App* inverse = app.add_subcommand("audit-inverse", "Inverse-preservation audit over named and sampled pairs");
  common(inverse);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cosea::cli::exit_input_error;
  }

  for (CLI::App* sub : app.get_subcommands()) opts.command = sub->get_name();
  if (!anchor.empty()) opts.anchor = anchor;
  CLI::App* active = app.get_subcommands().front();
  if (active->count("--samples") > 0) opts.samples = samples;
  if (active->count("--seed") > 0) opts.seed = seed;
  try {
    for (const std::string& t : tol_specs) opts.tol.push_back(parse_tolerance(t));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cosea::cli::exit_input_error;
  }
  if (const char* env = std::getenv("COSEA_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      std::cerr << "COSEA_SEED must be a non-negative integer\n";
      return cosea::cli::exit_input_error;
    }
    opts.env_seed = v;
  }

  const auto start = std::chrono::steady_clock::now();
  cosea::cli::Report report = cosea::cli::run_command(opts);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << report.summary << "  wall time " << seconds << " s\n";
  if (!out_path.empty()) {
    try {
      cosea::write_file(out_path, report.body.dump(2) + "\n");
    } catch (const cosea::Error& e) {
      std::cerr << e.what() << "\n";
      return cosea::cli::exit_input_error;
    }
  }
  return report.exit_code;
}
