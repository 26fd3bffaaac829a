// ldp-activation: run experiments, validation corpora, print the config schema.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ldp/error.hpp"
#include "ldp/experiment.hpp"
#include "ldp/io.hpp"

namespace {

int exit_code_for(ldp::ErrorKind kind) {
  switch (kind) {
    case ldp::ErrorKind::Schema: return 2;
    case ldp::ErrorKind::Domain: return 3;
    case ldp::ErrorKind::Numeric: return 4;
  }
  return 4;
}

const char* kind_name(ldp::ErrorKind kind) {
  switch (kind) {
    case ldp::ErrorKind::Schema: return "schema";
    case ldp::ErrorKind::Domain: return "domain";
    case ldp::ErrorKind::Numeric: return "numeric";
  }
  return "numeric";
}

int report(const std::string& kind, const std::string& code, const std::string& message, int rc) {
  const ldp::Json err = {{"error", {{"kind", kind}, {"code", code}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return rc;
}

int execute(const std::string& path, bool want_validate) {
  try {
    const auto config = ldp::load_config(path);
    const bool is_validate = config.experiment == ldp::ExperimentKind::Validate;
    if (want_validate != is_validate)
      throw ldp::SchemaError(want_validate ? "validate needs an experiment of type validate"
                                           : "use the validate subcommand for validate configs");
    const auto outcome = ldp::run_experiment(config);
    ldp::Json msg = {{"output_dir", config.output_dir}, {"files", outcome.files},
                     {"counts", outcome.summary["counts"]}};
    std::cout << msg.dump() << "\n";
    return outcome.exit_code;
  } catch (const ldp::Error& e) {
    return report(kind_name(e.kind()), e.code(), e.what(), exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    return report("numeric", "internal", e.what(), 4);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp large-deviation activation probabilities"};
  app.require_subcommand(1);

  std::string run_path, validate_path, which = "config";
  auto* run = app.add_subcommand("run", "Run an experiment config; writes results.csv and summary.json");
  run->add_option("config", run_path, "Path to the config JSON")->required();
  auto* validate = app.add_subcommand("validate", "Evaluate a validation corpus; writes validation.json");
  validate->add_option("config", validate_path, "Path to the config JSON")->required();
  auto* schema = app.add_subcommand("schema", "Print the JSON schema of config files");
  schema->add_option("which", which, "config or summary")->check(CLI::IsMember({"config", "summary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report("schema", "usage", e.what(), 2);
  }

  if (*run) return execute(run_path, false);
  if (*validate) return execute(validate_path, true);
  std::cout << (which == "summary" ? ldp::summary_schema() : ldp::config_schema()).dump(2) << "\n";
  return 0;
}
