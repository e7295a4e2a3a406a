#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "efo/error.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitArtifact = 3;

int exit_code(efo::ErrorKind kind) {
  switch (kind) {
    case efo::ErrorKind::ArtifactFormat: return kExitArtifact;
    case efo::ErrorKind::Configuration:
    case efo::ErrorKind::MaskedAction:
    case efo::ErrorKind::TerminalState:
    case efo::ErrorKind::Encoding:
    case efo::ErrorKind::Io: return kExitUsage;
    default: return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected-future-outcome explanations for a fuel-and-traffic taxi policy", "efo"};
  app.set_version_flag("--version", "efo 0.1.0");
  app.require_subcommand(1);
  efo::cli::add_train_policy(app);
  efo::cli::add_train_explainers(app);
  efo::cli::add_explain(app);
  efo::cli::add_evaluate(app);
  efo::cli::add_oracle(app);
  efo::cli::add_show_config(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const efo::Error& e) {
    std::fprintf(stderr, "efo: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "efo: %s\n", e.what());
    return kExitFailure;
  }
  return 0;
}
