#pragma once

#include <CLI11.hpp>

namespace efo::cli {

void add_train_policy(CLI::App& app);
void add_train_explainers(CLI::App& app);
void add_explain(CLI::App& app);
void add_evaluate(CLI::App& app);
void add_oracle(CLI::App& app);
void add_show_config(CLI::App& app);

}  // namespace efo::cli
