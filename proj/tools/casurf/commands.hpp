#pragma once

#include <CLI11.hpp>

#include <functional>

namespace casurf::cli {

/// Adds the subcommand to `app`; `run` is set to its action (return value is
/// the process exit code).
void add_generate(CLI::App& app, std::function<int()>& run);
void add_backlund(CLI::App& app, std::function<int()>& run);
void add_reconstruct(CLI::App& app, std::function<int()>& run);
void add_verify(CLI::App& app, std::function<int()>& run);
void add_constants(CLI::App& app, std::function<int()>& run);

}  // namespace casurf::cli
