// Copyright 2026 The backaction Authors
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

// backaction: run measurement-control scenarios from JSON documents.
//
//   backaction run <config> [--output-dir DIR] [--seed N] [--quiet]
//   backaction validate <config>
//   backaction version
//
// Exit status: 0 on success, 2 on validation errors, 1 on runtime errors.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "backaction/errors.hpp"
#include "backaction/scenario.hpp"
#include "backaction/version.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

std::filesystem::path resolve(const std::filesystem::path& file, const std::string& output_dir) {
    if (output_dir.empty() || file.is_absolute()) return file;
    return std::filesystem::path(output_dir) / file;
}

int run(const std::string& config_path, const std::string& output_dir, std::optional<std::uint64_t> seed,
        bool quiet) {
    backaction::ScenarioConfig config = backaction::load_scenario(config_path);
    if (seed) config.optimizer.seed = *seed;

    const auto outcome = backaction::run_scenario(config);
    const auto trajectory_path = resolve(config.output.trajectory_path, output_dir);
    const auto summary_path = resolve(config.output.summary_path, output_dir);
    backaction::emit_trajectory(outcome.trajectory, config.dim == 2, trajectory_path);
    backaction::emit_summary(outcome, summary_path);

    if (!quiet) {
        std::printf("%s n=%d best_value=%.12g evaluations=%lld converged=%s\n",
                    std::string(backaction::to_string(outcome.mode)).c_str(), outcome.n, outcome.result.best_value,
                    static_cast<long long>(outcome.result.evaluations), outcome.result.converged ? "true" : "false");
        std::printf("trajectory: %s\nsummary: %s\n", trajectory_path.string().c_str(),
                    summary_path.string().c_str());
    }
    return 0;
}

int validate(const std::string& config_path) {
    const auto config = backaction::load_scenario(config_path);
    std::printf("ok: mode=%s dim=%d n_measurements=%d\n", std::string(backaction::to_string(config.mode)).c_str(),
                config.dim, config.n_measurements);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum control by non-selective measurements"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    auto* run_cmd = app.add_subcommand("run", "Execute a scenario and write trajectory and summary files");
    run_cmd->add_option("config", config_path, "Scenario document (JSON)")->required();
    run_cmd->add_option("--output-dir", output_dir, "Directory for relative output paths");
    run_cmd->add_option("--seed", seed, "Override optimizer.seed");
    run_cmd->add_flag("--quiet", quiet, "Suppress the result line");

    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario without running it");
    validate_cmd->add_option("config", config_path, "Scenario document (JSON)")->required();

    app.add_subcommand("version", "Print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (run_cmd->parsed()) return run(config_path, output_dir, seed, quiet);
        if (validate_cmd->parsed()) return validate(config_path);
        std::printf("backaction %s\n", backaction::kVersion);
        return 0;
    } catch (const backaction::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
