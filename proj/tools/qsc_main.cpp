// Copyright 2026 The QSC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qsc/errors.hpp"
#include "qsc/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simulated-cooling experiments"};
    app.set_version_flag("--version", std::string("qsc ") + qsc::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    for (const char* name : {"fig1", "grover", "clock", "prob", "bounds", "spectrum"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config; omitted keys take their defaults");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--out", out_dir, "output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : qsc::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        nlohmann::json config;
        std::string base_dir;
        if (!config_path.empty()) {
            config = qsc::load_config_file(config_path);
            base_dir = std::filesystem::path(config_path).parent_path().string();
        }
        const qsc::ExperimentOutput out = qsc::run_command(command, config, seed, base_dir);
        for (const auto& path : qsc::write_output(out, out_dir)) {
            std::cout << path << "\n";
        }
        if (out.summary.contains("ok") && !out.summary["ok"].get<bool>()) {
            std::cerr << command << ": violations found, see " << out_dir << "\n";
        }
        return out.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "qsc " << command << ": " << e.what() << "\n";
        return qsc::exit_code_for(e);
    }
}
