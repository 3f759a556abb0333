// spinbus CLI: thin front end over the C API. Parses flags, merges them into
// the config document, runs the experiment and prints the summary JSON.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinbus/spinbus.h"

namespace {

int execute(const std::string& config_path, std::string out_dir, bool out_given, long seed,
            bool strict, int threads, bool sweep_required) {
    std::ifstream f(config_path);
    if (!f) {
        std::cerr << "{\"error\":\"cannot open config: " << config_path << "\",\"code\":2}\n";
        return 2;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"config is not valid JSON\",\"code\":2}\n";
        return 2;
    }
    if (seed >= 0) cfg["seed"] = seed;
    if (!out_given && cfg.contains("output_dir") && cfg["output_dir"].is_string())
        out_dir = cfg["output_dir"].get<std::string>();
    if (sweep_required && !cfg.contains("sweep")) {
        std::cerr << "{\"error\":\"sweep requires a 'sweep' axis list in the config\",\"code\":2}\n";
        return 2;
    }
    if (!sweep_required && cfg.contains("sweep")) cfg.erase("sweep");

    sb_result* res = nullptr;
    const sb_status st = sb_run_config(cfg.dump().c_str(), out_dir.c_str(), strict ? 1 : 0,
                                       threads, &res);
    if (res) {
        if (st == SB_OK || st == SB_WARN_BOUNDARY)
            std::cout << sb_result_summary_json(res) << '\n';
        else
            std::cerr << sb_result_summary_json(res) << '\n';
        sb_result_free(res);
    }
    return static_cast<int>(st);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinbus: spin-chain bus simulator and architecture planner"};
    app.set_version_flag("--version", std::string(sb_version()));
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    long seed = -1;
    bool strict = false;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config JSON path")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "seed override (integer)");
        cmd->add_flag("--strict", strict, "escalate boundary-optimum warnings to exit 4");
        cmd->add_option("--threads", threads, "sweep worker threads (0 = auto)");
    };
    auto* run = app.add_subcommand("run", "run a single experiment");
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "run a sweep over config axes");
    add_common(sweep);
    auto* validate = app.add_subcommand("validate", "check a config against the schema");
    validate->add_option("--config", config_path, "config JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "{\"error\":\"cannot open config\",\"code\":2}\n";
            return 2;
        }
        std::stringstream buf;
        buf << f.rdbuf();
        sb_result* res = nullptr;
        const sb_status st = sb_validate_config(buf.str().c_str(), &res);
        if (res) {
            if (st != SB_OK) std::cerr << sb_result_summary_json(res) << '\n';
            sb_result_free(res);
        }
        if (st == SB_OK) std::cout << "{\"ok\":true}\n";
        return static_cast<int>(st);
    }
    const auto* active = sweep->parsed() ? sweep : run;
    const bool out_given = active->count("--out") > 0;
    return execute(config_path, out_dir, out_given, seed, strict, threads, sweep->parsed());
}
