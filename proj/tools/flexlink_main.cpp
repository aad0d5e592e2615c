#include "flexlink/scenario.hpp"

#include <CLI11.hpp>

#include <string>

int main(int argc, char** argv) {
    CLI::App app{"One-link flexible manipulator simulation and implicit force control"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    bool sweep_all = false;
    bool seed_constants = false;

    CLI::App* run = app.add_subcommand("run", "Run a scenario file and write CSV outputs");
    run->add_option("config", config_path, "Scenario file")->required();
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_flag("--sweep", sweep_all, "Expand the [sweep] axes and run every combination");
    run->add_flag("--seed-constants", seed_constants,
                  "Only compute and write the modal constants table");

    std::string verify_dir;
    CLI::App* verify = app.add_subcommand("verify", "Re-check run outputs against the "
                                                    "closed-loop properties");
    verify->add_option("dir", verify_dir, "Directory with log.csv and summary.csv")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return flexlink::run_command(config_path, out_dir, sweep_all, seed_constants);
    return flexlink::verify_command(verify_dir);
}
