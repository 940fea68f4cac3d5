#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

#include "specamp/experiments.hpp"
#include "specamp/version.hpp"

// Experiment driver: run / validate / replay / list-experiments. All
// numeric output goes to CSV files under the run directory; stdout carries
// progress and summaries only.
int main(int argc, char** argv) {
    CLI::App app{"specamp: stochastic amplifier simulator and critical-coupling estimator"};
    app.set_version_flag("--version", specamp::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, manifest_path;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    int workers = 0;

    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");
    run->add_option("--seed", seed_override, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--workers", workers,
                    "worker threads (overrides config; 0 = SPECAMP_WORKERS or hardware)");

    auto* validate = app.add_subcommand("validate", "validate a config file");
    validate->add_option("--config", config_path, "experiment configuration (JSON)")->required();

    auto* rep = app.add_subcommand("replay", "re-run a finished experiment and verify checksums");
    rep->add_option("--manifest", manifest_path, "manifest.txt of a finished run")->required();
    rep->add_option("--out", out_dir, "output directory for the re-run")->required();

    app.add_subcommand("list-experiments", "list the named experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-experiments")) {
            for (const auto& name : specamp::experiment_names())
                std::cout << name << '\n';
            return 0;
        }
        if (app.got_subcommand("validate")) {
            const auto report = specamp::validate_config_file(config_path);
            if (!report.ok) {
                for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
                return 1;
            }
            std::cout << "config ok; " << report.defaulted.size() << " defaulted field(s)\n";
            for (const auto& d : report.defaulted) std::cout << "  default: " << d << '\n';
            return 0;
        }
        if (app.got_subcommand("run")) {
            specamp::ExperimentConfig config = specamp::load_config(config_path);
            if (seed_given) config.seed = seed_override;
            if (workers > 0) config.workers = workers;
            const std::string dir = specamp::run_experiment(config, out_dir);
            std::cout << "run complete: " << dir << '\n';
            return 0;
        }
        if (app.got_subcommand("replay")) {
            const auto result = specamp::replay(manifest_path, out_dir);
            for (const auto& f : result.tampered)
                std::cerr << "tampered since recording: " << f << '\n';
            for (const auto& f : result.mismatches)
                std::cerr << "replay mismatch: " << f << '\n';
            if (result.tampered.empty() && result.mismatches.empty()) {
                std::cout << "replay verified: " << result.out_dir << '\n';
                return 0;
            }
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
