#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specamp/evolve.hpp"
#include "specamp/grid.hpp"
#include "specamp/modal.hpp"
#include "specamp/potential.hpp"

namespace specamp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One experiment description, read from a JSON file. Every field except the
// experiment name and the seed has a documented default; defaults taken are
// recorded in `defaulted` so a run is always fully reproducible from its
// manifest.
struct ExperimentConfig {
    std::string experiment;

    int dim = 1;
    std::vector<double> side_lengths{1.0};
    std::vector<int> points{64};

    double t_end = 1.0;
    int n_steps = 128;

    std::string recipe_name = "uniform";
    double hotspot_sigma = 0.12;
    std::vector<double> hotspot_speed{0.35, 0.0, 0.0};
    std::vector<double> hotspot_center{0.25, 0.0, 0.0};

    struct MassEntry {
        bool straight = false;  // 1/|m| = 0, no kinetic term
        double re = 1.0, im = 0.0;
        std::string label() const;
    };
    std::vector<MassEntry> masses{{false, 1.0, 0.0}};

    std::string potential_kind = "zero";
    double correlation_length = 0.2;
    double correlation_time = 1.0;
    double amplitude = 0.5;
    int n_potentials = 3;  // realizations for no-effect style experiments

    std::vector<int> qs{1};
    std::vector<double> lambdas;     // empty + lambda_auto: derive from lambda_q
    bool lambda_auto = false;
    int lambda_auto_count = 9;
    double lambda_auto_span = 0.5;   // +- span * lambda_q

    int n_samples = 10000;
    int n_outer = 32;
    int n_inner = 256;
    int n_paths = 10000;
    std::vector<double> radii{2.0, 3.0, 4.0, 5.0, 6.0};

    double eta_max = 48.0;
    int n_eta = 512;
    double mollifier_width = 0.25;

    int anneal_knots = 32;
    int anneal_restarts = 10;
    int anneal_iters = 3000;

    std::vector<int> probes;  // flat grid indices; empty = recipe defaults

    std::uint64_t seed = 0;
    std::string out_dir = "runs";
    int workers = 0;

    std::vector<std::string> defaulted;

    // domain object factories
    TorusGrid make_grid() const;
    TimeGrid make_time_grid() const;
    ModalRecipe make_recipe() const;
    PotentialSpec make_potential_spec(std::uint64_t realization_seed) const;
    Mass make_mass(const MassEntry& e) const;
    std::vector<int> resolve_probes(const TorusGrid& grid) const;

    // canonical JSON of the resolved configuration (defaults filled in)
    std::string to_resolved_json() const;
};

// Parses config text; throws ConfigError with a line-level message on
// malformed JSON and a dotted-path message on unknown or invalid fields.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct ValidationReport {
    bool ok = false;
    std::vector<std::string> errors;
    std::vector<std::string> defaulted;
};

// Non-throwing validation entry point for the CLI.
ValidationReport validate_config_file(const std::string& path);

}  // namespace specamp
