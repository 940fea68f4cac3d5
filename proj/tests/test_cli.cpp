#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <filesystem>
#include <map>
#include <sstream>
#include <fstream>

#include "specamp/config.hpp"
#include "specamp/csv.hpp"
#include "specamp/experiments.hpp"
#include "specamp/io.hpp"
#include "specamp/manifest.hpp"

using namespace specamp;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("specamp_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config: mandatory fields, defaults report, unknown keys") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"experiment":"uniform-oracle"})"),
                         doctest::Contains("seed"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"seed": 1})"),
                         doctest::Contains("experiment"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"experiment":"no-such-thing","seed":1})"),
        doctest::Contains("unknown experiment"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"experiment":"uniform-oracle","seed":1,"grid":{"dims":2}})"),
        doctest::Contains("grid.dims"), ConfigError);

    const ExperimentConfig c =
        parse_config_text(R"({"experiment":"uniform-oracle","seed":42})");
    CHECK(c.seed == 42);
    CHECK(c.defaulted.size() >= 20);  // default-everything run

    // parse errors carry a line number
    try {
        parse_config_text("{\n  \"experiment\": \"uniform-oracle\",\n  bad\n}");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("config: masses, lambda forms, probe resolution") {
    const ExperimentConfig c = parse_config_text(R"({
        "experiment": "prop1-sweep",
        "seed": 7,
        "masses": [1.0, [0.0, 1.0], "straight"],
        "lambda": {"auto_around_lambda_q": {"count": 5, "span": 0.4}},
        "recipe": {"name": "moving-hotspot", "sigma": 0.12,
                    "speed": [0.35, 0, 0], "center": [0.25, 0, 0]}
    })");
    REQUIRE(c.masses.size() == 3);
    CHECK_FALSE(c.masses[0].straight);
    CHECK(c.masses[1].im == 1.0);
    CHECK(c.masses[2].straight);
    CHECK(c.lambda_auto);
    CHECK(c.lambda_auto_count == 5);

    const TorusGrid grid = c.make_grid();
    const auto probes = c.resolve_probes(grid);
    CHECK(probes.size() == 5);
    // the last default probe is the grid node nearest the hotspot endpoint
    CHECK(std::abs(grid.coord(0, probes.back()) - 0.6) <= 0.5 * grid.spacing(0));

    CHECK_THROWS_AS(
        parse_config_text(R"({"experiment":"prop1-sweep","seed":1,"lambda":[-0.5]})"),
        ConfigError);
}

TEST_CASE("config: resolved json round-trips through the parser") {
    const ExperimentConfig c = parse_config_text(R"({
        "experiment": "uniform-oracle",
        "seed": 9,
        "q": [1, 2],
        "lambda": [0.2, 0.5],
        "samples": {"n_samples": 500}
    })");
    const ExperimentConfig back = parse_config_text(c.to_resolved_json());
    CHECK(back.experiment == c.experiment);
    CHECK(back.seed == c.seed);
    CHECK(back.qs == c.qs);
    CHECK(back.lambdas == c.lambdas);
    CHECK(back.n_samples == 500);
    CHECK(back.defaulted.empty());  // everything is explicit now
}

TEST_CASE("csv: quoting and layout") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");

    const std::string dir = temp_dir("csv");
    {
        CsvWriter w(dir + "/t.csv", {"a", "b"});
        w.row({"1", "x,y"});
        w.row_values({0.5, 2.0});
        CHECK_THROWS(w.row({"only-one"}));
    }
    CHECK(read_file(dir + "/t.csv") == "a,b\n1,\"x,y\"\n0.5,2\n");
}

TEST_CASE("io: trajectory, probe series, and field export") {
    const std::string dir = temp_dir("io");
    const TorusGrid g = make_torus_grid(1, {1.0}, {8});
    const TimeGrid tg = TimeGrid::make(1.0, 4);

    MultiplicativeTerm term;
    term.slices.assign(tg.n_nodes(),
                       std::vector<cdouble>(g.total_points(), cdouble(0.5, 0.0)));
    {
        TrajectoryCsv trajectory(dir + "/traj.csv", g);
        ProbeSeriesCsv series(dir + "/probe.csv", 2);
        evolve_field(g, tg, std::nullopt, term, [&](const FieldState& st) {
            trajectory(st);
            series(st);
        });
    }
    const std::string traj = read_file(dir + "/traj.csv");
    CHECK(traj.rfind("time,log_offset,re_0,im_0", 0) == 0);
    // header + initial state + one row per step
    CHECK(std::count(traj.begin(), traj.end(), '\n') == 1 + tg.n_nodes());
    const std::string probe = read_file(dir + "/probe.csv");
    CHECK(probe.rfind("time,re,im,log_offset", 0) == 0);

    ScalarTimeField f;
    f.frozen = true;
    f.slices.assign(1, std::vector<double>(g.total_points(), 1.5));
    write_scalar_field_csv(dir + "/field.csv", g, tg, f);
    const std::string field = read_file(dir + "/field.csv");
    CHECK(field.rfind("time,x0,value", 0) == 0);
    CHECK(std::count(field.begin(), field.end(), '\n') == 1 + g.total_points());
}

TEST_CASE("manifest: checksums, verify, tamper detection") {
    const std::string dir = temp_dir("manifest");
    write_file(dir, "data.csv", "a,b\n1,2\n");
    RunManifest m;
    m.set("experiment", "demo");
    m.add_file(dir, "data.csv");
    m.write(dir + "/manifest.txt");

    const RunManifest back = RunManifest::read(dir + "/manifest.txt");
    CHECK(*back.find("experiment") == "demo");
    CHECK(back.verify(dir).empty());

    write_file(dir, "data.csv", "a,b\n1,3\n");
    const auto bad = back.verify(dir);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "data.csv");
}

TEST_CASE("run_experiment: deterministic bytes and replay verification") {
    ExperimentConfig c = parse_config_text(R"({
        "experiment": "uniform-oracle",
        "seed": 31,
        "q": [1],
        "lambda": [0.2, 0.5],
        "grid": {"dim": 1, "side_lengths": [1.0], "points": [32]},
        "time": {"t_end": 1.0, "n_steps": 32},
        "samples": {"n_samples": 400}
    })");

    const std::string out1 = temp_dir("run1");
    const std::string out2 = temp_dir("run2");
    const std::string dir1 = run_experiment(c, out1);
    const std::string dir2 = run_experiment(c, out2);
    CHECK(read_file(dir1 + "/uniform_oracle.csv") ==
          read_file(dir2 + "/uniform_oracle.csv"));

    // replay from the manifest reproduces byte-identical outputs
    const std::string out3 = temp_dir("run3");
    const ReplayResult rep = replay(dir1 + "/manifest.txt", out3);
    CHECK(rep.tampered.empty());
    CHECK(rep.mismatches.empty());

    // a tampered CSV is named by the pre-verification
    std::ofstream(dir1 + "/uniform_oracle.csv", std::ios::app) << "tampered\n";
    const std::string out4 = temp_dir("run4");
    const ReplayResult rep2 = replay(dir1 + "/manifest.txt", out4);
    REQUIRE(rep2.tampered.size() == 1);
    CHECK(rep2.tampered[0] == "uniform_oracle.csv");
    CHECK(rep2.mismatches.empty());
}

TEST_CASE("experiment registry is exposed for the CLI") {
    const auto& names = experiment_names();
    CHECK(names.size() == 8);
    CHECK(names.front() == "uniform-oracle");
}

TEST_CASE("every named experiment runs end to end at smoke scale") {
    const std::string out = temp_dir("all_experiments");
    for (const auto& name : experiment_names()) {
        ExperimentConfig c = parse_config_text(R"({
            "experiment": ")" + name + R"(",
            "seed": 99,
            "grid": {"dim": 1, "side_lengths": [1.0], "points": [32]},
            "time": {"t_end": 1.0, "n_steps": 32},
            "recipe": {"name": "moving-hotspot", "sigma": 0.15,
                       "speed": [0.35, 0, 0], "center": [0.25, 0, 0]},
            "masses": [1.0, [0.0, 1.0]],
            "potential": {"kind": "frozen-gaussian", "correlation_length": 0.25,
                          "amplitude": 0.5, "realizations": 2},
            "q": [1],
            "lambda": {"auto_around_lambda_q": {"count": 3, "span": 0.4}},
            "samples": {"n_samples": 200, "n_outer": 4, "n_inner": 50,
                        "n_paths": 300, "radii": [2.0, 2.5, 3.0, 3.5]},
            "gsupport": {"eta_max": 40.0, "n_eta": 256, "mollifier_width": 0.25},
            "optimize": {"knots": 12, "restarts": 2, "iters": 150}
        })");
        INFO(name);
        const std::string dir = run_experiment(c, out);
        const RunManifest manifest = RunManifest::read(dir + "/manifest.txt");
        CHECK(manifest.verify(dir).empty());
        CHECK(manifest.files().size() >= 2);  // resolved config + data

        if (name == "prop1-sweep") {
            // the divergence flag transition is a function of lambda alone,
            // identical for every mass
            std::ifstream in(dir + "/prop1_sweep.csv");
            std::string line;
            std::getline(in, line);  // header
            std::map<std::string, std::string> flag_by_lambda;
            while (std::getline(in, line)) {
                std::vector<std::string> cells;
                std::stringstream ss(line);
                std::string cell;
                while (std::getline(ss, cell, ',')) cells.push_back(cell);
                REQUIRE(cells.size() == 7);
                const std::string key = cells[2];        // lambda
                const std::string flag = cells.back();   // diverged_flag
                auto [it, inserted] = flag_by_lambda.emplace(key, flag);
                if (!inserted) CHECK(it->second == flag);
            }
            CHECK(flag_by_lambda.size() == 3);  // one entry per swept lambda
        }
    }
}
