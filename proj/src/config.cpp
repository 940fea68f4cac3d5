#include "specamp/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "specamp/experiments.hpp"

namespace specamp {

namespace {

using json = nlohmann::ordered_json;

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key))
            throw ConfigError("config: unknown key '" +
                              (where.empty() ? key : where + "." + key) + "'");
    }
}

template <typename T>
T get_or_default(const json& obj, const std::string& where, const std::string& key,
                 const T& fallback, std::vector<std::string>& defaulted) {
    const std::string dotted = where.empty() ? key : where + "." + key;
    if (!obj.contains(key)) {
        defaulted.push_back(dotted);
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + dotted + "': " + e.what());
    }
}

}  // namespace

std::string ExperimentConfig::MassEntry::label() const {
    if (straight) return "straight";
    std::ostringstream os;
    os << re;
    if (im != 0.0) os << (im > 0 ? "+" : "") << im << "i";
    return os.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error at line " +
                          std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    check_keys(root, "",
               {"experiment", "grid", "time", "recipe", "masses", "potential", "q",
                "lambda", "samples", "gsupport", "optimize", "probes", "seed", "out",
                "workers"});

    ExperimentConfig c;
    auto& dflt = c.defaulted;

    if (!root.contains("experiment"))
        throw ConfigError("config: missing mandatory field 'experiment'");
    c.experiment = root.at("experiment").get<std::string>();
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("config: unknown experiment '" + c.experiment +
                          "' (known: " + known + ")");
    }

    if (!root.contains("seed"))
        throw ConfigError("config: missing mandatory field 'seed'");
    c.seed = root.at("seed").get<std::uint64_t>();

    const json grid = root.value("grid", json::object());
    check_keys(grid, "grid", {"dim", "side_lengths", "points"});
    c.dim = get_or_default(grid, "grid", "dim", c.dim, dflt);
    c.side_lengths = get_or_default(grid, "grid", "side_lengths", c.side_lengths, dflt);
    c.points = get_or_default(grid, "grid", "points", c.points, dflt);

    const json time = root.value("time", json::object());
    check_keys(time, "time", {"t_end", "n_steps"});
    c.t_end = get_or_default(time, "time", "t_end", c.t_end, dflt);
    c.n_steps = get_or_default(time, "time", "n_steps", c.n_steps, dflt);

    const json recipe = root.value("recipe", json::object());
    check_keys(recipe, "recipe", {"name", "sigma", "speed", "center"});
    c.recipe_name = get_or_default(recipe, "recipe", "name", c.recipe_name, dflt);
    c.hotspot_sigma = get_or_default(recipe, "recipe", "sigma", c.hotspot_sigma, dflt);
    c.hotspot_speed = get_or_default(recipe, "recipe", "speed", c.hotspot_speed, dflt);
    c.hotspot_center = get_or_default(recipe, "recipe", "center", c.hotspot_center, dflt);
    if (c.recipe_name != "uniform" && c.recipe_name != "plane-wave-pair" &&
        c.recipe_name != "moving-hotspot")
        throw ConfigError("config: unknown recipe '" + c.recipe_name +
                          "' (known: uniform, plane-wave-pair, moving-hotspot)");

    if (root.contains("masses")) {
        c.masses.clear();
        for (const auto& m : root.at("masses")) {
            ExperimentConfig::MassEntry e;
            if (m.is_string()) {
                const std::string s = m.get<std::string>();
                if (s != "straight" && s != "none")
                    throw ConfigError("config: masses entries are numbers, [re,im] pairs, or \"straight\"");
                e.straight = true;
            } else if (m.is_number()) {
                e.re = m.get<double>();
                e.im = 0.0;
            } else if (m.is_array() && m.size() == 2) {
                e.re = m.at(0).get<double>();
                e.im = m.at(1).get<double>();
            } else {
                throw ConfigError("config: masses entries are numbers, [re,im] pairs, or \"straight\"");
            }
            c.masses.push_back(e);
        }
        if (c.masses.empty()) throw ConfigError("config: masses must not be empty");
    } else {
        dflt.push_back("masses");
    }

    const json pot = root.value("potential", json::object());
    check_keys(pot, "potential",
               {"kind", "correlation_length", "correlation_time", "amplitude",
                "realizations"});
    c.potential_kind = get_or_default(pot, "potential", "kind", c.potential_kind, dflt);
    c.correlation_length =
        get_or_default(pot, "potential", "correlation_length", c.correlation_length, dflt);
    c.correlation_time =
        get_or_default(pot, "potential", "correlation_time", c.correlation_time, dflt);
    c.amplitude = get_or_default(pot, "potential", "amplitude", c.amplitude, dflt);
    c.n_potentials = get_or_default(pot, "potential", "realizations", c.n_potentials, dflt);
    if (c.potential_kind != "zero" && c.potential_kind != "frozen-gaussian" &&
        c.potential_kind != "time-dependent-gaussian")
        throw ConfigError("config: unknown potential kind '" + c.potential_kind +
                          "' (known: zero, frozen-gaussian, time-dependent-gaussian)");

    if (root.contains("q"))
        c.qs = root.at("q").get<std::vector<int>>();
    else
        dflt.push_back("q");

    if (root.contains("lambda")) {
        const json& l = root.at("lambda");
        if (l.is_array()) {
            c.lambdas = l.get<std::vector<double>>();
        } else if (l.is_object() && l.contains("auto_around_lambda_q")) {
            const json a = l.at("auto_around_lambda_q");
            check_keys(a, "lambda.auto_around_lambda_q", {"count", "span"});
            c.lambda_auto = true;
            c.lambda_auto_count =
                get_or_default(a, "lambda.auto_around_lambda_q", "count",
                               c.lambda_auto_count, dflt);
            c.lambda_auto_span =
                get_or_default(a, "lambda.auto_around_lambda_q", "span",
                               c.lambda_auto_span, dflt);
        } else {
            throw ConfigError(
                "config: 'lambda' is a list or {\"auto_around_lambda_q\": {count, span}}");
        }
    } else {
        dflt.push_back("lambda");
        c.lambda_auto = true;
    }

    const json samples = root.value("samples", json::object());
    check_keys(samples, "samples",
               {"n_samples", "n_outer", "n_inner", "n_paths", "radii"});
    c.n_samples = get_or_default(samples, "samples", "n_samples", c.n_samples, dflt);
    c.n_outer = get_or_default(samples, "samples", "n_outer", c.n_outer, dflt);
    c.n_inner = get_or_default(samples, "samples", "n_inner", c.n_inner, dflt);
    c.n_paths = get_or_default(samples, "samples", "n_paths", c.n_paths, dflt);
    c.radii = get_or_default(samples, "samples", "radii", c.radii, dflt);

    const json gs = root.value("gsupport", json::object());
    check_keys(gs, "gsupport", {"eta_max", "n_eta", "mollifier_width"});
    c.eta_max = get_or_default(gs, "gsupport", "eta_max", c.eta_max, dflt);
    c.n_eta = get_or_default(gs, "gsupport", "n_eta", c.n_eta, dflt);
    c.mollifier_width =
        get_or_default(gs, "gsupport", "mollifier_width", c.mollifier_width, dflt);

    const json opt = root.value("optimize", json::object());
    check_keys(opt, "optimize", {"knots", "restarts", "iters"});
    c.anneal_knots = get_or_default(opt, "optimize", "knots", c.anneal_knots, dflt);
    c.anneal_restarts = get_or_default(opt, "optimize", "restarts", c.anneal_restarts, dflt);
    c.anneal_iters = get_or_default(opt, "optimize", "iters", c.anneal_iters, dflt);

    if (root.contains("probes"))
        c.probes = root.at("probes").get<std::vector<int>>();
    else
        dflt.push_back("probes");

    c.out_dir = get_or_default(root, "", "out", c.out_dir, dflt);
    c.workers = get_or_default(root, "", "workers", c.workers, dflt);

    // cross-field validation
    if (static_cast<int>(c.side_lengths.size()) != c.dim ||
        static_cast<int>(c.points.size()) != c.dim)
        throw ConfigError("config: grid.side_lengths and grid.points must have 'dim' entries");
    for (int q : c.qs)
        if (q < 1) throw ConfigError("config: q entries must be positive integers");
    for (double l : c.lambdas)
        if (l < 0.0) throw ConfigError("config: lambda entries must be >= 0");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ValidationReport validate_config_file(const std::string& path) {
    ValidationReport rep;
    try {
        const ExperimentConfig c = load_config(path);
        rep.ok = true;
        rep.defaulted = c.defaulted;
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.errors.push_back(e.what());
    }
    return rep;
}

TorusGrid ExperimentConfig::make_grid() const {
    return TorusGrid::make(dim, side_lengths, points);
}

TimeGrid ExperimentConfig::make_time_grid() const {
    return TimeGrid::make(t_end, n_steps);
}

ModalRecipe ExperimentConfig::make_recipe() const {
    if (recipe_name == "uniform") return ModalRecipe::uniform();
    if (recipe_name == "plane-wave-pair") return ModalRecipe::plane_wave_pair();
    std::array<double, 3> v{0, 0, 0}, x0{0, 0, 0};
    for (std::size_t a = 0; a < hotspot_speed.size() && a < 3; ++a) v[a] = hotspot_speed[a];
    for (std::size_t a = 0; a < hotspot_center.size() && a < 3; ++a) x0[a] = hotspot_center[a];
    return ModalRecipe::moving_hotspot(hotspot_sigma, v, x0);
}

PotentialSpec ExperimentConfig::make_potential_spec(std::uint64_t realization_seed) const {
    if (potential_kind == "zero") return PotentialSpec::zero();
    if (potential_kind == "frozen-gaussian")
        return PotentialSpec::frozen_gaussian(correlation_length, amplitude, realization_seed);
    return PotentialSpec::time_dependent_gaussian(correlation_length, correlation_time,
                                                  amplitude, realization_seed);
}

Mass ExperimentConfig::make_mass(const MassEntry& e) const {
    if (e.straight) return std::nullopt;
    return ComplexMass(cdouble(e.re, e.im));
}

std::vector<int> ExperimentConfig::resolve_probes(const TorusGrid& grid) const {
    if (!probes.empty()) {
        for (int p : probes)
            if (p < 0 || p >= grid.total_points())
                throw ConfigError("config: probe index out of range");
        return probes;
    }
    // default: four spread grid points plus the hotspot track endpoint
    std::vector<int> out;
    const int n0 = grid.points(0);
    for (int frac : {0, 1, 2, 3}) {
        std::array<int, 3> idx{(n0 * frac) / 4, 0, 0};
        out.push_back(grid.flat(idx));
    }
    std::array<double, 3> tail{0.375 * grid.side(0), 0.0, 0.0};
    if (recipe_name == "moving-hotspot") {
        const auto pos = make_recipe().track_position(t_end);
        for (int a = 0; a < grid.dim(); ++a) tail[a] = pos[a];
    }
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
        const int i = static_cast<int>(std::lround(grid.wrap(a, tail[a]) / grid.spacing(a)));
        idx[a] = i % grid.points(a);
    }
    const int last = grid.flat(idx);
    if (std::find(out.begin(), out.end(), last) == out.end()) out.push_back(last);
    return out;
}

std::string ExperimentConfig::to_resolved_json() const {
    json root;
    root["experiment"] = experiment;
    root["seed"] = seed;
    root["grid"] = {{"dim", dim}, {"side_lengths", side_lengths}, {"points", points}};
    root["time"] = {{"t_end", t_end}, {"n_steps", n_steps}};
    root["recipe"] = {{"name", recipe_name},
                      {"sigma", hotspot_sigma},
                      {"speed", hotspot_speed},
                      {"center", hotspot_center}};
    json ms = json::array();
    for (const auto& m : masses) {
        if (m.straight)
            ms.push_back("straight");
        else
            ms.push_back(json::array({m.re, m.im}));
    }
    root["masses"] = ms;
    root["potential"] = {{"kind", potential_kind},
                         {"correlation_length", correlation_length},
                         {"correlation_time", correlation_time},
                         {"amplitude", amplitude},
                         {"realizations", n_potentials}};
    root["q"] = qs;
    if (lambda_auto)
        root["lambda"] = {{"auto_around_lambda_q",
                           {{"count", lambda_auto_count}, {"span", lambda_auto_span}}}};
    else
        root["lambda"] = lambdas;
    root["samples"] = {{"n_samples", n_samples},
                       {"n_outer", n_outer},
                       {"n_inner", n_inner},
                       {"n_paths", n_paths},
                       {"radii", radii}};
    root["gsupport"] = {{"eta_max", eta_max},
                        {"n_eta", n_eta},
                        {"mollifier_width", mollifier_width}};
    root["optimize"] = {{"knots", anneal_knots},
                        {"restarts", anneal_restarts},
                        {"iters", anneal_iters}};
    root["probes"] = probes;
    root["out"] = out_dir;
    root["workers"] = workers;
    return root.dump(2) + "\n";
}

}  // namespace specamp
