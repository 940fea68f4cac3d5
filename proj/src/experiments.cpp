#include "specamp/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "specamp/csv.hpp"
#include "specamp/feynman_kac.hpp"
#include "specamp/gsupport.hpp"
#include "specamp/io.hpp"
#include "specamp/moments.hpp"
#include "specamp/version.hpp"

namespace specamp {

namespace fs = std::filesystem;

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "uniform-oracle", "straight-oracle", "slope-lemma2", "mu-optimize",
        "g-support",      "fk-crosscheck",   "prop1-sweep",  "prop2-joint"};
    return names;
}

namespace {

struct RunContext {
    const ExperimentConfig& cfg;
    TorusGrid grid;
    TimeGrid tg;
    ModalSet modal;
    std::vector<int> probes;
    std::string dir;
    RunManifest manifest;
    std::vector<std::string> files;

    explicit RunContext(const ExperimentConfig& c)
        : cfg(c),
          grid(c.make_grid()),
          tg(c.make_time_grid()),
          modal(synthesize_modal_set(grid, tg, c.make_recipe())),
          probes(c.resolve_probes(grid)) {}

    CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
        files.push_back(name);
        return CsvWriter(dir + "/" + name, header);
    }

    double mu_hat() {
        if (mu_hat_ < 0.0) {
            GammaField gf(modal);
            mu_hat_ = separable_mu(gf).mu;
        }
        return mu_hat_;
    }

    std::vector<double> lambda_grid(int q) {
        if (!cfg.lambda_auto) return cfg.lambdas;
        const double lq = 1.0 / (q * mu_hat());
        std::vector<double> out;
        const int n = std::max(cfg.lambda_auto_count, 2);
        for (int i = 0; i < n; ++i) {
            const double f =
                1.0 - cfg.lambda_auto_span +
                2.0 * cfg.lambda_auto_span * static_cast<double>(i) / (n - 1);
            out.push_back(lq * f);
        }
        return out;
    }

  private:
    double mu_hat_ = -1.0;
};

std::string mass_label(const ExperimentConfig::MassEntry& e) { return e.label(); }

void run_uniform_oracle(RunContext& ctx) {
    auto csv = ctx.csv("uniform_oracle.csv",
                       {"q", "lambda", "q_lambda_t", "mc_mean", "mc_std_error",
                        "exact", "z_score", "diverged_flag"});
    const PotentialField rho =
        synthesize_potential(ctx.grid, ctx.tg, PotentialSpec::zero());
    const double t = ctx.tg.t_end();
    const double mu = ctx.mu_hat();
    const Mass m = ctx.cfg.make_mass(ctx.cfg.masses.front());
    for (int q : ctx.cfg.qs) {
        for (double lambda : ctx.lambda_grid(q)) {
            const MomentEstimate est =
                mc_moment(q, lambda, m, ctx.modal, rho, ctx.probes.front(),
                          ctx.cfg.n_samples, ctx.cfg.seed,
                          {.workers = ctx.cfg.workers}, mu);
            const double qlt = q * lambda * t;
            const double exact = qlt < 1.0 ? 1.0 / (1.0 - qlt) : INFINITY;
            const double z = est.std_error > 0.0 ? (est.mean - exact) / est.std_error : 0.0;
            csv.row_values({static_cast<double>(q), lambda, qlt, est.mean,
                            est.std_error, exact, z,
                            est.diverged_flag ? 1.0 : 0.0});
        }
    }
    ctx.manifest.set_double("derived.mu_hat", mu);
}

void run_straight_oracle(RunContext& ctx) {
    auto csv = ctx.csv("straight_oracle.csv",
                       {"q", "lambda", "q_lambda_mu1", "mc_mean", "mc_std_error",
                        "exact", "z_score"});
    const PotentialField rho =
        synthesize_potential(ctx.grid, ctx.tg, PotentialSpec::zero());
    const int probe = ctx.probes.front();
    // kinetic factors forced to identity: the straight-path regime
    const Mass none = std::nullopt;
    GammaField gf(ctx.modal);
    const PathPL path =
        PathPL::straight(ctx.grid, ctx.grid.point(probe), ctx.tg.t_end());
    const double mu1 = top_eig(gram_along_path(gf, path)).first;
    for (int q : ctx.cfg.qs) {
        for (double lambda : ctx.lambda_grid(q)) {
            const MomentEstimate est =
                mc_moment(q, lambda, none, ctx.modal, rho, probe, ctx.cfg.n_samples,
                          ctx.cfg.seed, {.workers = ctx.cfg.workers}, ctx.mu_hat());
            double exact;
            try {
                exact = exact_moment_straight(q, lambda, ctx.modal, probe);
            } catch (const MomentDivergence&) {
                exact = INFINITY;
            }
            const double z = est.std_error > 0.0 ? (est.mean - exact) / est.std_error : 0.0;
            csv.row_values({static_cast<double>(q), lambda, q * lambda * mu1,
                            est.mean, est.std_error, exact, z});
        }
    }
    ctx.manifest.set_double("derived.mu1_straight", mu1);
}

void run_slope_lemma2(RunContext& ctx) {
    auto csv = ctx.csv("slope_lemma2.csv",
                       {"mass", "rho", "q", "lambda", "slope", "target_qlH",
                        "rel_error", "r2_full"});
    const int probe = ctx.probes.front();
    GammaField gf(ctx.modal);
    Eigen::VectorXcd dir = Eigen::VectorXcd::Unit(ctx.modal.modes(), 0);
    const int q = ctx.cfg.qs.front();
    const double lambda = ctx.cfg.lambda_auto ? 1.0 : ctx.cfg.lambdas.front();

    std::vector<std::pair<std::string, PotentialField>> rhos;
    rhos.emplace_back("zero", synthesize_potential(ctx.grid, ctx.tg, PotentialSpec::zero()));
    if (ctx.cfg.potential_kind != "zero") {
        for (int r = 0; r < ctx.cfg.n_potentials; ++r) {
            const auto spec = ctx.cfg.make_potential_spec(
                splitmix64(ctx.cfg.seed ^ (0x9b5ULL + r)));
            rhos.emplace_back("seed" + std::to_string(r),
                              synthesize_potential(ctx.grid, ctx.tg, spec));
        }
    }
    for (const auto& me : ctx.cfg.masses) {
        const Mass m = ctx.cfg.make_mass(me);
        for (const auto& [tag, rho] : rhos) {
            const SlopeFit fit = growth_slope(dir, ctx.cfg.radii, q, lambda, m,
                                              ctx.modal, rho, probe);
            csv.row({mass_label(me), tag, std::to_string(q), format_double(lambda),
                     format_double(fit.slope), format_double(fit.target),
                     format_double(std::abs(fit.slope - fit.target) /
                                   std::max(fit.target, 1e-300)),
                     format_double(fit.r2)});
        }
    }
    ctx.manifest.set_double("derived.h_direction", h_direction(gf, dir).h);
}

void run_mu_optimize(RunContext& ctx) {
    GammaField gf(ctx.modal);
    PathSearchOptions popts;
    popts.seed = ctx.cfg.seed;
    popts.workers = ctx.cfg.workers;
    popts.n_knots = ctx.cfg.anneal_knots;
    popts.n_restarts = ctx.cfg.anneal_restarts;
    popts.n_iters = ctx.cfg.anneal_iters;
    SeparableOptions sopts;
    sopts.seed = ctx.cfg.seed;
    const CriticalCouplingReport rep =
        optimize_mu(gf, ctx.grid.point(ctx.probes.front()), MuMethod::Both,
                    ctx.cfg.qs, {}, popts, sopts);

    auto field_csv = ctx.csv("mu_straight_field.csv", {"point", "x0", "mu_straight"});
    for (int p = 0; p < ctx.grid.total_points(); ++p)
        field_csv.row_values({static_cast<double>(p), ctx.grid.point(p)[0],
                              rep.mu_straight[p]});

    auto lq_csv = ctx.csv("lambda_q.csv", {"q", "lambda_q"});
    for (const auto& [q, lq] : rep.lambda_q)
        lq_csv.row_values({static_cast<double>(q), lq});

    ctx.files.push_back("mu_report.txt");
    std::ofstream rep_out(ctx.dir + "/mu_report.txt");
    rep_out << "mu_opt = " << format_double(rep.mu_opt) << '\n'
            << "mu_separable = " << format_double(rep.mu_separable) << '\n'
            << "mu_path_search = " << format_double(rep.mu_path) << '\n'
            << "path_search_converged = " << (rep.path_converged ? "yes" : "no") << '\n'
            << "path_search_is_lower_bound = yes\n"
            << "mu_straight_max = " << format_double(rep.mu_straight_max) << '\n'
            << "method = " << rep.method << '\n';
    rep_out.close();

    ctx.manifest.set_double("derived.mu_hat", rep.mu_opt);
    for (const auto& [q, lq] : rep.lambda_q)
        ctx.manifest.set_double("derived.lambda_q.q" + std::to_string(q), lq);
}

void run_g_support(RunContext& ctx) {
    GammaField gf(ctx.modal);
    Eigen::VectorXcd dir = Eigen::VectorXcd::Unit(ctx.modal.modes(), 0);
    const Mass m = ctx.cfg.make_mass(ctx.cfg.masses.front());
    GSupportOptions opts;
    opts.eta_max = ctx.cfg.eta_max;
    opts.n_eta = ctx.cfg.n_eta;
    opts.mollifier_width = ctx.cfg.mollifier_width;
    opts.workers = ctx.cfg.workers;

    std::vector<std::pair<std::string, PotentialField>> rhos;
    rhos.emplace_back("zero", synthesize_potential(ctx.grid, ctx.tg, PotentialSpec::zero()));
    if (ctx.cfg.potential_kind != "zero") {
        rhos.emplace_back("rho",
                          synthesize_potential(ctx.grid, ctx.tg,
                                               ctx.cfg.make_potential_spec(ctx.cfg.seed)));
        ctx.files.push_back("rho_field.csv");
        write_scalar_field_csv(ctx.dir + "/rho_field.csv", ctx.grid, ctx.tg,
                               rhos.back().second.field());
    }

    auto summary = ctx.csv("g_support_summary.csv",
                           {"rho", "a", "b", "delta", "outside_mass_frac",
                            "right_edge", "edge_error"});
    for (const auto& [tag, rho] : rhos) {
        const GSupportReport rep =
            g_support_numeric(ctx.modal, dir, m, rho, ctx.probes.front(), opts);
        auto curve = ctx.csv("g_support_" + tag + ".csv", {"u", "g_abs"});
        for (std::size_t k = 0; k < rep.u.size(); ++k)
            curve.row_values({rep.u[k], rep.g_abs[k]});
        auto psi_csv = ctx.csv("psi_" + tag + ".csv", {"eta", "psi_re", "psi_im"});
        for (std::size_t j = 0; j < rep.eta.size(); ++j)
            psi_csv.row_values({rep.eta[j], rep.psi[j].real(), rep.psi[j].imag()});
        summary.row({tag, format_double(rep.a), format_double(rep.b),
                     format_double(rep.delta), format_double(rep.outside_mass_frac),
                     format_double(rep.right_edge),
                     format_double(std::abs(rep.right_edge - rep.b))});
    }
}

void run_fk_crosscheck(RunContext& ctx) {
    // purely dissipative mass: first imaginary entry, else gamma = 1
    double gamma = 1.0;
    for (const auto& me : ctx.cfg.masses)
        if (!me.straight && me.re == 0.0 && me.im > 0.0) {
            gamma = me.im;
            break;
        }
    const PotentialField rho = synthesize_potential(
        ctx.grid, ctx.tg,
        ctx.cfg.potential_kind == "zero"
            ? PotentialSpec::frozen_gaussian(ctx.cfg.correlation_length,
                                             ctx.cfg.amplitude, ctx.cfg.seed)
            : ctx.cfg.make_potential_spec(ctx.cfg.seed));
    const double y = 0.5;

    // spectral reference: heat semigroup with killing rate y*rho, which is
    // the Schrodinger form at m = i gamma, U := rho, eta = -i y
    const Mass m = ComplexMass::imaginary(gamma);
    ctx.files.push_back("spectral_trajectory.csv");
    ctx.files.push_back("spectral_probe_series.csv");
    TrajectoryCsv trajectory(ctx.dir + "/spectral_trajectory.csv", ctx.grid);
    ProbeSeriesCsv series(ctx.dir + "/spectral_probe_series.csv", ctx.probes.front());
    const FieldState psi = solve_schrodinger(ctx.grid, ctx.tg, m, rho.field(),
                                             cdouble(0.0, -y), PotentialField{},
                                             [&](const FieldState& st) {
                                                 trajectory(st);
                                                 series(st);
                                             });

    auto csv = ctx.csv("fk_crosscheck.csv",
                       {"probe", "fk_mean", "fk_std_error", "spectral", "z_score"});
    for (int probe : ctx.probes) {
        const FkEstimate fk =
            feynman_kac_psi(ctx.grid, ctx.tg, ctx.grid.point(probe), gamma, rho, y,
                            nullptr, ctx.cfg.n_paths, ctx.cfg.seed,
                            {.workers = ctx.cfg.workers});
        const double ref = psi.full_value(probe).real();
        const double z = fk.std_error > 0.0 ? (fk.mean - ref) / fk.std_error : 0.0;
        csv.row_values({static_cast<double>(probe), fk.mean, fk.std_error, ref, z});
    }
    ctx.manifest.set_double("derived.gamma", gamma);
    ctx.manifest.set_double("derived.weight_y", y);
}

void run_prop1_sweep(RunContext& ctx) {
    const double mu = ctx.mu_hat();
    const PotentialField rho = synthesize_potential(
        ctx.grid, ctx.tg,
        ctx.cfg.potential_kind == "zero" ? PotentialSpec::zero()
                                         : ctx.cfg.make_potential_spec(ctx.cfg.seed));
    const int q = ctx.cfg.qs.front();
    auto csv = ctx.csv("prop1_sweep.csv",
                       {"mass", "q", "lambda", "q_lambda_mu_hat", "mc_mean",
                        "mc_std_error", "diverged_flag"});
    for (const auto& me : ctx.cfg.masses) {
        const Mass m = ctx.cfg.make_mass(me);
        for (double lambda : ctx.lambda_grid(q)) {
            const MomentEstimate est =
                mc_moment(q, lambda, m, ctx.modal, rho, ctx.probes.front(),
                          ctx.cfg.n_samples, ctx.cfg.seed,
                          {.workers = ctx.cfg.workers}, mu);
            csv.row({mass_label(me), std::to_string(q), format_double(lambda),
                     format_double(q * lambda * mu), format_double(est.mean),
                     format_double(est.std_error), est.diverged_flag ? "1" : "0"});
        }
    }
    ctx.manifest.set_double("derived.mu_hat", mu);
    ctx.manifest.set_double("derived.lambda_q", 1.0 / (q * mu));
}

void run_prop2_joint(RunContext& ctx) {
    const double mu = ctx.mu_hat();
    const int q = ctx.cfg.qs.front();
    const double lambda_q = 1.0 / (q * mu);
    const Mass m = ctx.cfg.make_mass(ctx.cfg.masses.front());
    const PotentialSpec spec =
        ctx.cfg.potential_kind == "zero"
            ? PotentialSpec::frozen_gaussian(ctx.cfg.correlation_length,
                                             ctx.cfg.amplitude, ctx.cfg.seed)
            : ctx.cfg.make_potential_spec(ctx.cfg.seed);

    std::vector<double> running;
    const double lambda = 0.8 * lambda_q;
    const MomentEstimate est = mc_moment_joint(
        q, lambda, m, ctx.modal, spec, ctx.probes.front(), ctx.cfg.n_outer,
        ctx.cfg.n_inner, ctx.cfg.seed, {.workers = ctx.cfg.workers}, mu, &running);

    auto run_csv = ctx.csv("prop2_running_mean.csv", {"outer_sample", "running_mean"});
    for (std::size_t j = 0; j < running.size(); ++j)
        run_csv.row_values({static_cast<double>(j + 1), running[j]});

    double drift = 0.0;
    for (std::size_t j = running.size() / 2; j < running.size(); ++j)
        drift = std::max(drift, std::abs(running[j] - running.back()) /
                                    std::max(running.back(), 1e-300));

    const MomentEstimate below = mc_moment_joint(
        q, 0.9 * lambda_q, m, ctx.modal, spec, ctx.probes.front(), 4,
        std::max(25, ctx.cfg.n_inner / 8), ctx.cfg.seed + 1,
        {.workers = ctx.cfg.workers}, mu, nullptr);
    const MomentEstimate above = mc_moment_joint(
        q, 1.1 * lambda_q, m, ctx.modal, spec, ctx.probes.front(), 4,
        std::max(25, ctx.cfg.n_inner / 8), ctx.cfg.seed + 2,
        {.workers = ctx.cfg.workers}, mu, nullptr);

    auto csv = ctx.csv("prop2_joint.csv",
                       {"q", "lambda", "q_lambda_mu_hat", "mean", "std_error",
                        "running_drift_last_half", "diverged_flag"});
    csv.row_values({static_cast<double>(q), lambda, q * lambda * mu, est.mean,
                    est.std_error, drift, est.diverged_flag ? 1.0 : 0.0});
    csv.row_values({static_cast<double>(q), 0.9 * lambda_q, 0.9, below.mean,
                    below.std_error, 0.0, below.diverged_flag ? 1.0 : 0.0});
    csv.row_values({static_cast<double>(q), 1.1 * lambda_q, 1.1, above.mean,
                    above.std_error, 0.0, above.diverged_flag ? 1.0 : 0.0});
    ctx.manifest.set_double("derived.lambda_q", lambda_q);
}

}  // namespace

std::string run_experiment(const ExperimentConfig& config,
                           const std::string& out_override) {
    const auto t_start = std::chrono::steady_clock::now();

    RunContext ctx(config);
    const std::string base = out_override.empty() ? config.out_dir : out_override;
    ctx.dir = base + "/" + config.experiment;
    fs::create_directories(ctx.dir);

    ctx.manifest.set("artifact.version", kVersion);
    ctx.manifest.set("experiment", config.experiment);
    ctx.manifest.set("seed", std::to_string(config.seed));
    {
        std::ofstream cfg_out(ctx.dir + "/config.resolved.json");
        cfg_out << config.to_resolved_json();
    }
    ctx.files.push_back("config.resolved.json");
    for (const auto& d : config.defaulted)
        ctx.manifest.set("defaulted." + d, "yes");

    if (config.experiment == "uniform-oracle")
        run_uniform_oracle(ctx);
    else if (config.experiment == "straight-oracle")
        run_straight_oracle(ctx);
    else if (config.experiment == "slope-lemma2")
        run_slope_lemma2(ctx);
    else if (config.experiment == "mu-optimize")
        run_mu_optimize(ctx);
    else if (config.experiment == "g-support")
        run_g_support(ctx);
    else if (config.experiment == "fk-crosscheck")
        run_fk_crosscheck(ctx);
    else if (config.experiment == "prop1-sweep")
        run_prop1_sweep(ctx);
    else if (config.experiment == "prop2-joint")
        run_prop2_joint(ctx);
    else
        throw ConfigError("unknown experiment '" + config.experiment + "'");

    for (const auto& f : ctx.files) ctx.manifest.add_file(ctx.dir, f);
    const auto t_stop = std::chrono::steady_clock::now();
    ctx.manifest.set_double(
        "runtime.wall_seconds",
        std::chrono::duration<double>(t_stop - t_start).count());
    ctx.manifest.write(ctx.dir + "/manifest.txt");
    return ctx.dir;
}

ReplayResult replay(const std::string& manifest_path, const std::string& out_dir) {
    const RunManifest manifest = RunManifest::read(manifest_path);
    const std::string src_dir = fs::path(manifest_path).parent_path().string();

    ReplayResult res;
    res.tampered = manifest.verify(src_dir.empty() ? "." : src_dir);

    const std::string cfg_path =
        (src_dir.empty() ? "." : src_dir) + "/config.resolved.json";
    const ExperimentConfig config = load_config(cfg_path);
    res.out_dir = run_experiment(config, out_dir);
    res.mismatches = manifest.verify(res.out_dir);
    return res;
}

}  // namespace specamp
