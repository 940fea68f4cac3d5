#include "specamp/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "specamp/parallel.hpp"
#include "specamp/rng.hpp"

namespace specamp {

namespace {

// Objective of the separable form at a fixed direction, together with the
// Gram matrix accumulated along the per-slice argmax track.
struct SliceMax {
    double value = 0.0;
    Eigen::MatrixXcd gram;
};

SliceMax slice_max(const GammaField& gf, const Eigen::VectorXcd& u_hat) {
    const TimeGrid& tg = gf.time_grid();
    const int total = gf.grid().total_points();
    SliceMax out;
    out.gram = Eigen::MatrixXcd::Zero(gf.modes(), gf.modes());
    for (int j = 0; j < tg.n_nodes(); ++j) {
        double best = -1.0;
        int argmax = 0;
        for (int p = 0; p < total; ++p) {
            const double u = gf.u_dir(j, p, u_hat);
            if (u > best) {
                best = u;
                argmax = p;
            }
        }
        const double w = tg.dt() * ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
        out.value += w * best;
        const Eigen::VectorXcd v = gf.mode_vector(j, argmax);
        out.gram.noalias() += w * (v * v.adjoint());
    }
    return out;
}

Eigen::VectorXcd random_direction(int M, RngStream& rng) {
    Eigen::VectorXcd u(M);
    for (int n = 0; n < M; ++n) {
        const auto z = rng.cgauss();
        u(n) = cdouble(z.real(), z.imag());
    }
    const double nrm = u.norm();
    return nrm > 0 ? Eigen::VectorXcd(u / nrm) : Eigen::VectorXcd::Unit(M, 0);
}

double path_objective(const GammaField& gf, const PathPL& path) {
    return top_eig(gram_along_path(gf, path)).first;
}

// Track of the per-slice argmax of the total intensity trace(gamma); a
// direction-free starting guess that follows whatever moves in the driver.
PathPL intensity_track(const GammaField& gf, const std::array<double, 3>& endpoint) {
    const TimeGrid& tg = gf.time_grid();
    const int total = gf.grid().total_points();
    std::vector<double> times(tg.n_nodes());
    std::vector<std::array<double, 3>> pos(tg.n_nodes());
    for (int j = 0; j < tg.n_nodes(); ++j) {
        double best = -1.0;
        int argmax = 0;
        for (int p = 0; p < total; ++p) {
            double tr = 0.0;
            for (int n = 0; n < gf.modes(); ++n)
                tr += std::norm(gf.modal_set().value(n, j, p));
            if (tr > best) {
                best = tr;
                argmax = p;
            }
        }
        times[j] = tg.node(j);
        pos[j] = gf.grid().point(argmax);
    }
    pos.back() = endpoint;
    return PathPL::make(gf.grid(), std::move(times), std::move(pos));
}

}  // namespace

SeparableResult separable_mu(const GammaField& gf, const SeparableOptions& opts) {
    const int M = gf.modes();
    std::vector<Eigen::VectorXcd> starts;
    for (int n = 0; n < M; ++n) starts.push_back(Eigen::VectorXcd::Unit(M, n));
    starts.push_back(Eigen::VectorXcd::Constant(M, cdouble(1.0 / std::sqrt(M), 0.0)));
    RngStream rng(opts.seed, 0xa11ce);
    for (int i = 0; i < opts.n_starts; ++i) starts.push_back(random_direction(M, rng));

    SeparableResult best;
    best.mu = -1.0;
    for (auto u = starts.begin(); u != starts.end(); ++u) {
        Eigen::VectorXcd dir = *u;
        double value = -1.0;
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            SliceMax sm = slice_max(gf, dir);
            auto [mu, vec] = top_eig(sm.gram);
            dir = vec;
            if (sm.value <= value * (1.0 + opts.tol) && sweep > 0) {
                value = std::max(value, sm.value);
                break;
            }
            value = sm.value;
        }
        // final objective at the converged direction
        value = slice_max(gf, dir).value;
        if (value > best.mu) {
            best.mu = value;
            best.u_hat = dir;
        }
    }
    return best;
}

PathSearchResult path_search_mu(const GammaField& gf, const std::array<double, 3>& endpoint,
                                const PathSearchOptions& opts) {
    const TimeGrid& tg = gf.time_grid();
    const TorusGrid& grid = gf.grid();
    const double t = tg.t_end();

    std::array<double, 3> wrapped = endpoint;
    for (int a = 0; a < grid.dim(); ++a) wrapped[a] = grid.wrap(a, wrapped[a]);

    const int n_restarts = std::max(opts.n_restarts, 1);
    std::vector<double> values(n_restarts, -1.0);
    std::vector<PathPL> paths(n_restarts, PathPL::straight(grid, wrapped, t));
    std::vector<char> settled(n_restarts, 0);

    auto run_restart = [&](int r) {
        RngStream rng(opts.seed, 0x9a7e + static_cast<std::uint64_t>(r));

        PathPL current = PathPL::uniform(grid, opts.n_knots, wrapped, t);
        if (r == 1) {
            // follow the driver intensity, then resample onto the knot lattice
            PathPL track = intensity_track(gf, wrapped);
            for (int i = 0; i < opts.n_knots - 1; ++i)
                current.position(i) = track.eval(current.knot_times()[i]);
        } else if (r >= 2) {
            for (int i = 0; i < opts.n_knots - 1; ++i) {
                auto& x = current.position(i);
                for (int a = 0; a < grid.dim(); ++a)
                    x[a] = rng.uniform(0.0, grid.side(a));
            }
        }

        double cur_val = path_objective(gf, current);
        PathPL best = current;
        double best_val = cur_val;
        double checkpoint_val = cur_val;

        double temp = opts.temp0 * std::max(best_val, 1e-6);
        const double step0 = 0.25 * grid.side(0);
        const int checkpoint = (3 * opts.n_iters) / 4;
        for (int it = 0; it < opts.n_iters; ++it) {
            PathPL cand = current;
            const int knot = static_cast<int>(rng.uniform() * (opts.n_knots - 1));
            auto& x = cand.position(std::min(knot, opts.n_knots - 2));
            const double step =
                step0 * std::sqrt(temp / (opts.temp0 * std::max(best_val, 1e-6)));
            for (int a = 0; a < grid.dim(); ++a)
                x[a] = grid.wrap(a, x[a] + step * rng.gaussian());

            const double cand_val = path_objective(gf, cand);
            const double delta = cand_val - cur_val;
            if (delta >= 0.0 || rng.uniform() < std::exp(delta / std::max(temp, 1e-300))) {
                current = cand;
                cur_val = cand_val;
                if (cur_val > best_val) {
                    best_val = cur_val;
                    best = current;
                }
            }
            temp *= opts.cooling;
            if (it == checkpoint) checkpoint_val = best_val;
        }
        values[r] = best_val;
        paths[r] = best;
        settled[r] = (best_val - checkpoint_val) <= 1e-3 * std::max(best_val, 1e-12);
    };

    parallel_for(n_restarts, resolve_workers(opts.workers), run_restart);

    PathSearchResult out;
    int arg = 0;
    for (int r = 0; r < n_restarts; ++r)
        if (values[r] > values[arg]) arg = r;
    out.mu = values[arg];
    out.best_path = paths[arg];
    out.converged = settled[arg] != 0;
    return out;
}

CriticalCouplingReport optimize_mu(const GammaField& gf, const std::array<double, 3>& endpoint,
                                   MuMethod method, const std::vector<int>& qs,
                                   const std::vector<Eigen::VectorXcd>& h_directions,
                                   const PathSearchOptions& path_opts,
                                   const SeparableOptions& sep_opts) {
    CriticalCouplingReport rep;
    const TimeGrid& tg = gf.time_grid();
    const int total = gf.grid().total_points();
    const int M = gf.modes();

    // straight (constant-path) field: Gram at every grid point
    rep.mu_straight.resize(total);
    for (int p = 0; p < total; ++p) {
        Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(M, M);
        for (int j = 0; j < tg.n_nodes(); ++j) {
            const double w = tg.dt() * ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
            const Eigen::VectorXcd v = gf.mode_vector(j, p);
            gram.noalias() += w * (v * v.adjoint());
        }
        rep.mu_straight[p] = top_eig(gram).first;
        rep.mu_straight_max = std::max(rep.mu_straight_max, rep.mu_straight[p]);
    }

    if (method == MuMethod::Separable || method == MuMethod::Both) {
        SeparableResult sep = separable_mu(gf, sep_opts);
        rep.mu_separable = sep.mu;
        rep.u_hat_separable = sep.u_hat;
    }
    if (method == MuMethod::PathSearch || method == MuMethod::Both) {
        PathSearchResult ps = path_search_mu(gf, endpoint, path_opts);
        rep.mu_path = ps.mu;
        rep.path_converged = ps.converged;
    }

    switch (method) {
        case MuMethod::PathSearch:
            rep.mu_opt = rep.mu_path;
            rep.method = "path-search";
            break;
        case MuMethod::Separable:
            rep.mu_opt = rep.mu_separable;
            rep.method = "separable";
            break;
        case MuMethod::Both:
            rep.mu_opt = std::max(rep.mu_separable, rep.mu_path);
            rep.method = "both";
            break;
    }

    for (const auto& dir : h_directions) {
        Eigen::VectorXcd u = dir / dir.norm();
        rep.h_dir.emplace_back(u, h_direction(gf, u).h);
    }
    for (int q : qs) rep.lambda_q.emplace_back(q, 1.0 / (q * rep.mu_opt));
    return rep;
}

}  // namespace specamp
