#include "specamp/feynman_kac.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "specamp/parallel.hpp"
#include "specamp/rng.hpp"

namespace specamp {

namespace {

// Time-averaged slice for the midpoint of step j (nullptr field => zero).
std::vector<std::vector<double>> midpoint_slices(const ScalarTimeField& f,
                                                 const TimeGrid& tg) {
    std::vector<std::vector<double>> mids;
    if (f.empty()) return mids;
    if (f.frozen) {
        mids.push_back(f.slices[0]);
        return mids;
    }
    mids.resize(tg.n_steps());
    for (int j = 0; j < tg.n_steps(); ++j) {
        const auto& a = f.slices[j];
        const auto& b = f.slices[j + 1];
        mids[j].resize(a.size());
        for (std::size_t p = 0; p < a.size(); ++p) mids[j][p] = 0.5 * (a[p] + b[p]);
    }
    return mids;
}

}  // namespace

FkEstimate feynman_kac_psi(const TorusGrid& grid, const TimeGrid& time_grid,
                           const std::array<double, 3>& probe, double gamma,
                           const PotentialField& potential, double weight_y,
                           const PathFunctional* functional, int n_paths,
                           std::uint64_t seed, const FkOptions& opts) {
    if (gamma <= 0.0)
        throw std::invalid_argument("feynman-kac: requires purely imaginary mass, gamma > 0");
    if (n_paths < 100)
        throw std::invalid_argument("feynman-kac: n_paths must be >= 100");
    if (functional && (!functional->u || functional->u->empty()))
        throw std::invalid_argument("feynman-kac: functional without a field");

    const int dim = grid.dim();
    const int n_steps = time_grid.n_steps();
    const double dt = time_grid.dt();
    const double step_sd = std::sqrt(dt / gamma);  // diffusivity 1/(2 gamma)

    const bool has_rho = !potential.is_zero();
    const auto rho_mid = has_rho ? midpoint_slices(potential.field(), time_grid)
                                 : std::vector<std::vector<double>>{};
    const auto u_mid = functional ? midpoint_slices(*functional->u, time_grid)
                                  : std::vector<std::vector<double>>{};
    const bool rho_frozen = has_rho && potential.frozen();
    const bool u_frozen = functional && functional->u->frozen;

    std::vector<double> samples(n_paths);
    auto one_path = [&](int i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        // walk backward from the pinned endpoint x(t) = probe
        std::array<double, 3> x = probe;
        double rho_integral = 0.0;
        double alpha = 0.0;
        for (int j = n_steps - 1; j >= 0; --j) {
            std::array<double, 3> x_prev = x;
            for (int a = 0; a < dim; ++a)
                x_prev[a] = grid.wrap(a, x[a] + step_sd * rng.gaussian());
            if (has_rho || functional) {
                std::array<double, 3> mid{0.0, 0.0, 0.0};
                for (int a = 0; a < dim; ++a) {
                    const double d = grid.wrap_delta(a, x_prev[a], x[a]);
                    mid[a] = grid.wrap(a, x_prev[a] + 0.5 * d);
                }
                const auto cw = grid.cell_weights(mid);
                if (has_rho) {
                    const auto& s = rho_frozen ? rho_mid[0] : rho_mid[j];
                    double v = 0.0;
                    for (int c = 0; c < cw.count; ++c) v += cw.weight[c] * s[cw.index[c]];
                    rho_integral += v * dt;
                }
                if (functional) {
                    const auto& s = u_frozen ? u_mid[0] : u_mid[j];
                    double v = 0.0;
                    for (int c = 0; c < cw.count; ++c) v += cw.weight[c] * s[cw.index[c]];
                    alpha += v * dt;
                }
            }
            x = x_prev;
        }
        double w = std::exp(-weight_y * rho_integral);
        if (functional && functional->h) w *= functional->h(alpha);
        samples[i] = w;
    };
    parallel_for(n_paths, resolve_workers(opts.workers), one_path);

    FkEstimate est;
    est.n_paths = n_paths;
    est.mean = pairwise_sum(samples) / n_paths;
    std::vector<double> sq(n_paths);
    for (int i = 0; i < n_paths; ++i) {
        const double d = samples[i] - est.mean;
        sq[i] = d * d;
    }
    est.std_error = n_paths > 1
                        ? std::sqrt(pairwise_sum(sq) / (n_paths - 1.0) / n_paths)
                        : 0.0;
    return est;
}

}  // namespace specamp
