#include "specamp/gsupport.hpp"

#include <cmath>
#include <stdexcept>

#include "specamp/parallel.hpp"

namespace specamp {

GSupportReport g_support_numeric(const ModalSet& modal_set, const Eigen::VectorXcd& s_hat,
                                 const Mass& mass, const PotentialField& potential,
                                 int probe_point, const GSupportOptions& opts) {
    if (opts.n_eta < 256)
        throw std::invalid_argument("g_support: n_eta must be >= 256");
    if (opts.mollifier_width <= kTwoPi / opts.eta_max)
        throw std::invalid_argument(
            "g_support: mollifier width must exceed 2*pi/eta_max = " +
            std::to_string(kTwoPi / opts.eta_max));

    GammaField gf(modal_set);
    const SupportInterval support = support_endpoints(gf, s_hat);
    const ScalarTimeField u_field = direction_field(gf, s_hat);

    GSupportReport rep;
    rep.a = support.a;
    rep.b = support.b;
    rep.delta = opts.mollifier_width;

    const int n = opts.n_eta;
    const double d_eta = 2.0 * opts.eta_max / n;
    const double u_max = kPi / d_eta;  // Nyquist of the eta sampling
    if (u_max < std::max(std::abs(rep.a), std::abs(rep.b)) + 6.0 * rep.delta)
        throw std::invalid_argument(
            "g_support: u window +-" + std::to_string(u_max) +
            " too narrow for the predicted support; increase n_eta or lower eta_max");

    rep.eta.resize(n);
    rep.psi.resize(n);
    const TorusGrid& grid = modal_set.grid();
    const TimeGrid& tg = modal_set.time_grid();
    parallel_for(n, resolve_workers(opts.workers), [&](int j) {
        const double eta = -opts.eta_max + j * d_eta;
        rep.eta[j] = eta;
        const FieldState psi =
            solve_schrodinger(grid, tg, mass, u_field, cdouble(eta, 0.0), potential);
        rep.psi[j] = psi.full_value(probe_point);
    });

    // g_delta(u) = (1/2pi) sum W(eta) Psi(eta) e^{i u eta} d_eta on a u grid
    // matched to the eta sampling.
    const int n_u = n;
    const double d_u = 2.0 * u_max / n_u;
    rep.u.resize(n_u);
    rep.g_abs.resize(n_u);
    std::vector<double> window(n);
    for (int j = 0; j < n; ++j)
        window[j] = std::exp(-0.25 * rep.delta * rep.delta * rep.eta[j] * rep.eta[j]);
    parallel_for(n_u, resolve_workers(opts.workers), [&](int k) {
        const double u = -u_max + k * d_u;
        cdouble acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double phase = u * rep.eta[j];
            acc += window[j] * rep.psi[j] * cdouble(std::cos(phase), std::sin(phase));
        }
        rep.u[k] = u;
        rep.g_abs[k] = std::abs(acc) * d_eta / kTwoPi;
    });

    double total = 0.0, outside = 0.0, gmax = 0.0;
    for (int k = 0; k < n_u; ++k) {
        total += rep.g_abs[k] * d_u;
        if (rep.u[k] < rep.a - 3.0 * rep.delta || rep.u[k] > rep.b + 3.0 * rep.delta)
            outside += rep.g_abs[k] * d_u;
        gmax = std::max(gmax, rep.g_abs[k]);
    }
    rep.total_mass = total;
    rep.outside_mass_frac = total > 0.0 ? outside / total : 0.0;
    rep.right_edge = rep.u.front();
    for (int k = n_u - 1; k >= 0; --k) {
        if (rep.g_abs[k] > 1e-3 * gmax) {
            rep.right_edge = rep.u[k];
            break;
        }
    }
    return rep;
}

}  // namespace specamp
