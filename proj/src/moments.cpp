#include "specamp/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "specamp/parallel.hpp"
#include "specamp/rng.hpp"

namespace specamp {

namespace {

double separable_mu_hat(const ModalSet& ms) {
    GammaField gf(ms);
    return separable_mu(gf).mu;
}

std::string divergence_criterion(int q, double lambda, double mu_hat) {
    char buf[128];
    const double v = q * lambda * mu_hat;
    std::snprintf(buf, sizeof(buf), "q*lambda*mu_hat = %.6g %s 1", v,
                  v >= 1.0 ? ">=" : "<");
    return buf;
}

// mean and standard error from per-sample ln values, staying in log space
// until the final exp.
void reduce_log_samples(const std::vector<double>& logs, double& log_mean,
                        double& mean, double& std_error) {
    const double n = static_cast<double>(logs.size());
    log_mean = logsumexp(logs) - std::log(n);
    mean = std::exp(log_mean);
    std::vector<double> doubled(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) doubled[i] = 2.0 * logs[i];
    const double log_m2 = logsumexp(doubled) - std::log(n);
    if (log_m2 > 1400.0) {  // exp would overflow; the spread is astronomical
        std_error = std::numeric_limits<double>::infinity();
        return;
    }
    const double var = std::max(0.0, std::exp(log_m2) - mean * mean);
    std_error = std::sqrt(var / n);
}

}  // namespace

MomentEstimate mc_moment(int q, double lambda, const Mass& mass, const ModalSet& modal_set,
                         const PotentialField& potential, int probe_point, int n_samples,
                         std::uint64_t seed, const McOptions& opts,
                         std::optional<double> mu_hat) {
    if (q < 1) throw std::invalid_argument("mc_moment: q must be a positive integer");
    if (lambda < 0.0) throw std::invalid_argument("mc_moment: lambda must be >= 0");
    if (n_samples < 100) throw std::invalid_argument("mc_moment: n_samples must be >= 100");
    if (opts.tilt_beta < 0.0 || opts.tilt_beta >= 1.0)
        throw std::invalid_argument("mc_moment: tilt beta must lie in [0, 1)");

    const int M = modal_set.modes();
    const double beta = opts.tilt_beta;
    const double tilt_scale = beta > 0.0 ? 1.0 / std::sqrt(1.0 - beta) : 1.0;
    const double log_tilt_norm = beta > 0.0 ? -M * std::log(1.0 - beta) : 0.0;

    std::vector<double> logs(n_samples);
    parallel_for(n_samples, resolve_workers(opts.workers), [&](int i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        GaussianSample s = sample_gaussian_vector(M, rng);
        double log_weight = 0.0;
        if (beta > 0.0) {
            for (auto& z : s.s) z *= tilt_scale;
            log_weight = -beta * s.norm2() + log_tilt_norm;
        }
        const FieldState e = solve_amplifier(modal_set, s, potential, lambda, mass);
        logs[i] = q * e.log_abs(probe_point) + log_weight;
    });

    MomentEstimate est;
    est.q = q;
    est.lambda = lambda;
    est.n_samples = n_samples;
    est.mu_hat = mu_hat ? *mu_hat : separable_mu_hat(modal_set);
    reduce_log_samples(logs, est.log_mean, est.mean, est.std_error);
    est.diverged_flag = q * lambda * est.mu_hat >= 1.0;
    est.criterion = divergence_criterion(q, lambda, est.mu_hat);
    return est;
}

MomentEstimate mc_moment_joint(int q, double lambda, const Mass& mass,
                               const ModalSet& modal_set, const PotentialSpec& potential_spec,
                               int probe_point, int n_outer, int n_inner, std::uint64_t seed,
                               const McOptions& opts, std::optional<double> mu_hat,
                               std::vector<double>* running_means) {
    if (q < 1) throw std::invalid_argument("mc_moment_joint: q must be a positive integer");
    if (lambda < 0.0) throw std::invalid_argument("mc_moment_joint: lambda must be >= 0");
    if (n_outer < 2 || n_outer * n_inner < 100)
        throw std::invalid_argument("mc_moment_joint: need n_outer >= 2 and >= 100 total samples");
    if (opts.tilt_beta < 0.0 || opts.tilt_beta >= 1.0)
        throw std::invalid_argument("mc_moment_joint: tilt beta must lie in [0, 1)");

    const int M = modal_set.modes();
    const double beta = opts.tilt_beta;
    const double tilt_scale = beta > 0.0 ? 1.0 / std::sqrt(1.0 - beta) : 1.0;
    const double log_tilt_norm = beta > 0.0 ? -M * std::log(1.0 - beta) : 0.0;
    std::vector<double> log_outer(n_outer);
    parallel_for(n_outer, resolve_workers(opts.workers), [&](int j) {
        PotentialSpec spec = potential_spec;
        spec.seed = splitmix64(seed ^ (0x9e0fULL + static_cast<std::uint64_t>(j)));
        const PotentialField rho =
            synthesize_potential(modal_set.grid(), modal_set.time_grid(), spec);
        std::vector<double> logs(n_inner);
        for (int i = 0; i < n_inner; ++i) {
            RngStream rng(seed, (static_cast<std::uint64_t>(j) << 32) |
                                    static_cast<std::uint32_t>(i));
            GaussianSample s = sample_gaussian_vector(M, rng);
            double log_weight = 0.0;
            if (beta > 0.0) {
                for (auto& z : s.s) z *= tilt_scale;
                log_weight = -beta * s.norm2() + log_tilt_norm;
            }
            const FieldState e = solve_amplifier(modal_set, s, rho, lambda, mass);
            logs[i] = q * e.log_abs(probe_point) + log_weight;
        }
        log_outer[j] = logsumexp(logs) - std::log(static_cast<double>(n_inner));
    });

    MomentEstimate est;
    est.q = q;
    est.lambda = lambda;
    est.n_samples = n_outer * n_inner;
    est.mu_hat = mu_hat ? *mu_hat : separable_mu_hat(modal_set);

    const double n = static_cast<double>(n_outer);
    est.log_mean = logsumexp(log_outer) - std::log(n);
    est.mean = std::exp(est.log_mean);
    double var = 0.0;
    for (double ly : log_outer) {
        const double d = std::exp(ly) - est.mean;
        var += d * d;
    }
    est.std_error = std::sqrt(var / (n - 1.0) / n);
    est.diverged_flag = q * lambda * est.mu_hat >= 1.0;
    est.criterion = divergence_criterion(q, lambda, est.mu_hat);

    if (running_means) {
        running_means->resize(n_outer);
        std::vector<double> prefix;
        prefix.reserve(n_outer);
        for (int j = 0; j < n_outer; ++j) {
            prefix.push_back(log_outer[j]);
            (*running_means)[j] =
                std::exp(logsumexp(prefix) - std::log(static_cast<double>(j + 1)));
        }
    }
    return est;
}

double exact_moment_straight(int q, double lambda, const ModalSet& modal_set,
                             int probe_point) {
    GammaField gf(modal_set);
    const PathPL path = PathPL::straight(modal_set.grid(),
                                         modal_set.grid().point(probe_point),
                                         modal_set.time_grid().t_end());
    const Eigen::MatrixXcd gram = gram_along_path(gf, path);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    double value = 1.0;
    for (int j = 0; j < gram.rows(); ++j) {
        const double mu = es.eigenvalues()(j);
        const double factor = 1.0 - q * lambda * mu;
        if (factor <= 0.0)
            throw MomentDivergence("divergent moment: q*lambda*mu_1 = " +
                                   std::to_string(q * lambda * es.eigenvalues().maxCoeff()) +
                                   " >= 1");
        value /= factor;
    }
    return value;
}

SlopeFit growth_slope(const Eigen::VectorXcd& s_hat, const std::vector<double>& radii,
                      int q, double lambda, const Mass& mass, const ModalSet& modal_set,
                      const PotentialField& potential, int probe_point) {
    if (radii.size() < 4)
        throw std::invalid_argument("growth_slope: need >= 4 radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::invalid_argument("growth_slope: radii must be strictly increasing");
    if (std::abs(s_hat.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("growth_slope: direction must be unit norm");

    SlopeFit fit;
    fit.direction = s_hat;
    fit.radii = radii;
    fit.log_moment.resize(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        GaussianSample s;
        s.s.resize(modal_set.modes());
        for (int n = 0; n < modal_set.modes(); ++n) s.s[n] = radii[i] * s_hat(n);
        const FieldState e = solve_amplifier(modal_set, s, potential, lambda, mass);
        fit.log_moment[i] = q * e.log_abs(probe_point);
    }

    auto lsq = [&](std::size_t lo) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(radii.size() - lo);
        for (std::size_t i = lo; i < radii.size(); ++i) {
            const double x = radii[i] * radii[i];
            sx += x;
            sy += fit.log_moment[i];
            sxx += x * x;
            sxy += x * fit.log_moment[i];
        }
        const double denom = n * sxx - sx * sx;
        const double slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / n;
        return std::make_pair(slope, intercept);
    };

    auto [slope3, intercept3] = lsq(radii.size() - 3);
    fit.slope = slope3;
    fit.intercept = intercept3;
    auto [slope_full, intercept_full] = lsq(0);
    fit.full_slope = slope_full;

    double ss_res = 0.0, ss_tot = 0.0, ymean = 0.0;
    for (double y : fit.log_moment) ymean += y;
    ymean /= fit.log_moment.size();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double x = radii[i] * radii[i];
        const double pred = slope_full * x + intercept_full;
        ss_res += (fit.log_moment[i] - pred) * (fit.log_moment[i] - pred);
        ss_tot += (fit.log_moment[i] - ymean) * (fit.log_moment[i] - ymean);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.poor_fit = fit.r2 < 0.99;

    GammaField gf(modal_set);
    fit.target = q * lambda * h_direction(gf, s_hat).h;
    return fit;
}

LambdaQReport estimate_lambda_q(int q, const ModalSet& modal_set, int probe_point,
                                const Mass& mass, const PotentialField& potential,
                                const LambdaQOptions& opts) {
    GammaField gf(modal_set);
    const int M = modal_set.modes();

    LambdaQReport rep;
    rep.q = q;
    rep.base = optimize_mu(gf, modal_set.grid().point(probe_point), opts.method, {q}, {},
                           opts.path_opts, opts.sep_opts);
    rep.mu_hat = rep.base.mu_opt;
    rep.lambda_q = 1.0 / (q * rep.mu_hat);

    std::vector<Eigen::VectorXcd> dirs;
    for (int n = 0; n < M; ++n) dirs.push_back(Eigen::VectorXcd::Unit(M, n));
    if (M > 1)
        dirs.push_back(Eigen::VectorXcd::Constant(M, cdouble(1.0 / std::sqrt(M), 0.0)));
    if (rep.base.u_hat_separable.size() == M) dirs.push_back(rep.base.u_hat_separable);
    RngStream rng(opts.seed, 0xd14);
    for (int i = 0; i < opts.n_directions; ++i) {
        Eigen::VectorXcd u(M);
        for (int n = 0; n < M; ++n) {
            const auto z = rng.cgauss();
            u(n) = cdouble(z.real(), z.imag());
        }
        dirs.push_back(u / u.norm());
    }

    rep.h_star = 0.0;
    for (const auto& dir : dirs) {
        SlopeFit fit = growth_slope(dir, opts.radii, q, opts.lambda_for_slope, mass,
                                    modal_set, potential, probe_point);
        rep.h_star = std::max(rep.h_star, fit.slope / (q * opts.lambda_for_slope));
        rep.fits.push_back(std::move(fit));
    }
    rep.lambda_q_slope = 1.0 / (q * rep.h_star);
    rep.rel_gap = std::abs(rep.lambda_q_slope - rep.lambda_q) / rep.lambda_q;
    return rep;
}

}  // namespace specamp
