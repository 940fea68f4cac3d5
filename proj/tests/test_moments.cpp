#include <doctest.h>

#include <cmath>
#include <limits>

#include "specamp/gsupport.hpp"
#include "specamp/moments.hpp"
#include "specamp/rng.hpp"

using namespace specamp;

namespace {

ModalSet make_modal(const std::string& kind, const TorusGrid& g, const TimeGrid& tg) {
    if (kind == "uniform") return synthesize_modal_set(g, tg, ModalRecipe::uniform());
    if (kind == "pair") return synthesize_modal_set(g, tg, ModalRecipe::plane_wave_pair());
    return synthesize_modal_set(
        g, tg, ModalRecipe::moving_hotspot(0.12, {0.35, 0, 0}, {0.25, 0, 0}));
}

// brute-force average of exp(beta |s|^2) over complex standard gaussians,
// independent of any library code path
std::pair<double, double> exp_quadratic_mc(double beta, int n, std::uint64_t seed) {
    RngStream rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.cgauss();
        const double v = std::exp(beta * std::norm(z));
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    return {mean, se};
}

}  // namespace

TEST_CASE("oracle: <exp(beta |s|^2)> = 1/(1-beta) for a complex gaussian") {
    for (double beta : {0.2, 0.4}) {
        auto [mean, se] = exp_quadratic_mc(beta, 200000, 1234);
        CHECK(std::abs(mean - 1.0 / (1.0 - beta)) < 3.0 * se);
    }
}

TEST_CASE("mc_moment: lambda=0 with zero potential is exactly one") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const ModalSet ms = make_modal("uniform", g, tg);
    const PotentialField rho = synthesize_potential(g, tg, PotentialSpec::zero());
    const MomentEstimate est =
        mc_moment(2, 0.0, ComplexMass::real(1.0), ms, rho, 5, 200, 1);
    CHECK(est.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(est.diverged_flag);
}

TEST_CASE("mc_moment: uniform oracle at q lambda t = 0.5") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 64);
    const ModalSet ms = make_modal("uniform", g, tg);
    const PotentialField rho = synthesize_potential(g, tg, PotentialSpec::zero());
    const MomentEstimate est =
        mc_moment(1, 0.5, ComplexMass::real(1.0), ms, rho, 3, 4000, 11);
    CHECK(std::abs(est.mean - 2.0) < 3.0 * est.std_error);
    CHECK_FALSE(est.diverged_flag);

    CHECK_THROWS_AS(mc_moment(1, 0.5, ComplexMass::real(1.0), ms, rho, 3, 50, 1),
                    std::invalid_argument);
}

TEST_CASE("mc_moment: divergence convention keys on q lambda mu_hat") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const ModalSet ms = make_modal("uniform", g, tg);
    const PotentialField rho = synthesize_potential(g, tg, PotentialSpec::zero());
    const MomentEstimate hot =
        mc_moment(1, 1.1, ComplexMass::real(1.0), ms, rho, 3, 200, 2);
    CHECK(hot.diverged_flag);  // mu_hat = t = 1, so 1.1 >= 1
    CHECK(hot.criterion.find(">= 1") != std::string::npos);

    // monotone in lambda
    bool seen_true = false;
    for (double lambda : {0.2, 0.6, 0.9, 1.0, 1.3}) {
        const MomentEstimate est =
            mc_moment(1, lambda, ComplexMass::real(1.0), ms, rho, 3, 200, 2);
        if (seen_true) CHECK(est.diverged_flag);
        seen_true = seen_true || est.diverged_flag;
    }
    CHECK(seen_true);
}

TEST_CASE("mc_moment: importance tilt reweights to the same answer") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 64);
    const ModalSet ms = make_modal("uniform", g, tg);
    const PotentialField rho = synthesize_potential(g, tg, PotentialSpec::zero());
    McOptions tilted;
    tilted.tilt_beta = 0.3;
    const MomentEstimate est =
        mc_moment(1, 0.4, ComplexMass::real(1.0), ms, rho, 3, 4000, 13, tilted);
    CHECK(std::abs(est.mean - 1.0 / (1.0 - 0.4)) < 3.0 * est.std_error);

    McOptions bad;
    bad.tilt_beta = 1.0;
    CHECK_THROWS_AS(mc_moment(1, 0.4, ComplexMass::real(1.0), ms, rho, 3, 200, 1, bad),
                    std::invalid_argument);
}

TEST_CASE("mc_moment: worker count does not change a single bit") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const ModalSet ms = make_modal("pair", g, tg);
    const PotentialField rho =
        synthesize_potential(g, tg, PotentialSpec::frozen_gaussian(0.2, 0.5, 7));
    McOptions one, four;
    one.workers = 1;
    four.workers = 4;
    const MomentEstimate a =
        mc_moment(1, 0.3, ComplexMass::real(1.0), ms, rho, 5, 400, 77, one, 1.0);
    const MomentEstimate b =
        mc_moment(1, 0.3, ComplexMass::real(1.0), ms, rho, 5, 400, 77, four, 1.0);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("exact straight-path moment: determinant identity vs brute force") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 64);

    const ModalSet uni = make_modal("uniform", g, tg);
    CHECK(exact_moment_straight(1, 0.5, uni, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(exact_moment_straight(1, 0.0, uni, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(exact_moment_straight(2, 0.5, uni, 0), MomentDivergence);

    const ModalSet pair = make_modal("pair", g, tg);
    // eigenvalues {t, 0}: the zero mode contributes a unit factor
    CHECK(exact_moment_straight(1, 0.5, pair, 9) == doctest::Approx(2.0).epsilon(1e-10));

    // brute force over s against the product formula
    GammaField gf(pair);
    const PathPL path = PathPL::straight(g, g.point(9), tg.t_end());
    const Eigen::MatrixXcd gram = gram_along_path(gf, path);
    RngStream rng(55);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const GaussianSample s = sample_gaussian_vector(2, rng);
        Eigen::Vector2cd sv(s.s[0], s.s[1]);
        const double quad = (sv.adjoint() * gram * sv)(0).real();
        const double v = std::exp(0.4 * quad);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - exact_moment_straight(1, 0.4, pair, 9)) < 3.0 * se);
}

TEST_CASE("straight-path regime: MC with no kinetic term matches the product formula") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 64);
    const ModalSet ms = make_modal("pair", g, tg);
    const PotentialField rho = synthesize_potential(g, tg, PotentialSpec::zero());
    const int probe = 5;
    for (double target : {0.2, 0.5, 0.8}) {  // q lambda mu_1 with mu_1 = t = 1
        const MomentEstimate est =
            mc_moment(1, target, std::nullopt, ms, rho, probe, 4000, 31, {}, 1.0);
        const double exact = exact_moment_straight(1, target, ms, probe);
        CHECK(std::abs(est.mean - exact) < 3.0 * est.std_error);
    }
}

TEST_CASE("growth slope: uniform mode is exact at every radius") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const ModalSet ms = make_modal("uniform", g, tg);
    const PotentialField rho = synthesize_potential(g, tg, PotentialSpec::zero());
    Eigen::VectorXcd dir(1);
    dir << cdouble(1, 0);
    const std::vector<double> radii = {1.0, 2.0, 3.0, 4.0, 5.0};
    const int q = 2;
    const double lambda = 0.7;
    const SlopeFit fit =
        growth_slope(dir, radii, q, lambda, ComplexMass::real(1.0), ms, rho, 3);
    CHECK(fit.slope == doctest::Approx(q * lambda * 1.0).epsilon(1e-10));
    CHECK(fit.full_slope == doctest::Approx(q * lambda * 1.0).epsilon(1e-10));
    CHECK(fit.target == doctest::Approx(q * lambda * 1.0).epsilon(1e-10));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(fit.poor_fit);
    for (std::size_t i = 0; i < radii.size(); ++i)
        CHECK(fit.log_moment[i] ==
              doctest::Approx(q * lambda * radii[i] * radii[i]).epsilon(1e-10));

    CHECK_THROWS_AS(growth_slope(dir, {1.0, 2.0, 3.0}, q, lambda,
                                 ComplexMass::real(1.0), ms, rho, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(growth_slope(dir, {1.0, 2.0, 2.0, 3.0}, q, lambda,
                                 ComplexMass::real(1.0), ms, rho, 3),
                    std::invalid_argument);
}

TEST_CASE("growth slope: stable across potential realizations and masses") {
    // the slope approaches q*lambda*H like 1/(sqrt(lambda) r); lambda and the
    // radii are chosen deep enough into that regime for a 5% comparison
    const TorusGrid g = make_torus_grid(1, {1.0}, {128});
    const TimeGrid tg = TimeGrid::make(1.0, 512);
    const ModalSet ms = synthesize_modal_set(
        g, tg, ModalRecipe::moving_hotspot(0.15, {0.35, 0, 0}, {0.25, 0, 0}));
    Eigen::VectorXcd dir(1);
    dir << cdouble(1, 0);
    const std::vector<double> radii = {6.0, 7.0, 8.0, 9.0, 10.0};
    const double lambda = 9.0;
    const int probe = 77;  // track endpoint 0.6

    const PotentialField zero = synthesize_potential(g, tg, PotentialSpec::zero());
    const SlopeFit base =
        growth_slope(dir, radii, 1, lambda, ComplexMass::real(1.0), ms, zero, probe);
    for (int seed : {101, 202, 303}) {
        const PotentialField rho = synthesize_potential(
            g, tg, PotentialSpec::frozen_gaussian(0.25, 0.6, seed));
        const SlopeFit fit =
            growth_slope(dir, radii, 1, lambda, ComplexMass::real(1.0), ms, rho, probe);
        CHECK(std::abs(fit.slope - base.slope) < 0.05 * base.slope);
    }
    const SlopeFit imaginary =
        growth_slope(dir, radii, 1, lambda, ComplexMass::imaginary(1.0), ms, zero, probe);
    CHECK(std::abs(imaginary.slope - base.slope) < 0.05 * base.slope);
}

TEST_CASE("estimate_lambda_q: uniform arithmetic and pair cross-check") {
    LambdaQOptions opts;
    opts.n_directions = 2;
    opts.method = MuMethod::Separable;

    const TorusGrid g64 = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg64 = TimeGrid::make(1.0, 64);
    const ModalSet uni = make_modal("uniform", g64, tg64);
    const PotentialField zero64 = synthesize_potential(g64, tg64, PotentialSpec::zero());
    const LambdaQReport uq =
        estimate_lambda_q(2, uni, 0, ComplexMass::real(1.0), zero64, opts);
    CHECK(uq.lambda_q == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(uq.lambda_q_slope == doctest::Approx(0.5).epsilon(1e-6));

    // the pair needs the deep-amplification regime for the slope route
    const TorusGrid g = make_torus_grid(1, {1.0}, {128});
    const TimeGrid tg = TimeGrid::make(1.0, 512);
    const ModalSet pair = make_modal("pair", g, tg);
    const PotentialField zero = synthesize_potential(g, tg, PotentialSpec::zero());
    opts.lambda_for_slope = 25.0;
    opts.radii = {24.0, 28.0, 32.0, 36.0, 40.0};
    const LambdaQReport pq =
        estimate_lambda_q(1, pair, 0, ComplexMass::real(1.0), zero, opts);
    CHECK(pq.lambda_q == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(pq.lambda_q_slope - pq.lambda_q) < 0.02 * pq.lambda_q);
}

TEST_CASE("mc_moment_joint: uniform driver with trivial kinetics ignores the potential") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const ModalSet ms = make_modal("uniform", g, tg);

    const MomentEstimate zero = mc_moment_joint(
        1, 0.4, std::nullopt, ms, PotentialSpec::zero(), 3, 8, 400, 5, {}, 1.0);
    const MomentEstimate with_rho = mc_moment_joint(
        1, 0.4, std::nullopt, ms, PotentialSpec::frozen_gaussian(0.2, 0.6, 0), 3, 8,
        400, 6, {}, 1.0);
    // the potential contributes a pure phase here, so both estimate 1/(1-0.4)
    const double se = std::hypot(zero.std_error, with_rho.std_error);
    CHECK(std::abs(zero.mean - with_rho.mean) < 3.0 * se);

    const MomentEstimate at_zero = mc_moment_joint(
        1, 0.0, std::nullopt, ms, PotentialSpec::frozen_gaussian(0.2, 0.6, 0), 3, 4,
        100, 7, {}, 1.0);
    CHECK(at_zero.mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gain-only regimes: moments never drop below one") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const ModalSet ms = make_modal("uniform", g, tg);

    // potential as pure phase: no kinetic term, any real rho
    const PotentialField rho =
        synthesize_potential(g, tg, PotentialSpec::frozen_gaussian(0.2, 0.8, 41));
    for (double lambda : {0.0, 0.2, 0.5}) {
        const MomentEstimate est =
            mc_moment(1, lambda, std::nullopt, ms, rho, 3, 300, 42, {}, 1.0);
        CHECK(est.mean >= 1.0 - 1e-12);
    }
    // zero potential, arbitrary complex mass
    const PotentialField zero = synthesize_potential(g, tg, PotentialSpec::zero());
    const MomentEstimate est =
        mc_moment(2, 0.3, ComplexMass(cdouble(1.0, 0.5)), ms, zero, 3, 300, 43, {}, 1.0);
    CHECK(est.mean >= 1.0 - 1e-12);
}

TEST_CASE("g-support outside mass decreases as eta_max grows") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 64);
    const ModalSet ms = make_modal("pair", g, tg);
    const PotentialField zero = synthesize_potential(g, tg, PotentialSpec::zero());
    Eigen::VectorXcd dir(2);
    dir << cdouble(1, 0), cdouble(0, 0);

    // fixed physical mollifier width; larger eta_max suppresses the window
    // truncation, so the leaked mass outside the support must shrink
    double prev = std::numeric_limits<double>::infinity();
    for (double eta_max : {40.0, 50.0, 60.0}) {
        GSupportOptions opts;
        opts.eta_max = eta_max;
        opts.n_eta = 256;
        opts.mollifier_width = 0.16;
        const GSupportReport rep =
            g_support_numeric(ms, dir, ComplexMass::imaginary(1.0), zero, 5, opts);
        CHECK(rep.outside_mass_frac < prev);
        prev = rep.outside_mass_frac;
    }

    GSupportOptions bad;
    bad.eta_max = 30.0;
    bad.n_eta = 256;
    bad.mollifier_width = 0.16;  // below 2 pi / eta_max
    CHECK_THROWS_WITH_AS(
        g_support_numeric(ms, dir, ComplexMass::imaginary(1.0), zero, 5, bad),
        doctest::Contains("mollifier"), std::invalid_argument);
}

TEST_CASE("mc_moment_joint: running mean hook and divergence flags") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const ModalSet ms = make_modal("hotspot", g, tg);
    GammaField gf(ms);
    const double mu = separable_mu(gf).mu;
    const double lambda_q = 1.0 / mu;

    std::vector<double> running;
    const MomentEstimate sub = mc_moment_joint(
        1, 0.8 * lambda_q, ComplexMass::real(1.0), ms,
        PotentialSpec::frozen_gaussian(0.25, 0.5, 1), 3, 6, 100, 8, {}, mu, &running);
    CHECK(running.size() == 6);
    CHECK(running.back() == doctest::Approx(sub.mean).epsilon(1e-12));
    CHECK_FALSE(sub.diverged_flag);
    CHECK(std::isfinite(sub.mean));

    const MomentEstimate super = mc_moment_joint(
        1, 1.2 * lambda_q, ComplexMass::real(1.0), ms,
        PotentialSpec::frozen_gaussian(0.25, 0.5, 1), 3, 4, 50, 9, {}, mu);
    CHECK(super.diverged_flag);
}
