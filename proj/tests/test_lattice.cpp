#include <doctest.h>

#include <cmath>
#include <complex>

#include "specamp/grid.hpp"
#include "specamp/modal.hpp"
#include "specamp/potential.hpp"
#include "specamp/rng.hpp"

using namespace specamp;

TEST_CASE("torus grid construction and wavenumber layout") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    CHECK(g.spacing(0) == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(g.total_points() == 64);

    const TorusGrid g2 = make_torus_grid(2, {1.0, 1.0}, {32, 32});
    CHECK(g2.total_points() == 1024);

    CHECK_THROWS_WITH_AS(make_torus_grid(4, {1, 1, 1, 1}, {8, 8, 8, 8}),
                         doctest::Contains("d<=3"), std::invalid_argument);
    CHECK_THROWS(make_torus_grid(1, {1.0}, {63}));  // odd point count

    const auto k = g.wavenumbers(0);
    CHECK(k[0] == 0.0);
    CHECK(k[1] == doctest::Approx(kTwoPi));
    CHECK(k[63] == doctest::Approx(-kTwoPi));
    CHECK(k[32] == doctest::Approx(kTwoPi * 32));
    CHECK(g.wavenumbers_odd(0)[32] == 0.0);
}

TEST_CASE("torus wrap and interpolation") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {8});
    CHECK(g.wrap(0, 1.25) == doctest::Approx(0.25));
    CHECK(g.wrap(0, -0.25) == doctest::Approx(0.75));
    CHECK(g.wrap_delta(0, 0.9, 0.1) == doctest::Approx(0.2));
    CHECK(g.wrap_delta(0, 0.1, 0.9) == doctest::Approx(-0.2));

    // interpolation weights across the periodic seam
    const auto cw = g.cell_weights({0.9375, 0.0, 0.0});  // between points 7 and 0
    double w = 0.0;
    for (int c = 0; c < cw.count; ++c) w += cw.weight[c];
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cw.index[0] == 7);
    CHECK(cw.index[1] == 0);
}

TEST_CASE("time grid breakpoints must sit on nodes") {
    const TimeGrid tg = TimeGrid::make(1.0, 100, {0.25, 0.5});
    CHECK(tg.dt() == doctest::Approx(0.01));
    CHECK(tg.n_nodes() == 101);
    CHECK_THROWS_WITH_AS(TimeGrid::make(1.0, 100, {0.255}),
                         doctest::Contains("node"), std::invalid_argument);
}

TEST_CASE("uniform recipe: identity mode, unit normalization exactly") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 16);
    const ModalSet ms = synthesize_modal_set(g, tg, ModalRecipe::uniform());
    CHECK(ms.modes() == 1);
    CHECK(ms.normalization() == 1.0);
    for (int p = 0; p < g.total_points(); ++p)
        CHECK(ms.value(0, 0, p) == cdouble(1.0, 0.0));
}

TEST_CASE("plane-wave pair: normalization equals the cos^2 + sin^2 quadrature") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 16);
    const ModalSet ms = synthesize_modal_set(g, tg, ModalRecipe::plane_wave_pair());

    // independent quadrature of the two mode powers on the same lattice
    double power = 0.0;
    for (int p = 0; p < g.total_points(); ++p) {
        const double x = g.coord(0, p);
        power += (std::cos(kTwoPi * x) * std::cos(kTwoPi * x) +
                  std::sin(kTwoPi * x) * std::sin(kTwoPi * x)) *
                 g.cell_volume();
    }
    CHECK(power == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ms.normalization() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ms.value(0, 0, 16).real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ms.value(1, 0, 16).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("moving hotspot: renormalized to unit power, band limit enforced") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const auto recipe = ModalRecipe::moving_hotspot(0.12, {0.35, 0, 0}, {0.25, 0, 0});
    const ModalSet ms = synthesize_modal_set(g, tg, recipe);

    // recompute the normalization integral from the sampled values
    double z = 0.0;
    for (int j = 0; j < tg.n_nodes(); ++j) {
        double pw = 0.0;
        for (int p = 0; p < g.total_points(); ++p) pw += std::norm(ms.value(0, j, p));
        z += pw * g.cell_volume() * ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
    }
    z /= tg.n_steps();  // spatial power is time independent; [0,1] window matches
    CHECK(z == doctest::Approx(1.0).epsilon(1e-8));

    // peak follows the track
    int argmax = 0;
    double best = 0.0;
    for (int p = 0; p < g.total_points(); ++p)
        if (std::abs(ms.value(0, tg.n_steps(), p)) > best) {
            best = std::abs(ms.value(0, tg.n_steps(), p));
            argmax = p;
        }
    const double track = g.wrap(0, 0.25 + 0.35 * 1.0);
    CHECK(std::abs(g.wrap_delta(0, g.coord(0, argmax), track)) <= g.spacing(0));

    CHECK_THROWS_WITH_AS(
        synthesize_modal_set(g, tg, ModalRecipe::moving_hotspot(0.02, {0, 0, 0})),
        doctest::Contains("band limit"), std::invalid_argument);
}

TEST_CASE("user-table recipe is validated and renormalized") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {16});
    const TimeGrid tg = TimeGrid::make(1.0, 4);
    // one constant mode of amplitude 2: total power 4, rescaled to 1
    std::vector<std::vector<cdouble>> table(1);
    table[0].assign(g.total_points(), cdouble(2.0, 0.0));
    const ModalSet ms = synthesize_modal_set(g, tg, ModalRecipe::user_table(1, table));
    CHECK(ms.normalization() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ms.value(0, 0, 5).real() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(synthesize_modal_set(g, tg, ModalRecipe::user_table(2, table)),
                    std::invalid_argument);
    std::vector<std::vector<cdouble>> bad(1);
    bad[0].assign(7, cdouble(1.0, 0.0));
    CHECK_THROWS_AS(synthesize_modal_set(g, tg, ModalRecipe::user_table(1, bad)),
                    std::invalid_argument);
}

TEST_CASE("gaussian vector: covariance identities within 3 standard errors") {
    const int M = 3, n_draws = 100000;
    RngStream rng(123);
    std::vector<cdouble> sum_sm(M * M, 0.0), sum_ss(M * M, 0.0);
    for (int d = 0; d < n_draws; ++d) {
        const GaussianSample s = sample_gaussian_vector(M, rng);
        for (int n = 0; n < M; ++n)
            for (int m = 0; m < M; ++m) {
                sum_sm[n * M + m] += s.s[n] * std::conj(s.s[m]);
                sum_ss[n * M + m] += s.s[n] * s.s[m];
            }
    }
    // var(s_n s_m^*) = 1 per complex component scale; se ~ 1/sqrt(n)
    const double se = 1.0 / std::sqrt(static_cast<double>(n_draws));
    for (int n = 0; n < M; ++n)
        for (int m = 0; m < M; ++m) {
            const cdouble cov = sum_sm[n * M + m] / static_cast<double>(n_draws);
            const cdouble pse = sum_ss[n * M + m] / static_cast<double>(n_draws);
            const double expect = (n == m) ? 1.0 : 0.0;
            CHECK(std::abs(cov - expect) < 3.0 * se);
            CHECK(std::abs(pse) < 3.0 * se);
        }
}

TEST_CASE("gaussian vector: fixed seed reproduces bit-identical draws") {
    RngStream a(42), b(42);
    const GaussianSample sa = sample_gaussian_vector(4, a);
    const GaussianSample sb = sample_gaussian_vector(4, b);
    for (int n = 0; n < 4; ++n) CHECK(sa.s[n] == sb.s[n]);
}

TEST_CASE("driver assembly matches the mode superposition pointwise") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 8);
    const ModalSet ms = synthesize_modal_set(g, tg, ModalRecipe::plane_wave_pair());

    GaussianSample s;
    s.s = {cdouble(1.0, 0.0), cdouble(0.0, 1.0)};
    const auto S = assemble_driver(ms, s);
    for (int p = 0; p < g.total_points(); ++p) {
        const cdouble direct = s.s[0] * ms.value(0, 0, p) + s.s[1] * ms.value(1, 0, p);
        CHECK(std::abs(S[0][p] - direct) < 1e-14);
    }

    GaussianSample zero;
    zero.s = {cdouble(0, 0), cdouble(0, 0)};
    const auto S0 = assemble_driver(ms, zero);
    for (int p = 0; p < g.total_points(); ++p) CHECK(S0[0][p] == cdouble(0, 0));

    GaussianSample wrong;
    wrong.s = {cdouble(1, 0)};
    CHECK_THROWS_AS(assemble_driver(ms, wrong), std::invalid_argument);
}

TEST_CASE("zero potential: identically zero with zero norms") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 8);
    const PotentialField f = synthesize_potential(g, tg, PotentialSpec::zero());
    auto [n0, n1, n2] = potential_norms(f);
    CHECK(n0 == 0.0);
    CHECK(n1 == 0.0);
    CHECK(n2 == 0.0);
    for (double v : f.slice(0)) CHECK(v == 0.0);
}

TEST_CASE("frozen gaussian potential: variance matches amplitude^2") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 4);
    const double amp = 0.7;
    const int n_seeds = 3000;
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        const PotentialField f = synthesize_potential(
            g, tg, PotentialSpec::frozen_gaussian(0.2, amp, 1000 + s));
        const double v = f.slice(0)[17];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n_seeds;
    const double var = sum2 / n_seeds - mean * mean;
    // sample variance of a gaussian: se ~ var * sqrt(2/n)
    const double se_var = amp * amp * std::sqrt(2.0 / n_seeds);
    CHECK(std::abs(mean) < 3.0 * amp / std::sqrt(static_cast<double>(n_seeds)));
    CHECK(std::abs(var - amp * amp) < 3.0 * se_var);
}

TEST_CASE("potential synthesis is deterministic and validates resolution") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 4);
    const auto spec = PotentialSpec::frozen_gaussian(0.25, 1.0, 77);
    const PotentialField a = synthesize_potential(g, tg, spec);
    const PotentialField b = synthesize_potential(g, tg, spec);
    for (int p = 0; p < g.total_points(); ++p) CHECK(a.slice(0)[p] == b.slice(0)[p]);

    CHECK_THROWS_WITH_AS(
        synthesize_potential(g, tg, PotentialSpec::frozen_gaussian(0.01, 1.0, 1)),
        doctest::Contains("resolvable"), std::invalid_argument);
}

TEST_CASE("potential norms: closed form for a sine slice") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {64});
    const TimeGrid tg = TimeGrid::make(1.0, 4);
    std::vector<double> slice(g.total_points());
    for (int p = 0; p < g.total_points(); ++p)
        slice[p] = std::sin(kTwoPi * g.coord(0, p));
    const PotentialField f =
        synthesize_potential(g, tg, PotentialSpec::user_table({slice}));
    auto [n0, n1, n2] = potential_norms(f);
    CHECK(n0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(n1 == doctest::Approx(kTwoPi).epsilon(1e-10));
    CHECK(n2 == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-10));

    // frozen field: refining the time grid cannot change the norms
    const TimeGrid tg2 = TimeGrid::make(1.0, 64);
    const PotentialField f2 =
        synthesize_potential(g, tg2, PotentialSpec::user_table({slice}));
    CHECK(std::get<0>(potential_norms(f2)) == n0);
    CHECK(std::get<1>(potential_norms(f2)) == n1);
}

TEST_CASE("time-dependent gaussian potential: stationary variance, smooth in time") {
    const TorusGrid g = make_torus_grid(1, {1.0}, {32});
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const PotentialField f = synthesize_potential(
        g, tg, PotentialSpec::time_dependent_gaussian(0.25, 0.5, 1.0, 5));
    CHECK_FALSE(f.frozen());
    CHECK(std::isfinite(f.norm_lap()));
    // slices differ but stay bounded
    bool changed = false;
    for (int p = 0; p < g.total_points(); ++p)
        if (f.slice(0)[p] != f.slice(16)[p]) changed = true;
    CHECK(changed);
}
