#pragma once

#include <cstdint>
#include <functional>

#include "specamp/grid.hpp"
#include "specamp/potential.hpp"

namespace specamp {

// Optional path functional: h applied to alpha[x(.)] = int_0^t u(x(tau),tau) dtau.
struct PathFunctional {
    const ScalarTimeField* u = nullptr;
    std::function<double(double)> h;
};

struct FkEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n_paths = 0;
};

struct FkOptions {
    int workers = 0;
};

// Wiener-measure Monte Carlo for the purely dissipative mass m = i*gamma:
// averages exp(-y int_0^t rho(x(tau),tau) dtau) * h(alpha[x(.)]) over
// Brownian paths of diffusivity 1/(2*gamma) pinned at x(t) = probe (the
// initial end is free). Segment integrals use the midpoint rule at the
// solver time step.
FkEstimate feynman_kac_psi(const TorusGrid& grid, const TimeGrid& time_grid,
                           const std::array<double, 3>& probe, double gamma,
                           const PotentialField& potential, double weight_y,
                           const PathFunctional* functional, int n_paths,
                           std::uint64_t seed, const FkOptions& opts = {});

}  // namespace specamp
