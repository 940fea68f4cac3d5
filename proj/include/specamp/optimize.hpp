#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "specamp/spectrum.hpp"

namespace specamp {

enum class MuMethod { PathSearch, Separable, Both };

struct PathSearchOptions {
    int n_knots = 32;
    int n_restarts = 10;
    int n_iters = 3000;       // annealing iterations per restart
    double temp0 = 0.1;       // initial temperature, relative to objective scale
    double cooling = 0.995;   // geometric schedule
    std::uint64_t seed = 1;
    int workers = 0;          // 0 = auto
};

struct SeparableOptions {
    int n_starts = 24;        // random directions (plus structured starts)
    int max_sweeps = 200;     // ascent iterations per start
    double tol = 1e-12;
    std::uint64_t seed = 1;
};

struct PathSearchResult {
    double mu = 0.0;
    PathPL best_path;
    bool converged = false;   // annealing stabilized; value is a lower bound either way
};

struct SeparableResult {
    double mu = 0.0;
    Eigen::VectorXcd u_hat;
};

// Lower-bound search: simulated annealing over piecewise-linear paths with
// fixed endpoint, objective = top eigenvalue of the path Gram matrix.
PathSearchResult path_search_mu(const GammaField& gf, const std::array<double, 3>& endpoint,
                                const PathSearchOptions& opts = {});

// Reference method: because continuous paths carry no speed limit,
// mu = sup_{u_hat} int_0^t max_x u_hat^dag gamma(x,tau) u_hat dtau. The sphere
// search alternates the per-slice argmax track with the top eigenvector of
// the Gram matrix along it (monotone ascent), multi-started.
SeparableResult separable_mu(const GammaField& gf, const SeparableOptions& opts = {});

// mu estimates and critical couplings lambda_q = 1/(q mu).
struct CriticalCouplingReport {
    double mu_opt = 0.0;          // best available estimate (see method tag)
    double mu_separable = 0.0;
    double mu_path = 0.0;
    bool path_converged = false;
    Eigen::VectorXcd u_hat_separable;
    std::vector<double> mu_straight;  // per grid point, constant paths
    double mu_straight_max = 0.0;
    std::vector<std::pair<Eigen::VectorXcd, double>> h_dir;  // queried directions
    std::vector<std::pair<int, double>> lambda_q;            // (q, 1/(q mu_opt))
    std::string method;
};

CriticalCouplingReport optimize_mu(const GammaField& gf, const std::array<double, 3>& endpoint,
                                   MuMethod method, const std::vector<int>& qs = {1, 2},
                                   const std::vector<Eigen::VectorXcd>& h_directions = {},
                                   const PathSearchOptions& path_opts = {},
                                   const SeparableOptions& sep_opts = {});

}  // namespace specamp
