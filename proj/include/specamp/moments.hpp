#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specamp/evolve.hpp"
#include "specamp/optimize.hpp"

namespace specamp {

// Monte Carlo estimate of <|E(x,t)|^q>. Accumulation runs on ln|E|^q with
// log-sum-exp, so the estimate survives amplitudes far beyond double range
// (mean and std_error may still print as inf; log_mean never does).
//
// Finite sampling cannot observe an infinite moment; diverged_flag records
// the exact threshold criterion q*lambda*mu_hat >= 1 instead, with mu_hat
// from the separable optimizer, and `criterion` spells it out.
struct MomentEstimate {
    int q = 1;
    double lambda = 0.0;
    int n_samples = 0;
    double mean = 1.0;
    double log_mean = 0.0;
    double std_error = 0.0;
    double mu_hat = 0.0;
    bool diverged_flag = false;
    std::string criterion;
};

struct McOptions {
    int workers = 0;
    // Importance sampling: radial tilt exp(beta ||s||^2) with analytic
    // reweighting; beta in [0,1). Zero disables the tilt.
    double tilt_beta = 0.0;
};

// Moment over the driver coefficients s at fixed potential realization.
// mu_hat may be passed in to avoid re-running the optimizer.
MomentEstimate mc_moment(int q, double lambda, const Mass& mass, const ModalSet& modal_set,
                         const PotentialField& potential, int probe_point, int n_samples,
                         std::uint64_t seed, const McOptions& opts = {},
                         std::optional<double> mu_hat = std::nullopt);

// Joint moment over potential realizations (outer) and s (inner). The
// divergence convention keys on the same mu_hat, which does not depend on
// the potential. running_means, when given, receives the running mean over
// the outer samples (one entry per realization).
MomentEstimate mc_moment_joint(int q, double lambda, const Mass& mass,
                               const ModalSet& modal_set, const PotentialSpec& potential_spec,
                               int probe_point, int n_outer, int n_inner, std::uint64_t seed,
                               const McOptions& opts = {},
                               std::optional<double> mu_hat = std::nullopt,
                               std::vector<double>* running_means = nullptr);

struct MomentDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed form for the straight-path regime 1/|m| = 0: with no kinetic term
// |E| = exp(lambda s^dag Gram_x s), so <|E|^q> = prod_j 1/(1 - q lambda mu_j)
// over the eigenvalues of the constant-path Gram matrix at x. Throws
// MomentDivergence when q lambda mu_1 >= 1.
double exact_moment_straight(int q, double lambda, const ModalSet& modal_set,
                             int probe_point);

// Least-squares fit of ln|E(x,t; r s_hat)|^q against r^2. The reported slope
// uses the three largest radii (the limit is an asymptotic statement); the
// full-fit slope and r^2 are kept as diagnostics.
struct SlopeFit {
    Eigen::VectorXcd direction;
    std::vector<double> radii;
    std::vector<double> log_moment;  // ln|E|^q per radius
    double slope = 0.0;              // three largest radii
    double intercept = 0.0;
    double full_slope = 0.0;
    double r2 = 0.0;                 // goodness of the full fit
    double target = 0.0;             // q lambda H(s_hat)
    bool poor_fit = false;           // r2 < 0.99
};

SlopeFit growth_slope(const Eigen::VectorXcd& s_hat, const std::vector<double>& radii,
                      int q, double lambda, const Mass& mass, const ModalSet& modal_set,
                      const PotentialField& potential, int probe_point);

// lambda_q from the optimizer plus the slope-based cross-check
// 1/(q H*), H* = max over sampled directions of fitted slope / (q lambda).
struct LambdaQReport {
    int q = 1;
    double mu_hat = 0.0;
    double lambda_q = 0.0;        // 1/(q mu_hat)
    double h_star = 0.0;
    double lambda_q_slope = 0.0;  // 1/(q H*)
    double rel_gap = 0.0;
    CriticalCouplingReport base;
    std::vector<SlopeFit> fits;
};

struct LambdaQOptions {
    int n_directions = 4;          // random directions on top of the structured ones
    std::vector<double> radii = {2.0, 3.0, 4.0, 5.0, 6.0};
    double lambda_for_slope = 1.0;
    std::uint64_t seed = 7;
    MuMethod method = MuMethod::Both;
    PathSearchOptions path_opts{};
    SeparableOptions sep_opts{};
};

LambdaQReport estimate_lambda_q(int q, const ModalSet& modal_set, int probe_point,
                                const Mass& mass, const PotentialField& potential,
                                const LambdaQOptions& opts = {});

}  // namespace specamp
