#pragma once

#include <Eigen/Dense>

#include <vector>

#include "specamp/evolve.hpp"
#include "specamp/spectrum.hpp"

namespace specamp {

struct GSupportOptions {
    double eta_max = 48.0;
    int n_eta = 512;
    double mollifier_width = 0.25;  // delta; kernel std is delta/sqrt(2)
    int workers = 0;
};

struct GSupportReport {
    double a = 0.0, b = 0.0;      // predicted support endpoints
    double delta = 0.0;
    std::vector<double> u;        // u-axis
    std::vector<double> g_abs;    // |mollified g|
    std::vector<double> eta;      // probe frequencies
    std::vector<cdouble> psi;     // Psi(probe; eta)
    double outside_mass_frac = 0.0;  // |g| mass outside [a-3d, b+3d]
    double right_edge = 0.0;         // rightmost u with |g| > 1e-3 max
    double total_mass = 0.0;
};

// Numerical support check: samples Psi(x,t; eta) of the Schrodinger form on
// a symmetric real eta grid, applies a Gaussian window exp(-delta^2 eta^2/4)
// (the u-domain kernel has unit mass and std delta/sqrt(2)), and transforms
// back to the u axis. The support of the underlying distribution is the
// interval [a, b] from support_endpoints.
GSupportReport g_support_numeric(const ModalSet& modal_set, const Eigen::VectorXcd& s_hat,
                                 const Mass& mass, const PotentialField& potential,
                                 int probe_point, const GSupportOptions& opts = {});

}  // namespace specamp
