#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "specamp/grid.hpp"
#include "specamp/modal.hpp"

namespace specamp {

// Pointwise Hermitian matrix gamma_nm(x,tau) = Phi_n^*(x,tau) Phi_m(x,tau).
// gamma is the rank-1 outer product v v^dag with v = conj(Phi), so it is
// Hermitian and positive semidefinite at every point. Off-grid evaluation
// interpolates the mode values and then forms the outer product, which keeps
// the rank-1 structure exact; the same interpolation backs the path Gram
// matrix and the Nystrom kernel, so their nonzero spectra agree identically.
class GammaField {
  public:
    explicit GammaField(const ModalSet& ms) : ms_(&ms) {}

    const ModalSet& modal_set() const { return *ms_; }
    const TorusGrid& grid() const { return ms_->grid(); }
    const TimeGrid& time_grid() const { return ms_->time_grid(); }
    int modes() const { return ms_->modes(); }

    // conj(Phi(x,tau)) as a column vector, at a grid node / off-grid point.
    Eigen::VectorXcd mode_vector(int node, int point) const;
    Eigen::VectorXcd mode_vector(int node, const CellWeights& cw) const;

    Eigen::MatrixXcd gamma_at(int node, int point) const;

    // U(x,tau; s_hat) = s_hat^dag gamma s_hat = |sum_n s_hat_n Phi_n|^2.
    double u_dir(int node, int point, const Eigen::VectorXcd& s_hat) const;
    double u_dir(int node, const CellWeights& cw, const Eigen::VectorXcd& s_hat) const;

  private:
    const ModalSet* ms_;
};

inline GammaField gamma_field(const ModalSet& ms) { return GammaField(ms); }

// The N = M^2 real basis functions phi_i built from gamma. Ordering contract:
// diagonals gamma_nn for n ascending, then sqrt(2) Re(gamma_nm) for n<m in
// lexicographic order, then sqrt(2) Im(gamma_nm) likewise.
class PhiBasis {
  public:
    explicit PhiBasis(const GammaField& gf) : gf_(&gf) {}

    int M() const { return gf_->modes(); }
    int N() const { return M() * M(); }

    double phi(int i, int node, int point) const;
    Eigen::VectorXd phi_all(int node, int point) const;

  private:
    const GammaField* gf_;
};

inline PhiBasis phi_basis(const GammaField& gf) { return PhiBasis(gf); }

// k(s) in R^N: |s_n|^2, sqrt(2) Re(s_n s_m^*), sqrt(2) Im(s_n s_m^*), n<m,
// in the PhiBasis ordering. ||k(s)|| = ||s||^2 identically.
Eigen::VectorXd k_map(const GaussianSample& s);

// Piecewise-linear path on the torus: sorted knot times spanning [0, t],
// positions interpolated along the shortest wraparound displacement. The
// last knot is the endpoint required by the constraint x(t) = x.
class PathPL {
  public:
    static PathPL make(const TorusGrid& grid, std::vector<double> knot_times,
                       std::vector<std::array<double, 3>> knot_positions);
    // Constant path sitting at x for all times.
    static PathPL straight(const TorusGrid& grid, const std::array<double, 3>& x,
                           double t_end);
    // k knots uniform in time, all at the endpoint (a starting guess).
    static PathPL uniform(const TorusGrid& grid, int n_knots,
                          const std::array<double, 3>& endpoint, double t_end);

    int n_knots() const { return static_cast<int>(times_.size()); }
    double t_end() const { return times_.back(); }
    const std::vector<double>& knot_times() const { return times_; }
    const std::vector<std::array<double, 3>>& knot_positions() const { return pos_; }
    std::array<double, 3> endpoint() const { return pos_.back(); }
    std::array<double, 3>& position(int i) { return pos_[i]; }

    std::array<double, 3> eval(double tau) const;

  private:
    const TorusGrid* grid_ = nullptr;
    std::vector<double> times_;
    std::vector<std::array<double, 3>> pos_;
};

// Gram matrix along the path: int_0^t gamma(x(tau), tau) dtau, trapezoid on
// the modal time grid, modes interpolated at the path positions. Hermitian
// PSD by construction.
Eigen::MatrixXcd gram_along_path(const GammaField& gf, const PathPL& path);

// Largest eigenvalue and eigenvector of a Hermitian matrix; the eigenvector
// phase is fixed by making its first significant component real positive.
std::pair<double, Eigen::VectorXcd> top_eig(const Eigen::MatrixXcd& h);

// Nonzero spectrum (descending) of the covariance operator T along the path,
// kernel K(t1,t2) = sum_n Phi_n(x(t1),t1) Phi_n^*(x(t2),t2), discretized by
// trapezoid quadrature with n_quad intervals on [0, t].
std::vector<double> nystrom_covariance_eigs(const ModalSet& ms, const PathPL& path,
                                            int n_quad);

// Direction-resolved maximal gain H(s_hat) = int_0^t max_x U(x,tau) dtau.
// Continuous paths carry no speed limit, so the per-slice spatial max is
// attainable; h_path_check is the lower bound from the piecewise-linear path
// through the per-slice argmax nodes.
struct DirectionGain {
    double h = 0.0;
    double h_path_check = 0.0;
};
DirectionGain h_direction(const GammaField& gf, const Eigen::VectorXcd& s_hat);

// Support endpoints a = int min_x U dtau, b = int max_x U dtau (b equals
// h_direction(s_hat).h by construction).
struct SupportInterval {
    double a = 0.0;
    double b = 0.0;
};
SupportInterval support_endpoints(const GammaField& gf, const Eigen::VectorXcd& s_hat);

// Per-basis-function endpoints (a_i, b_i) plus the derived centering shift
// c_i = -(a_i+b_i)/(2t) and half-width kappa_i = (b_i-a_i)/2.
struct BasisSupport {
    double a = 0.0, b = 0.0;
    double c_shift = 0.0, kappa = 0.0;
};
std::vector<BasisSupport> support_endpoints_basis(const GammaField& gf);

// U(x,tau; s_hat) sampled on grid x time, for the Schrodinger runs.
ScalarTimeField direction_field(const GammaField& gf, const Eigen::VectorXcd& s_hat);

// int_0^t U(x,tau) dtau at a fixed grid point (the straight-path gain).
double straight_gain(const GammaField& gf, int point, const Eigen::VectorXcd& s_hat);

}  // namespace specamp
