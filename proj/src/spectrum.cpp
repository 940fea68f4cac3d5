#include "specamp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specamp {

Eigen::VectorXcd GammaField::mode_vector(int node, int point) const {
    const int M = ms_->modes();
    Eigen::VectorXcd v(M);
    for (int n = 0; n < M; ++n) v(n) = std::conj(ms_->value(n, node, point));
    return v;
}

Eigen::VectorXcd GammaField::mode_vector(int node, const CellWeights& cw) const {
    const int M = ms_->modes();
    Eigen::VectorXcd v(M);
    for (int n = 0; n < M; ++n) v(n) = std::conj(ms_->interp(n, node, cw));
    return v;
}

Eigen::MatrixXcd GammaField::gamma_at(int node, int point) const {
    const Eigen::VectorXcd v = mode_vector(node, point);
    return v * v.adjoint();
}

double GammaField::u_dir(int node, int point, const Eigen::VectorXcd& s_hat) const {
    cdouble acc = 0.0;
    for (int n = 0; n < ms_->modes(); ++n) acc += s_hat(n) * ms_->value(n, node, point);
    return std::norm(acc);
}

double GammaField::u_dir(int node, const CellWeights& cw,
                         const Eigen::VectorXcd& s_hat) const {
    cdouble acc = 0.0;
    for (int n = 0; n < ms_->modes(); ++n) acc += s_hat(n) * ms_->interp(n, node, cw);
    return std::norm(acc);
}

namespace {

// (n,m) pair for the q-th off-diagonal slot, n < m lexicographic.
std::pair<int, int> pair_index(int M, int q) {
    for (int n = 0; n < M; ++n) {
        const int row = M - n - 1;
        if (q < row) return {n, n + 1 + q};
        q -= row;
    }
    throw std::logic_error("pair_index out of range");
}

}  // namespace

double PhiBasis::phi(int i, int node, int point) const {
    const int M = this->M();
    const ModalSet& ms = gf_->modal_set();
    if (i < M) {
        return std::norm(ms.value(i, node, point));
    }
    const int n_pairs = M * (M - 1) / 2;
    const bool re_block = i < M + n_pairs;
    const int q = re_block ? i - M : i - M - n_pairs;
    auto [n, m] = pair_index(M, q);
    const cdouble g = std::conj(ms.value(n, node, point)) * ms.value(m, node, point);
    return std::sqrt(2.0) * (re_block ? g.real() : g.imag());
}

Eigen::VectorXd PhiBasis::phi_all(int node, int point) const {
    Eigen::VectorXd v(N());
    for (int i = 0; i < N(); ++i) v(i) = phi(i, node, point);
    return v;
}

Eigen::VectorXd k_map(const GaussianSample& s) {
    const int M = s.size();
    Eigen::VectorXd k(M * M);
    for (int n = 0; n < M; ++n) k(n) = std::norm(s.s[n]);
    int re = M, im = M + M * (M - 1) / 2;
    for (int n = 0; n < M; ++n)
        for (int m = n + 1; m < M; ++m) {
            const cdouble z = s.s[n] * std::conj(s.s[m]);
            k(re++) = std::sqrt(2.0) * z.real();
            k(im++) = std::sqrt(2.0) * z.imag();
        }
    return k;
}

PathPL PathPL::make(const TorusGrid& grid, std::vector<double> knot_times,
                    std::vector<std::array<double, 3>> knot_positions) {
    if (knot_times.size() != knot_positions.size() || knot_times.size() < 2)
        throw std::invalid_argument("path: need >= 2 knots with matching times");
    if (std::abs(knot_times.front()) > 1e-12)
        throw std::invalid_argument("path: first knot must sit at time 0");
    for (std::size_t i = 1; i < knot_times.size(); ++i)
        if (knot_times[i] <= knot_times[i - 1])
            throw std::invalid_argument("path: knot times must be strictly increasing");
    PathPL p;
    p.grid_ = &grid;
    p.times_ = std::move(knot_times);
    p.pos_ = std::move(knot_positions);
    for (auto& x : p.pos_)
        for (int a = 0; a < grid.dim(); ++a) x[a] = grid.wrap(a, x[a]);
    return p;
}

PathPL PathPL::straight(const TorusGrid& grid, const std::array<double, 3>& x,
                        double t_end) {
    return make(grid, {0.0, t_end}, {x, x});
}

PathPL PathPL::uniform(const TorusGrid& grid, int n_knots,
                       const std::array<double, 3>& endpoint, double t_end) {
    if (n_knots < 2) throw std::invalid_argument("path: need >= 2 knots");
    std::vector<double> times(n_knots);
    std::vector<std::array<double, 3>> pos(n_knots, endpoint);
    for (int i = 0; i < n_knots; ++i)
        times[i] = t_end * static_cast<double>(i) / (n_knots - 1);
    return make(grid, std::move(times), std::move(pos));
}

std::array<double, 3> PathPL::eval(double tau) const {
    if (tau <= times_.front()) return pos_.front();
    if (tau >= times_.back()) return pos_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), tau);
    const int j = static_cast<int>(it - times_.begin()) - 1;
    const double f = (tau - times_[j]) / (times_[j + 1] - times_[j]);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < grid_->dim(); ++a) {
        const double d = grid_->wrap_delta(a, pos_[j][a], pos_[j + 1][a]);
        x[a] = grid_->wrap(a, pos_[j][a] + f * d);
    }
    return x;
}

Eigen::MatrixXcd gram_along_path(const GammaField& gf, const PathPL& path) {
    const TimeGrid& tg = gf.time_grid();
    if (path.t_end() > tg.t_end() * (1.0 + 1e-12))
        throw std::invalid_argument("gram: path horizon exceeds the time grid");
    const int M = gf.modes();
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(M, M);
    for (int j = 0; j < tg.n_nodes(); ++j) {
        const double w = tg.dt() * ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
        const auto cw = gf.grid().cell_weights(path.eval(tg.node(j)));
        const Eigen::VectorXcd v = gf.mode_vector(j, cw);
        gram.noalias() += w * (v * v.adjoint());
    }
    return gram;
}

std::pair<double, Eigen::VectorXcd> top_eig(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("top_eig: square matrix required");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("top_eig: eigensolver failed");
    const int last = static_cast<int>(h.rows()) - 1;
    Eigen::VectorXcd v = es.eigenvectors().col(last);
    // deterministic phase: first significant component real positive
    const double scale = v.cwiseAbs().maxCoeff();
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12 * scale) {
            v *= std::conj(v(i)) / std::abs(v(i));
            break;
        }
    }
    return {es.eigenvalues()(last), v};
}

std::vector<double> nystrom_covariance_eigs(const ModalSet& ms, const PathPL& path,
                                            int n_quad) {
    if (n_quad < 8) throw std::invalid_argument("nystrom: n_quad must be >= 8");
    const TimeGrid& tg = ms.time_grid();
    const double t = path.t_end();
    const int n_nodes = n_quad + 1;
    const double h = t / n_quad;
    const int M = ms.modes();

    // Mode values along the path at the quadrature times, interpolated in
    // space (d-linear) and time (linear between node slices).
    Eigen::MatrixXcd phi(n_nodes, M);
    for (int i = 0; i < n_nodes; ++i) {
        const double tau = i * h;
        const auto cw = ms.grid().cell_weights(path.eval(tau));
        double pos = tau / tg.dt();
        int j0 = static_cast<int>(std::floor(pos));
        if (j0 >= tg.n_steps()) j0 = tg.n_steps() - 1;
        const double f = pos - j0;
        for (int n = 0; n < M; ++n) {
            const cdouble v0 = ms.interp(n, j0, cw);
            const cdouble v1 = ms.interp(n, j0 + 1, cw);
            phi(i, n) = (1.0 - f) * v0 + f * v1;
        }
    }

    Eigen::VectorXd sqw(n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        sqw(i) = std::sqrt(h * ((i == 0 || i == n_quad) ? 0.5 : 1.0));

    // Symmetrized Nystrom matrix A_ij = sqrt(w_i) K(t_i,t_j) sqrt(w_j) with
    // K(t_i,t_j) = sum_n Phi_n(i) Phi_n^*(j).
    Eigen::MatrixXcd a = (sqw.asDiagonal() * phi) * (sqw.asDiagonal() * phi).adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("nystrom: eigensolver failed");

    std::vector<double> eigs;
    const double cutoff = 1e-10 * std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = n_nodes - 1; i >= 0; --i)
        if (es.eigenvalues()(i) > cutoff) eigs.push_back(es.eigenvalues()(i));
    std::sort(eigs.begin(), eigs.end(), std::greater<>());
    return eigs;
}

namespace {

// Per-node max (or min) of U over the grid, plus the argmax point.
void slice_extrema(const GammaField& gf, int node, const Eigen::VectorXcd& s_hat,
                   double& mn, double& mx, int& argmax) {
    const int total = gf.grid().total_points();
    mn = std::numeric_limits<double>::infinity();
    mx = -mn;
    argmax = 0;
    for (int p = 0; p < total; ++p) {
        const double u = gf.u_dir(node, p, s_hat);
        mn = std::min(mn, u);
        if (u > mx) {
            mx = u;
            argmax = p;
        }
    }
}

// int U(x(tau),tau) dtau along a path, trapezoid on the time grid refined
// by an integer factor (time-interpolated mode values between nodes).
double path_u_integral(const GammaField& gf, const PathPL& path,
                       const Eigen::VectorXcd& s_hat, int refine) {
    const TimeGrid& tg = gf.time_grid();
    const int n = tg.n_steps() * refine;
    const double h = tg.t_end() / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double tau = i * h;
        const auto cw = gf.grid().cell_weights(path.eval(tau));
        double u;
        if (refine == 1) {
            u = gf.u_dir(i, cw, s_hat);
        } else {
            double pos = tau / tg.dt();
            int j0 = static_cast<int>(std::floor(pos));
            if (j0 >= tg.n_steps()) j0 = tg.n_steps() - 1;
            const double f = pos - j0;
            cdouble amp = 0.0;
            for (int m = 0; m < gf.modes(); ++m)
                amp += s_hat(m) * ((1.0 - f) * gf.modal_set().interp(m, j0, cw) +
                                   f * gf.modal_set().interp(m, j0 + 1, cw));
            u = std::norm(amp);
        }
        acc += u * ((i == 0 || i == n) ? 0.5 : 1.0);
    }
    return acc * h;
}

}  // namespace

DirectionGain h_direction(const GammaField& gf, const Eigen::VectorXcd& s_hat) {
    if (std::abs(s_hat.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("h_direction: direction must be unit norm");
    const TimeGrid& tg = gf.time_grid();
    DirectionGain out;
    std::vector<double> argmax_times(tg.n_nodes());
    std::vector<std::array<double, 3>> argmax_pos(tg.n_nodes());
    for (int j = 0; j < tg.n_nodes(); ++j) {
        double mn, mx;
        int am;
        slice_extrema(gf, j, s_hat, mn, mx, am);
        out.h += mx * tg.dt() * ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
        argmax_times[j] = tg.node(j);
        argmax_pos[j] = gf.grid().point(am);
    }
    // Lower-bound cross-check: an actual PL path through the argmax nodes,
    // integrated on a refined lattice so inter-node travel is charged.
    PathPL track = PathPL::make(gf.grid(), argmax_times, argmax_pos);
    out.h_path_check = path_u_integral(gf, track, s_hat, 4);
    return out;
}

SupportInterval support_endpoints(const GammaField& gf, const Eigen::VectorXcd& s_hat) {
    if (std::abs(s_hat.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("support_endpoints: direction must be unit norm");
    const TimeGrid& tg = gf.time_grid();
    SupportInterval s;
    for (int j = 0; j < tg.n_nodes(); ++j) {
        double mn, mx;
        int am;
        slice_extrema(gf, j, s_hat, mn, mx, am);
        const double w = tg.dt() * ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
        s.a += mn * w;
        s.b += mx * w;
    }
    return s;
}

std::vector<BasisSupport> support_endpoints_basis(const GammaField& gf) {
    const TimeGrid& tg = gf.time_grid();
    PhiBasis basis(gf);
    const int total = gf.grid().total_points();
    std::vector<BasisSupport> out(basis.N());
    for (int i = 0; i < basis.N(); ++i) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < tg.n_nodes(); ++j) {
            double mn = std::numeric_limits<double>::infinity();
            double mx = -mn;
            for (int p = 0; p < total; ++p) {
                const double v = basis.phi(i, j, p);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            const double w = tg.dt() * ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
            a += mn * w;
            b += mx * w;
        }
        out[i].a = a;
        out[i].b = b;
        out[i].c_shift = -(a + b) / (2.0 * tg.t_end());
        out[i].kappa = (b - a) / 2.0;
    }
    return out;
}

ScalarTimeField direction_field(const GammaField& gf, const Eigen::VectorXcd& s_hat) {
    const TimeGrid& tg = gf.time_grid();
    const int total = gf.grid().total_points();
    ScalarTimeField f;
    f.frozen = gf.modal_set().time_constant();
    const int n_slices = f.frozen ? 1 : tg.n_nodes();
    f.slices.resize(n_slices);
    for (int j = 0; j < n_slices; ++j) {
        f.slices[j].resize(total);
        for (int p = 0; p < total; ++p) f.slices[j][p] = gf.u_dir(j, p, s_hat);
    }
    return f;
}

double straight_gain(const GammaField& gf, int point, const Eigen::VectorXcd& s_hat) {
    const TimeGrid& tg = gf.time_grid();
    double acc = 0.0;
    for (int j = 0; j < tg.n_nodes(); ++j)
        acc += gf.u_dir(j, point, s_hat) * tg.dt() *
               ((j == 0 || j == tg.n_steps()) ? 0.5 : 1.0);
    return acc;
}

}  // namespace specamp
