#include "specamp/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace specamp {

TorusGrid TorusGrid::make(int dim, const std::vector<double>& side_lengths,
                          const std::vector<int>& points_per_axis) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("torus grid: dim exceeds scope d<=3 (got " +
                                    std::to_string(dim) + ")");
    if (static_cast<int>(side_lengths.size()) != dim ||
        static_cast<int>(points_per_axis.size()) != dim)
        throw std::invalid_argument("torus grid: need one side length and one point count per axis");

    TorusGrid g;
    g.dim_ = dim;
    g.total_ = 1;
    g.volume_ = 1.0;
    for (int a = 0; a < dim; ++a) {
        if (side_lengths[a] <= 0.0)
            throw std::invalid_argument("torus grid: side lengths must be positive");
        if (points_per_axis[a] < 2 || points_per_axis[a] % 2 != 0)
            throw std::invalid_argument(
                "torus grid: points per axis must be even and >= 2 for the symmetric wavenumber layout");
        g.side_[a] = side_lengths[a];
        g.npts_[a] = points_per_axis[a];
        g.spacing_[a] = side_lengths[a] / points_per_axis[a];
        g.total_ *= points_per_axis[a];
        g.volume_ *= side_lengths[a];
    }
    return g;
}

TorusGrid make_torus_grid(int dim, const std::vector<double>& side_lengths,
                          const std::vector<int>& points_per_axis) {
    return TorusGrid::make(dim, side_lengths, points_per_axis);
}

double TorusGrid::wrap(int axis, double x) const {
    const double L = side_[axis];
    double y = std::fmod(x, L);
    if (y < 0.0) y += L;
    if (y >= L) y -= L;  // fmod can round up to L
    return y;
}

double TorusGrid::wrap_delta(int axis, double a, double b) const {
    const double L = side_[axis];
    double d = std::fmod(b - a, L);
    if (d < -0.5 * L) d += L;
    if (d >= 0.5 * L) d -= L;
    return d;
}

std::vector<double> TorusGrid::wavenumbers(int axis) const {
    const int n = npts_[axis];
    std::vector<double> k(n);
    const double base = kTwoPi / side_[axis];
    for (int j = 0; j < n; ++j) {
        const int m = (j <= n / 2) ? j : j - n;
        k[j] = base * m;
    }
    return k;
}

std::vector<double> TorusGrid::wavenumbers_odd(int axis) const {
    auto k = wavenumbers(axis);
    k[npts_[axis] / 2] = 0.0;  // Nyquist has no well-defined sign
    return k;
}

CellWeights TorusGrid::cell_weights(const std::array<double, 3>& x) const {
    // Per-axis lower corner and fraction.
    std::array<int, 3> i0{0, 0, 0};
    std::array<double, 3> f{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        double u = wrap(a, x[a]) / spacing_[a];
        int i = static_cast<int>(std::floor(u));
        if (i >= npts_[a]) i -= npts_[a];
        i0[a] = i;
        f[a] = u - i;
    }
    CellWeights cw;
    cw.count = 1 << dim_;
    for (int c = 0; c < cw.count; ++c) {
        std::array<int, 3> idx{0, 0, 0};
        double w = 1.0;
        for (int a = 0; a < dim_; ++a) {
            const int hi = (c >> a) & 1;
            idx[a] = (i0[a] + hi) % npts_[a];
            w *= hi ? f[a] : (1.0 - f[a]);
        }
        cw.index[c] = flat(idx);
        cw.weight[c] = w;
    }
    return cw;
}

TimeGrid TimeGrid::make(double t_end, int n_steps,
                        const std::vector<double>& breakpoints) {
    if (t_end <= 0.0) throw std::invalid_argument("time grid: t_end must be positive");
    if (n_steps < 1) throw std::invalid_argument("time grid: n_steps must be >= 1");
    TimeGrid tg;
    tg.t_end_ = t_end;
    tg.n_steps_ = n_steps;
    tg.dt_ = t_end / n_steps;
    for (double b : breakpoints) {
        if (b < 0.0 || b > t_end)
            throw std::invalid_argument("time grid: breakpoint outside [0, t_end]");
        const double pos = b / tg.dt_;
        if (std::abs(pos - std::round(pos)) > 1e-9 * n_steps)
            throw std::invalid_argument(
                "time grid: breakpoint " + std::to_string(b) +
                " does not coincide with a grid node; refine n_steps");
    }
    tg.breakpoints_ = breakpoints;
    return tg;
}

}  // namespace specamp
