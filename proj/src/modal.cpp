#include "specamp/modal.hpp"

#include <cmath>
#include <stdexcept>

namespace specamp {

std::string ModalRecipe::name() const {
    switch (kind) {
        case Kind::Uniform: return "uniform";
        case Kind::PlaneWavePair: return "plane-wave-pair";
        case Kind::MovingHotspot: return "moving-hotspot";
        case Kind::UserTable: return "user-table";
    }
    return "?";
}

std::array<double, 3> ModalRecipe::track_position(double t) const {
    return {center[0] + speed[0] * t, center[1] + speed[1] * t,
            center[2] + speed[2] * t};
}

namespace {

// Periodic Gaussian bump profile along one axis: a cosine series with
// Gaussian-decaying coefficients, cut strictly below Nyquist.
struct AxisProfile {
    std::vector<double> coeff;  // coeff[n], n = 1..ncut
    double base = 1.0;          // n = 0 term
    double k1 = 0.0;            // 2*pi/L

    double eval(double y) const {
        double v = base;
        for (std::size_t n = 1; n <= coeff.size(); ++n)
            v += 2.0 * coeff[n - 1] * std::cos(k1 * static_cast<double>(n) * y);
        return v;
    }
};

AxisProfile make_axis_profile(const TorusGrid& grid, int axis, double sigma) {
    AxisProfile p;
    const int N = grid.points(axis);
    const int ncut = N / 2 - 1;
    p.k1 = kTwoPi / grid.side(axis);
    const double tail = p.k1 * (ncut + 1);
    if (std::exp(-tail * tail * sigma * sigma / 4.0) > 1e-8)
        throw std::invalid_argument(
            "moving-hotspot: width " + std::to_string(sigma) +
            " needs modes beyond the band limit of " + std::to_string(N) +
            " points; widen the hotspot or refine the grid");
    p.coeff.resize(ncut);
    for (int n = 1; n <= ncut; ++n) {
        const double k = p.k1 * n;
        p.coeff[n - 1] = std::exp(-k * k * sigma * sigma / 4.0);
    }
    return p;
}

// Evaluates the unnormalized mode n of a built-in recipe on the whole grid
// at time tau.
void eval_builtin_slice(const ModalRecipe& r, const TorusGrid& grid, int n,
                        double tau, const std::vector<AxisProfile>& profiles,
                        cdouble* out) {
    const int total = grid.total_points();
    switch (r.kind) {
        case ModalRecipe::Kind::Uniform:
            for (int p = 0; p < total; ++p) out[p] = 1.0;
            return;
        case ModalRecipe::Kind::PlaneWavePair: {
            const double k1 = kTwoPi / grid.side(0);
            for (int p = 0; p < total; ++p) {
                const double x = grid.point(p)[0];
                out[p] = (n == 0) ? std::cos(k1 * x) : std::sin(k1 * x);
            }
            return;
        }
        case ModalRecipe::Kind::MovingHotspot: {
            // separable product of per-axis profiles, peak at center + v*tau
            std::array<std::vector<double>, 3> axis_vals;
            for (int a = 0; a < grid.dim(); ++a) {
                axis_vals[a].resize(grid.points(a));
                const double off = r.center[a] + r.speed[a] * tau;
                for (int i = 0; i < grid.points(a); ++i)
                    axis_vals[a][i] = profiles[a].eval(grid.coord(a, i) - off);
            }
            for (int p = 0; p < total; ++p) {
                auto idx = grid.unflatten(p);
                double v = 1.0;
                for (int a = 0; a < grid.dim(); ++a) v *= axis_vals[a][idx[a]];
                out[p] = v;
            }
            return;
        }
        case ModalRecipe::Kind::UserTable:
            throw std::logic_error("eval_builtin_slice on user table");
    }
}

}  // namespace

ModalSet synthesize_modal_set(const TorusGrid& grid, const TimeGrid& time_grid,
                              const ModalRecipe& recipe) {
    ModalSet ms;
    ms.grid_ = grid;
    ms.time_grid_ = time_grid;
    ms.recipe_ = recipe;

    const int total = grid.total_points();
    const int n_nodes = time_grid.n_nodes();
    const double cell = grid.cell_volume();

    std::vector<AxisProfile> profiles;
    switch (recipe.kind) {
        case ModalRecipe::Kind::Uniform:
            ms.M_ = 1;
            ms.time_constant_ = true;
            break;
        case ModalRecipe::Kind::PlaneWavePair:
            ms.M_ = 2;
            ms.time_constant_ = true;
            if (grid.points(0) < 4)
                throw std::invalid_argument("plane-wave-pair: need >= 4 points on axis 0");
            break;
        case ModalRecipe::Kind::MovingHotspot: {
            ms.M_ = 1;
            bool moving = false;
            for (int a = 0; a < grid.dim(); ++a) {
                profiles.push_back(make_axis_profile(grid, a, recipe.sigma));
                moving = moving || recipe.speed[a] != 0.0;
            }
            ms.time_constant_ = !moving;
            break;
        }
        case ModalRecipe::Kind::UserTable: {
            if (recipe.table_modes < 1 ||
                static_cast<int>(recipe.table.size()) != recipe.table_modes)
                throw std::invalid_argument("user-table: mode count mismatch");
            ms.M_ = recipe.table_modes;
            const std::size_t per_node = static_cast<std::size_t>(total);
            const std::size_t full = per_node * n_nodes;
            bool constant = true;
            for (const auto& mode : recipe.table) {
                if (mode.size() == per_node) continue;
                if (mode.size() == full) {
                    constant = false;
                    continue;
                }
                throw std::invalid_argument(
                    "user-table: each mode needs total_points or total_points*n_nodes values");
            }
            ms.time_constant_ = constant;
            break;
        }
    }

    // Normalization integral. Built-in recipes are evaluated analytically on
    // an auxiliary lattice covering the unit window; their spatial power is
    // time independent, so the trapezoid is exact. User tables are averaged
    // over their own sampled window.
    double z = 0.0;
    if (recipe.kind == ModalRecipe::Kind::UserTable) {
        const bool constant = ms.time_constant_;
        for (int n = 0; n < ms.M_; ++n) {
            const auto& mode = recipe.table[n];
            if (constant) {
                double pw = 0.0;
                for (int p = 0; p < total; ++p) pw += std::norm(mode[p]);
                z += pw * cell;
            } else {
                double acc = 0.0;
                for (int j = 0; j < n_nodes; ++j) {
                    double pw = 0.0;
                    const cdouble* s = mode.data() + static_cast<std::size_t>(j) * total;
                    for (int p = 0; p < total; ++p) pw += std::norm(s[p]);
                    const double w = (j == 0 || j == n_nodes - 1) ? 0.5 : 1.0;
                    acc += w * pw;
                }
                z += acc / time_grid.n_steps() * cell;
            }
        }
    } else {
        const int n_aux = 256;
        std::vector<cdouble> buf(total);
        for (int n = 0; n < ms.M_; ++n) {
            double acc = 0.0;
            for (int j = 0; j <= n_aux; ++j) {
                const double tau = static_cast<double>(j) / n_aux;
                eval_builtin_slice(recipe, grid, n, tau, profiles, buf.data());
                double pw = 0.0;
                for (int p = 0; p < total; ++p) pw += std::norm(buf[p]);
                acc += ((j == 0 || j == n_aux) ? 0.5 : 1.0) * pw;
            }
            z += acc / n_aux * cell;
        }
    }
    z /= grid.volume();
    if (z <= 0.0) throw std::invalid_argument("modal set: zero total power");
    const double scale = (std::abs(z - 1.0) < 1e-12) ? 1.0 : 1.0 / std::sqrt(z);

    // Sample the scaled modes on the grid x time lattice.
    ms.values_.resize(ms.M_);
    const int stored_nodes = ms.time_constant_ ? 1 : n_nodes;
    for (int n = 0; n < ms.M_; ++n) {
        ms.values_[n].resize(static_cast<std::size_t>(stored_nodes) * total);
        for (int j = 0; j < stored_nodes; ++j) {
            cdouble* out = ms.values_[n].data() + static_cast<std::size_t>(j) * total;
            if (recipe.kind == ModalRecipe::Kind::UserTable) {
                const auto& mode = recipe.table[n];
                const cdouble* src =
                    mode.data() +
                    (mode.size() == static_cast<std::size_t>(total)
                         ? 0
                         : static_cast<std::size_t>(j) * total);
                for (int p = 0; p < total; ++p) out[p] = scale * src[p];
            } else {
                eval_builtin_slice(recipe, grid, n, time_grid.node(j), profiles, out);
                if (scale != 1.0)
                    for (int p = 0; p < total; ++p) out[p] *= scale;
            }
        }
    }

    ms.normalization_ = z * scale * scale;
    return ms;
}

double GaussianSample::norm2() const {
    double v = 0.0;
    for (const auto& z : s) v += std::norm(z);
    return v;
}

GaussianSample sample_gaussian_vector(int M, RngStream& rng) {
    GaussianSample g;
    g.s.resize(M);
    for (int n = 0; n < M; ++n) g.s[n] = rng.cgauss();
    return g;
}

void assemble_driver_slice(const ModalSet& ms, const GaussianSample& s, int node,
                           cdouble* out) {
    if (s.size() != ms.modes())
        throw std::invalid_argument("assemble_driver: sample length " +
                                    std::to_string(s.size()) + " != M = " +
                                    std::to_string(ms.modes()));
    const int total = ms.grid().total_points();
    for (int p = 0; p < total; ++p) out[p] = 0.0;
    for (int n = 0; n < ms.modes(); ++n) {
        const cdouble* mode = ms.slice(n, node);
        const cdouble sn = s.s[n];
        for (int p = 0; p < total; ++p) out[p] += sn * mode[p];
    }
}

std::vector<std::vector<cdouble>> assemble_driver(const ModalSet& ms,
                                                  const GaussianSample& s) {
    const int n_nodes = ms.time_grid().n_nodes();
    std::vector<std::vector<cdouble>> out(n_nodes);
    for (int j = 0; j < n_nodes; ++j) {
        out[j].resize(ms.grid().total_points());
        assemble_driver_slice(ms, s, j, out[j].data());
    }
    return out;
}

}  // namespace specamp
