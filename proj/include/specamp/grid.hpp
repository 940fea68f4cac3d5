#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace specamp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Corner indices and weights for d-linear interpolation on the torus.
struct CellWeights {
    int count = 0;              // 2^dim
    std::array<int, 8> index{};  // flat grid indices
    std::array<double, 8> weight{};
};

// Periodic box [0,L_1) x ... x [0,L_d), d <= 3, with a uniform grid of
// points_per_axis points on each axis. Wavenumbers follow the symmetric
// FFT layout k = 2*pi*n/L, n in {0,..,N/2, -N/2+1,..,-1}.
class TorusGrid {
  public:
    static TorusGrid make(int dim, const std::vector<double>& side_lengths,
                          const std::vector<int>& points_per_axis);

    int dim() const { return dim_; }
    double side(int axis) const { return side_[axis]; }
    int points(int axis) const { return npts_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    int total_points() const { return total_; }
    double volume() const { return volume_; }
    double cell_volume() const { return volume_ / total_; }

    // Row-major flattening, axis 0 slowest.
    int flat(const std::array<int, 3>& idx) const {
        int f = idx[0];
        for (int a = 1; a < dim_; ++a) f = f * npts_[a] + idx[a];
        return f;
    }
    std::array<int, 3> unflatten(int flat_index) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = dim_ - 1; a >= 0; --a) {
            idx[a] = flat_index % npts_[a];
            flat_index /= npts_[a];
        }
        return idx;
    }

    double coord(int axis, int i) const { return i * spacing_[axis]; }
    std::array<double, 3> point(int flat_index) const {
        auto idx = unflatten(flat_index);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a) x[a] = coord(a, idx[a]);
        return x;
    }

    // x wrapped into [0, L) per axis.
    double wrap(int axis, double x) const;
    // Shortest signed displacement from a to b on the torus, in [-L/2, L/2).
    double wrap_delta(int axis, double a, double b) const;

    // k_n = 2*pi*n/L for grid index j along one axis (symmetric layout).
    std::vector<double> wavenumbers(int axis) const;
    // Same but with the Nyquist mode zeroed (for odd-order derivatives).
    std::vector<double> wavenumbers_odd(int axis) const;

    // Interpolation cell for an arbitrary point (dim coordinates used).
    CellWeights cell_weights(const std::array<double, 3>& x) const;

  private:
    int dim_ = 1;
    std::array<double, 3> side_{1.0, 1.0, 1.0};
    std::array<int, 3> npts_{1, 1, 1};
    std::array<double, 3> spacing_{0.0, 0.0, 0.0};
    int total_ = 1;
    double volume_ = 1.0;
};

TorusGrid make_torus_grid(int dim, const std::vector<double>& side_lengths,
                          const std::vector<int>& points_per_axis);

// Uniform time lattice on [0, t_end]. Driver discontinuities are only
// admitted at lattice nodes so integration steps never straddle one.
class TimeGrid {
  public:
    static TimeGrid make(double t_end, int n_steps,
                         const std::vector<double>& breakpoints = {});

    double t_end() const { return t_end_; }
    int n_steps() const { return n_steps_; }
    int n_nodes() const { return n_steps_ + 1; }
    double dt() const { return dt_; }
    double node(int j) const { return j * dt_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

  private:
    double t_end_ = 1.0;
    int n_steps_ = 1;
    double dt_ = 1.0;
    std::vector<double> breakpoints_;
};

// Real scalar field sampled on grid x time nodes. A frozen field stores a
// single slice shared by every node.
struct ScalarTimeField {
    bool frozen = true;
    std::vector<std::vector<double>> slices;  // [node][flat point] (frozen: 1 slice)

    const std::vector<double>& slice(int node) const {
        return frozen ? slices[0] : slices[node];
    }
    bool empty() const { return slices.empty(); }

    double interp(const TorusGrid& grid, const CellWeights& cw, int node) const {
        const auto& s = slice(node);
        double v = 0.0;
        for (int c = 0; c < cw.count; ++c) v += cw.weight[c] * s[cw.index[c]];
        (void)grid;
        return v;
    }
};

}  // namespace specamp
