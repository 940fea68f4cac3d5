#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "specamp/grid.hpp"
#include "specamp/rng.hpp"

namespace specamp {

using cdouble = std::complex<double>;

// Built-in driver mode recipes. All built-ins are trigonometric polynomials
// in x (strictly band-limited below Nyquist), so spatial smoothness holds by
// construction; time dependence is smooth.
struct ModalRecipe {
    enum class Kind { Uniform, PlaneWavePair, MovingHotspot, UserTable };

    Kind kind = Kind::Uniform;

    // moving hotspot parameters
    double sigma = 0.1;
    std::array<double, 3> speed{0.0, 0.0, 0.0};
    std::array<double, 3> center{0.0, 0.0, 0.0};

    // user table: values[mode][node * total_points + p], unnormalized
    int table_modes = 0;
    std::vector<std::vector<cdouble>> table;

    static ModalRecipe uniform() { return {}; }
    static ModalRecipe plane_wave_pair() {
        ModalRecipe r;
        r.kind = Kind::PlaneWavePair;
        return r;
    }
    static ModalRecipe moving_hotspot(double sigma,
                                      std::array<double, 3> speed,
                                      std::array<double, 3> center = {0, 0, 0}) {
        ModalRecipe r;
        r.kind = Kind::MovingHotspot;
        r.sigma = sigma;
        r.speed = speed;
        r.center = center;
        return r;
    }
    static ModalRecipe user_table(int modes, std::vector<std::vector<cdouble>> values) {
        ModalRecipe r;
        r.kind = Kind::UserTable;
        r.table_modes = modes;
        r.table = std::move(values);
        return r;
    }

    std::string name() const;

    // Hotspot track position at time t (where the peak sits).
    std::array<double, 3> track_position(double t) const;
};

// M driver modes sampled on grid x time nodes, normalized so that
// (1/|domain|) * sum_n int_0^1 int |Phi_n|^2 dx dtau = 1. For the built-in
// recipes the spatial power is constant in time, so the unit window matches
// the paper convention for any t_end; user tables are normalized over their
// own sampled window.
class ModalSet {
  public:
    const TorusGrid& grid() const { return grid_; }
    const TimeGrid& time_grid() const { return time_grid_; }
    int modes() const { return M_; }
    bool time_constant() const { return time_constant_; }
    double normalization() const { return normalization_; }
    const ModalRecipe& recipe() const { return recipe_; }

    // Pointer to the values of mode n at one time node (length total_points).
    const cdouble* slice(int n, int node) const {
        return values_[n].data() +
               static_cast<std::size_t>(time_constant_ ? 0 : node) * grid_.total_points();
    }
    cdouble value(int n, int node, int p) const { return slice(n, node)[p]; }

    // d-linear interpolation of mode n at an off-grid point.
    cdouble interp(int n, int node, const CellWeights& cw) const {
        const cdouble* s = slice(n, node);
        cdouble v = 0.0;
        for (int c = 0; c < cw.count; ++c) v += cw.weight[c] * s[cw.index[c]];
        return v;
    }

    friend ModalSet synthesize_modal_set(const TorusGrid&, const TimeGrid&,
                                         const ModalRecipe&);

  private:
    TorusGrid grid_;
    TimeGrid time_grid_;
    ModalRecipe recipe_;
    int M_ = 0;
    bool time_constant_ = false;
    double normalization_ = 0.0;
    std::vector<std::vector<cdouble>> values_;  // [mode][node-major flat]
};

ModalSet synthesize_modal_set(const TorusGrid& grid, const TimeGrid& time_grid,
                              const ModalRecipe& recipe);

// One draw of the complex Gaussian coefficient vector s: components are
// independent with <s_n> = <s_n s_m> = 0 and <s_n s_m*> = delta_nm.
struct GaussianSample {
    std::vector<cdouble> s;
    int size() const { return static_cast<int>(s.size()); }
    double norm2() const;  // ||s||^2
};

GaussianSample sample_gaussian_vector(int M, RngStream& rng);

// S(.,t_node) = sum_n s_n Phi_n(.,t_node), written into out (total_points).
void assemble_driver_slice(const ModalSet& ms, const GaussianSample& s, int node,
                           cdouble* out);

// Full driver on grid x time, [node][point].
std::vector<std::vector<cdouble>> assemble_driver(const ModalSet& ms,
                                                  const GaussianSample& s);

}  // namespace specamp
