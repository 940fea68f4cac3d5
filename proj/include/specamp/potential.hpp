#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "specamp/grid.hpp"

namespace specamp {

// Random potential specification. The Gaussian kinds are synthesized
// spectrally with a Gaussian-shaped correlation (C-infinity, so comfortably
// inside the C^6-in-space / C^2-in-time admissibility window). Other
// potential classes enter through user tables.
struct PotentialSpec {
    enum class Kind { Zero, FrozenGaussian, TimeDependentGaussian, UserTable };

    Kind kind = Kind::Zero;
    double correlation_length = 0.2;
    double correlation_time = 1.0;  // time-dependent kind only
    double amplitude = 1.0;         // pointwise standard deviation
    std::uint64_t seed = 0;

    std::vector<std::vector<double>> table;  // [node][point] or single slice

    static PotentialSpec zero() { return {}; }
    static PotentialSpec frozen_gaussian(double corr_length, double amplitude,
                                         std::uint64_t seed) {
        PotentialSpec s;
        s.kind = Kind::FrozenGaussian;
        s.correlation_length = corr_length;
        s.amplitude = amplitude;
        s.seed = seed;
        return s;
    }
    static PotentialSpec time_dependent_gaussian(double corr_length, double corr_time,
                                                 double amplitude, std::uint64_t seed) {
        PotentialSpec s = frozen_gaussian(corr_length, amplitude, seed);
        s.kind = Kind::TimeDependentGaussian;
        s.correlation_time = corr_time;
        return s;
    }
    static PotentialSpec user_table(std::vector<std::vector<double>> values) {
        PotentialSpec s;
        s.kind = Kind::UserTable;
        s.table = std::move(values);
        return s;
    }
};

// One realization of the real potential rho(x,t) with its cached uniform
// norms |||rho|||, |||grad rho|||, |||lap rho||| (spectral derivatives).
class PotentialField {
  public:
    const ScalarTimeField& field() const { return rho_; }
    const std::vector<double>& slice(int node) const { return rho_.slice(node); }
    bool frozen() const { return rho_.frozen; }
    bool is_zero() const { return zero_; }

    double norm_rho() const { return norm_rho_; }
    double norm_grad() const { return norm_grad_; }
    double norm_lap() const { return norm_lap_; }

    friend PotentialField synthesize_potential(const TorusGrid&, const TimeGrid&,
                                               const PotentialSpec&);

  private:
    ScalarTimeField rho_;
    bool zero_ = true;
    double norm_rho_ = 0.0, norm_grad_ = 0.0, norm_lap_ = 0.0;
};

PotentialField synthesize_potential(const TorusGrid& grid, const TimeGrid& time_grid,
                                    const PotentialSpec& spec);

// (|||rho|||, |||grad rho|||, |||lap rho|||), maxima over grid x time.
std::tuple<double, double, double> potential_norms(const PotentialField& field);

}  // namespace specamp
