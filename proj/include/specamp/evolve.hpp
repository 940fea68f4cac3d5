#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "specamp/fft.hpp"
#include "specamp/grid.hpp"
#include "specamp/modal.hpp"
#include "specamp/potential.hpp"

namespace specamp {

// Complex mass in the closed upper half-plane minus the origin.
struct ComplexMass {
    cdouble m;

    explicit ComplexMass(cdouble mass);
    static ComplexMass real(double m) { return ComplexMass(cdouble(m, 0.0)); }
    static ComplexMass imaginary(double gamma) { return ComplexMass(cdouble(0.0, gamma)); }
};

// nullopt encodes the straight-path regime 1/|m| = 0 (no kinetic term).
using Mass = std::optional<ComplexMass>;

// Complex field on the grid at one time. Amplitudes are kept log-rescaled:
// the physical field is exp(log_offset) * values, so near-threshold runs
// never overflow a double.
struct FieldState {
    std::vector<cdouble> values;
    double time = 0.0;
    double log_offset = 0.0;

    static FieldState ones(const TorusGrid& grid, double t0 = 0.0);

    // ln|field| at one point, log-offset aware.
    double log_abs(int p) const { return log_offset + std::log(std::abs(values[p])); }
    cdouble full_value(int p) const { return std::exp(log_offset) * values[p]; }
    double l2_norm(const TorusGrid& grid) const;  // includes the offset
};

// Multiplicative coefficient a(x,t) sampled on grid x time nodes.
struct MultiplicativeTerm {
    std::vector<std::vector<cdouble>> slices;  // [node][point]; empty => a == 0
    bool empty() const { return slices.empty(); }
};

// Per-wavenumber half-step multipliers exp(-i k^2 dt / (2m)). For any m in
// the closed upper half-plane every factor has modulus <= 1.
std::vector<cdouble> kinetic_factors(const TorusGrid& grid, const ComplexMass& mass,
                                     double dt);

using StepObserver = std::function<void(const FieldState&)>;

// Symmetric (Strang) split stepper for d_t E = (i/2m) lap E + a(x,t) E:
// half kinetic, exact pointwise exponential of the midpoint coefficient,
// half kinetic. The midpoint coefficient is the average of the two adjacent
// node slices, which keeps the scheme second order.
class SplitStepper {
  public:
    SplitStepper(const TorusGrid& grid, const TimeGrid& time_grid, const Mass& mass);

    // Advance from node `step` to `step`+1. a0/a1 are the coefficient slices
    // at the two nodes (nullptr => zero coefficient).
    void step(FieldState& state, int step_index, const cdouble* a0, const cdouble* a1) const;

    const TorusGrid& grid() const { return grid_; }
    const TimeGrid& time_grid() const { return time_grid_; }

  private:
    void half_kinetic(FieldState& state) const;
    void rescale_if_needed(FieldState& state, int step_index) const;

    TorusGrid grid_;
    TimeGrid time_grid_;
    bool has_kinetic_ = false;
    std::vector<cdouble> half_factors_;
    Fft fft_;
};

// Core driver: evolves E(.,0) = 1 through all steps of the time grid.
FieldState evolve_field(const TorusGrid& grid, const TimeGrid& time_grid,
                        const Mass& mass, const MultiplicativeTerm& term,
                        const StepObserver& observer = nullptr);

// Amplifier run: d_t E = (i/2m) lap E + (lambda |S|^2 - i rho) E, E(.,0) = 1,
// with S assembled from the modal set and the coefficient draw.
FieldState solve_amplifier(const ModalSet& modal_set, const GaussianSample& sample,
                           const PotentialField& potential, double lambda,
                           const Mass& mass, const StepObserver& observer = nullptr);

// Schrodinger form: i d_t Psi = -(1/2m) lap Psi + [rho + eta U] Psi, Psi(.,0)=1,
// for a real direction potential U(x,t) and complex eta. At eta = i lambda
// ||s||^2 with U built from the direction of s this reproduces the amplifier
// solution.
FieldState solve_schrodinger(const TorusGrid& grid, const TimeGrid& time_grid,
                             const Mass& mass, const ScalarTimeField& u_field,
                             cdouble eta, const PotentialField& potential,
                             const StepObserver& observer = nullptr);

// Same, with U(x,t) = |sum_n s_hat_n Phi_n(x,t)|^2 built from a unit
// direction in C^M.
FieldState solve_psi(const ModalSet& modal_set, const Eigen::VectorXcd& s_hat,
                     cdouble eta, const PotentialField& potential, const Mass& mass,
                     const StepObserver& observer = nullptr);

// Builds the multiplicative term lambda |S|^2 - i rho on the time nodes.
MultiplicativeTerm amplifier_term(const ModalSet& modal_set, const GaussianSample& sample,
                                  const PotentialField& potential, double lambda);

}  // namespace specamp
