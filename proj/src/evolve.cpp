#include "specamp/evolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "specamp/spectrum.hpp"

namespace specamp {

namespace {
constexpr double kRescaleHi = 1e100;
constexpr double kRescaleLo = 1e-100;
}  // namespace

ComplexMass::ComplexMass(cdouble mass) : m(mass) {
    if (m == cdouble(0.0, 0.0))
        throw std::invalid_argument("mass: m = 0 is outside the admissible set");
    if (m.imag() < 0.0)
        throw std::invalid_argument("mass: Im(m) must be >= 0");
}

FieldState FieldState::ones(const TorusGrid& grid, double t0) {
    FieldState s;
    s.values.assign(grid.total_points(), cdouble(1.0, 0.0));
    s.time = t0;
    return s;
}

double FieldState::l2_norm(const TorusGrid& grid) const {
    double acc = 0.0;
    for (const auto& v : values) acc += std::norm(v);
    return std::exp(log_offset) * std::sqrt(acc * grid.cell_volume());
}

std::vector<cdouble> kinetic_factors(const TorusGrid& grid, const ComplexMass& mass,
                                     double dt) {
    const int total = grid.total_points();
    std::array<std::vector<double>, 3> ks;
    for (int a = 0; a < grid.dim(); ++a) ks[a] = grid.wavenumbers(a);
    std::vector<cdouble> f(total);
    const cdouble coef = cdouble(0.0, -1.0) * dt / (2.0 * mass.m);
    for (int p = 0; p < total; ++p) {
        auto idx = grid.unflatten(p);
        double k2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) k2 += ks[a][idx[a]] * ks[a][idx[a]];
        f[p] = std::exp(coef * k2);
    }
    return f;
}

SplitStepper::SplitStepper(const TorusGrid& grid, const TimeGrid& time_grid,
                           const Mass& mass)
    : grid_(grid), time_grid_(time_grid), fft_(grid) {
    if (mass.has_value()) {
        has_kinetic_ = true;
        half_factors_ = kinetic_factors(grid, *mass, 0.5 * time_grid.dt());
    }
}

void SplitStepper::half_kinetic(FieldState& state) const {
    fft_.forward(state.values);
    const int total = grid_.total_points();
    for (int p = 0; p < total; ++p) state.values[p] *= half_factors_[p];
    fft_.backward(state.values);
}

void SplitStepper::rescale_if_needed(FieldState& state, int step_index) const {
    double mx = 0.0;
    for (const auto& v : state.values) {
        const double a = std::abs(v);
        if (!(a < std::numeric_limits<double>::infinity()) || std::isnan(a)) {
            throw std::runtime_error(
                "split step " + std::to_string(step_index) +
                ": field became non-finite (gain magnitude before step ~ e^" +
                std::to_string(state.log_offset) + ")");
        }
        mx = std::max(mx, a);
    }
    if (mx > kRescaleHi || (mx > 0.0 && mx < kRescaleLo)) {
        const double lg = std::log(mx);
        const double inv = 1.0 / mx;
        for (auto& v : state.values) v *= inv;
        state.log_offset += lg;
    }
}

void SplitStepper::step(FieldState& state, int step_index, const cdouble* a0,
                        const cdouble* a1) const {
    const double dt = time_grid_.dt();
    if (has_kinetic_) half_kinetic(state);
    if (a0 || a1) {
        const int total = grid_.total_points();
        for (int p = 0; p < total; ++p) {
            cdouble mid = 0.0;
            if (a0 && a1)
                mid = 0.5 * (a0[p] + a1[p]);
            else
                mid = a0 ? a0[p] : a1[p];
            state.values[p] *= std::exp(mid * dt);
        }
    }
    if (has_kinetic_) half_kinetic(state);
    state.time = time_grid_.node(step_index + 1);
    rescale_if_needed(state, step_index);
}

FieldState evolve_field(const TorusGrid& grid, const TimeGrid& time_grid,
                        const Mass& mass, const MultiplicativeTerm& term,
                        const StepObserver& observer) {
    if (!term.empty() &&
        static_cast<int>(term.slices.size()) != time_grid.n_nodes())
        throw std::invalid_argument("evolve: coefficient slices must cover every time node");
    SplitStepper stepper(grid, time_grid, mass);
    FieldState state = FieldState::ones(grid);
    if (observer) observer(state);
    for (int j = 0; j < time_grid.n_steps(); ++j) {
        const cdouble* a0 = term.empty() ? nullptr : term.slices[j].data();
        const cdouble* a1 = term.empty() ? nullptr : term.slices[j + 1].data();
        stepper.step(state, j, a0, a1);
        if (observer) observer(state);
    }
    return state;
}

MultiplicativeTerm amplifier_term(const ModalSet& modal_set, const GaussianSample& sample,
                                  const PotentialField& potential, double lambda) {
    const TorusGrid& grid = modal_set.grid();
    const TimeGrid& tg = modal_set.time_grid();
    const int total = grid.total_points();
    MultiplicativeTerm term;
    term.slices.resize(tg.n_nodes());
    std::vector<cdouble> s_slice(total);
    for (int j = 0; j < tg.n_nodes(); ++j) {
        assemble_driver_slice(modal_set, sample, j, s_slice.data());
        auto& a = term.slices[j];
        a.resize(total);
        const auto& rho = potential.slice(j);
        for (int p = 0; p < total; ++p)
            a[p] = cdouble(lambda * std::norm(s_slice[p]), -rho[p]);
    }
    return term;
}

FieldState solve_amplifier(const ModalSet& modal_set, const GaussianSample& sample,
                           const PotentialField& potential, double lambda,
                           const Mass& mass, const StepObserver& observer) {
    if (lambda < 0.0) throw std::invalid_argument("solve_amplifier: lambda must be >= 0");
    MultiplicativeTerm term = amplifier_term(modal_set, sample, potential, lambda);
    return evolve_field(modal_set.grid(), modal_set.time_grid(), mass, term, observer);
}

FieldState solve_psi(const ModalSet& modal_set, const Eigen::VectorXcd& s_hat,
                     cdouble eta, const PotentialField& potential, const Mass& mass,
                     const StepObserver& observer) {
    if (std::abs(s_hat.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("solve_psi: direction must be unit norm");
    const GammaField gf(modal_set);
    const ScalarTimeField u = direction_field(gf, s_hat);
    return solve_schrodinger(modal_set.grid(), modal_set.time_grid(), mass, u, eta,
                             potential, observer);
}

FieldState solve_schrodinger(const TorusGrid& grid, const TimeGrid& time_grid,
                             const Mass& mass, const ScalarTimeField& u_field,
                             cdouble eta, const PotentialField& potential,
                             const StepObserver& observer) {
    const int total = grid.total_points();
    MultiplicativeTerm term;
    term.slices.resize(time_grid.n_nodes());
    const cdouble minus_i(0.0, -1.0);
    for (int j = 0; j < time_grid.n_nodes(); ++j) {
        auto& a = term.slices[j];
        a.assign(total, 0.0);
        if (!u_field.empty()) {
            const auto& u = u_field.slice(j);
            for (int p = 0; p < total; ++p) a[p] = minus_i * eta * u[p];
        }
        if (!potential.is_zero()) {
            const auto& rho = potential.slice(j);
            for (int p = 0; p < total; ++p) a[p] += minus_i * rho[p];
        }
    }
    return evolve_field(grid, time_grid, mass, term, observer);
}

}  // namespace specamp
