#include "specamp/potential.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "specamp/fft.hpp"
#include "specamp/rng.hpp"

namespace specamp {

namespace {

using cdouble = std::complex<double>;

// Flat index of the conjugate wavevector -n (mod N per axis).
int conjugate_index(const TorusGrid& grid, int p) {
    auto idx = grid.unflatten(p);
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a)
        c[a] = (grid.points(a) - idx[a]) % grid.points(a);
    return grid.flat(c);
}

// Max over the grid of |rho|, |grad rho| (Euclidean) and |lap rho| for one
// slice, via spectral derivatives.
void slice_norms(const TorusGrid& grid, const Fft& fft,
                 const std::vector<double>& rho, double& n0, double& n1,
                 double& n2) {
    const int total = grid.total_points();
    std::vector<cdouble> hat(total), buf(total);
    for (int p = 0; p < total; ++p) {
        n0 = std::max(n0, std::abs(rho[p]));
        hat[p] = rho[p];
    }
    fft.forward(hat);

    std::vector<double> grad2(total, 0.0);
    std::array<std::vector<double>, 3> k_odd, k_all;
    for (int a = 0; a < grid.dim(); ++a) {
        k_odd[a] = grid.wavenumbers_odd(a);
        k_all[a] = grid.wavenumbers(a);
    }
    for (int a = 0; a < grid.dim(); ++a) {
        for (int p = 0; p < total; ++p) {
            auto idx = grid.unflatten(p);
            buf[p] = cdouble(0.0, k_odd[a][idx[a]]) * hat[p];
        }
        fft.backward(buf);
        for (int p = 0; p < total; ++p) grad2[p] += buf[p].real() * buf[p].real();
    }
    for (int p = 0; p < total; ++p) n1 = std::max(n1, std::sqrt(grad2[p]));

    for (int p = 0; p < total; ++p) {
        auto idx = grid.unflatten(p);
        double k2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) k2 += k_all[a][idx[a]] * k_all[a][idx[a]];
        buf[p] = -k2 * hat[p];
    }
    fft.backward(buf);
    for (int p = 0; p < total; ++p) n2 = std::max(n2, std::abs(buf[p].real()));
}

}  // namespace

PotentialField synthesize_potential(const TorusGrid& grid, const TimeGrid& time_grid,
                                    const PotentialSpec& spec) {
    PotentialField f;
    const int total = grid.total_points();

    if (spec.kind == PotentialSpec::Kind::Zero) {
        f.rho_.frozen = true;
        f.rho_.slices.assign(1, std::vector<double>(total, 0.0));
        f.zero_ = true;
        return f;
    }

    f.zero_ = false;

    if (spec.kind == PotentialSpec::Kind::UserTable) {
        if (spec.table.empty())
            throw std::invalid_argument("potential user-table: no slices");
        for (const auto& s : spec.table)
            if (static_cast<int>(s.size()) != total)
                throw std::invalid_argument("potential user-table: slice size mismatch");
        if (spec.table.size() == 1) {
            f.rho_.frozen = true;
        } else if (static_cast<int>(spec.table.size()) == time_grid.n_nodes()) {
            f.rho_.frozen = false;
        } else {
            throw std::invalid_argument(
                "potential user-table: need 1 slice or one per time node");
        }
        f.rho_.slices = spec.table;
    } else {
        double max_spacing = 0.0;
        for (int a = 0; a < grid.dim(); ++a)
            max_spacing = std::max(max_spacing, grid.spacing(a));
        if (spec.correlation_length < 3.0 * max_spacing)
            throw std::invalid_argument(
                "potential: correlation length " + std::to_string(spec.correlation_length) +
                " is not resolvable (< 3 grid spacings)");

        // Spectral weights of the Gaussian-shaped correlation, normalized so
        // the pointwise variance is amplitude^2 exactly.
        std::array<std::vector<double>, 3> ks;
        for (int a = 0; a < grid.dim(); ++a) ks[a] = grid.wavenumbers(a);
        std::vector<double> w(total, 0.0);
        const double l2 = spec.correlation_length * spec.correlation_length;
        double gsum = 0.0;
        for (int p = 1; p < total; ++p) {
            auto idx = grid.unflatten(p);
            double k2 = 0.0;
            for (int a = 0; a < grid.dim(); ++a) k2 += ks[a][idx[a]] * ks[a][idx[a]];
            w[p] = std::exp(-0.5 * k2 * l2);
            gsum += w[p];
        }
        if (gsum <= 0.0)
            throw std::invalid_argument("potential: correlation length too large for the domain");
        for (int p = 1; p < total; ++p) w[p] = spec.amplitude * std::sqrt(w[p] / gsum);

        // Hermitian-symmetric coefficient draw in fixed index order; the
        // time-dependent kind gets an independent quadrature pair per mode.
        const bool timedep = spec.kind == PotentialSpec::Kind::TimeDependentGaussian;
        RngStream rng(spec.seed);
        std::vector<cdouble> c1(total, 0.0), c2(total, 0.0);
        for (int p = 1; p < total; ++p) {
            const int q = conjugate_index(grid, p);
            if (q < p) continue;  // filled by its partner
            if (q == p) {
                c1[p] = w[p] * rng.gaussian();
                if (timedep) c2[p] = w[p] * rng.gaussian();
            } else {
                const cdouble z1 = rng.cgauss();
                c1[p] = w[p] * z1;
                c1[q] = std::conj(c1[p]);
                if (timedep) {
                    const cdouble z2 = rng.cgauss();
                    c2[p] = w[p] * z2;
                    c2[q] = std::conj(c2[p]);
                }
            }
        }

        Fft fft(grid);
        const int n_slices = timedep ? time_grid.n_nodes() : 1;
        f.rho_.frozen = !timedep;
        f.rho_.slices.resize(n_slices);
        std::vector<cdouble> buf(total);
        for (int j = 0; j < n_slices; ++j) {
            if (timedep) {
                const double phase = time_grid.node(j) / spec.correlation_time;
                const double cs = std::cos(phase), sn = std::sin(phase);
                for (int p = 0; p < total; ++p) buf[p] = c1[p] * cs + c2[p] * sn;
            } else {
                buf = c1;
            }
            fft.backward(buf);
            // backward carries 1/total; the synthesis sum is unnormalized
            f.rho_.slices[j].resize(total);
            for (int p = 0; p < total; ++p)
                f.rho_.slices[j][p] = buf[p].real() * total;
        }
    }

    Fft fft(grid);
    for (const auto& s : f.rho_.slices)
        slice_norms(grid, fft, s, f.norm_rho_, f.norm_grad_, f.norm_lap_);
    return f;
}

std::tuple<double, double, double> potential_norms(const PotentialField& field) {
    return {field.norm_rho(), field.norm_grad(), field.norm_lap()};
}

}  // namespace specamp
