#pragma once

#include <complex>
#include <vector>

#include "specamp/grid.hpp"

namespace specamp {

// In-place complex FFT on the torus grid, d <= 3. Forward is unnormalized;
// backward divides by the total point count so backward(forward(x)) == x.
//
// Each instance owns its FFTW plans; plan creation is serialized internally
// (FFTW planning is not thread safe), execution is not.
class Fft {
  public:
    explicit Fft(const TorusGrid& grid);
    ~Fft();

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward(std::complex<double>* data) const;
    void backward(std::complex<double>* data) const;

    void forward(std::vector<std::complex<double>>& v) const { forward(v.data()); }
    void backward(std::vector<std::complex<double>>& v) const { backward(v.data()); }

  private:
    int total_ = 0;
    double inv_total_ = 0.0;
    void* plan_fwd_ = nullptr;   // fftw_plan
    void* plan_bwd_ = nullptr;
    std::vector<std::complex<double>> scratch_;
};

}  // namespace specamp
