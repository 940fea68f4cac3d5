#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace specamp {

// Stafford mix 13, the finalizer used by splitmix64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// One independent random stream, derived from a master seed and a stream
// index. Counter-splitting keeps parallel sampling reproducible: stream i
// of seed S is the same no matter how many workers consume the streams.
//
// Gaussians are produced by an explicit Box-Muller transform on raw
// mt19937_64 output so the byte stream does not depend on the standard
// library's distribution internals.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : eng_(splitmix64(splitmix64(master_seed) ^
                          splitmix64(stream_index * 0x9e3779b97f4a7c15ULL + 1))) {}

    explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}

    // Uniform on [0,1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0,1], safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal N(0,1).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double phi = 2.0 * pi_ * uniform();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    // Circular complex Gaussian with <|z|^2> = 1 (Re and Im ~ N(0,1/2)).
    std::complex<double> cgauss() {
        const double s = 1.0 / std::sqrt(2.0);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

    std::uint64_t raw() { return eng_(); }

  private:
    static constexpr double pi_ = 3.14159265358979323846;
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace specamp
