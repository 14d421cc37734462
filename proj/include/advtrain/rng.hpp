#pragma once

#include <cstdint>
#include <random>

#include "advtrain/types.hpp"

namespace advtrain {

// Seeded mt19937_64 with hand-coded output transforms. The raw engine's
// sequence is pinned by the standard; the standard *distributions* are not,
// so every transform lives here to keep traces byte-identical across
// platforms and standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform on [a, b)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform index in {0, ..., n-1} via multiply-shift
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(eng_()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    // standard normal via Box-Muller (cosine branch only)
    double normal() {
        const double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    // uniformly random unit vector: normalized standard Gaussian draw
    Vector unit_vector(std::size_t d) {
        Vector v(d);
        double n = 0.0;
        do {
            for (std::size_t i = 0; i < d; ++i) v[i] = normal();
            n = norm(v);
        } while (n < 1e-12);
        return scaled(v, 1.0 / n);
    }

    // uniform draw from the ball of the given radius
    Vector in_ball(std::size_t d, double radius) {
        Vector v = unit_vector(d);
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(d));
        return scaled(v, r);
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace advtrain
