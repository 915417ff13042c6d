#ifndef MARC_RNG_HPP
#define MARC_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace marc {

// splitmix64 finalizer, used to derive independent stream seeds from
// (master seed, stream indices) without correlation between streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = mix64(master);
    s = mix64(s ^ mix64(a + 0x100000001b3ull));
    s = mix64(s ^ mix64(b + 0xcbf29ce484222325ull));
    s = mix64(s ^ mix64(c + 0x27d4eb2f165667c5ull));
    return s;
}

// Deterministic RNG stream. Gaussians are produced by an explicit
// Box-Muller transform rather than std::normal_distribution, whose
// algorithm is implementation-defined; this keeps draws reproducible
// for a given seed independent of the standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1], safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    std::uint32_t uniform_int(std::uint32_t bound) {
        // Lemire-style rejection-free enough for simulation purposes:
        // 64-bit multiply-shift keeps bias below 2^-32.
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>(gen_()) * bound) >> 64);
    }

    int bit() { return static_cast<int>(gen_() >> 63); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly symmetric complex Gaussian with E{|z|^2} = var.
    std::complex<double> cgaussian(double var) {
        double s = std::sqrt(var * 0.5);
        return {s * gaussian(), s * gaussian()};
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace marc

#endif
