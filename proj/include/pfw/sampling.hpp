#ifndef PFW_SAMPLING_HPP
#define PFW_SAMPLING_HPP

#include <cstdint>
#include <vector>

#include "pfw/polynomial.hpp"

namespace pfw {

/// SplitMix64: tiny deterministic generator, stable across platforms and
/// standard libraries so seeded reports stay byte-identical.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], inclusive.
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Small rational with numerator in [-num_range, num_range] and
    /// denominator in [1, den_range].
    Rational rational(long long num_range = 4, long long den_range = 3) {
        return Rational(uniform_int(-num_range, num_range), uniform_int(1, den_range));
    }

private:
    std::uint64_t state_;
};

/// Random polynomial in the given variables, bounded total degree, a handful
/// of terms, small rational coefficients. Deterministic per rng stream.
Polynomial random_polynomial(const std::vector<std::string>& vars, int max_degree,
                             int terms, SplitMix64& rng);

}  // namespace pfw

#endif
