// rng.hpp - portable uniform draws on top of the standardized mt19937_64
// sequence, so seeded experiments reproduce bit-for-bit everywhere.
#pragma once

#include <cstdint>
#include <random>

namespace crosslocate {

class Rng {
 public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits; avoids the
    // implementation-defined std::uniform_real_distribution.
    double unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * unit();
    }

    std::uint64_t raw() { return gen_(); }

 private:
    std::mt19937_64 gen_;
};

} // namespace crosslocate
