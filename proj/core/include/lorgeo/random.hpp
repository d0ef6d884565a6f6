// lorgeo - deterministic random draws (seed-stable across platforms)
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "lorgeo/types.hpp"

namespace lorgeo {

// mt19937_64 with hand-rolled distributions so that a fixed seed yields
// the same stream everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // Polar Box-Muller, spare value cached.
        if (has_spare_) { has_spare_ = false; return spare_; }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double r = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * r;
        has_spare_ = true;
        return u * r;
    }

    Vector unit_vector(int dim) {
        Vector v(dim);
        double norm = 0.0;
        do {
            for (int i = 0; i < dim; ++i) v[i] = normal();
            norm = v.norm();
        } while (norm < 1e-12);
        return v / norm;
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lorgeo
