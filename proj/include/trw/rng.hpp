#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "trw/common.hpp"

namespace trw {

// Deterministic RNG. mt19937_64 output is fixed by the standard; the
// uniform/normal transforms below are spelled out explicitly so streams are
// reproducible across standard libraries (std::*_distribution is not).
class RandomEngine {
public:
    RandomEngine() : RandomEngine(0) {}
    explicit RandomEngine(u64 seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n).
    u64 uniform_int(u64 n) {
        if (n == 0) return 0;
        u64 limit = ~u64(0) - (~u64(0) % n);
        u64 v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // avoid log(0)
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void fill_normal(T* p, i64 n, double scale = 1.0) {
        for (i64 i = 0; i < n; ++i) p[i] = static_cast<T>(normal() * scale);
    }

    u64 raw() { return gen_(); }

    // Serializable state for exact training resume.
    std::string state() const {
        std::ostringstream os;
        os << gen_ << " " << (have_spare_ ? 1 : 0) << " ";
        os.precision(17);
        os << spare_;
        return os.str();
    }
    void set_state(const std::string& s) {
        std::istringstream is(s);
        int hs = 0;
        is >> gen_ >> hs >> spare_;
        have_spare_ = (hs == 1);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace trw
