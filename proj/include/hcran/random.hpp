#pragma once

#include "hcran/common.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace hcran {

// A run's private stream. Seeded from (master seed, coordinates) so any run
// can be regenerated without touching the others.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> coords = {}) {
        std::vector<std::uint32_t> words;
        auto push64 = [&](std::uint64_t v) {
            words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
            words.push_back(static_cast<std::uint32_t>(v >> 32));
        };
        push64(master_seed);
        for (auto c : coords) push64(c);
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }

    // Circularly-symmetric complex Gaussian, unit variance.
    cplx cgauss() {
        const double a = normal();
        const double b = normal();
        return {a * M_SQRT1_2, b * M_SQRT1_2};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace hcran
