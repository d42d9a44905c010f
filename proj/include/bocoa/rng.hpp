/*
 * Copyright 2026 the bocoa authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BOCOA_RNG_HPP
#define BOCOA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace bocoa {

/// splitmix64 finalizer, used to derive independent seeds from a base seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive the seed of a named sub-stream. Components of a run draw from
/// disjoint streams so a change in one component does not shift the draws
/// of another.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    return mix64(mix64(base ^ (stream * 0xd6e8feb86659fd93ULL)) + index);
}

/// Deterministic random source. All variates are produced from the raw
/// mt19937_64 output (whose sequence the standard specifies), not from
/// std::*_distribution, so that identical seeds give identical streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no cached second value).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::size_t index(std::size_t n) {
        const std::uint64_t limit =
            std::uint64_t(-1) - std::uint64_t(-1) % static_cast<std::uint64_t>(n);
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return static_cast<std::size_t>(x % n);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace bocoa

#endif  // BOCOA_RNG_HPP
