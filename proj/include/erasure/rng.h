// Copyright 2026 The erasure-qec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ERASURE_RNG_H
#define ERASURE_RNG_H

#include <cmath>
#include <cstdint>
#include <limits>

namespace erasure {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** keyed by (seed, stream). Every Monte Carlo trial draws from its own
/// stream, so results do not depend on how trials are distributed over threads.
class Rng {
   public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed, uint64_t stream = 0) {
        uint64_t sm = seed;
        uint64_t mixed = splitmix64(sm) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        for (auto& w : s_) {
            w = splitmix64(mixed);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1].
    double uniform_open() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    uint32_t below(uint32_t n) { return static_cast<uint32_t>(((*this)() >> 32) * n >> 32); }
    bool bernoulli(double p) { return uniform() < p; }

    /// Failures before the next success of a Bernoulli(p) sequence.
    uint64_t geometric(double p) {
        if (p >= 1.0) {
            return 0;
        }
        if (p <= 0.0) {
            return std::numeric_limits<uint64_t>::max();
        }
        double g = std::floor(std::log(uniform_open()) / std::log1p(-p));
        if (g >= 1.8e19) {
            return std::numeric_limits<uint64_t>::max();
        }
        return static_cast<uint64_t>(g);
    }

   private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace erasure

#endif
