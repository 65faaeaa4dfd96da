// SPDX-License-Identifier: Apache-2.0
//
// qmimo: capacity bounds and achievable rates for one-bit MIMO receivers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <climits>

namespace qmimo
{
    /// SplitMix64 step; used to derive independent substream seeds from one base seed.
    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream)
    {
        return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    }

    /// Reproducible generator: mt19937_64 plus Box-Muller, so results do not depend on the
    /// standard library's distribution implementations.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

        // Uniform on (0, 1).
        double uniform()
        {
            return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
        }

        std::uint64_t below(std::uint64_t n)
        {
            const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
            std::uint64_t x;
            do
                x = engine_();
            while (x >= limit);
            return x % n;
        }

        /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
        std::complex<double> complex_normal(double variance = 1.0)
        {
            const double r = std::sqrt(-std::log(uniform()) * variance);
            const double a = 2.0 * std::numbers::pi * uniform();
            return {r * std::cos(a), r * std::sin(a)};
        }

    private:
        std::mt19937_64 engine_;
    };
}
