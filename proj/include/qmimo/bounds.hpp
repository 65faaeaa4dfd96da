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

#include "errors.hpp"
#include "optimizer.hpp"
#include "phasefun.hpp"
#include "power.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qmimo
{
    struct BoundsResult
    {
        double c_infinity = 0.0;
        double c_phase_detector = 0.0;
        double c_ub = 0.0;
        std::vector<double> rho_star;
    };

    /// Infinite-SNR bound: log2 of the number of regions that n_q hyperplanes through the
    /// origin cut out of 2 n_sigma real dimensions, 2 sum_{i<2 n_sigma} C(n_q - 1, i).
    inline double c_infinity(int n_q, int n_sigma)
    {
        if (n_q < 1 || n_sigma < 1)
            throw DomainError("c_infinity: n_q and n_sigma must be >= 1");
        // Binomials held as doubles; log2 of the sum is exact enough for every practical n_q.
        const int n = n_q - 1;
        const int top = std::min(2 * n_sigma - 1, n);
        double term = 1.0, sum = 1.0;
        for (int i = 1; i <= top; ++i)
        {
            term *= static_cast<double>(n - i + 1) / i;
            sum += term;
        }
        return 1.0 + std::log2(sum);
    }

    struct PhaseDetectorBound
    {
        double bits = 0.0;
        std::vector<double> rho_star;
    };

    /// Phase-detector bound: n_sigma log2(2 pi) minus the smallest achievable sum of
    /// conditional phase entropies over power splits with sum rho = P.
    inline PhaseDetectorBound c_phase_detector(std::span<const double> eigenvalues, double p_total, double sigma2,
                                               const QuadratureConfig &quad = {}, double power_tol = 1e-9)
    {
        if (!(p_total >= 0.0))
            throw DomainError("c_phase_detector: p_total must be nonnegative");
        if (!(sigma2 > 0.0))
            throw DomainError("c_phase_detector: sigma2 must be positive");
        const std::size_t n = eigenvalues.size();
        PhaseDetectorBound out;
        if (n == 0)
            return out;
        if (p_total == 0.0)
        {
            out.rho_star.assign(n, 0.0);
            return out;
        }

        std::vector<double> gains(n);
        for (std::size_t i = 0; i < n; ++i)
            gains[i] = eigenvalues[i] / sigma2;
        auto term = [&](std::size_t, double nu) { return phase_detector_cond_entropy(nu, quad); };
        out.rho_star = allocate_separable(gains, term, p_total, power_tol).rho;

        const double uniform = std::log2(2.0 * std::numbers::pi);
        double bits = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            bits += uniform - phase_detector_cond_entropy(gains[i] * out.rho_star[i], quad);
        out.bits = std::max(bits, 0.0);
        return out;
    }

    /// C_UB = min(C_phase_detector, C_inf). The pipelined receiver quantizes each sample
    /// several times, so its combinatorial term is the trivial n_q bits instead.
    inline BoundsResult c_ub(std::span<const double> eigenvalues, double p_total, double sigma2, int n_q,
                             ReceiverMode mode = ReceiverMode::oneshot, const QuadratureConfig &quad = {},
                             double power_tol = 1e-9)
    {
        if (eigenvalues.empty())
            throw ContractViolation("c_ub: no eigenvalues");
        BoundsResult out;
        out.c_infinity = mode == ReceiverMode::oneshot ? c_infinity(n_q, static_cast<int>(eigenvalues.size()))
                                                       : static_cast<double>(n_q);
        auto pd = c_phase_detector(eigenvalues, p_total, sigma2, quad, power_tol);
        out.c_phase_detector = pd.bits;
        out.rho_star = std::move(pd.rho_star);
        out.c_ub = std::min(out.c_infinity, out.c_phase_detector);
        return out;
    }
}
