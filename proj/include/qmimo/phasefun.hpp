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

// Phase statistics of a complex Gaussian sample sqrt(nu) + z, z ~ CN(0, 1), and the
// K-sector phase quantizer that observes it.

#include "errors.hpp"
#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace qmimo
{
    struct PhaseChannelParams
    {
        double nu = 0.0;   // SNR of the scalar complex Gaussian channel
        int k_sectors = 2; // K
        double theta = 0.0;

        void validate() const
        {
            if (!(nu >= 0.0))
                throw DomainError("PhaseChannelParams: nu must be nonnegative");
            if (k_sectors < 2)
                throw DomainError("PhaseChannelParams: k_sectors must be >= 2");
            if (!(theta >= -std::numbers::pi && theta <= std::numbers::pi))
                throw DomainError("PhaseChannelParams: theta must lie in [-pi, pi]");
        }

        /// Symmetric quantizer (theta = pi/K): the input phase sits at the center of a sector.
        static PhaseChannelParams symmetric(int k_sectors, double nu)
        {
            return {nu, k_sectors, std::numbers::pi / k_sectors};
        }
    };

    /// How sector probabilities are evaluated: adaptive quadrature, or the normalized
    /// R-rectangle midpoint sum used inside the optimizers.
    class EvalMode
    {
    public:
        static EvalMode exact(QuadratureConfig quad = {})
        {
            quad.validate();
            return EvalMode(0, quad);
        }

        static EvalMode midpoint(int r_rects = 9)
        {
            if (r_rects < 1)
                throw DomainError("EvalMode::midpoint: r_rects must be >= 1");
            return EvalMode(r_rects, {});
        }

        bool is_exact() const noexcept { return r_rects_ == 0; }
        int r_rects() const noexcept { return r_rects_; }
        const QuadratureConfig &quad() const noexcept { return quad_; }

        std::string describe() const
        {
            return is_exact() ? std::string("exact") : "midpoint(" + std::to_string(r_rects_) + ")";
        }

    private:
        EvalMode(int r, QuadratureConfig q) : r_rects_(r), quad_(q) {}
        int r_rects_;
        QuadratureConfig quad_;
    };

    /// Upper-tail probability of the standard normal, Q(x) = erfc(x / sqrt 2) / 2.
    /// Saturates to exactly 1 for x below about -8.3 and underflows to 0 (through the
    /// subnormal range) above about 38.5.
    inline double gaussian_q(double x)
    {
        return 0.5 * std::erfc(x / std::numbers::sqrt2);
    }

    /// Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
    inline double erfcx(double x)
    {
        if (x < 0.0)
            return 2.0 * std::exp(x * x) - erfcx(-x);
        if (x < 8.0)
            return std::exp(x * x) * std::erfc(x);
        // Continued fraction erfcx(x) = 1/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        double tail = x;
        for (int n = 60; n >= 1; --n)
            tail = x + 0.5 * n / tail;
        return std::numbers::inv_sqrtpi / tail;
    }

    /// Density of the phase of sqrt(nu) + z, z ~ CN(0, 1), on [-pi, pi] (2 pi periodic).
    inline double phase_density(double phi, double nu)
    {
        using std::numbers::pi;
        if (!(nu >= 0.0))
            throw DomainError("phase_density: nu must be nonnegative");
        if (nu == 0.0)
            return 0.5 / pi;

        const double c = std::cos(phi);
        const double s = std::sin(phi);
        const double base = std::exp(-nu) * 0.5 / pi;
        const double root = std::sqrt(nu);
        if (c >= 0.0)
        {
            const double cdf = 1.0 - gaussian_q(std::numbers::sqrt2 * root * c);
            return base + root * c * std::exp(-nu * s * s) * cdf * std::numbers::inv_sqrtpi;
        }
        // For cos(phi) < 0 both terms are O(e^-nu) and nearly cancel:
        // e^{-nu sin^2} Q(sqrt(2 nu)|cos|) = e^{-nu} erfcx(u) / 2, with u = sqrt(nu)|cos|.
        const double u = -root * c;
        const double g = 1.0 - std::sqrt(pi) * u * erfcx(u);
        return g > 0.0 ? base * g : 0.0;
    }

    namespace detail
    {
        inline void check_sector(int y, int k)
        {
            if (y < 0 || y >= k)
                throw IndexError("sector index " + std::to_string(y) + " outside [0, " + std::to_string(k) + ")");
        }

        // Interior nodes for integrating the phase density: its peak sits at multiples of 2 pi.
        inline std::array<double, 3> density_peaks()
        {
            return {-2.0 * std::numbers::pi, 0.0, 2.0 * std::numbers::pi};
        }

        inline double sector_lower(int y, const PhaseChannelParams &p)
        {
            return 2.0 * std::numbers::pi * y / p.k_sectors - std::numbers::pi - p.theta;
        }

        inline double entropy_bits(const std::vector<double> &probs)
        {
            double h = 0.0;
            for (double w : probs)
                if (w > 0.0)
                    h -= w * std::log2(w);
            return h > 0.0 ? h : 0.0;
        }
    }

    /// W_y^(K)(nu, theta): probability that the K-sector quantizer rotated by theta
    /// outputs y, by adaptive quadrature of phase_density over the sector.
    inline double w_prob_exact(int y, const PhaseChannelParams &params, const QuadratureConfig &quad = {})
    {
        params.validate();
        detail::check_sector(y, params.k_sectors);
        const double a = detail::sector_lower(y, params);
        const double b = a + 2.0 * std::numbers::pi / params.k_sectors;
        const auto peaks = detail::density_peaks();
        const double nu = params.nu;
        return adaptive_simpson([nu](double phi) { return phase_density(phi, nu); }, a, b, quad, peaks);
    }

    /// Normalized midpoint-rule approximation of all K sector probabilities.
    /// Sums to one up to rounding for every nu and R.
    inline std::vector<double> w_probs_midpoint(const PhaseChannelParams &params, int r_rects)
    {
        params.validate();
        if (r_rects < 1)
            throw DomainError("w_prob_midpoint: r_rects must be >= 1");
        const int k = params.k_sectors;
        const double width = 2.0 * std::numbers::pi / k;
        std::vector<double> probs(static_cast<std::size_t>(k));
        double total = 0.0;
        for (int y = 0; y < k; ++y)
        {
            double acc = 0.0;
            for (int r = 0; r < r_rects; ++r)
            {
                const double phi = width * (y + (r + 0.5) / r_rects) - std::numbers::pi - params.theta;
                acc += phase_density(phi, params.nu);
            }
            probs[static_cast<std::size_t>(y)] = acc * width / r_rects;
            total += probs[static_cast<std::size_t>(y)];
        }
        for (double &w : probs)
            w /= total;
        return probs;
    }

    inline double w_prob_midpoint(int y, const PhaseChannelParams &params, int r_rects)
    {
        params.validate();
        detail::check_sector(y, params.k_sectors);
        return w_probs_midpoint(params, r_rects)[static_cast<std::size_t>(y)];
    }

    inline std::vector<double> w_probs_exact(const PhaseChannelParams &params, const QuadratureConfig &quad = {})
    {
        std::vector<double> probs(static_cast<std::size_t>(params.k_sectors));
        for (int y = 0; y < params.k_sectors; ++y)
            probs[static_cast<std::size_t>(y)] = w_prob_exact(y, params, quad);
        return probs;
    }

    inline std::vector<double> sector_probabilities(const PhaseChannelParams &params, const EvalMode &mode)
    {
        return mode.is_exact() ? w_probs_exact(params, mode.quad()) : w_probs_midpoint(params, mode.r_rects());
    }

    /// Phase quantization entropy w_K(nu, theta) in bits (0 log 0 = 0).
    inline double phase_entropy(const PhaseChannelParams &params, const EvalMode &mode)
    {
        return detail::entropy_bits(sector_probabilities(params, mode));
    }

    /// Capacity of the scalar channel with a K-sector symmetric phase quantizer:
    /// log2 K - w_K(nu, pi/K). Used directly by the pipelined receiver with K = 2^L.
    inline double sector_capacity(int k_sectors, double nu, const EvalMode &mode)
    {
        if (!(nu >= 0.0))
            throw DomainError("sector_capacity: nu must be nonnegative");
        const double c = std::log2(static_cast<double>(k_sectors)) -
                         phase_entropy(PhaseChannelParams::symmetric(k_sectors, nu), mode);
        return c > 0.0 ? c : 0.0;
    }

    /// C_phi(s, nu): capacity with s rotated sign quantizers (a 2s-sector phase quantizer).
    inline double scalar_capacity(int s_quantizers, double nu, const EvalMode &mode = EvalMode::exact())
    {
        if (s_quantizers < 0)
            throw DomainError("scalar_capacity: s must be nonnegative");
        if (!(nu >= 0.0))
            throw DomainError("scalar_capacity: nu must be nonnegative");
        if (s_quantizers == 0)
            return 0.0;
        return sector_capacity(2 * s_quantizers, nu, mode);
    }

    /// Differential entropy (bits) of the phase of sqrt(nu) + z; log2(2 pi) at nu = 0.
    inline double phase_detector_cond_entropy(double nu, const QuadratureConfig &quad = {})
    {
        if (!(nu >= 0.0))
            throw DomainError("phase_detector_cond_entropy: nu must be nonnegative");
        if (nu == 0.0)
            return std::log2(2.0 * std::numbers::pi);
        const auto peaks = detail::density_peaks();
        auto integrand = [nu](double phi) {
            const double f = phase_density(phi, nu);
            return f < 1e-300 ? 0.0 : -f * std::log2(f);
        };
        return adaptive_simpson(integrand, -std::numbers::pi, std::numbers::pi, quad, peaks);
    }
}
