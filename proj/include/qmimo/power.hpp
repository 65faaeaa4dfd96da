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

// Power split for separable problems  min sum_i g_i(gain_i * rho_i)  s.t.  sum rho = P, rho >= 0,
// where every g_i is convex and nonincreasing in its SNR argument. Solved through KKT
// stationarity: bisection on the multiplier mu, each rho_i(mu) found by an inner search.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace qmimo
{
    /// Central difference of g at nu with step max(1e-6, 1e-6 nu); one-sided near nu = 0.
    template <typename G>
    double snr_derivative(const G &g, double nu)
    {
        const double h = std::max(1e-6, 1e-6 * nu);
        if (nu < h)
            return (g(nu + h) - g(nu)) / h;
        return (g(nu + h) - g(nu - h)) / (2.0 * h);
    }

    namespace detail
    {
        // Finds x in [lo, hi] with f(x) ~= target for a (numerically) nonincreasing f, via
        // Illinois-modified regula falsi falling back to bisection. f(lo) >= target >= f(hi).
        template <typename F>
        double solve_nonincreasing(const F &f, double lo, double hi, double f_lo, double f_hi, double target,
                                   double x_tol, double f_tol)
        {
            double a = lo, b = hi, fa = f_lo - target, fb = f_hi - target;
            int side = 0;
            for (int it = 0; it < 200 && (b - a) > x_tol; ++it)
            {
                double x = (fa != fb) ? (a * fb - b * fa) / (fb - fa) : 0.5 * (a + b);
                if (!(x > a && x < b) || it % 8 == 7)
                    x = 0.5 * (a + b);
                const double fx = f(x) - target;
                if (std::abs(fx) <= f_tol)
                    return x;
                if (fx > 0.0)
                {
                    a = x;
                    fa = fx;
                    if (side == -1)
                        fb *= 0.5;
                    side = -1;
                }
                else
                {
                    b = x;
                    fb = fx;
                    if (side == 1)
                        fa *= 0.5;
                    side = 1;
                }
            }
            return 0.5 * (a + b);
        }
    }

    struct PowerSolution
    {
        std::vector<double> rho;
        double multiplier = 0.0;
    };

    /// `g(i, nu)` evaluates the i-th objective term at SNR nu. Returns a split that uses the
    /// whole budget; tol is relative to p_total.
    template <typename G>
    PowerSolution allocate_separable(std::span<const double> gains, const G &g, double p_total, double tol)
    {
        if (!(p_total > 0.0))
            throw DomainError("allocate_separable: p_total must be positive");
        if (!(tol > 0.0))
            throw DomainError("allocate_separable: tol must be positive");
        const std::size_t n = gains.size();
        PowerSolution out;
        if (n == 0)
            return out;
        if (n == 1)
        {
            out.rho = {p_total};
            out.multiplier = -gains[0] * snr_derivative([&](double nu) { return g(0, nu); }, gains[0] * p_total);
            return out;
        }

        auto marginal = [&](std::size_t i, double rho) {
            const double m = -gains[i] * snr_derivative([&](double nu) { return g(i, nu); }, gains[i] * rho);
            return m > 0.0 ? m : 0.0;
        };

        std::vector<double> m0(n), mp(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            m0[i] = marginal(i, 0.0);
            mp[i] = marginal(i, p_total);
        }

        // rho_i(mu) is nonincreasing in mu, so the values at the current multiplier bracket
        // [mu_lo, mu_hi] also bracket every inner root.
        std::vector<double> r_up(n, p_total), m_up = mp; // rho and marginal at mu_lo
        std::vector<double> r_dn(n, 0.0), m_dn = m0;     // rho and marginal at mu_hi
        const double x_tol = 0.1 * tol * p_total / static_cast<double>(n);
        auto rho_of = [&](std::size_t i, double mu) {
            if (m0[i] <= mu)
                return 0.0;
            if (mp[i] >= mu)
                return p_total;
            const double lo = r_dn[i], hi = r_up[i];
            if (hi - lo <= x_tol)
                return 0.5 * (lo + hi);
            return detail::solve_nonincreasing([&](double r) { return marginal(i, r); }, lo, hi, m_dn[i], m_up[i],
                                               mu, x_tol, 1e-12 * mu);
        };
        std::vector<double> rho(n);
        auto total_of = [&](double mu) {
            for (std::size_t i = 0; i < n; ++i)
                rho[i] = rho_of(i, mu);
            return std::accumulate(rho.begin(), rho.end(), 0.0);
        };

        double mu_lo = 0.0, mu_hi = *std::max_element(m0.begin(), m0.end());
        const double s_zero = total_of(mu_lo);
        std::vector<double> best = rho;
        r_up = rho;
        for (std::size_t i = 0; i < n; ++i)
            m_up[i] = marginal(i, r_up[i]);
        // Safeguarded regula falsi (Illinois) on S(mu) - P, S(mu) = sum rho_i(mu) nonincreasing.
        double f_lo = s_zero - p_total, f_hi = -p_total;
        bool done = s_zero <= p_total * (1.0 + tol);
        int side = 0;
        for (int it = 0; it < 200 && !done; ++it)
        {
            double mu = (f_lo != f_hi) ? (mu_lo * f_hi - mu_hi * f_lo) / (f_hi - f_lo) : 0.5 * (mu_lo + mu_hi);
            if (!(mu > mu_lo && mu < mu_hi) || it % 6 == 5)
                mu = 0.5 * (mu_lo + mu_hi);
            const double s = total_of(mu);
            if (s >= p_total)
            {
                mu_lo = mu;
                f_lo = s - p_total;
                best = rho;
                r_up = rho;
                for (std::size_t i = 0; i < n; ++i)
                    m_up[i] = rho[i] >= p_total ? mp[i] : marginal(i, rho[i]);
                if (side == -1)
                    f_hi *= 0.5;
                side = -1;
                done = s <= p_total * (1.0 + tol);
            }
            else
            {
                mu_hi = mu;
                f_hi = s - p_total;
                r_dn = rho;
                for (std::size_t i = 0; i < n; ++i)
                    m_dn[i] = rho[i] <= 0.0 ? m0[i] : marginal(i, rho[i]);
                if (side == 1)
                    f_lo *= 0.5;
                side = 1;
            }
            if (mu_hi - mu_lo <= 1e-15 * std::max(mu_hi, 1e-300))
                break;
        }
        const double mu = mu_lo;

        // Project onto the budget: the objective is nonincreasing in every rho_i, so sum rho = P.
        const double total = std::accumulate(best.begin(), best.end(), 0.0);
        if (total > 0.0)
            for (double &r : best)
                r *= p_total / total;
        else
            std::fill(best.begin(), best.end(), p_total / static_cast<double>(n));
        out.rho = std::move(best);
        out.multiplier = mu;
        return out;
    }
}
