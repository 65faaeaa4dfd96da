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

// Achievable-rate optimization for the structured combiner family: convex power split,
// dynamic-programming quantizer allocation, and their alternation over the number of
// active eigenchannels. Covers both the one-shot sign-quantizer receiver and the
// pipelined phase-ADC receiver.

#include "channel.hpp"
#include "errors.hpp"
#include "phasefun.hpp"
#include "power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace qmimo
{
    enum class ReceiverMode
    {
        oneshot,
        pipelined
    };

    inline const char *to_string(ReceiverMode m) { return m == ReceiverMode::oneshot ? "oneshot" : "pipelined"; }

    struct OptimizerConfig
    {
        double eps1 = 1e-6;
        int max_alternations = 100;
        double power_tol = 1e-9;
        ReceiverMode mode = ReceiverMode::oneshot;
        int r_rects = 9;

        void validate() const
        {
            if (!(eps1 > 0.0))
                throw DomainError("OptimizerConfig: eps1 must be positive");
            if (max_alternations < 1)
                throw DomainError("OptimizerConfig: max_alternations must be >= 1");
            if (!(power_tol > 0.0))
                throw DomainError("OptimizerConfig: power_tol must be positive");
            if (r_rects < 1)
                throw DomainError("OptimizerConfig: r_rects must be >= 1");
        }

        EvalMode inner_mode() const { return EvalMode::midpoint(r_rects); }
    };

    /// Number of phase sectors realized by k quantizer units on one stream:
    /// 2k for k sign comparators, 2^k for a k-bit pipelined phase ADC.
    inline int sectors_for(ReceiverMode mode, int k)
    {
        if (mode == ReceiverMode::oneshot)
            return 2 * k;
        if (k >= 30)
            throw DomainError("sectors_for: pipelined ADC with " + std::to_string(k) + " bits is out of range");
        return 1 << k;
    }

    /// Rate of one stream with k quantizer units at SNR nu (0 when k = 0).
    inline double branch_rate(ReceiverMode mode, int k, double nu, const EvalMode &eval)
    {
        if (k < 0)
            throw DomainError("branch_rate: k must be nonnegative");
        if (k == 0)
            return 0.0;
        return sector_capacity(sectors_for(mode, k), nu, eval);
    }

    /// Phase quantization entropy w_K(nu, pi/K) of one stream with k >= 1 units.
    inline double branch_entropy(ReceiverMode mode, int k, double nu, const EvalMode &eval)
    {
        const int sectors = sectors_for(mode, k);
        return phase_entropy(PhaseChannelParams::symmetric(sectors, nu), eval);
    }

    /// Sum of per-stream rates, accumulated in channel order.
    inline double allocation_rate(ReceiverMode mode, std::span<const double> eigenvalues, std::span<const int> s,
                                  std::span<const double> rho, double sigma2, const EvalMode &eval)
    {
        double total = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            total += branch_rate(mode, s[i], eigenvalues[i] * rho[i] / sigma2, eval);
        return total;
    }

    /// Power split minimizing sum_i w_{K_i}(lambda_i rho_i / sigma2, pi / K_i) under sum rho <= P.
    inline std::vector<double> power_allocate(std::span<const double> eigenvalues, std::span<const int> s,
                                              double p_total, double sigma2, const OptimizerConfig &cfg)
    {
        cfg.validate();
        if (eigenvalues.size() != s.size())
            throw ContractViolation("power_allocate: eigenvalues and s differ in length");
        if (!(p_total > 0.0))
            throw DomainError("power_allocate: p_total must be positive");
        if (!(sigma2 > 0.0))
            throw DomainError("power_allocate: sigma2 must be positive");
        for (int k : s)
            if (k < 1)
                throw ContractViolation("power_allocate: every s_i must be >= 1");

        std::vector<double> gains(eigenvalues.size());
        for (std::size_t i = 0; i < gains.size(); ++i)
            gains[i] = eigenvalues[i] / sigma2;
        const EvalMode eval = cfg.inner_mode();
        auto term = [&](std::size_t i, double nu) { return branch_entropy(cfg.mode, s[i], nu, eval); };
        return allocate_separable(gains, term, p_total, cfg.power_tol).rho;
    }

    /// Quantizer allocation maximizing sum_i score_i(s_i) by the recurrence
    ///   f(i, n) = max_{k = 1..n} f(i-1, n-k) + score_i(k),  f(i, 0) = 0,
    /// with channel 1 absorbing whatever budget remains so that the result sums to n_q.
    /// Ties go to the smallest k; backtracking runs from channel N_s down to 1.
    inline std::vector<int> dp_quantizer_allocate(std::span<const double> eigenvalues, std::span<const double> rho,
                                                  int n_q, double sigma2, ReceiverMode mode,
                                                  const OptimizerConfig &cfg)
    {
        cfg.validate();
        if (n_q < 0)
            throw DomainError("dp_quantizer_allocate: n_q must be nonnegative");
        if (eigenvalues.size() != rho.size())
            throw ContractViolation("dp_quantizer_allocate: eigenvalues and rho differ in length");
        if (!(sigma2 > 0.0))
            throw DomainError("dp_quantizer_allocate: sigma2 must be positive");
        const std::size_t ns = rho.size();
        const std::size_t nq = static_cast<std::size_t>(n_q);
        std::vector<int> alloc(ns, 0);
        if (ns == 0 || n_q == 0)
            return alloc;

        const EvalMode eval = cfg.inner_mode();
        // score[i][k]
        std::vector<std::vector<double>> score(ns, std::vector<double>(nq + 1, 0.0));
        for (std::size_t i = 0; i < ns; ++i)
        {
            const double nu = eigenvalues[i] * rho[i] / sigma2;
            for (std::size_t k = 1; k <= nq; ++k)
                score[i][k] = branch_rate(mode, static_cast<int>(k), nu, eval);
        }

        constexpr double unreachable = -std::numeric_limits<double>::infinity();
        // f[i][n] over channels 1..i; f[0][n > 0] is unreachable so the budget is spent.
        std::vector<std::vector<double>> f(ns + 1, std::vector<double>(nq + 1, unreachable));
        std::vector<std::vector<int>> choice(ns + 1, std::vector<int>(nq + 1, 0));
        f[0][0] = 0.0;
        for (std::size_t i = 1; i <= ns; ++i)
        {
            f[i][0] = 0.0;
            for (std::size_t n = 1; n <= nq; ++n)
            {
                for (std::size_t k = 1; k <= n; ++k)
                {
                    if (f[i - 1][n - k] == unreachable)
                        continue;
                    const double v = f[i - 1][n - k] + score[i - 1][k];
                    if (v > f[i][n])
                    {
                        f[i][n] = v;
                        choice[i][n] = static_cast<int>(k);
                    }
                }
            }
        }

        std::size_t remaining = nq;
        for (std::size_t i = ns; i >= 1 && remaining > 0; --i)
        {
            const int k = choice[i][remaining];
            alloc[i - 1] = k;
            remaining -= static_cast<std::size_t>(k);
        }
        return alloc;
    }

    struct AllocationState
    {
        int n_active = 0;
        std::vector<int> s;      // quantizers (one-shot) or bits (pipelined) per active channel
        std::vector<double> rho; // power per active channel
        double rate_bits = 0.0;
    };

    /// Input distribution on one eigenchannel: `order` equally spaced points of radius
    /// `amplitude`, the first at `phase_offset`, one per quantizer sector center.
    struct PskSpec
    {
        int order = 0;
        double amplitude = 0.0;
        double phase_offset = 0.0;

        std::complex<double> point(int m) const
        {
            return std::polar(amplitude, phase_offset + 2.0 * std::numbers::pi * m / order);
        }
    };

    /// Sector centers of the sign-quantizer (and pipelined ADC) family sit at
    /// pi/2 + pi/K + 2 pi m / K; the PSK is rotated onto them.
    inline PskSpec psk_for_sectors(int sectors, double rho)
    {
        return {sectors, std::sqrt(std::max(rho, 0.0)), 0.5 * std::numbers::pi + std::numbers::pi / sectors};
    }

    struct AlternationTrace
    {
        int n_s = 0;
        std::vector<double> objectives; // C1, C2, C1, C2, ... in evaluation order
        bool hit_cap = false;
        bool all_active = false;
        double exact_rate = 0.0;
    };

    struct AchievabilityResult
    {
        AllocationState state;
        CombinerSpec combiner;
        std::vector<PskSpec> constellation;
        ReceiverMode mode = ReceiverMode::oneshot;
        std::vector<AlternationTrace> traces;
        std::vector<std::string> flags;

        bool has_flag(const std::string &f) const
        {
            return std::find(flags.begin(), flags.end(), f) != flags.end();
        }
    };

    /// Stream combiner of the pipelined receiver: the first n_active rows of U^H, one ADC per row.
    inline CombinerSpec build_stream_combiner(const ChannelDecomposition &dec, const QuantizerAllocation &bits)
    {
        bits.validate();
        if (bits.s.size() > dec.n_sigma())
            throw ContractViolation("build_stream_combiner: more streams than eigenchannels");
        CombinerSpec spec;
        spec.allocation = bits;
        const std::size_t ns = bits.s.size();
        spec.phi = CMatrix(ns, dec.n_rx);
        spec.a_matrix = CMatrix(ns, dec.n_rx);
        for (std::size_t i = 0; i < ns; ++i)
        {
            spec.phi(i, i) = 1.0;
            for (std::size_t r = 0; r < dec.n_rx; ++r)
                spec.a_matrix(i, r) = dec.u_rows(i, r);
        }
        return spec;
    }

    namespace detail
    {
        inline AchievabilityResult alternating_optimize(const ChannelDecomposition &dec, double p_total,
                                                        double sigma2, int n_q, const OptimizerConfig &cfg)
        {
            cfg.validate();
            if (dec.degenerate())
                throw ContractViolation("optimize: channel has no nonzero singular values");
            if (n_q < 1)
                throw DomainError("optimize: n_q must be >= 1");
            if (!(p_total >= 0.0))
                throw DomainError("optimize: p_total must be nonnegative");
            if (!(sigma2 > 0.0))
                throw DomainError("optimize: sigma2 must be positive");

            const ReceiverMode mode = cfg.mode;
            const EvalMode inner = cfg.inner_mode();
            const EvalMode exact = EvalMode::exact();
            const std::span<const double> lambda(dec.eigenvalues);

            AchievabilityResult result;
            result.mode = mode;
            std::optional<AllocationState> best;

            const int n_sigma = static_cast<int>(dec.n_sigma());
            for (int ns = 1; ns <= n_sigma; ++ns)
            {
                // Fewer units than streams leaves some s_i = 0: never all-active.
                if (n_q < ns)
                    break;
                AlternationTrace trace;
                trace.n_s = ns;
                const auto lam = lambda.first(static_cast<std::size_t>(ns));

                std::vector<int> s(static_cast<std::size_t>(ns), n_q / ns);
                for (int i = 0; i < n_q % ns; ++i)
                    ++s[static_cast<std::size_t>(i)];
                std::vector<double> rho(static_cast<std::size_t>(ns), p_total / ns);
                double incumbent = allocation_rate(mode, lam, s, rho, sigma2, inner);

                int it = 0;
                for (; it < cfg.max_alternations; ++it)
                {
                    // Procedure 1: power split for the current allocation (inactive channels get none).
                    std::vector<double> rho_new(rho.size(), 0.0);
                    if (p_total > 0.0)
                    {
                        std::vector<double> lam_on;
                        std::vector<int> s_on;
                        for (std::size_t i = 0; i < s.size(); ++i)
                            if (s[i] > 0)
                            {
                                lam_on.push_back(lam[i]);
                                s_on.push_back(s[i]);
                            }
                        const auto part = power_allocate(lam_on, s_on, p_total, sigma2, cfg);
                        for (std::size_t i = 0, j = 0; i < s.size(); ++i)
                            if (s[i] > 0)
                                rho_new[i] = part[j++];
                    }
                    double c1 = allocation_rate(mode, lam, s, rho_new, sigma2, inner);
                    if (c1 >= incumbent)
                        rho = std::move(rho_new);
                    else
                        c1 = incumbent; // numerical noise in the convex step; keep the incumbent split
                    trace.objectives.push_back(c1);

                    // Procedure 2: quantizer allocation for the current power split.
                    std::vector<int> s_new = dp_quantizer_allocate(lam, rho, n_q, sigma2, mode, cfg);
                    double c2 = allocation_rate(mode, lam, s_new, rho, sigma2, inner);
                    if (c2 >= c1)
                        s = std::move(s_new);
                    else
                        c2 = c1;
                    trace.objectives.push_back(c2);
                    incumbent = c2;

                    if (c2 - c1 < cfg.eps1)
                        break;
                }
                trace.hit_cap = (it == cfg.max_alternations);
                trace.all_active = std::all_of(s.begin(), s.end(), [](int k) { return k > 0; });

                if (trace.all_active)
                {
                    trace.exact_rate = allocation_rate(mode, lam, s, rho, sigma2, exact);
                    if (!best || trace.exact_rate > best->rate_bits)
                        best = AllocationState{ns, s, rho, trace.exact_rate};
                }
                if (trace.hit_cap)
                    result.flags.push_back("max_alternations");
                result.traces.push_back(std::move(trace));
            }

            if (!best)
            {
                // Unreachable for n_q >= 1 (N_s = 1 always yields s = [n_q]); kept as a flag.
                result.flags.push_back("no_active_candidate");
                best = AllocationState{1, {n_q}, {p_total}, branch_rate(mode, n_q, lambda[0] * p_total / sigma2, exact)};
            }
            std::sort(result.flags.begin(), result.flags.end());
            result.flags.erase(std::unique(result.flags.begin(), result.flags.end()), result.flags.end());

            result.state = *best;
            std::vector<int> padded(dec.n_sigma(), 0);
            std::copy(best->s.begin(), best->s.end(), padded.begin());
            if (mode == ReceiverMode::oneshot)
                result.combiner = build_combiner(dec, QuantizerAllocation::of(padded));
            else
                result.combiner = build_stream_combiner(dec, QuantizerAllocation::of(best->s));
            for (std::size_t i = 0; i < best->s.size(); ++i)
                result.constellation.push_back(psk_for_sectors(sectors_for(mode, best->s[i]), best->rho[i]));
            return result;
        }
    }

    /// Alternating optimization over quantizer and power allocations for every number of
    /// active eigenchannels; returns the best all-active candidate, its combiner and PSK input.
    /// The reported rate uses exact quadrature; the inner loops use the midpoint approximation.
    inline AchievabilityResult optimize_achievability(const ChannelDecomposition &dec, double p_total, double sigma2,
                                                      int n_q, OptimizerConfig cfg = {})
    {
        cfg.mode = ReceiverMode::oneshot;
        return detail::alternating_optimize(dec, p_total, sigma2, n_q, cfg);
    }

    /// Same alternation for the pipelined phase-ADC receiver: s holds bits per stream and a
    /// stream with L bits contributes L - w_{2^L}(nu, pi / 2^L).
    inline AchievabilityResult optimize_pipelined(const ChannelDecomposition &dec, double p_total, double sigma2,
                                                  int n_q, OptimizerConfig cfg = {})
    {
        cfg.mode = ReceiverMode::pipelined;
        return detail::alternating_optimize(dec, p_total, sigma2, n_q, cfg);
    }
}
