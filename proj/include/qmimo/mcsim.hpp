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

// Independent validation: Monte Carlo simulation of the quantized link with plug-in mutual
// information estimates, exact DMC mutual information, and the pipelined phase ADC.
//
// Sign convention: sign(0) := +1 everywhere (comparators, ADC stages, sector lookup).

#include "channel.hpp"
#include "errors.hpp"
#include "optimizer.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace qmimo
{
    struct SimulationConfig
    {
        std::int64_t n_samples = 200000;
        std::uint64_t seed = 1;
        double sigma2 = 1.0;     // complex noise variance per antenna (and per combiner output)
        int batches = 20;        // batch-means groups; each is an independent substream
        unsigned jobs = 1;       // worker threads for batches
        int phase_bins_per_sector = 0; // > 0 also estimates MI of the finely binned phase

        void validate() const
        {
            if (n_samples < 1)
                throw DomainError("SimulationConfig: n_samples must be >= 1");
            if (!(sigma2 > 0.0))
                throw DomainError("SimulationConfig: sigma2 must be positive");
            if (batches < 2)
                throw DomainError("SimulationConfig: batches must be >= 2");
            if (phase_bins_per_sector < 0)
                throw DomainError("SimulationConfig: phase_bins_per_sector must be nonnegative");
        }
    };

    struct MiEstimate
    {
        double mi_bits = 0.0;
        double std_err = 0.0;
        std::vector<std::string> flags;
    };

    inline int sign_bit(double x) { return x >= 0.0 ? 1 : -1; }

    /// Exact mutual information (bits) of a discrete memoryless channel with rows p(y|x).
    inline double exact_mi(const std::vector<std::vector<double>> &transition, const std::vector<double> &input_probs)
    {
        if (transition.size() != input_probs.size() || transition.empty())
            throw ContractViolation("exact_mi: one transition row per input symbol required");
        const std::size_t ny = transition.front().size();
        const double psum = std::accumulate(input_probs.begin(), input_probs.end(), 0.0);
        if (std::abs(psum - 1.0) > 1e-9)
            throw ContractViolation("exact_mi: input probabilities do not sum to 1");
        std::vector<double> py(ny, 0.0);
        for (std::size_t x = 0; x < transition.size(); ++x)
        {
            const auto &row = transition[x];
            if (row.size() != ny)
                throw ContractViolation("exact_mi: ragged transition table");
            double rs = 0.0;
            for (double p : row)
            {
                if (p < 0.0)
                    throw ContractViolation("exact_mi: negative transition probability");
                rs += p;
            }
            if (std::abs(rs - 1.0) > 1e-9)
                throw ContractViolation("exact_mi: transition row " + std::to_string(x) + " does not sum to 1");
            if (input_probs[x] < 0.0)
                throw ContractViolation("exact_mi: negative input probability");
            for (std::size_t y = 0; y < ny; ++y)
                py[y] += input_probs[x] * row[y];
        }
        double mi = 0.0;
        for (std::size_t x = 0; x < transition.size(); ++x)
            for (std::size_t y = 0; y < ny; ++y)
            {
                const double p = transition[x][y];
                if (p > 0.0 && input_probs[x] > 0.0)
                    mi += input_probs[x] * p * std::log2(p / py[y]);
            }
        return mi;
    }

    /// Transition table of a symmetric K-sector phase quantizer driven by a K-PSK whose points
    /// sit at the sector centers: row x is W_{(y - x) mod K} shifted so that column y is the
    /// sector index relative to the quantizer, with input x at sector x.
    inline std::vector<std::vector<double>> psk_phase_transition(int k_sectors, double nu, const EvalMode &mode)
    {
        // W_y with theta = pi/K: the signal sits in sector y0 = K/2 (the one containing phase 0).
        const auto w = sector_probabilities(PhaseChannelParams::symmetric(k_sectors, nu), mode);
        const int k = k_sectors;
        const int y0 = k / 2;
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k)));
        for (int x = 0; x < k; ++x)
            for (int y = 0; y < k; ++y)
                rows[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] =
                    w[static_cast<std::size_t>(((y - x + y0) % k + k) % k)];
        return rows;
    }

    /// K-sector phase quantizer with boundaries at pi/2 + 2 pi m / K, the family realized by
    /// rotated sign comparators and by the pipelined ADC. Sector d spans
    /// [pi/2 + 2 pi d / K, pi/2 + 2 pi (d+1) / K).
    inline int direct_phase_sector(std::complex<double> sample, int k_sectors)
    {
        const double two_pi = 2.0 * std::numbers::pi;
        double rel = std::fmod(std::arg(sample) - 0.5 * std::numbers::pi, two_pi);
        if (rel < 0.0)
            rel += two_pi;
        int d = static_cast<int>(std::floor(rel / (two_pi / k_sectors)));
        return std::clamp(d, 0, k_sectors - 1);
    }

    /// Sector of the 2s-sector quantizer realized by s comparators on rows e^{j pi l / s}
    /// from their +-1 outputs (bit l set when comparator l fires +1).
    inline int sign_pattern_sector(std::uint32_t pattern, int s)
    {
        // Comparator l fires +1 for phase in (-pi/2 - pi l/s, pi/2 - pi l/s). Sector d has center
        // pi/2 + pi (d + 1/2)/s; evaluate each candidate center against the pattern.
        for (int d = 0; d < 2 * s; ++d)
        {
            const double center = 0.5 * std::numbers::pi + std::numbers::pi * (d + 0.5) / s;
            std::uint32_t expect = 0;
            for (int l = 0; l < s; ++l)
                if (std::cos(center + std::numbers::pi * l / s) >= 0.0)
                    expect |= 1u << l;
            if (expect == pattern)
                return d;
        }
        return -1;
    }

    struct PipelinedQuantization
    {
        std::vector<int> bits; // y_1 .. y_L, each +-1
        int sector = 0;        // index in [0, 2^L)
        bool boundary = false; // some stage saw Re == 0 exactly
    };

    /// Sector index encoded by pipelined ADC bits: -sum_{l<L} y_l 2^{L-1-l} - (y_L + 1)/2 mod 2^L,
    /// matching direct_phase_sector(sample, 2^L).
    inline int pipelined_bits_to_sector(const std::vector<int> &bits)
    {
        const int l_total = static_cast<int>(bits.size());
        const int k = 1 << l_total;
        int acc = -(bits.back() + 1) / 2;
        for (int l = 1; l < l_total; ++l)
            acc -= bits[static_cast<std::size_t>(l - 1)] * (1 << (l_total - 1 - l));
        return ((acc % k) + k) % k;
    }

    /// One S/H register of the pipeline: a sample that has already passed `stage_count` stages.
    struct PipelinedAdcState
    {
        int stage_count = 0;
        std::complex<double> held_sample;
        std::vector<int> bits;
    };

    namespace detail
    {
        // Stage `stage` (1-based) of an L-bit pipeline: compare, then rotate by y pi / 2^stage
        // (counter-clockwise for +1) unless it is the last stage.
        inline void pipeline_stage(PipelinedAdcState &st, int stages, bool &boundary)
        {
            const double re = st.held_sample.real();
            if (re == 0.0)
                boundary = true;
            const int y = sign_bit(re);
            st.bits.push_back(y);
            ++st.stage_count;
            if (st.stage_count < stages)
                st.held_sample *= std::polar(1.0, y * std::numbers::pi / static_cast<double>(1 << st.stage_count));
        }
    }

    /// Stage-by-stage pipelined phase quantization of one sample, without the pipeline delay.
    inline PipelinedQuantization pipelined_quantize(std::complex<double> sample, int stages)
    {
        if (stages < 1 || stages > 30)
            throw DomainError("pipelined_quantize: stages must lie in [1, 30]");
        PipelinedQuantization out;
        PipelinedAdcState st{0, sample, {}};
        for (int l = 0; l < stages; ++l)
            detail::pipeline_stage(st, stages, out.boundary);
        if (sample == std::complex<double>(0.0, 0.0))
            out.boundary = true;
        out.bits = std::move(st.bits);
        out.sector = pipelined_bits_to_sector(out.bits);
        return out;
    }

    /// Clocked L-bit pipelined phase ADC with L-1 sample-and-hold registers. Each clock accepts
    /// one sample and emits the quantization of the sample accepted L-1 clocks earlier.
    class PipelinedPhaseAdc
    {
    public:
        explicit PipelinedPhaseAdc(int stages) : stages_(stages), registers_(static_cast<std::size_t>(stages))
        {
            if (stages < 1 || stages > 30)
                throw DomainError("PipelinedPhaseAdc: stages must lie in [1, 30]");
        }

        int stages() const noexcept { return stages_; }
        int latency() const noexcept { return stages_ - 1; }

        std::optional<PipelinedQuantization> clock(std::complex<double> sample)
        {
            std::optional<PipelinedQuantization> done;
            bool boundary = false;
            // Registers l = 1..L-1 hold samples that passed l stages; advance from the back.
            for (int l = stages_ - 1; l >= 1; --l)
            {
                auto &slot = registers_[static_cast<std::size_t>(l)];
                if (!slot)
                    continue;
                detail::pipeline_stage(*slot, stages_, boundary);
                if (slot->stage_count == stages_)
                    done = finish(*slot, boundary);
                else
                    registers_[static_cast<std::size_t>(l + 1)] = std::move(slot);
                slot.reset();
            }
            PipelinedAdcState fresh{0, sample, {}};
            bool fresh_boundary = false;
            detail::pipeline_stage(fresh, stages_, fresh_boundary);
            if (stages_ == 1)
                done = finish(fresh, fresh_boundary);
            else
                registers_[1] = std::move(fresh);
            return done;
        }

    private:
        static PipelinedQuantization finish(PipelinedAdcState &st, bool boundary)
        {
            PipelinedQuantization q;
            q.bits = std::move(st.bits);
            q.sector = pipelined_bits_to_sector(q.bits);
            q.boundary = boundary;
            return q;
        }

        int stages_;
        std::vector<std::optional<PipelinedAdcState>> registers_;
    };

    namespace detail
    {
        using JointCounts = std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t>;

        inline double plugin_mi(const JointCounts &joint)
        {
            std::map<std::uint64_t, std::uint64_t> cx, cy;
            std::uint64_t n = 0;
            for (const auto &[key, c] : joint)
            {
                cx[key.first] += c;
                cy[key.second] += c;
                n += c;
            }
            if (n == 0)
                return 0.0;
            const double nn = static_cast<double>(n);
            double mi = 0.0;
            for (const auto &[key, c] : joint)
            {
                const double pxy = static_cast<double>(c) / nn;
                const double px = static_cast<double>(cx[key.first]) / nn;
                const double py = static_cast<double>(cy[key.second]) / nn;
                mi += pxy * std::log2(pxy / (px * py));
            }
            return mi;
        }

        inline MiEstimate batch_estimate(const std::vector<JointCounts> &batches)
        {
            JointCounts pooled;
            std::vector<double> per;
            for (const auto &b : batches)
            {
                per.push_back(plugin_mi(b));
                for (const auto &[k, c] : b)
                    pooled[k] += c;
            }
            MiEstimate est;
            est.mi_bits = plugin_mi(pooled);
            const double mean = std::accumulate(per.begin(), per.end(), 0.0) / static_cast<double>(per.size());
            double var = 0.0;
            for (double v : per)
                var += (v - mean) * (v - mean);
            var /= static_cast<double>(per.size() - 1);
            est.std_err = std::sqrt(var / static_cast<double>(per.size()));
            return est;
        }

        // Runs batch(b, count) for every batch on up to `jobs` threads; results in batch order.
        template <typename Result, typename BatchFn>
        std::vector<Result> run_batches(const SimulationConfig &cfg, const BatchFn &batch)
        {
            const int nb = cfg.batches;
            std::vector<std::int64_t> sizes(static_cast<std::size_t>(nb), cfg.n_samples / nb);
            for (std::int64_t i = 0; i < cfg.n_samples % nb; ++i)
                ++sizes[static_cast<std::size_t>(i)];
            std::vector<Result> out(static_cast<std::size_t>(nb));
            const unsigned jobs = std::max(1u, cfg.jobs);
            if (jobs == 1)
            {
                for (int b = 0; b < nb; ++b)
                    out[static_cast<std::size_t>(b)] = batch(b, sizes[static_cast<std::size_t>(b)]);
                return out;
            }
            for (int start = 0; start < nb; start += static_cast<int>(jobs))
            {
                std::vector<std::future<Result>> running;
                for (int b = start; b < std::min(nb, start + static_cast<int>(jobs)); ++b)
                    running.push_back(std::async(std::launch::async, batch, b, sizes[static_cast<std::size_t>(b)]));
                for (int b = start; b < std::min(nb, start + static_cast<int>(jobs)); ++b)
                    out[static_cast<std::size_t>(b)] = running[static_cast<std::size_t>(b - start)].get();
            }
            return out;
        }

        struct LinkSetup
        {
            std::size_t n_active = 0;
            std::uint64_t alphabet = 1;
            CMatrix precoder; // n_tx x n_active (columns of V)
        };

        inline LinkSetup prepare_link(const ChannelMatrix &h, const ChannelDecomposition &dec,
                                      const std::vector<PskSpec> &constellation)
        {
            LinkSetup setup;
            setup.n_active = constellation.size();
            if (setup.n_active > dec.n_sigma())
                throw ContractViolation("simulate: more PSK streams than eigenchannels");
            if (dec.n_rx != h.n_rx() || dec.n_tx != h.n_tx())
                throw ContractViolation("simulate: decomposition does not match the channel");
            setup.precoder = CMatrix(h.n_tx(), setup.n_active);
            for (std::size_t r = 0; r < h.n_tx(); ++r)
                for (std::size_t c = 0; c < setup.n_active; ++c)
                    setup.precoder(r, c) = dec.v_cols(r, c);
            for (const auto &psk : constellation)
            {
                if (psk.order < 1)
                    throw ContractViolation("simulate: PSK order must be >= 1");
                setup.alphabet *= static_cast<std::uint64_t>(psk.order);
            }
            return setup;
        }

        // Draws one channel use: returns the joint input index and the antenna observation.
        inline std::uint64_t draw_use(Rng &rng, const ChannelMatrix &h, const LinkSetup &setup,
                                      const std::vector<PskSpec> &constellation, double sigma2,
                                      std::vector<cdouble> &x, std::vector<cdouble> &received)
        {
            std::uint64_t index = 0;
            for (std::size_t i = 0; i < setup.n_active; ++i)
            {
                const auto m = rng.below(static_cast<std::uint64_t>(constellation[i].order));
                index = index * static_cast<std::uint64_t>(constellation[i].order) + m;
                x[i] = constellation[i].point(static_cast<int>(m));
            }
            received = h.entries * (setup.precoder * x);
            for (auto &r : received)
                r += rng.complex_normal(sigma2);
            return index;
        }

        inline void flag_undersampled(MiEstimate &est, const SimulationConfig &cfg, std::uint64_t alphabet)
        {
            if (static_cast<double>(cfg.n_samples) < 10.0 * static_cast<double>(alphabet))
                est.flags.push_back("undersampled");
        }
    }

    struct LinkSimulation
    {
        MiEstimate sign_mi;
        std::optional<MiEstimate> phase_mi; // finely binned eigen-sample phase, same sample paths
    };

    /// Monte Carlo of the one-shot link y = sign(Re{A (H V x + z)}), z ~ CN(0, sigma2 I), with
    /// uniform PSK symbols on the active eigenchannels.
    inline LinkSimulation simulate_link_detailed(const ChannelMatrix &h, const ChannelDecomposition &dec,
                                                 const CombinerSpec &combiner, const std::vector<PskSpec> &constellation,
                                                 const SimulationConfig &cfg)
    {
        cfg.validate();
        const auto setup = detail::prepare_link(h, dec, constellation);
        const std::size_t nq = combiner.a_matrix.rows();
        if (nq > 63)
            throw ContractViolation("simulate_link: at most 63 comparators supported");
        if (combiner.a_matrix.cols() != h.n_rx())
            throw ContractViolation("simulate_link: combiner does not match n_rx");
        const auto &s = combiner.allocation.s;
        const bool with_phase = cfg.phase_bins_per_sector > 0;

        struct BatchOut
        {
            detail::JointCounts sign, phase;
        };
        auto batch = [&](int b, std::int64_t count) {
            BatchOut out;
            Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(b)));
            std::vector<cdouble> x(setup.n_active), received;
            for (std::int64_t t = 0; t < count; ++t)
            {
                const std::uint64_t in = detail::draw_use(rng, h, setup, constellation, cfg.sigma2, x, received);
                const auto z = combiner.a_matrix * received;
                std::uint64_t pattern = 0;
                for (std::size_t q = 0; q < nq; ++q)
                    if (z[q].real() >= 0.0)
                        pattern |= std::uint64_t{1} << q;
                ++out.sign[{in, pattern}];
                if (with_phase)
                {
                    std::uint64_t key = 0;
                    for (std::size_t i = 0; i < setup.n_active && i < s.size(); ++i)
                    {
                        if (s[i] == 0)
                            continue;
                        cdouble eig = 0.0;
                        for (std::size_t r = 0; r < h.n_rx(); ++r)
                            eig += dec.u_rows(i, r) * received[r];
                        const int bins = 2 * s[i] * cfg.phase_bins_per_sector;
                        key = key * static_cast<std::uint64_t>(bins) +
                              static_cast<std::uint64_t>(direct_phase_sector(eig, bins));
                    }
                    ++out.phase[{in, key}];
                }
            }
            return out;
        };
        const auto results = detail::run_batches<BatchOut>(cfg, batch);

        std::vector<detail::JointCounts> sign, phase;
        for (const auto &r : results)
        {
            sign.push_back(r.sign);
            phase.push_back(r.phase);
        }
        LinkSimulation sim;
        sim.sign_mi = detail::batch_estimate(sign);
        detail::flag_undersampled(sim.sign_mi, cfg, setup.alphabet);
        if (with_phase)
        {
            sim.phase_mi = detail::batch_estimate(phase);
            detail::flag_undersampled(*sim.phase_mi, cfg, setup.alphabet);
        }
        return sim;
    }

    inline MiEstimate simulate_link(const ChannelMatrix &h, const ChannelDecomposition &dec,
                                    const CombinerSpec &combiner, const std::vector<PskSpec> &constellation,
                                    SimulationConfig cfg)
    {
        cfg.phase_bins_per_sector = 0;
        return simulate_link_detailed(h, dec, combiner, constellation, cfg).sign_mi;
    }

    /// Monte Carlo of the pipelined receiver: stream i of A (H V x + z) drives an L_i-bit
    /// clocked pipelined ADC. Each batch discards the first max(L_i) - 1 warm-up uses.
    inline MiEstimate simulate_pipelined_link(const ChannelMatrix &h, const ChannelDecomposition &dec,
                                              const CombinerSpec &streams, const std::vector<PskSpec> &constellation,
                                              const SimulationConfig &cfg)
    {
        cfg.validate();
        const auto setup = detail::prepare_link(h, dec, constellation);
        const auto &bits = streams.allocation.s;
        const std::size_t ns = bits.size();
        if (streams.a_matrix.rows() != ns)
            throw ContractViolation("simulate_pipelined_link: one combiner row per stream required");
        if (ns != setup.n_active)
            throw ContractViolation("simulate_pipelined_link: one PSK per stream required");
        int max_bits = 0;
        for (int l : bits)
        {
            if (l < 1)
                throw ContractViolation("simulate_pipelined_link: every stream needs >= 1 bit");
            max_bits = std::max(max_bits, l);
        }
        if (max_bits * static_cast<int>(ns) > 63)
            throw ContractViolation("simulate_pipelined_link: joint output too wide");
        const int warmup = max_bits - 1;

        auto batch = [&](int b, std::int64_t count) {
            detail::JointCounts counts;
            Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(b)));
            std::vector<PipelinedPhaseAdc> adcs;
            for (int l : bits)
                adcs.emplace_back(l);
            const std::int64_t total = count + warmup;
            std::vector<std::uint64_t> inputs(static_cast<std::size_t>(total));
            std::vector<std::vector<int>> sectors(static_cast<std::size_t>(total), std::vector<int>(ns, -1));
            std::vector<cdouble> x(setup.n_active), received;
            // Flush with extra clocks so every kept use completes in every stream.
            for (std::int64_t t = 0; t < total + warmup; ++t)
            {
                std::vector<cdouble> z(ns, cdouble(1.0, 0.0));
                if (t < total)
                {
                    inputs[static_cast<std::size_t>(t)] =
                        detail::draw_use(rng, h, setup, constellation, cfg.sigma2, x, received);
                    z = streams.a_matrix * received;
                }
                for (std::size_t i = 0; i < ns; ++i)
                {
                    auto q = adcs[i].clock(z[i]);
                    const std::int64_t origin = t - adcs[i].latency();
                    if (q && origin >= 0 && origin < total)
                        sectors[static_cast<std::size_t>(origin)][i] = q->sector;
                }
            }
            for (std::int64_t t = warmup; t < total; ++t)
            {
                std::uint64_t key = 0;
                for (std::size_t i = 0; i < ns; ++i)
                    key = (key << bits[i]) | static_cast<std::uint64_t>(sectors[static_cast<std::size_t>(t)][i]);
                ++counts[{inputs[static_cast<std::size_t>(t)], key}];
            }
            return counts;
        };
        const auto results = detail::run_batches<detail::JointCounts>(cfg, batch);
        MiEstimate est = detail::batch_estimate(results);
        detail::flag_undersampled(est, cfg, setup.alphabet);
        return est;
    }
}
