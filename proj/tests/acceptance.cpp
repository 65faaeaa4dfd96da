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


// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include "oracles.hpp"

#include <qmimo/qmimo.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

using namespace qmimo;

namespace
{
    constexpr double pi = std::numbers::pi;

    struct Outcome
    {
        bool pass = true;
        std::string detail;
    };

    std::string fmt(const char *f, double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, v);
        return buf;
    }

    int failures = 0;

    void run(int id, const char *name, double time_limit_s, const std::function<Outcome()> &body)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = body();
        }
        catch (const std::exception &e)
        {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (time_limit_s > 0.0 && secs >= time_limit_s)
        {
            out.pass = false;
            out.detail += "; runtime limit " + fmt("%.0f", time_limit_s) + " s exceeded";
        }
        if (!out.pass)
            ++failures;
        std::printf("[%s] %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs);
        std::fflush(stdout);
    }

    std::vector<double> log_grid(double lo, double hi, int n)
    {
        std::vector<double> g;
        for (int i = 0; i < n; ++i)
            g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
        return g;
    }

    ChannelDecomposition diagonal(std::vector<double> lambda)
    {
        CMatrix h(lambda.size(), lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i)
            h(i, i) = std::sqrt(lambda[i]);
        return decompose(ChannelMatrix(h));
    }

    Outcome density_normalization()
    {
        double worst = 0.0;
        for (double nu : {0.0, 0.1, 1.0, 5.0, 20.0, 100.0})
        {
            const double total = adaptive_simpson([nu](double p) { return phase_density(p, nu); }, -pi, pi,
                                                  QuadratureConfig{}, std::array{0.0});
            worst = std::max(worst, std::abs(total - 1.0));
        }
        return {worst <= 1e-9, "max |integral - 1| = " + fmt("%.3g", worst)};
    }

    Outcome capacity_anchors()
    {
        double zero = 0.0, high = 0.0, bsc = 0.0;
        for (int s = 1; s <= 6; ++s)
            zero = std::max(zero, std::abs(scalar_capacity(s, 0.0)));
        for (int s = 1; s <= 4; ++s)
            high = std::max(high, std::abs(scalar_capacity(s, 1e4) - std::log2(2.0 * s)));
        for (double nu : log_grid(0.01, 50.0, 20))
            bsc = std::max(bsc, std::abs(scalar_capacity(1, nu) - oracle::bsc_capacity(nu)));
        const bool ok = zero <= 1e-9 && high < 1e-2 && bsc < 1e-6;
        return {ok, "|C(s,0)| <= " + fmt("%.2g", zero) + ", |C(s,1e4) - log2 2s| <= " + fmt("%.2g", high) +
                        ", |C(1,nu) - BSC| <= " + fmt("%.2g", bsc)};
    }

    Outcome midpoint_fidelity()
    {
        double worst = 0.0;
        int ws = 0;
        double wnu = 0.0;
        const auto mid = EvalMode::midpoint(9);
        for (int s = 1; s <= 8; ++s)
            for (double nu : log_grid(0.01, 100.0, 15))
            {
                const double e = std::abs(scalar_capacity(s, nu, mid) - scalar_capacity(s, nu));
                if (e > worst)
                {
                    worst = e;
                    ws = s;
                    wnu = nu;
                }
            }
        return {worst <= 0.01, "observed max error " + fmt("%.5f", worst) + " bits at s = " + std::to_string(ws) +
                                   ", nu = " + fmt("%.3g", wnu)};
    }

    Outcome dp_correctness()
    {
        const OptimizerConfig cfg;
        const EvalMode eval = cfg.inner_mode();
        int instances = 0, mismatches = 0;
        Rng rng(substream_seed(2024, 4));
        for (int draw = 0; draw < 50; ++draw)
        {
            std::vector<double> lam_all(4), rho_all(4);
            for (int i = 0; i < 4; ++i)
            {
                lam_all[static_cast<std::size_t>(i)] = 0.05 + 5.0 * rng.uniform();
                rho_all[static_cast<std::size_t>(i)] = 10.0 * rng.uniform();
            }
            for (auto mode : {ReceiverMode::oneshot, ReceiverMode::pipelined})
                for (std::size_t ns = 1; ns <= 4; ++ns)
                    for (int nq = 1; nq <= 8; ++nq)
                    {
                        const std::vector<double> lam(lam_all.begin(), lam_all.begin() + static_cast<long>(ns));
                        const std::vector<double> rho(rho_all.begin(), rho_all.begin() + static_cast<long>(ns));
                        const auto got = dp_quantizer_allocate(lam, rho, nq, 1.0, mode, cfg);
                        std::vector<std::vector<double>> score(ns, std::vector<double>(9, 0.0));
                        for (std::size_t i = 0; i < ns; ++i)
                            for (int k = 1; k <= nq; ++k)
                                score[i][static_cast<std::size_t>(k)] = branch_rate(mode, k, lam[i] * rho[i], eval);
                        double best = -1.0;
                        std::vector<int> arg;
                        oracle::for_each_allocation(static_cast<int>(ns), nq, [&](const std::vector<int> &s) {
                            double v = 0.0;
                            for (std::size_t i = 0; i < ns; ++i)
                                v += score[i][static_cast<std::size_t>(s[i])];
                            if (v > best || (v == best && std::lexicographical_compare(s.rbegin(), s.rend(),
                                                                                      arg.rbegin(), arg.rend())))
                            {
                                best = v;
                                arg = s;
                            }
                        });
                        double got_v = 0.0;
                        for (std::size_t i = 0; i < ns; ++i)
                            got_v += score[i][static_cast<std::size_t>(got[i])];
                        ++instances;
                        if (got != arg || got_v != best)
                            ++mismatches;
                    }
        }
        return {mismatches == 0,
                std::to_string(instances) + " instances, " + std::to_string(mismatches) + " mismatches"};
    }

    Outcome power_allocation()
    {
        const OptimizerConfig cfg;
        const EvalMode eval = cfg.inner_mode();
        Rng rng(substream_seed(55, 5));
        double worst_gap = 0.0, worst_sym = 0.0;
        for (int inst = 0; inst < 20; ++inst)
        {
            const std::size_t n = inst < 10 ? 2 : 3;
            std::vector<double> lam(n);
            std::vector<int> s(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                lam[i] = 0.1 + 5.0 * rng.uniform();
                s[i] = 1 + static_cast<int>(rng.below(4));
            }
            const double p = 0.2 + 20.0 * rng.uniform();
            const auto rho = power_allocate(lam, s, p, 1.0, cfg);
            const double got = allocation_rate(ReceiverMode::oneshot, lam, s, rho, 1.0, eval);
            double grid = -1.0;
            // 10^4 grid points: 10^4 steps on the segment, 140 steps (10011 points) on the triangle.
            oracle::for_each_simplex_point(static_cast<int>(n), p, n == 2 ? 9999 : 140, [&](const std::vector<double> &r) {
                grid = std::max(grid, allocation_rate(ReceiverMode::oneshot, lam, s, r, 1.0, eval));
            });
            worst_gap = std::max(worst_gap, std::abs(got - grid));

            const std::vector<double> lam_eq(n, lam[0]);
            const std::vector<int> s_eq(n, s[0]);
            for (double r : power_allocate(lam_eq, s_eq, p, 1.0, cfg))
                worst_sym = std::max(worst_sym, std::abs(r - p / static_cast<double>(n)));
        }
        return {worst_gap <= 1e-3 && worst_sym <= 1e-6,
                "max |objective - grid| = " + fmt("%.2g", worst_gap) + " bits, symmetric split error " +
                    fmt("%.2g", worst_sym)};
    }

    Outcome algorithm_behaviour()
    {
        int runs = 0, nonmonotone = 0, violations = 0;
        double worst_margin = -1e300;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
        {
            Rng pick(substream_seed(seed, 600));
            const std::size_t nr = 1 + pick.below(4), nt = 1 + pick.below(4);
            const int nq = 1 + static_cast<int>(pick.below(8));
            const auto dec = decompose(random_channel(nr, nt, substream_seed(seed, 601)));
            for (double snr_db : {-10.0, 0.0, 10.0, 20.0, 30.0})
            {
                const double p = std::pow(10.0, snr_db / 10.0);
                const auto r = optimize_achievability(dec, p, 1.0, nq);
                const auto b = c_ub(dec.eigenvalues, p, 1.0, nq);
                ++runs;
                for (const auto &t : r.traces)
                    for (std::size_t i = 1; i < t.objectives.size(); ++i)
                        if (t.objectives[i] < t.objectives[i - 1])
                            ++nonmonotone;
                worst_margin = std::max(worst_margin, r.state.rate_bits - b.c_ub);
                if (r.state.rate_bits > b.c_ub + 1e-6)
                    ++violations;
            }
        }
        return {nonmonotone == 0 && violations == 0,
                std::to_string(runs) + " runs, " + std::to_string(nonmonotone) + " decreasing steps, " +
                    std::to_string(violations) + " bound violations, max(rate - C_UB) = " + fmt("%.3g", worst_margin)};
    }

    Outcome c_infinity_anchors()
    {
        bool ok = true;
        for (int ns = 1; ns <= 6; ++ns)
            ok = ok && c_infinity(1, ns) == 1.0;
        for (int ns = 1; ns <= 6; ++ns)
            for (int nq = 1; nq <= 2 * ns; ++nq)
                ok = ok && std::abs(c_infinity(nq, ns) - nq) <= 1e-12;
        const double c3 = c_infinity(3, 1);
        ok = ok && std::abs(c3 - std::log2(6.0)) <= 1e-12;
        const auto r = optimize_achievability(diagonal({1.0}), 1e6, 1.0, 3);
        const double gap = std::abs(r.state.rate_bits - std::log2(6.0));
        ok = ok && gap <= 0.02;
        return {ok, "C_inf(3,1) = " + fmt("%.6f", c3) + ", one-shot rate at 1e6 = " + fmt("%.6f", r.state.rate_bits) +
                        " (gap " + fmt("%.2g", gap) + ")"};
    }

    Outcome phase_detector_bound()
    {
        const std::vector<double> lam{2.0, 0.7};
        const double at_zero = c_phase_detector(lam, 0.0, 1.0).bits;
        bool monotone = true;
        double prev = at_zero;
        for (int i = 0; i < 10; ++i)
        {
            const double b = c_phase_detector(lam, std::pow(10.0, -1.0 + 0.4 * i), 1.0).bits;
            monotone = monotone && b >= prev;
            prev = b;
        }
        double worst = -1e300;
        const double l2pi = std::log2(2.0 * pi);
        for (double nu : log_grid(0.01, 100.0, 15))
        {
            const double detector = l2pi - phase_detector_cond_entropy(nu);
            for (int s = 1; s <= 8; ++s)
                worst = std::max(worst, scalar_capacity(s, nu) - detector);
        }
        const bool ok = std::abs(at_zero) <= 1e-9 && monotone && worst <= 1e-6;
        return {ok, "C_phidet(0) = " + fmt("%.2g", at_zero) + std::string(", monotone: ") + (monotone ? "yes" : "no") +
                        ", max(C_phi - detector bound) = " + fmt("%.3g", worst)};
    }

    Outcome monte_carlo()
    {
        struct Case
        {
            std::size_t nr, nt;
            std::uint64_t seed;
        };
        int checked = 0, bad = 0;
        double worst_ratio = 0.0;
        for (const Case c : {Case{1, 1, 101}, Case{2, 2, 202}, Case{4, 3, 303}})
        {
            const auto h = random_channel(c.nr, c.nt, c.seed);
            const auto dec = decompose(h);
            for (double p : {1.0, 10.0, 100.0})
            {
                const auto opt = optimize_achievability(dec, p, 1.0, 4);
                SimulationConfig sim;
                sim.n_samples = 200000;
                sim.seed = substream_seed(c.seed, static_cast<std::uint64_t>(p));
                const auto est = simulate_link(h, dec, opt.combiner, opt.constellation, sim);
                const double tol = std::max(3.0 * est.std_err, 0.01);
                const double diff = std::abs(est.mi_bits - opt.state.rate_bits);
                worst_ratio = std::max(worst_ratio, diff / tol);
                ++checked;
                if (diff > tol)
                    ++bad;
            }
        }
        return {bad == 0, std::to_string(checked) + " configurations, " + std::to_string(bad) +
                              " outside tolerance, max |diff| / tol = " + fmt("%.3f", worst_ratio)};
    }

    Outcome pipelined_equivalence()
    {
        int mismatches = 0;
        bool bijective = true;
        for (int l = 1; l <= 4; ++l)
        {
            const int k = 1 << l;
            std::vector<std::vector<int>> seen(static_cast<std::size_t>(k));
            for (int g = 0; g < 720; ++g)
            {
                const double phase = 2.0 * pi * g / 720.0;
                const double rel = std::fmod(phase - pi / 2.0 + 4.0 * pi, 2.0 * pi / k);
                if (rel < 1e-9 || 2.0 * pi / k - rel < 1e-9)
                    continue; // on a sector boundary
                const auto z = std::polar(1.0, phase);
                const auto q = pipelined_quantize(z, l);
                if (q.sector != direct_phase_sector(z, k))
                    ++mismatches;
                auto &slot = seen[static_cast<std::size_t>(q.sector)];
                if (slot.empty())
                    slot = q.bits;
                else if (slot != q.bits)
                    bijective = false;
            }
            for (const auto &s : seen)
                bijective = bijective && !s.empty();
        }
        const auto trace = pipelined_quantize(std::polar(1.0, 5.0 * pi / 8.0), 3);
        const bool trace_ok = trace.bits == std::vector<int>{-1, 1, 1};

        SweepConfig sweep;
        sweep.snr_db_grid = {60.0};
        sweep.n_q = 3;
        sweep.mode = ReceiverMode::pipelined;
        const auto pts = run_sweep(random_channel(2, 2, 7), sweep);
        const double rate = pts.at(0).rate_achievable;
        const bool ok = mismatches == 0 && bijective && trace_ok && rate >= 3.0 - 0.02;
        return {ok, std::to_string(mismatches) + " grid mismatches, bijective: " + (bijective ? "yes" : "no") +
                        ", trace (" + std::to_string(trace.bits[0]) + "," + std::to_string(trace.bits[1]) + "," +
                        std::to_string(trace.bits[2]) + "), pipelined rate at 1e6 = " + fmt("%.6f", rate)};
    }

    std::string slurp(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    Outcome determinism()
    {
#ifndef QMIMO_CLI_PATH
        return {false, "command-line tool not built"};
#else
        const std::string exe = QMIMO_CLI_PATH;
        const std::string base = "--random 2,2 --seed 7 --nq 4 --snr-db -10:30:10 --mc 20000 --mc-seed 3 --jobs 2";
        bool ok = true;
        std::string detail;
        for (const char *format : {"csv", "json"})
        {
            std::string outputs[2];
            for (int i = 0; i < 2; ++i)
            {
                const std::string path = "acceptance_run" + std::to_string(i) + "." + format;
                const std::string cmd = "\"" + exe + "\" " + base + " --format " + format + " --out " + path;
                if (std::system(cmd.c_str()) != 0)
                    return {false, std::string("CLI failed for ") + format};
                outputs[i] = slurp(path);
            }
            const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
            ok = ok && same;
            detail += std::string(detail.empty() ? "" : ", ") + format + " " + std::to_string(outputs[0].size()) +
                      " bytes " + (same ? "identical" : "DIFFER");
        }
        return {ok, detail};
#endif
    }
}

int main()
{
    run(1, "density normalization", 1.0, density_normalization);
    run(2, "scalar capacity anchors", 10.0, capacity_anchors);
    run(3, "midpoint approximation at R = 9", 0.0, midpoint_fidelity);
    run(4, "quantizer allocation recurrence vs enumeration", 30.0, dp_correctness);
    run(5, "power allocation vs simplex grid", 0.0, power_allocation);
    run(6, "alternating optimization monotone and below C_UB", 0.0, algorithm_behaviour);
    run(7, "C_inf anchors and one-shot saturation", 0.0, c_infinity_anchors);
    run(8, "phase-detector bound", 0.0, phase_detector_bound);
    run(9, "Monte Carlo cross-validation", 120.0, monte_carlo);
    run(10, "pipelined ADC equivalence", 0.0, pipelined_equivalence);
    run(11, "CLI determinism", 0.0, determinism);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures;
}
