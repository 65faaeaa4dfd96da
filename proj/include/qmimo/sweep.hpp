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

// SNR sweeps: achievable rate, upper bounds and optional Monte Carlo check per grid point,
// serialized as plot-ready CSV or JSON.

#include "bounds.hpp"
#include "channel.hpp"
#include "errors.hpp"
#include "mcsim.hpp"
#include "optimizer.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace qmimo
{
    inline constexpr const char *version = "1.0.0";

    enum class OutputFormat
    {
        csv,
        json
    };

    struct SweepConfig
    {
        std::vector<double> snr_db_grid; // P / sigma2 in dB with sigma2 = 1
        int n_q = 1;
        ReceiverMode mode = ReceiverMode::oneshot;
        std::int64_t mc_samples = 0; // 0 skips the Monte Carlo check
        std::uint64_t mc_seed = 1;
        int r_rects = 9;
        double eps1 = 1e-6;
        unsigned jobs = 1;

        void validate() const
        {
            if (snr_db_grid.empty())
                throw InputError("sweep: SNR grid is empty");
            for (double v : snr_db_grid)
                if (!std::isfinite(v))
                    throw InputError("sweep: SNR grid entries must be finite");
            if (n_q < 1)
                throw InputError("sweep: n_q must be >= 1");
            if (mc_samples < 0)
                throw InputError("sweep: mc sample count must be >= 0");
            if (r_rects < 1)
                throw InputError("sweep: R must be >= 1");
            if (!(eps1 > 0.0))
                throw InputError("sweep: eps1 must be positive");
        }
    };

    struct RatePoint
    {
        double snr_db = 0.0;
        double rate_achievable = 0.0;
        double c_inf = 0.0;
        double c_phidet = 0.0;
        double c_ub = 0.0;
        int n_active = 0;
        std::vector<int> s_alloc;
        std::vector<double> rho_alloc;
        std::optional<double> mc_mi;
        std::optional<double> mc_std_err;
        std::vector<std::string> flags;
    };

    /// Parses `start:stop:step` (inclusive of stop within step/2) or a comma-separated list.
    inline std::vector<double> parse_snr_grid(const std::string &spec)
    {
        auto number = [&](const std::string &tok) {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(tok, &used);
            }
            catch (const std::exception &)
            {
                throw InputError("snr grid: cannot parse '" + tok + "'");
            }
            if (used != tok.size() || !std::isfinite(v))
                throw InputError("snr grid: cannot parse '" + tok + "'");
            return v;
        };
        std::vector<std::string> parts;
        const char sep = spec.find(':') != std::string::npos ? ':' : ',';
        std::stringstream ss(spec);
        for (std::string tok; std::getline(ss, tok, sep);)
            parts.push_back(tok);
        if (spec.empty() || parts.empty())
            throw InputError("snr grid: empty specification");

        std::vector<double> grid;
        if (sep == ':')
        {
            if (parts.size() != 3)
                throw InputError("snr grid: range must be START:STOP:STEP");
            const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
            if (!(step > 0.0) || stop < start)
                throw InputError("snr grid: need STEP > 0 and STOP >= START");
            for (long i = 0;; ++i)
            {
                const double v = start + static_cast<double>(i) * step;
                if (v > stop + 0.5 * step)
                    break;
                grid.push_back(v);
                if (grid.size() > 100000)
                    throw InputError("snr grid: too many points");
            }
        }
        else
        {
            for (const auto &p : parts)
                grid.push_back(number(p));
        }
        return grid;
    }

    /// Evaluates one grid point; sigma2 = 1 so P = 10^(snr_db / 10).
    inline RatePoint evaluate_point(const ChannelMatrix &h, const ChannelDecomposition &dec, double snr_db,
                                    const SweepConfig &sweep, std::uint64_t mc_seed)
    {
        const double sigma2 = 1.0;
        const double p_total = std::pow(10.0, snr_db / 10.0);
        OptimizerConfig cfg;
        cfg.eps1 = sweep.eps1;
        cfg.r_rects = sweep.r_rects;
        cfg.mode = sweep.mode;

        const auto opt = sweep.mode == ReceiverMode::oneshot
                             ? optimize_achievability(dec, p_total, sigma2, sweep.n_q, cfg)
                             : optimize_pipelined(dec, p_total, sigma2, sweep.n_q, cfg);
        const auto bounds = c_ub(dec.eigenvalues, p_total, sigma2, sweep.n_q, sweep.mode);

        RatePoint pt;
        pt.snr_db = snr_db;
        pt.rate_achievable = opt.state.rate_bits;
        pt.c_inf = bounds.c_infinity;
        pt.c_phidet = bounds.c_phase_detector;
        pt.c_ub = bounds.c_ub;
        pt.n_active = opt.state.n_active;
        pt.s_alloc = opt.state.s;
        pt.rho_alloc = opt.state.rho;
        pt.flags = opt.flags;
        if (pt.rate_achievable > pt.c_ub + 1e-6)
            pt.flags.push_back("bound_violation");

        if (sweep.mc_samples > 0)
        {
            SimulationConfig sim;
            sim.n_samples = sweep.mc_samples;
            sim.seed = mc_seed;
            sim.sigma2 = sigma2;
            const auto est = sweep.mode == ReceiverMode::oneshot
                                 ? simulate_link(h, dec, opt.combiner, opt.constellation, sim)
                                 : simulate_pipelined_link(h, dec, opt.combiner, opt.constellation, sim);
            pt.mc_mi = est.mi_bits;
            pt.mc_std_err = est.std_err;
            for (const auto &f : est.flags)
                pt.flags.push_back("mc_" + f);
        }
        return pt;
    }

    /// One RatePoint per grid entry, in grid order, evaluated on up to `jobs` threads.
    inline std::vector<RatePoint> run_sweep(const ChannelMatrix &h, const SweepConfig &sweep)
    {
        sweep.validate();
        const ChannelDecomposition dec = decompose(h);
        if (dec.degenerate())
            throw InputError("sweep: channel matrix is numerically zero");
        const std::size_t n = sweep.snr_db_grid.size();
        std::vector<RatePoint> points(n);
        auto task = [&](std::size_t i) {
            return evaluate_point(h, dec, sweep.snr_db_grid[i], sweep, substream_seed(sweep.mc_seed, i));
        };
        const std::size_t jobs = std::max(1u, sweep.jobs);
        for (std::size_t start = 0; start < n; start += jobs)
        {
            const std::size_t end = std::min(n, start + jobs);
            if (jobs == 1)
            {
                points[start] = task(start);
                continue;
            }
            std::vector<std::future<RatePoint>> running;
            for (std::size_t i = start; i < end; ++i)
                running.push_back(std::async(std::launch::async, task, i));
            for (std::size_t i = start; i < end; ++i)
                points[i] = running[i - start].get();
        }
        return points;
    }

    namespace detail
    {
        inline std::string fmt_number(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        template <typename T>
        std::string join_pipe(const std::vector<T> &values)
        {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                if (i)
                    out += '|';
                if constexpr (std::is_same_v<T, std::string>)
                    out += values[i];
                else if constexpr (std::is_integral_v<T>)
                    out += std::to_string(values[i]);
                else
                    out += fmt_number(values[i]);
            }
            return out;
        }
    }

    inline constexpr const char *csv_header =
        "snr_db,rate_achievable,c_phidet,c_inf,c_ub,n_active,s_alloc,rho_alloc,mc_mi,mc_std_err,flags";

    inline std::string to_csv(const std::vector<RatePoint> &points)
    {
        using detail::fmt_number;
        std::string out = std::string(csv_header) + "\n";
        for (const auto &p : points)
        {
            out += fmt_number(p.snr_db) + "," + fmt_number(p.rate_achievable) + "," + fmt_number(p.c_phidet) + "," +
                   fmt_number(p.c_inf) + "," + fmt_number(p.c_ub) + "," + std::to_string(p.n_active) + "," +
                   detail::join_pipe(p.s_alloc) + "," + detail::join_pipe(p.rho_alloc) + "," +
                   (p.mc_mi ? fmt_number(*p.mc_mi) : "") + "," + (p.mc_std_err ? fmt_number(*p.mc_std_err) : "") +
                   "," + detail::join_pipe(p.flags) + "\n";
        }
        return out;
    }

    /// Array of row objects mirroring the CSV columns plus a provenance block.
    inline std::string to_json(const std::vector<RatePoint> &points, const SweepConfig &sweep,
                               const nlohmann::json &channel_source)
    {
        nlohmann::ordered_json doc;
        doc["metadata"] = {{"version", version},
                           {"channel", channel_source},
                           {"config",
                            {{"snr_db_grid", sweep.snr_db_grid},
                             {"n_q", sweep.n_q},
                             {"mode", to_string(sweep.mode)},
                             {"r_rects", sweep.r_rects},
                             {"eps1", sweep.eps1},
                             {"mc_samples", sweep.mc_samples},
                             {"mc_seed", sweep.mc_seed}}}};
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto &p : points)
        {
            nlohmann::ordered_json r;
            r["snr_db"] = p.snr_db;
            r["rate_achievable"] = p.rate_achievable;
            r["c_phidet"] = p.c_phidet;
            r["c_inf"] = p.c_inf;
            r["c_ub"] = p.c_ub;
            r["n_active"] = p.n_active;
            r["s_alloc"] = p.s_alloc;
            r["rho_alloc"] = p.rho_alloc;
            r["mc_mi"] = p.mc_mi ? nlohmann::ordered_json(*p.mc_mi) : nlohmann::ordered_json(nullptr);
            r["mc_std_err"] = p.mc_std_err ? nlohmann::ordered_json(*p.mc_std_err) : nlohmann::ordered_json(nullptr);
            r["flags"] = p.flags;
            rows.push_back(r);
        }
        doc["rows"] = rows;
        return doc.dump(2) + "\n";
    }
}
