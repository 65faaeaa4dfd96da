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


// qmimo: achievable rates and upper bounds of a MIMO link with 1-bit ADC phase
// quantization, swept over SNR, with optional Monte Carlo validation.

#include <qmimo/qmimo.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_input = 2;
    constexpr int exit_numerical = 3;

    std::pair<std::size_t, std::size_t> parse_dims(const std::string &text)
    {
        const auto comma = text.find(',');
        if (comma == std::string::npos)
            throw qmimo::InputError("--random expects NR,NT, got '" + text + "'");
        auto dim = [&](const std::string &tok) -> std::size_t {
            std::size_t used = 0;
            long v = 0;
            try
            {
                v = std::stol(tok, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used != tok.size() || tok.empty() || v < 1 || v > 64)
                throw qmimo::InputError("--random: dimension '" + tok + "' must be an integer in [1, 64]");
            return static_cast<std::size_t>(v);
        };
        return {dim(text.substr(0, comma)), dim(text.substr(comma + 1))};
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Rates and bounds of MIMO receivers built from 1-bit ADC phase quantizers"};
    app.set_version_flag("--version", qmimo::version);

    std::string channel_path, random_dims, snr_spec = "0", mode_name = "oneshot", format_name = "csv", out_path;
    std::uint64_t seed = 1;
    qmimo::SweepConfig sweep;
    sweep.n_q = 4;

    auto *chan_opt = app.add_option("--channel", channel_path, "Channel JSON file {n_rx, n_tx, re, im}");
    auto *rand_opt = app.add_option("--random", random_dims, "Random i.i.d. CN(0,1) channel NR,NT");
    chan_opt->excludes(rand_opt);
    app.add_option("--seed", seed, "Seed for --random")->needs(rand_opt);
    app.add_option("--nq", sweep.n_q, "Total number of 1-bit ADCs")->capture_default_str();
    app.add_option("--snr-db", snr_spec, "SNR grid START:STOP:STEP or comma-separated list (dB)")
        ->capture_default_str();
    app.add_option("--mode", mode_name, "Receiver: oneshot or pipelined")
        ->check(CLI::IsMember({"oneshot", "pipelined"}))
        ->capture_default_str();
    app.add_option("--r", sweep.r_rects, "Midpoint rectangles per sector")->capture_default_str();
    app.add_option("--eps1", sweep.eps1, "Alternation stopping threshold (bits)")->capture_default_str();
    app.add_option("--mc", sweep.mc_samples, "Monte Carlo samples per point, 0 to skip")->capture_default_str();
    app.add_option("--mc-seed", sweep.mc_seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--jobs", sweep.jobs, "Concurrent sweep points")->capture_default_str();
    app.add_option("--out", out_path, "Output file (default stdout)");
    app.add_option("--format", format_name, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_input;
    }

    try
    {
        if (channel_path.empty() == random_dims.empty())
            throw qmimo::InputError("exactly one of --channel or --random is required");
        sweep.snr_db_grid = qmimo::parse_snr_grid(snr_spec);
        sweep.mode = mode_name == "pipelined" ? qmimo::ReceiverMode::pipelined : qmimo::ReceiverMode::oneshot;
        sweep.validate();

        qmimo::ChannelMatrix h;
        nlohmann::json source;
        if (!channel_path.empty())
        {
            h = qmimo::load_channel(channel_path);
            source = {{"type", "file"}, {"path", channel_path}};
        }
        else
        {
            const auto [nr, nt] = parse_dims(random_dims);
            h = qmimo::random_channel(nr, nt, seed);
            source = {{"type", "random"}, {"n_rx", nr}, {"n_tx", nt}, {"seed", seed}};
        }

        const auto points = qmimo::run_sweep(h, sweep);
        const std::string text =
            format_name == "json" ? qmimo::to_json(points, sweep, source) : qmimo::to_csv(points);

        if (out_path.empty())
            std::cout << text << std::flush;
        else
        {
            std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw qmimo::InputError("cannot open output file '" + out_path + "'");
            out << text;
            if (!out)
                throw qmimo::InputError("failed writing output file '" + out_path + "'");
        }

        for (const auto &p : points)
            for (const auto &f : p.flags)
                if (f == "bound_violation")
                {
                    std::cerr << "qmimo: achievable rate exceeds the upper bound at " << p.snr_db << " dB\n";
                    return exit_numerical;
                }
        return exit_ok;
    }
    catch (const qmimo::InputError &e)
    {
        std::cerr << "qmimo: input error: " << e.what() << "\n";
        return exit_input;
    }
    catch (const qmimo::DomainError &e)
    {
        std::cerr << "qmimo: input error: " << e.what() << "\n";
        return exit_input;
    }
    catch (const qmimo::NumericalError &e)
    {
        std::cerr << "qmimo: numerical failure: " << e.what() << " (achieved tolerance " << e.achieved_tol() << ")\n";
        return exit_numerical;
    }
    catch (const std::exception &e)
    {
        std::cerr << "qmimo: error: " << e.what() << "\n";
        return exit_numerical;
    }
}
