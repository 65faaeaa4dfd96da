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


#include <qmimo/sweep.hpp>

#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <sstream>

using namespace qmimo;
using Catch::Matchers::WithinAbs;

namespace
{
    std::vector<std::string> split(const std::string &s, char sep)
    {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s)
        {
            if (c == sep)
            {
                out.push_back(cur);
                cur.clear();
            }
            else
                cur += c;
        }
        out.push_back(cur);
        return out;
    }

    std::vector<std::string> lines(const std::string &s)
    {
        auto v = split(s, '\n');
        if (!v.empty() && v.back().empty())
            v.pop_back();
        return v;
    }
}

TEST_CASE("SNR grid parsing", "[sweep]")
{
    const auto g = parse_snr_grid("-10:30:5");
    REQUIRE(g.size() == 9);
    CHECK(g.front() == -10.0);
    CHECK(g.back() == 30.0);
    CHECK(parse_snr_grid("0:1:0.1").size() == 11);
    CHECK(parse_snr_grid("5") == std::vector<double>{5.0});
    CHECK(parse_snr_grid("1,-2.5,7") == std::vector<double>{1.0, -2.5, 7.0});
    CHECK(parse_snr_grid("3:3:1") == std::vector<double>{3.0});
    for (const char *bad : {"", "a", "1:2", "1:2:0", "2:1:1", "1,,2", "1:2:x", "inf", "1:2:3:4"})
    {
        INFO("grid '" << bad << "'");
        CHECK_THROWS_AS(parse_snr_grid(bad), InputError);
    }
}

TEST_CASE("sweep config validation", "[sweep]")
{
    SweepConfig ok;
    ok.snr_db_grid = {0.0};
    CHECK_NOTHROW(ok.validate());
    auto bad = ok;
    bad.snr_db_grid.clear();
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = ok;
    bad.n_q = 0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = ok;
    bad.mc_samples = -1;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = ok;
    bad.r_rects = 0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = ok;
    bad.eps1 = 0.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("sweep over a random 2x2 channel", "[sweep]")
{
    SweepConfig sweep;
    sweep.snr_db_grid = parse_snr_grid("-10:30:5");
    sweep.n_q = 4;
    const auto h = random_channel(2, 2, 7);
    const auto pts = run_sweep(h, sweep);
    REQUIRE(pts.size() == 9);
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        CHECK(pts[i].snr_db == sweep.snr_db_grid[i]);
        CHECK(pts[i].rate_achievable <= pts[i].c_ub + 1e-6);
        CHECK(pts[i].c_ub == std::min(pts[i].c_inf, pts[i].c_phidet));
        CHECK(pts[i].s_alloc.size() == static_cast<std::size_t>(pts[i].n_active));
        CHECK_FALSE(pts[i].mc_mi.has_value());
        if (i > 0)
            CHECK(pts[i].rate_achievable >= pts[i - 1].rate_achievable - 1e-9);
    }

    const std::string csv = to_csv(pts);
    const auto rows = lines(csv);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == "snr_db,rate_achievable,c_phidet,c_inf,c_ub,n_active,s_alloc,rho_alloc,mc_mi,mc_std_err,flags");
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        const auto cells = split(rows[i], ',');
        REQUIRE(cells.size() == 11);
        CHECK(split(cells[6], '|').size() == static_cast<std::size_t>(pts[i - 1].n_active));
        CHECK(split(cells[7], '|').size() == static_cast<std::size_t>(pts[i - 1].n_active));
        CHECK(cells[8].empty());
        CHECK(cells[9].empty());
    }

    sweep.jobs = 3;
    CHECK(to_csv(run_sweep(h, sweep)) == csv);
}

TEST_CASE("single comparator sweep", "[sweep]")
{
    SweepConfig sweep;
    sweep.snr_db_grid = {40.0};
    sweep.n_q = 1;
    CMatrix m(1, 1);
    m(0, 0) = 1.0;
    const auto pts = run_sweep(ChannelMatrix(m), sweep);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].c_inf == 1.0);
    CHECK(pts[0].rate_achievable <= 1.0 + 1e-12);
    CHECK(pts[0].rate_achievable > 0.99);
}

TEST_CASE("pipelined sweep with Monte Carlo saturates", "[sweep]")
{
    SweepConfig sweep;
    sweep.snr_db_grid = {40.0};
    sweep.n_q = 3;
    sweep.mode = ReceiverMode::pipelined;
    sweep.mc_samples = 200000;
    const auto pts = run_sweep(random_channel(2, 2, 7), sweep);
    REQUIRE(pts.size() == 1);
    REQUIRE(pts[0].mc_mi.has_value());
    CHECK_THAT(pts[0].rate_achievable, WithinAbs(3.0, 0.02));
    CHECK(std::abs(*pts[0].mc_mi - 3.0) <= std::max(3.0 * *pts[0].mc_std_err, 0.02));
    CHECK(pts[0].c_inf == 3.0);
}

TEST_CASE("Monte Carlo sweep columns and reproducibility", "[sweep]")
{
    SweepConfig sweep;
    sweep.snr_db_grid = {0.0, 10.0};
    sweep.n_q = 3;
    sweep.mc_samples = 20000;
    sweep.mc_seed = 5;
    const auto h = random_channel(2, 1, 3);
    const auto a = to_csv(run_sweep(h, sweep));
    const auto b = to_csv(run_sweep(h, sweep));
    CHECK(a == b);
    const auto cells = split(lines(a)[1], ',');
    CHECK_FALSE(cells[8].empty());
    CHECK_FALSE(cells[9].empty());
    sweep.mc_seed = 6;
    CHECK(to_csv(run_sweep(h, sweep)) != a);
}

TEST_CASE("JSON output mirrors the rows", "[sweep]")
{
    SweepConfig sweep;
    sweep.snr_db_grid = {0.0, 5.0};
    sweep.n_q = 2;
    const auto pts = run_sweep(random_channel(1, 2, 1), sweep);
    const auto doc = nlohmann::json::parse(to_json(pts, sweep, {{"type", "random"}}));
    CHECK(doc["metadata"]["version"] == version);
    CHECK(doc["metadata"]["config"]["n_q"] == 2);
    REQUIRE(doc["rows"].size() == 2);
    CHECK(doc["rows"][1]["snr_db"] == 5.0);
    CHECK(doc["rows"][1]["rate_achievable"].get<double>() == pts[1].rate_achievable);
    CHECK(doc["rows"][0]["mc_mi"].is_null());
    CHECK(doc["rows"][0]["s_alloc"].size() == static_cast<std::size_t>(pts[0].n_active));
}

TEST_CASE("degenerate channel is rejected", "[sweep]")
{
    SweepConfig sweep;
    sweep.snr_db_grid = {0.0};
    CHECK_THROWS_AS(run_sweep(ChannelMatrix(CMatrix(2, 2)), sweep), InputError);
}
