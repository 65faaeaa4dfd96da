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

// Channel file format: {"n_rx": int, "n_tx": int, "re": [[...]], "im": [[...]]},
// both matrices row-major n_rx x n_tx.

#include "channel.hpp"
#include "errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace qmimo
{
    inline ChannelMatrix parse_channel_json(const std::string &text)
    {
        nlohmann::json doc;
        try
        {
            doc = nlohmann::json::parse(text);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw InputError(std::string("channel file: invalid JSON: ") + e.what());
        }
        if (!doc.is_object())
            throw InputError("channel file: top level must be an object");

        auto dim = [&](const char *key) -> std::size_t {
            if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 1)
                throw InputError(std::string("channel file: '") + key + "' must be a positive integer");
            return static_cast<std::size_t>(doc[key].get<long long>());
        };
        const std::size_t n_rx = dim("n_rx");
        const std::size_t n_tx = dim("n_tx");

        CMatrix h(n_rx, n_tx);
        auto fill = [&](const char *key, bool imag) {
            if (!doc.contains(key) || !doc[key].is_array())
                throw InputError(std::string("channel file: '") + key + "' must be an array of rows");
            const auto &rows = doc[key];
            if (rows.size() != n_rx)
                throw InputError(std::string("channel file: '") + key + "' has " + std::to_string(rows.size()) +
                                 " rows, expected " + std::to_string(n_rx));
            for (std::size_t r = 0; r < n_rx; ++r)
            {
                if (!rows[r].is_array() || rows[r].size() != n_tx)
                    throw InputError(std::string("channel file: '") + key + "' row " + std::to_string(r) +
                                     " must have " + std::to_string(n_tx) + " entries");
                for (std::size_t c = 0; c < n_tx; ++c)
                {
                    const auto &v = rows[r][c];
                    if (!v.is_number() || !std::isfinite(v.get<double>()))
                        throw InputError(std::string("channel file: '") + key + "' entry at row " +
                                         std::to_string(r) + ", column " + std::to_string(c) +
                                         " is not a finite number");
                    if (imag)
                        h(r, c).imag(v.get<double>());
                    else
                        h(r, c).real(v.get<double>());
                }
            }
        };
        fill("re", false);
        fill("im", true);
        return ChannelMatrix(std::move(h));
    }

    inline ChannelMatrix load_channel(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw InputError("channel file: cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_channel_json(buf.str());
    }

    inline std::string channel_to_json(const ChannelMatrix &h)
    {
        nlohmann::json doc;
        doc["n_rx"] = h.n_rx();
        doc["n_tx"] = h.n_tx();
        nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
        for (std::size_t r = 0; r < h.n_rx(); ++r)
        {
            nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
            for (std::size_t c = 0; c < h.n_tx(); ++c)
            {
                rr.push_back(h.entries(r, c).real());
                ir.push_back(h.entries(r, c).imag());
            }
            re.push_back(rr);
            im.push_back(ir);
        }
        doc["re"] = re;
        doc["im"] = im;
        return doc.dump();
    }
}
