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
#include "linalg.hpp"
#include "rng.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace qmimo
{
    /// Narrowband channel H (n_rx x n_tx).
    struct ChannelMatrix
    {
        CMatrix entries;

        ChannelMatrix() = default;
        explicit ChannelMatrix(CMatrix h) : entries(std::move(h)) { validate(); }

        std::size_t n_rx() const noexcept { return entries.rows(); }
        std::size_t n_tx() const noexcept { return entries.cols(); }

        void validate() const
        {
            if (entries.rows() < 1 || entries.cols() < 1)
                throw ContractViolation("ChannelMatrix: dimensions must be >= 1");
            for (std::size_t r = 0; r < entries.rows(); ++r)
                for (std::size_t c = 0; c < entries.cols(); ++c)
                    if (!std::isfinite(entries(r, c).real()) || !std::isfinite(entries(r, c).imag()))
                        throw ContractViolation("ChannelMatrix: non-finite entry at (" + std::to_string(r) + ", " +
                                                std::to_string(c) + ")");
        }
    };

    /// Retained part of H = U Sigma V^H: squared singular values lambda_1 >= ... and the
    /// matching rows of U^H and columns of V.
    struct ChannelDecomposition
    {
        std::vector<double> eigenvalues;
        CMatrix u_rows; // n_sigma x n_rx
        CMatrix v_cols; // n_tx x n_sigma
        std::size_t n_rx = 0, n_tx = 0;

        std::size_t n_sigma() const noexcept { return eigenvalues.size(); }
        bool degenerate() const noexcept { return eigenvalues.empty(); }
    };

    /// Quantizers per eigenchannel (sign comparators, or pipelined ADC bits).
    struct QuantizerAllocation
    {
        std::vector<int> s;
        int n_q = 0;

        static QuantizerAllocation of(std::vector<int> s)
        {
            const int total = std::accumulate(s.begin(), s.end(), 0);
            return {std::move(s), total};
        }

        void validate() const
        {
            int total = 0;
            for (int v : s)
            {
                if (v < 0)
                    throw ContractViolation("QuantizerAllocation: entries must be nonnegative");
                total += v;
            }
            if (total != n_q)
                throw ContractViolation("QuantizerAllocation: entries sum to " + std::to_string(total) +
                                        ", expected n_q = " + std::to_string(n_q));
        }
    };

    /// Structured phase-quantizer combiner. `phi` acts on eigen-coordinates (U^H y), padded
    /// with zero columns to n_rx; `a_matrix` = phi * U^H acts on antenna outputs.
    struct CombinerSpec
    {
        CMatrix phi;      // n_q x n_rx
        CMatrix a_matrix; // n_q x n_rx
        QuantizerAllocation allocation;
    };

    /// Squared singular values and singular vectors of h through the Jacobi eigendecomposition
    /// of h^H h. Eigenvalues below rank_tol * lambda_max are dropped.
    inline ChannelDecomposition decompose(const ChannelMatrix &h, double rank_tol = 1e-12)
    {
        h.validate();
        if (!(rank_tol > 0.0))
            throw DomainError("decompose: rank_tol must be positive");
        const CMatrix &hm = h.entries;
        ChannelDecomposition dec;
        dec.n_rx = h.n_rx();
        dec.n_tx = h.n_tx();

        const HermitianEigen eig = jacobi_eigen(hm.adjoint() * hm);
        const double lmax = eig.values.empty() ? 0.0 : eig.values.front();
        const std::size_t cap = std::min(h.n_rx(), h.n_tx());
        std::vector<std::size_t> keep;
        if (lmax > 0.0)
            for (std::size_t i = 0; i < eig.values.size() && keep.size() < cap; ++i)
                if (eig.values[i] > rank_tol * lmax)
                    keep.push_back(i);

        dec.u_rows = CMatrix(keep.size(), h.n_rx());
        dec.v_cols = CMatrix(h.n_tx(), keep.size());
        for (std::size_t k = 0; k < keep.size(); ++k)
        {
            const std::size_t i = keep[k];
            dec.eigenvalues.push_back(eig.values[i]);
            std::vector<cdouble> vi(h.n_tx());
            for (std::size_t r = 0; r < h.n_tx(); ++r)
                vi[r] = dec.v_cols(r, k) = eig.vectors(r, i);
            // u_i = h v_i / sqrt(lambda_i); u_rows holds u_i^H.
            std::vector<cdouble> ui = hm * vi;
            const double scale = 1.0 / std::sqrt(eig.values[i]);
            for (std::size_t r = 0; r < h.n_rx(); ++r)
                dec.u_rows(k, r) = std::conj(ui[r] * scale);
        }

        // Modified Gram-Schmidt on the rows restores orthonormality for weak eigenvalues.
        for (std::size_t k = 0; k < dec.u_rows.rows(); ++k)
        {
            for (std::size_t j = 0; j < k; ++j)
            {
                cdouble dot = 0.0;
                for (std::size_t r = 0; r < dec.n_rx; ++r)
                    dot += dec.u_rows(k, r) * std::conj(dec.u_rows(j, r));
                for (std::size_t r = 0; r < dec.n_rx; ++r)
                    dec.u_rows(k, r) -= dot * dec.u_rows(j, r);
            }
            double norm = 0.0;
            for (std::size_t r = 0; r < dec.n_rx; ++r)
                norm += std::norm(dec.u_rows(k, r));
            norm = std::sqrt(norm);
            for (std::size_t r = 0; r < dec.n_rx; ++r)
                dec.u_rows(k, r) /= norm;
        }
        return dec;
    }

    /// Phi_PH and A_PH for a quantizer allocation: eigenchannel k gets s_k rows carrying
    /// e^{j pi (l-1) / s_k}, l = 1..s_k, stacked in channel order.
    inline CombinerSpec build_combiner(const ChannelDecomposition &dec, const QuantizerAllocation &alloc)
    {
        alloc.validate();
        if (alloc.s.size() != dec.n_sigma())
            throw ContractViolation("build_combiner: allocation length " + std::to_string(alloc.s.size()) +
                                    " != n_sigma " + std::to_string(dec.n_sigma()));
        CombinerSpec spec;
        spec.allocation = alloc;
        const std::size_t nq = static_cast<std::size_t>(alloc.n_q);
        CMatrix phi_eig(nq, dec.n_sigma());
        spec.phi = CMatrix(nq, dec.n_rx);
        std::size_t row = 0;
        for (std::size_t k = 0; k < alloc.s.size(); ++k)
        {
            const int sk = alloc.s[k];
            for (int l = 0; l < sk; ++l, ++row)
            {
                const cdouble e = std::polar(1.0, std::numbers::pi * l / sk);
                phi_eig(row, k) = e;
                spec.phi(row, k) = e;
            }
        }
        spec.a_matrix = phi_eig * dec.u_rows;
        return spec;
    }

    /// I.i.d. CN(0, 1) entries, reproducible from the seed.
    inline ChannelMatrix random_channel(std::size_t n_rx, std::size_t n_tx, std::uint64_t seed)
    {
        if (n_rx < 1 || n_tx < 1)
            throw DomainError("random_channel: dimensions must be >= 1");
        Rng rng(seed);
        CMatrix h(n_rx, n_tx);
        for (std::size_t r = 0; r < n_rx; ++r)
            for (std::size_t c = 0; c < n_tx; ++c)
                h(r, c) = rng.complex_normal(1.0);
        return ChannelMatrix(std::move(h));
    }
}
