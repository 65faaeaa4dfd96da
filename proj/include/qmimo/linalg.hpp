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

// Small dense complex matrices and a cyclic Jacobi eigensolver for Hermitian matrices.
// Sized for antenna arrays (tens of rows), not for large-scale linear algebra.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace qmimo
{
    using cdouble = std::complex<double>;

    class CMatrix
    {
    public:
        CMatrix() = default;
        CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

        static CMatrix identity(std::size_t n)
        {
            CMatrix m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                m(i, i) = 1.0;
            return m;
        }

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }
        bool empty() const noexcept { return data_.empty(); }

        cdouble &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const cdouble &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        const std::vector<cdouble> &data() const noexcept { return data_; }

        CMatrix adjoint() const
        {
            CMatrix out(cols_, rows_);
            for (std::size_t r = 0; r < rows_; ++r)
                for (std::size_t c = 0; c < cols_; ++c)
                    out(c, r) = std::conj((*this)(r, c));
            return out;
        }

        std::vector<cdouble> operator*(const std::vector<cdouble> &v) const
        {
            if (v.size() != cols_)
                throw ContractViolation("CMatrix * vector: dimension mismatch");
            std::vector<cdouble> out(rows_);
            for (std::size_t r = 0; r < rows_; ++r)
            {
                cdouble acc = 0.0;
                for (std::size_t c = 0; c < cols_; ++c)
                    acc += (*this)(r, c) * v[c];
                out[r] = acc;
            }
            return out;
        }

        friend CMatrix operator*(const CMatrix &a, const CMatrix &b)
        {
            if (a.cols_ != b.rows_)
                throw ContractViolation("CMatrix * CMatrix: dimension mismatch");
            CMatrix out(a.rows_, b.cols_);
            for (std::size_t i = 0; i < a.rows_; ++i)
                for (std::size_t k = 0; k < a.cols_; ++k)
                {
                    const cdouble aik = a(i, k);
                    if (aik == 0.0)
                        continue;
                    for (std::size_t j = 0; j < b.cols_; ++j)
                        out(i, j) += aik * b(k, j);
                }
            return out;
        }

        double frobenius_norm() const
        {
            double acc = 0.0;
            for (const auto &z : data_)
                acc += std::norm(z);
            return std::sqrt(acc);
        }

        bool operator==(const CMatrix &) const = default;

    private:
        std::size_t rows_ = 0, cols_ = 0;
        std::vector<cdouble> data_;
    };

    struct HermitianEigen
    {
        std::vector<double> values; // nonincreasing
        CMatrix vectors;            // column i belongs to values[i]
        int sweeps = 0;
    };

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations. Iterates until the
    /// off-diagonal Frobenius norm drops below tol times the matrix norm.
    inline HermitianEigen jacobi_eigen(CMatrix a, double tol = 1e-12, int max_sweeps = 100)
    {
        const std::size_t n = a.rows();
        if (a.cols() != n)
            throw ContractViolation("jacobi_eigen: matrix must be square");

        CMatrix v = CMatrix::identity(n);
        const double scale = std::max(a.frobenius_norm(), 1e-300);
        auto off_norm = [&] {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j)
                        acc += std::norm(a(i, j));
            return std::sqrt(acc);
        };

        int sweep = 0;
        for (; sweep < max_sweeps && off_norm() > tol * scale; ++sweep)
        {
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q)
                {
                    const double mag = std::abs(a(p, q));
                    if (mag <= 1e-300)
                        continue;
                    // J = diag(1, e^{-i phi}) * real rotation; makes a_pq real, then zeroes it.
                    const cdouble phase = std::conj(a(p, q)) / mag; // e^{-i phi}
                    const double app = a(p, p).real(), aqq = a(q, q).real();
                    const double tau = (aqq - app) / (2.0 * mag);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;

                    const cdouble jpp = c, jpq = s, jqp = -s * phase, jqq = c * phase;
                    // A <- A J (columns p, q)
                    for (std::size_t k = 0; k < n; ++k)
                    {
                        const cdouble akp = a(k, p), akq = a(k, q);
                        a(k, p) = akp * jpp + akq * jqp;
                        a(k, q) = akp * jpq + akq * jqq;
                        const cdouble vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = vkp * jpp + vkq * jqp;
                        v(k, q) = vkp * jpq + vkq * jqq;
                    }
                    // A <- J^H A (rows p, q)
                    for (std::size_t k = 0; k < n; ++k)
                    {
                        const cdouble apk = a(p, k), aqk = a(q, k);
                        a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                        a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                    }
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    a(p, p) = a(p, p).real();
                    a(q, q) = a(q, q).real();
                }
        }
        if (off_norm() > tol * scale)
            throw NumericalError("jacobi_eigen: no convergence", off_norm() / scale);

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

        HermitianEigen out;
        out.sweeps = sweep;
        out.vectors = CMatrix(n, n);
        for (std::size_t c = 0; c < n; ++c)
        {
            out.values.push_back(a(order[c], order[c]).real());
            for (std::size_t r = 0; r < n; ++r)
                out.vectors(r, c) = v(r, order[c]);
        }
        return out;
    }
}
