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

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <vector>

namespace qmimo
{
    struct QuadratureConfig
    {
        double abs_tol = 1e-10;
        int max_depth = 60;

        void validate() const
        {
            if (!(abs_tol > 0.0))
                throw DomainError("QuadratureConfig: abs_tol must be positive");
            if (max_depth < 1)
                throw DomainError("QuadratureConfig: max_depth must be >= 1");
        }
    };

    namespace detail
    {
        struct SimpsonState
        {
            double error = 0.0; // accumulated |S2 - S1| / 15
            bool capped = false;
        };

        template <typename F>
        double simpson_step(const F &f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth, SimpsonState &st)
        {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double h = b - a;
            const double left = h / 12.0 * (fa + 4.0 * flm + fm);
            const double right = h / 12.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;

            // Panel too narrow to split further in double precision.
            const bool unresolvable = !(lm > a && m > lm && rm > m && b > rm);

            if (std::abs(delta) <= 15.0 * tol || unresolvable)
            {
                st.error += std::abs(delta) / 15.0;
                return left + right + delta / 15.0;
            }
            if (depth <= 0)
            {
                st.capped = true;
                st.error += std::abs(delta) / 15.0;
                return left + right + delta / 15.0;
            }
            return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, st) +
                   simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, st);
        }
    }

    /// Adaptive Simpson quadrature of f over [a, b] with Richardson correction.
    ///
    /// `breakpoints` are interior nodes (e.g. the location of a sharp peak) that the
    /// recursion starts from; points outside (a, b) are ignored. The absolute tolerance
    /// is shared between the resulting panels in proportion to their width. Throws
    /// NumericalError when a panel still fails the tolerance at max_depth.
    template <typename F>
    double adaptive_simpson(const F &f, double a, double b, const QuadratureConfig &quad,
                            std::span<const double> breakpoints = {})
    {
        quad.validate();
        if (a == b)
            return 0.0;
        double sign = 1.0;
        if (b < a)
        {
            std::swap(a, b);
            sign = -1.0;
        }

        std::vector<double> nodes{a};
        for (double p : breakpoints)
            if (p > a && p < b)
                nodes.push_back(p);
        nodes.push_back(b);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

        detail::SimpsonState st;
        double total = 0.0;
        const double width = b - a;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        {
            const double lo = nodes[i], hi = nodes[i + 1];
            const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
            const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            const double tol = quad.abs_tol * (hi - lo) / width;
            total += detail::simpson_step(f, lo, hi, fa, fm, fb, whole, tol, quad.max_depth, st);
        }

        if (st.capped && st.error > quad.abs_tol)
        {
            std::ostringstream msg;
            msg << "adaptive_simpson: tolerance " << quad.abs_tol << " not reached on [" << a << ", " << b
                << "] at max_depth " << quad.max_depth << " (achieved " << st.error << ")";
            throw NumericalError(msg.str(), st.error);
        }
        return sign * total;
    }
}
