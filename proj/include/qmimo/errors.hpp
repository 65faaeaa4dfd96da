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

#include <stdexcept>
#include <string>

namespace qmimo
{
    // Argument outside the mathematical domain of a function (negative SNR, R < 1, ...).
    class DomainError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class IndexError : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    // Caller broke a documented precondition (mismatched sizes, malformed simplex).
    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    // A numerical routine could not reach its requested accuracy.
    class NumericalError : public std::runtime_error
    {
    public:
        NumericalError(const std::string &what, double achieved_tol)
            : std::runtime_error(what), achieved_tol_(achieved_tol) {}

        double achieved_tol() const noexcept { return achieved_tol_; }

    private:
        double achieved_tol_;
    };

    // Malformed external input (channel files, CLI arguments).
    class InputError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}
