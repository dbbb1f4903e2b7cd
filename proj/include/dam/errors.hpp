// SPDX-License-Identifier: Apache-2.0
//
// damsim - multi-user delay alignment modulation simulator
// Copyright (C) 2026 The damsim authors
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

#ifndef DAM_ERRORS_HPP
#define DAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dam
{
// Invalid inputs (bad sizes, negative powers, malformed config) are reported with
// std::invalid_argument. The types below cover failures of otherwise valid inputs.

// A beamforming design has no solution for this channel, e.g. zero forcing with
// fewer antennas than paths or a rank-deficient path matrix.
class InfeasibleError : public std::runtime_error
{
public:
    explicit InfeasibleError(const std::string &what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap or lost strict feasibility.
class SolverError : public std::runtime_error
{
public:
    explicit SolverError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace dam

#endif
