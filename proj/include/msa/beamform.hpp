// SPDX-License-Identifier: Apache-2.0
//
// msa-sim: baseband simulator for metasurface superheterodyne backscatter links
// Copyright (C) 2026 The msa-sim Authors
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

// 1-bit codebook search for single-direction gain.

#include <array>
#include <cstdint>

#include "msa/surface.hpp"

namespace msa::beamform
{

inline constexpr int max_exhaustive_units = 20;

struct BeamObjective
{
    surface::ArrayGeometry geometry;
    surface::PlaneWave incident;
    surface::PlaneWave target;
    std::array<double, 2> phase_rad;

    // Throws ConfigError on geometry or frequency inconsistency.
    void validate() const;
    // Per-unit steering terms v_n(target, incident).
    std::vector<cplx> steering() const;
};

// 20 log10 |sum_n e^{j theta_{state(n)}} v_n|
double array_gain(const surface::Codebook &codebook, const BeamObjective &objective);

// Steepest single-flip ascent. Restart 0 starts from all zeros, the rest from
// seeded random codebooks. Ties across restarts go to the smallest binary
// value sum_n state_n 2^n.
surface::Codebook optimize_greedy(const BeamObjective &objective, int restarts, std::uint64_t seed);

// Global maximiser over all 2^N codebooks; N <= max_exhaustive_units.
surface::Codebook optimize_exhaustive(const BeamObjective &objective);

// Binary value used for tie-breaking.
std::uint64_t codebook_index(const surface::Codebook &codebook);

} // namespace msa::beamform
