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

#include "msa/beamform.hpp"

#include <cmath>
#include <random>

#include "msa/error.hpp"

namespace msa::beamform
{

namespace
{

using surface::Codebook;

// Relative gain difference below which two codebooks count as tied.
constexpr double tie_tolerance = 1e-12;

struct Terms
{
    // term[s][n] = e^{j theta_s} v_n
    std::array<std::vector<cplx>, 2> term;
};

Terms make_terms(const BeamObjective &obj)
{
    const auto v = obj.steering();
    Terms t;
    for (std::size_t s = 0; s < 2; ++s)
    {
        t.term[s].resize(v.size());
        const cplx w = std::polar(1.0, obj.phase_rad[s]);
        for (std::size_t n = 0; n < v.size(); ++n)
            t.term[s][n] = w * v[n];
    }
    return t;
}

cplx field_sum(const std::vector<std::uint8_t> &states, const Terms &t)
{
    cplx acc{};
    for (std::size_t n = 0; n < states.size(); ++n)
        acc += t.term[states[n]][n];
    return acc;
}

bool better(double a, std::uint64_t ia, double b, std::uint64_t ib)
{
    const double scale = std::max(a, b);
    if (a > b + tie_tolerance * scale)
        return true;
    if (b > a + tie_tolerance * scale)
        return false;
    return ia < ib;
}

std::uint64_t index_of(const std::vector<std::uint8_t> &states)
{
    std::uint64_t v = 0;
    for (std::size_t n = 0; n < states.size() && n < 64; ++n)
        v |= static_cast<std::uint64_t>(states[n]) << n;
    return v;
}

void climb(std::vector<std::uint8_t> &states, const Terms &t)
{
    cplx sum = field_sum(states, t);
    for (;;)
    {
        double best = std::abs(sum);
        std::size_t best_n = states.size();
        for (std::size_t n = 0; n < states.size(); ++n)
        {
            const cplx trial = sum - t.term[states[n]][n] + t.term[states[n] ^ 1u][n];
            const double g = std::abs(trial);
            if (g > best * (1.0 + tie_tolerance))
            {
                best = g;
                best_n = n;
            }
        }
        if (best_n == states.size())
            return;
        states[best_n] ^= 1u;
        // Full recompute keeps the running sum free of drift.
        sum = field_sum(states, t);
    }
}

} // namespace

void BeamObjective::validate() const
{
    geometry.validate();
    const double f = geometry.f_rf;
    if (std::abs(incident.frequency() - f) > 1e-12 * f || std::abs(target.frequency() - f) > 1e-12 * f)
        throw ConfigError("BeamObjective: wave frequencies must match the surface carrier");
}

std::vector<cplx> BeamObjective::steering() const
{
    validate();
    return surface::steering_vector(geometry, target, incident);
}

std::uint64_t codebook_index(const Codebook &codebook)
{
    return index_of(codebook.states());
}

double array_gain(const Codebook &codebook, const BeamObjective &objective)
{
    if (codebook.size() != objective.geometry.size())
        throw ParameterError("array_gain: codebook length does not match geometry");
    const auto v = objective.steering();
    cplx acc{};
    for (std::size_t n = 0; n < v.size(); ++n)
        acc += std::polar(1.0, objective.phase_rad[codebook.state(n)]) * v[n];
    return 20.0 * std::log10(std::abs(acc));
}

Codebook optimize_greedy(const BeamObjective &objective, int restarts, std::uint64_t seed)
{
    if (restarts < 1)
        throw ParameterError("optimize_greedy: restarts must be >= 1");
    const auto t = make_terms(objective);
    const std::size_t n = objective.geometry.size();
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);

    std::vector<std::uint8_t> best_states;
    double best_gain = -1.0;
    for (int r = 0; r < restarts; ++r)
    {
        std::vector<std::uint8_t> states(n, 0);
        if (r > 0)
            for (auto &s : states)
                s = coin(rng) ? 1 : 0;
        climb(states, t);
        const double g = std::abs(field_sum(states, t));
        if (best_gain < 0.0 || better(g, index_of(states), best_gain, index_of(best_states)))
        {
            best_gain = g;
            best_states = std::move(states);
        }
    }
    return Codebook(std::move(best_states), objective.phase_rad);
}

Codebook optimize_exhaustive(const BeamObjective &objective)
{
    const std::size_t n = objective.geometry.size();
    if (n > static_cast<std::size_t>(max_exhaustive_units))
        throw CapacityError("optimize_exhaustive: " + std::to_string(n) + " units exceeds the enumeration bound of " +
                            std::to_string(max_exhaustive_units));
    const auto t = make_terms(objective);
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t best_index = 0;
    double best_gain = -1.0;
    for (std::uint64_t c = 0; c < total; ++c)
    {
        cplx acc{};
        for (std::size_t k = 0; k < n; ++k)
            acc += t.term[(c >> k) & 1u][k];
        const double g = std::abs(acc);
        // Ascending enumeration: a later index only wins on a strict improvement.
        if (g > best_gain * (1.0 + tie_tolerance) || best_gain < 0.0)
        {
            best_gain = g;
            best_index = c;
        }
    }
    std::vector<std::uint8_t> states(n);
    for (std::size_t k = 0; k < n; ++k)
        states[k] = static_cast<std::uint8_t>((best_index >> k) & 1u);
    return Codebook(std::move(states), objective.phase_rad);
}

} // namespace msa::beamform
