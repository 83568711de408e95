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

// JSON scenario files shared by every CLI subcommand. A file may name a
// preset; its own keys are merge-patched over the preset.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msa/beamform.hpp"
#include "msa/linksim.hpp"
#include "msa/spoof.hpp"

namespace msa::scenario
{

struct LoopbackSettings
{
    std::vector<int> orders{4, 16, 64, 256};
    std::size_t symbols = 4096;
    double max_evm_percent = 0.5;
};

struct LinkSettings
{
    std::size_t symbols = 4096;
    double max_ber = 0.0;
    double min_isotropy = 0.999;
};

struct PatternSettings
{
    std::vector<double> bias_v{0.63, 0.71, 0.79};
    std::vector<double> angle_deg;
};

struct BeamformSettings
{
    int restarts = 8;
    bool exhaustive = false;
};

struct SpoofSettings
{
    spoof::RotorParams rotor = spoof::RotorParams::dual_rotor_preset();
    int iterations = 100;
    double min_similarity = 0.9;
};

enum class CodebookSource
{
    explicit_states,
    uniform,
    optimize
};

struct Scenario
{
    linksim::ScenarioConfig link;
    double target_azimuth_deg = 45.0;
    double target_elevation_deg = 0.0;
    CodebookSource codebook_source = CodebookSource::optimize;
    LoopbackSettings loopback;
    LinkSettings link_settings;
    PatternSettings pattern;
    BeamformSettings beamform;
    SpoofSettings spoof;

    beamform::BeamObjective objective() const;
};

std::vector<std::string> preset_names();
// Canonical JSON of a named preset; ConfigError for unknown names.
std::string preset_json(const std::string &name);

// Parses a scenario document. Relative file references (unit curve CSV)
// resolve against base_dir. Codebooks marked "optimize" are filled in here.
Scenario parse(const std::string &json_text, const std::filesystem::path &base_dir = {});
Scenario load_preset(const std::string &name);

} // namespace msa::scenario
