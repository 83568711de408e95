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

// CSV and binary containers for sampled waveforms.
//
// Binary layout (all little endian):
//   0  char[4]  "MSAW"
//   4  u16      version (1)
//   6  u16      kind (0 = real, 1 = complex)
//   8  f64      sample_rate
//   -- complex only --
//   16 f64      center_frequency
//   -- both --
//      u64      sample count
//      f64...   samples (re, im interleaved for complex)

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msa/sigcore.hpp"

namespace msa::io
{

inline constexpr std::uint16_t waveform_format_version = 1;

std::vector<std::uint8_t> encode_binary(const RealWaveform &x);
std::vector<std::uint8_t> encode_binary(const ComplexEnvelope &x);
RealWaveform decode_real_binary(const std::vector<std::uint8_t> &bytes);
ComplexEnvelope decode_complex_binary(const std::vector<std::uint8_t> &bytes);

// CSV columns: index,value  or  index,re,im. The sample rate (and center
// frequency) travel in a leading comment line "# sample_rate=... center_frequency=...".
std::string encode_csv(const RealWaveform &x);
std::string encode_csv(const ComplexEnvelope &x);
RealWaveform decode_real_csv(const std::string &text);
ComplexEnvelope decode_complex_csv(const std::string &text);

// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

std::string read_text(const std::filesystem::path &path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path);
// Write to a sibling temporary then rename over the target.
void write_atomic(const std::filesystem::path &path, const std::string &contents);
void write_atomic(const std::filesystem::path &path, const std::vector<std::uint8_t> &contents);

} // namespace msa::io
