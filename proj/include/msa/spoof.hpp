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

// Micro-Doppler imitation: target spectrogram -> Griffin-Lim drive waveform
// -> backscatter link -> re-analysed spectrogram and fidelity score.
//
// Spectrogram rows are frames, columns are fftshifted two-sided bins:
// column j holds frequency (j - window_len/2) * sample_rate / window_len.

#include <cstdint>
#include <string>
#include <vector>

#include "msa/linksim.hpp"
#include "msa/sigcore.hpp"

namespace msa::spoof
{

class Spectrogram
{
public:
    Spectrogram(std::size_t window_len, std::size_t hop, double sample_rate, std::size_t frames,
                std::vector<double> magnitudes);

    std::size_t window_len() const noexcept { return window_len_; }
    std::size_t hop() const noexcept { return hop_; }
    double sample_rate() const noexcept { return sample_rate_; }
    std::size_t frames() const noexcept { return frames_; }
    std::size_t bins() const noexcept { return window_len_; }
    const std::vector<double> &magnitudes() const noexcept { return mag_; }
    double at(std::size_t frame, std::size_t bin) const { return mag_[frame * window_len_ + bin]; }
    double bin_frequency(std::size_t bin) const;
    double frame_time(std::size_t frame) const; // centre of the frame, s
    // Samples a waveform needs to produce exactly frames() frames.
    std::size_t signal_length() const { return (frames_ - 1) * hop_ + window_len_; }

    friend bool operator==(const Spectrogram &, const Spectrogram &) = default;

private:
    std::size_t window_len_;
    std::size_t hop_;
    double sample_rate_;
    std::size_t frames_;
    std::vector<double> mag_;
};

// Periodic Hann window, |STFT| with floor((len - window_len)/hop) + 1 frames.
Spectrogram stft(const RealWaveform &x, std::size_t window_len, std::size_t hop);

struct GriffinLimResult
{
    RealWaveform waveform;
    // residual[k] = || |STFT(x_k)| - target || after iteration k+1.
    std::vector<double> residual;
};

// All-zero target gives an all-zero waveform.
GriffinLimResult griffin_lim(const Spectrogram &target, int iterations, std::uint64_t seed);
RealWaveform synthesize_waveform(const Spectrogram &target, int iterations, std::uint64_t seed);

struct RotorParams
{
    int blade_count = 3;
    double rotor_hz = 4.0;
    double tip_doppler_hz = 800.0;
    double duration_s = 1.0;
    int rotors = 2;
    double sample_rate = 4096.0;
    std::size_t window_len = 128;
    std::size_t hop = 32;
    double flash_level = 8.0;         // flash pulse peak relative to one blade return
    double flash_width_samples = 1.0; // Gaussian sigma of a flash pulse

    void validate() const;
    static RotorParams dual_rotor_preset();
};

// |STFT| of a blade-tip return: blade k of rotor r traces
// f = s_r tip sin(2 pi rotor t + 2 pi k / B), s_r = +1, -1, and a short
// broadband pulse fires whenever a blade phase passes pi/2. Two rotors give
// a real return and hence an exactly negation-symmetric grid. Peak is 1.
Spectrogram rotor_signature(const RotorParams &params);

// Pearson correlation of the two grids, clamped to [0, 1].
double spectrogram_similarity(const Spectrogram &a, const Spectrogram &b);

struct SpoofReport
{
    bool degenerate = false; // zero target: nothing to imitate
    RealWaveform waveform{1.0, {}}; // DAC drive
    std::vector<double> residual;
    std::vector<Spectrogram> received;
    std::vector<double> similarity;
};

// Real-valued observation of a complex envelope: bias removed, rotated onto
// its principal axis, real part kept.
RealWaveform principal_component(const ComplexEnvelope &x);

SpoofReport spoof_pipeline(const Spectrogram &target, const linksim::ScenarioConfig &scenario, int iterations,
                           std::uint64_t seed);

std::string spectrogram_csv(const Spectrogram &s);
std::string spectrogram_sidecar(const Spectrogram &s);
Spectrogram parse_spectrogram(const std::string &csv, const std::string &sidecar_json);

} // namespace msa::spoof
