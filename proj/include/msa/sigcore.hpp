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

// Sampled-signal containers and the small set of DSP primitives the
// transmit/receive chain is built from.

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace msa
{

using cplx = std::complex<double>;

// Real waveform with an explicit sample rate. Holds IF waveforms and
// drive voltages. Immutable once built.
class RealWaveform
{
public:
    RealWaveform(double sample_rate, std::vector<double> samples);

    double sample_rate() const noexcept { return sample_rate_; }
    const std::vector<double> &samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    double operator[](std::size_t i) const { return samples_[i]; }

    friend bool operator==(const RealWaveform &, const RealWaveform &) = default;

private:
    double sample_rate_;
    std::vector<double> samples_;
};

// Complex envelope referenced to a carrier at center_frequency.
class ComplexEnvelope
{
public:
    ComplexEnvelope(double sample_rate, double center_frequency, std::vector<cplx> samples);

    // Promote a real waveform to an envelope with zero imaginary part.
    static ComplexEnvelope from_real(const RealWaveform &x, double center_frequency = 0.0);

    double sample_rate() const noexcept { return sample_rate_; }
    double center_frequency() const noexcept { return center_frequency_; }
    const std::vector<cplx> &samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    cplx operator[](std::size_t i) const { return samples_[i]; }

    friend bool operator==(const ComplexEnvelope &, const ComplexEnvelope &) = default;

private:
    double sample_rate_;
    double center_frequency_;
    std::vector<cplx> samples_;
};

// Odd-length linear-phase FIR taps. nominal_delay is (len-1)/2.
class FilterTaps
{
public:
    explicit FilterTaps(std::vector<double> taps);

    const std::vector<double> &taps() const noexcept { return taps_; }
    std::size_t size() const noexcept { return taps_.size(); }
    std::size_t nominal_delay() const noexcept { return (taps_.size() - 1) / 2; }

    // H(f) at normalised frequency f/fs.
    cplx response(double normalized_frequency) const;

private:
    std::vector<double> taps_;
};

// Unit-energy root raised cosine, span*sps+1 taps.
FilterTaps design_rrc(double beta, int span, int sps);

// Linear convolution with the group delay removed; output length equals
// input length.
RealWaveform fir_filter(const RealWaveform &x, const FilterTaps &h);
ComplexEnvelope fir_filter(const ComplexEnvelope &x, const FilterTaps &h);

RealWaveform upsample(const RealWaveform &x, int factor);
ComplexEnvelope upsample(const ComplexEnvelope &x, int factor);
RealWaveform downsample(const RealWaveform &x, int factor, int phase = 0);
ComplexEnvelope downsample(const ComplexEnvelope &x, int factor, int phase = 0);

enum class Window
{
    rectangular,
    hann
};

// Two-sided DFT magnitude, bins ordered by increasing frequency
// (-fs/2 ... fs/2 - df, shifted by the envelope's center frequency).
struct Spectrum
{
    std::vector<double> frequency_hz;
    std::vector<double> magnitude;

    std::size_t peak_bin() const;
    double peak_frequency() const { return frequency_hz[peak_bin()]; }
    // Magnitude of the bin closest to f.
    double magnitude_at(double f) const;
    // Largest magnitude over bins with lo <= f <= hi.
    double max_in(double lo, double hi) const;
};

// nfft must be >= len(x); the input is zero padded.
Spectrum spectrum(const RealWaveform &x, std::size_t nfft, Window window = Window::hann);
Spectrum spectrum(const ComplexEnvelope &x, std::size_t nfft, Window window = Window::hann);

inline constexpr double no_noise = std::numeric_limits<double>::infinity();

// Circularly symmetric Gaussian noise with power P_x / 10^(snr_db/10).
// snr_db == +inf returns x unchanged.
ComplexEnvelope add_awgn(const ComplexEnvelope &x, double snr_db, std::uint64_t seed);
// Same, with the noise power given directly.
ComplexEnvelope add_noise_power(const ComplexEnvelope &x, double noise_power, std::uint64_t seed);

double mean_power(std::span<const cplx> x);
double mean_power(std::span<const double> x);

// Subtract the frame mean.
ComplexEnvelope remove_dc(const ComplexEnvelope &x);

} // namespace msa
