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

#include "msa/sigcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "msa/error.hpp"
#include "msa/fft.hpp"

namespace msa
{

namespace
{

template <typename T>
bool all_finite(const std::vector<T> &v)
{
    for (const auto &x : v)
    {
        if constexpr (std::is_same_v<T, cplx>)
        {
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                return false;
        }
        else if (!std::isfinite(x))
            return false;
    }
    return true;
}

template <typename T>
std::vector<T> convolve_same(const std::vector<T> &x, const std::vector<double> &h)
{
    const auto len = static_cast<std::ptrdiff_t>(x.size());
    const auto taps = static_cast<std::ptrdiff_t>(h.size());
    const std::ptrdiff_t delay = (taps - 1) / 2;
    std::vector<T> y(x.size(), T{});
    for (std::ptrdiff_t n = 0; n < len; ++n)
    {
        // y[n] = sum_k h[k] x[n + delay - k]
        const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, n + delay - len + 1);
        const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(taps - 1, n + delay);
        T acc{};
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k)
            acc += h[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(n + delay - k)];
        y[static_cast<std::size_t>(n)] = acc;
    }
    return y;
}

template <typename T>
std::vector<T> zero_stuff(const std::vector<T> &x, int factor)
{
    if (factor < 1)
        throw ParameterError("upsample: factor must be >= 1");
    std::vector<T> y(x.size() * static_cast<std::size_t>(factor), T{});
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i * static_cast<std::size_t>(factor)] = x[i];
    return y;
}

template <typename T>
std::vector<T> decimate(const std::vector<T> &x, int factor, int phase)
{
    if (factor < 1)
        throw ParameterError("downsample: factor must be >= 1");
    if (phase < 0 || phase >= factor)
        throw ParameterError("downsample: phase must be in [0, factor)");
    std::vector<T> y;
    y.reserve(x.size() / static_cast<std::size_t>(factor) + 1);
    for (std::size_t i = static_cast<std::size_t>(phase); i < x.size(); i += static_cast<std::size_t>(factor))
        y.push_back(x[i]);
    return y;
}

Spectrum shifted_magnitude(std::vector<cplx> buf, double fs, double fc)
{
    const std::size_t n = buf.size();
    auto X = fft(buf);
    Spectrum s;
    s.frequency_hz.resize(n);
    s.magnitude.resize(n);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) - half;
        const std::size_t idx = static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n));
        s.frequency_hz[i] = static_cast<double>(k) * fs / static_cast<double>(n) + fc;
        s.magnitude[i] = std::abs(X[idx]);
    }
    return s;
}

std::vector<double> analysis_window(Window window, std::size_t len)
{
    std::vector<double> w(len, 1.0);
    if (window == Window::hann && len > 1)
        for (std::size_t i = 0; i < len; ++i)
            w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len - 1));
    return w;
}

} // namespace

RealWaveform::RealWaveform(double sample_rate, std::vector<double> samples)
    : sample_rate_(sample_rate), samples_(std::move(samples))
{
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
        throw ParameterError("RealWaveform: sample_rate must be positive");
    if (!all_finite(samples_))
        throw ParameterError("RealWaveform: non-finite sample");
}

ComplexEnvelope::ComplexEnvelope(double sample_rate, double center_frequency, std::vector<cplx> samples)
    : sample_rate_(sample_rate), center_frequency_(center_frequency), samples_(std::move(samples))
{
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
        throw ParameterError("ComplexEnvelope: sample_rate must be positive");
    if (!std::isfinite(center_frequency_))
        throw ParameterError("ComplexEnvelope: center_frequency must be finite");
    if (!all_finite(samples_))
        throw ParameterError("ComplexEnvelope: non-finite sample");
}

ComplexEnvelope ComplexEnvelope::from_real(const RealWaveform &x, double center_frequency)
{
    std::vector<cplx> s(x.samples().begin(), x.samples().end());
    return {x.sample_rate(), center_frequency, std::move(s)};
}

FilterTaps::FilterTaps(std::vector<double> taps) : taps_(std::move(taps))
{
    if (taps_.empty())
        throw ParameterError("FilterTaps: empty taps");
    if (taps_.size() % 2 == 0)
        throw ParameterError("FilterTaps: length must be odd");
    double peak = 0.0;
    for (double t : taps_)
    {
        if (!std::isfinite(t))
            throw ParameterError("FilterTaps: non-finite tap");
        peak = std::max(peak, std::abs(t));
    }
    const std::size_t n = taps_.size();
    for (std::size_t i = 0; i < n / 2; ++i)
        if (std::abs(taps_[i] - taps_[n - 1 - i]) > 1e-12 * std::max(peak, 1.0))
            throw ParameterError("FilterTaps: taps are not symmetric");
}

cplx FilterTaps::response(double normalized_frequency) const
{
    cplx acc{};
    for (std::size_t k = 0; k < taps_.size(); ++k)
        acc += taps_[k] * std::polar(1.0, -2.0 * std::numbers::pi * normalized_frequency * static_cast<double>(k));
    // Remove the linear phase of the centred impulse response.
    return acc * std::polar(1.0, 2.0 * std::numbers::pi * normalized_frequency * static_cast<double>(nominal_delay()));
}

FilterTaps design_rrc(double beta, int span, int sps)
{
    if (!(beta >= 0.0 && beta <= 1.0))
        throw ParameterError("design_rrc: beta must be in [0, 1]");
    if (span < 2 || sps < 2)
        throw ParameterError("design_rrc: span and sps must be >= 2");
    if ((span * sps) % 2 != 0)
        throw ParameterError("design_rrc: span*sps must be even for a centred odd-length filter");

    using std::numbers::pi;
    const int len = span * sps + 1;
    const int center = span * sps / 2;
    std::vector<double> h(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
    {
        const double t = static_cast<double>(i - center) / sps; // in symbol periods
        double v;
        if (i == center)
            v = 1.0 - beta + 4.0 * beta / pi;
        else if (beta > 0.0 && std::abs(4.0 * beta * std::abs(t) - 1.0) < 1e-9)
            v = beta / std::numbers::sqrt2 *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
        else
            v = (std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta))) /
                (pi * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t)));
        h[static_cast<std::size_t>(i)] = v;
    }
    // Exact symmetry: evaluate once, mirror.
    for (int i = 0; i < center; ++i)
        h[static_cast<std::size_t>(len - 1 - i)] = h[static_cast<std::size_t>(i)];

    double energy = 0.0;
    for (double v : h)
        energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double &v : h)
        v *= scale;
    return FilterTaps(std::move(h));
}

RealWaveform fir_filter(const RealWaveform &x, const FilterTaps &h)
{
    if (x.empty())
        throw ParameterError("fir_filter: empty input");
    return {x.sample_rate(), convolve_same(x.samples(), h.taps())};
}

ComplexEnvelope fir_filter(const ComplexEnvelope &x, const FilterTaps &h)
{
    if (x.empty())
        throw ParameterError("fir_filter: empty input");
    return {x.sample_rate(), x.center_frequency(), convolve_same(x.samples(), h.taps())};
}

RealWaveform upsample(const RealWaveform &x, int factor)
{
    auto y = zero_stuff(x.samples(), factor);
    return {x.sample_rate() * factor, std::move(y)};
}

ComplexEnvelope upsample(const ComplexEnvelope &x, int factor)
{
    auto y = zero_stuff(x.samples(), factor);
    return {x.sample_rate() * factor, x.center_frequency(), std::move(y)};
}

RealWaveform downsample(const RealWaveform &x, int factor, int phase)
{
    auto y = decimate(x.samples(), factor, phase);
    return {x.sample_rate() / factor, std::move(y)};
}

ComplexEnvelope downsample(const ComplexEnvelope &x, int factor, int phase)
{
    auto y = decimate(x.samples(), factor, phase);
    return {x.sample_rate() / factor, x.center_frequency(), std::move(y)};
}

std::size_t Spectrum::peak_bin() const
{
    if (magnitude.empty())
        throw ParameterError("Spectrum: empty");
    return static_cast<std::size_t>(std::max_element(magnitude.begin(), magnitude.end()) - magnitude.begin());
}

double Spectrum::magnitude_at(double f) const
{
    if (magnitude.empty())
        throw ParameterError("Spectrum: empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < frequency_hz.size(); ++i)
        if (std::abs(frequency_hz[i] - f) < std::abs(frequency_hz[best] - f))
            best = i;
    return magnitude[best];
}

double Spectrum::max_in(double lo, double hi) const
{
    double m = 0.0;
    for (std::size_t i = 0; i < frequency_hz.size(); ++i)
        if (frequency_hz[i] >= lo && frequency_hz[i] <= hi)
            m = std::max(m, magnitude[i]);
    return m;
}

Spectrum spectrum(const RealWaveform &x, std::size_t nfft, Window window)
{
    if (x.empty())
        throw ParameterError("spectrum: empty input");
    if (nfft < x.size())
        throw ParameterError("spectrum: nfft must be >= input length");
    const auto w = analysis_window(window, x.size());
    std::vector<cplx> buf(nfft, cplx{});
    for (std::size_t i = 0; i < x.size(); ++i)
        buf[i] = w[i] * x[i];
    return shifted_magnitude(std::move(buf), x.sample_rate(), 0.0);
}

Spectrum spectrum(const ComplexEnvelope &x, std::size_t nfft, Window window)
{
    if (x.empty())
        throw ParameterError("spectrum: empty input");
    if (nfft < x.size())
        throw ParameterError("spectrum: nfft must be >= input length");
    const auto w = analysis_window(window, x.size());
    std::vector<cplx> buf(nfft, cplx{});
    for (std::size_t i = 0; i < x.size(); ++i)
        buf[i] = w[i] * x[i];
    return shifted_magnitude(std::move(buf), x.sample_rate(), x.center_frequency());
}

double mean_power(std::span<const cplx> x)
{
    if (x.empty())
        return 0.0;
    double p = 0.0;
    for (const auto &v : x)
        p += std::norm(v);
    return p / static_cast<double>(x.size());
}

double mean_power(std::span<const double> x)
{
    if (x.empty())
        return 0.0;
    double p = 0.0;
    for (double v : x)
        p += v * v;
    return p / static_cast<double>(x.size());
}

ComplexEnvelope add_noise_power(const ComplexEnvelope &x, double noise_power, std::uint64_t seed)
{
    if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
        throw ParameterError("add_noise_power: noise power must be finite and >= 0");
    if (noise_power == 0.0)
        return x;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
    std::vector<cplx> y(x.samples());
    for (auto &v : y)
    {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += cplx(re, im);
    }
    return {x.sample_rate(), x.center_frequency(), std::move(y)};
}

ComplexEnvelope add_awgn(const ComplexEnvelope &x, double snr_db, std::uint64_t seed)
{
    const double p = mean_power(x.samples());
    if (!(p > 0.0))
        throw ParameterError("add_awgn: input has zero power");
    if (std::isinf(snr_db) && snr_db > 0)
        return x;
    if (!std::isfinite(snr_db))
        throw ParameterError("add_awgn: snr_db must be finite or +inf");
    return add_noise_power(x, p / std::pow(10.0, snr_db / 10.0), seed);
}

ComplexEnvelope remove_dc(const ComplexEnvelope &x)
{
    if (x.empty())
        return x;
    cplx mean{};
    for (const auto &v : x.samples())
        mean += v;
    mean /= static_cast<double>(x.size());
    std::vector<cplx> y(x.samples());
    for (auto &v : y)
        v -= mean;
    return {x.sample_rate(), x.center_frequency(), std::move(y)};
}

} // namespace msa
