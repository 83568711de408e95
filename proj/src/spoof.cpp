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

#include "msa/spoof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "msa/error.hpp"
#include "msa/fft.hpp"
#include "msa/modem.hpp"
#include "msa/waveform_io.hpp"

namespace msa::spoof
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

std::vector<double> periodic_hann(std::size_t n)
{
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n)));
    return w;
}

// Complex STFT, frames x bins, fftshifted.
class StftEngine
{
public:
    StftEngine(std::size_t window_len, std::size_t hop)
        : w_(window_len), hop_(hop), window_(periodic_hann(window_len)), fwd_(window_len, FftPlan::Direction::forward),
          inv_(window_len, FftPlan::Direction::inverse), buf_(window_len)
    {
    }

    std::size_t frames(std::size_t len) const { return len < w_ ? 0 : (len - w_) / hop_ + 1; }

    std::vector<cplx> analyse(std::span<const double> x)
    {
        const std::size_t t_count = frames(x.size());
        std::vector<cplx> out(t_count * w_);
        for (std::size_t t = 0; t < t_count; ++t)
        {
            for (std::size_t n = 0; n < w_; ++n)
                buf_[n] = x[t * hop_ + n] * window_[n];
            fwd_.execute(buf_, buf_);
            for (std::size_t j = 0; j < w_; ++j)
                out[t * w_ + j] = buf_[(j + w_ - w_ / 2) % w_];
        }
        return out;
    }

    // Least-squares real signal whose STFT is closest to X.
    std::vector<double> synthesise(std::span<const cplx> x, std::size_t t_count)
    {
        const std::size_t len = (t_count - 1) * hop_ + w_;
        std::vector<double> num(len, 0.0), den(len, 0.0);
        for (std::size_t t = 0; t < t_count; ++t)
        {
            for (std::size_t j = 0; j < w_; ++j)
                buf_[(j + w_ - w_ / 2) % w_] = x[t * w_ + j];
            inv_.execute(buf_, buf_);
            for (std::size_t n = 0; n < w_; ++n)
            {
                num[t * hop_ + n] += window_[n] * buf_[n].real();
                den[t * hop_ + n] += window_[n] * window_[n];
            }
        }
        for (std::size_t i = 0; i < len; ++i)
            num[i] = den[i] > 1e-12 ? num[i] / den[i] : 0.0;
        return num;
    }

private:
    std::size_t w_;
    std::size_t hop_;
    std::vector<double> window_;
    FftPlan fwd_;
    FftPlan inv_;
    std::vector<cplx> buf_;
};

double magnitude_residual(std::span<const cplx> x, std::span<const double> target)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double d = std::abs(x[i]) - target[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::vector<double> split_row(const std::string &line)
{
    std::vector<double> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
    {
        try
        {
            out.push_back(std::stod(cell));
        }
        catch (const std::exception &)
        {
            throw FormatError("spectrogram csv: bad number '" + cell + "'");
        }
    }
    return out;
}

} // namespace

Spectrogram::Spectrogram(std::size_t window_len, std::size_t hop, double sample_rate, std::size_t frames,
                         std::vector<double> magnitudes)
    : window_len_(window_len), hop_(hop), sample_rate_(sample_rate), frames_(frames), mag_(std::move(magnitudes))
{
    if (window_len_ < 2 || hop_ < 1 || hop_ > window_len_)
        throw ParameterError("Spectrogram: need window_len >= 2 and 1 <= hop <= window_len");
    if (!(sample_rate_ > 0.0))
        throw ParameterError("Spectrogram: sample_rate must be positive");
    if (frames_ < 1 || mag_.size() != frames_ * window_len_)
        throw ParameterError("Spectrogram: magnitude grid does not match frames x bins");
    for (double m : mag_)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw ParameterError("Spectrogram: magnitudes must be finite and non-negative");
}

double Spectrogram::bin_frequency(std::size_t bin) const
{
    return (static_cast<double>(bin) - static_cast<double>(window_len_ / 2)) * sample_rate_ /
           static_cast<double>(window_len_);
}

double Spectrogram::frame_time(std::size_t frame) const
{
    return (static_cast<double>(frame * hop_) + static_cast<double>(window_len_) / 2.0) / sample_rate_;
}

Spectrogram stft(const RealWaveform &x, std::size_t window_len, std::size_t hop)
{
    if (window_len < 2 || hop < 1 || hop > window_len)
        throw ParameterError("stft: need window_len >= 2 and 1 <= hop <= window_len");
    if (x.size() < window_len)
        throw ParameterError("stft: input shorter than the window");
    StftEngine engine(window_len, hop);
    const auto z = engine.analyse(x.samples());
    std::vector<double> mag(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        mag[i] = std::abs(z[i]);
    return {window_len, hop, x.sample_rate(), engine.frames(x.size()), std::move(mag)};
}

GriffinLimResult griffin_lim(const Spectrogram &target, int iterations, std::uint64_t seed)
{
    if (iterations < 1)
        throw ParameterError("griffin_lim: iterations must be >= 1");
    const std::size_t len = target.signal_length();
    const auto &a = target.magnitudes();
    if (std::all_of(a.begin(), a.end(), [](double m) { return m == 0.0; }))
        return {RealWaveform(target.sample_rate(), std::vector<double>(len, 0.0)),
                std::vector<double>(static_cast<std::size_t>(iterations), 0.0)};

    StftEngine engine(target.window_len(), target.hop());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    std::vector<cplx> bins(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        bins[i] = std::polar(a[i], phase(rng));
    auto x = engine.synthesise(bins, target.frames());

    GriffinLimResult result{RealWaveform(target.sample_rate(), {}), {}};
    result.residual.reserve(static_cast<std::size_t>(iterations));
    for (int k = 0; k < iterations; ++k)
    {
        auto z = engine.analyse(x);
        for (std::size_t i = 0; i < z.size(); ++i)
        {
            const double m = std::abs(z[i]);
            z[i] = m > 0.0 ? z[i] * (a[i] / m) : cplx(a[i], 0.0);
        }
        x = engine.synthesise(z, target.frames());
        result.residual.push_back(magnitude_residual(engine.analyse(x), a));
    }
    result.waveform = RealWaveform(target.sample_rate(), std::move(x));
    return result;
}

RealWaveform synthesize_waveform(const Spectrogram &target, int iterations, std::uint64_t seed)
{
    return griffin_lim(target, iterations, seed).waveform;
}

void RotorParams::validate() const
{
    if (blade_count < 1)
        throw ParameterError("rotor: blade_count must be >= 1");
    if (rotors != 1 && rotors != 2)
        throw ParameterError("rotor: rotors must be 1 or 2");
    if (!(rotor_hz > 0.0) || !(tip_doppler_hz > 0.0) || !(duration_s > 0.0) || !(sample_rate > 0.0))
        throw ParameterError("rotor: rates and duration must be positive");
    if (tip_doppler_hz >= sample_rate / 2.0)
        throw ParameterError("rotor: tip Doppler aliases (must be below sample_rate/2)");
    if (window_len < 2 || hop < 1 || hop > window_len)
        throw ParameterError("rotor: need window_len >= 2 and 1 <= hop <= window_len");
    if (static_cast<double>(window_len) > duration_s * sample_rate)
        throw ParameterError("rotor: duration shorter than one window");
    if (!(flash_width_samples > 0.0) || !(flash_level >= 0.0))
        throw ParameterError("rotor: flash width must be positive and flash level non-negative");
}

RotorParams RotorParams::dual_rotor_preset()
{
    return {};
}

Spectrogram rotor_signature(const RotorParams &p)
{
    p.validate();
    const auto len = static_cast<std::size_t>(std::llround(p.duration_s * p.sample_rate));
    // Point scatterer at each blade tip; rotor r has Doppler sign s_r so
    // phase(t) = -s_r (tip / rotor) cos(2 pi rotor t + 2 pi k / B).
    const double beta = p.tip_doppler_hz / p.rotor_hz;
    const double sigma = p.flash_width_samples;
    std::vector<cplx> g(len);
    for (std::size_t n = 0; n < len; ++n)
    {
        const double t = static_cast<double>(n) / p.sample_rate;
        for (int k = 0; k < p.blade_count; ++k)
        {
            const double phi = two_pi * p.rotor_hz * t + two_pi * k / p.blade_count;
            for (int r = 0; r < p.rotors; ++r)
            {
                const double sign = r == 0 ? 1.0 : -1.0;
                g[n] += std::polar(1.0, -sign * beta * std::cos(phi));
            }
            if (p.flash_level > 0.0)
            {
                // Distance to the nearest instant where this blade's phase is pi/2.
                const double lead =
                    std::remainder(phi - std::numbers::pi / 2.0, two_pi) / two_pi / p.rotor_hz * p.sample_rate;
                g[n] += p.flash_level * p.rotors * std::exp(-lead * lead / (2.0 * sigma * sigma));
            }
        }
    }
    std::vector<double> re(len), im(len);
    for (std::size_t n = 0; n < len; ++n)
    {
        re[n] = g[n].real();
        im[n] = g[n].imag();
    }
    StftEngine engine(p.window_len, p.hop);
    const std::size_t frames = engine.frames(len);
    std::vector<double> mag(frames * p.window_len);
    if (p.rotors == 2)
    {
        // The two rotors are complex conjugates: the return is real.
        const auto z = engine.analyse(re);
        for (std::size_t i = 0; i < z.size(); ++i)
            mag[i] = std::abs(z[i]);
    }
    else
    {
        const auto zr = engine.analyse(re);
        const auto zi = engine.analyse(im);
        for (std::size_t i = 0; i < zr.size(); ++i)
            mag[i] = std::abs(zr[i] + cplx(0.0, 1.0) * zi[i]);
    }
    const double peak = *std::max_element(mag.begin(), mag.end());
    for (auto &m : mag)
        m /= peak;
    return {p.window_len, p.hop, p.sample_rate, frames, std::move(mag)};
}

double spectrogram_similarity(const Spectrogram &a, const Spectrogram &b)
{
    if (a.frames() != b.frames() || a.bins() != b.bins())
        throw ParameterError("spectrogram_similarity: grid dimensions differ");
    const auto &x = a.magnitudes();
    const auto &y = b.magnitudes();
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ParameterError("spectrogram_similarity: constant grid has no defined correlation");
    return std::clamp(sxy / std::sqrt(sxx * syy), 0.0, 1.0);
}

RealWaveform principal_component(const ComplexEnvelope &x)
{
    const auto ac = remove_dc(x);
    cplx s2{};
    for (const auto &v : ac.samples())
        s2 += v * v;
    const cplx rot = std::polar(1.0, -0.5 * std::arg(s2));
    std::vector<double> out(ac.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (ac[i] * rot).real();
    return {x.sample_rate(), std::move(out)};
}

SpoofReport spoof_pipeline(const Spectrogram &target, const linksim::ScenarioConfig &scenario, int iterations,
                           std::uint64_t seed)
{
    scenario.validate();
    auto gl = griffin_lim(target, iterations, seed);
    SpoofReport report;
    report.residual = std::move(gl.residual);
    report.waveform = modem::to_dac(gl.waveform, scenario.dac);
    const auto &s = gl.waveform.samples();
    report.degenerate = std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; });
    if (report.degenerate)
        return report;

    const auto tx = linksim::modulate(scenario, report.waveform);
    for (std::size_t i = 0; i < scenario.receivers.size(); ++i)
    {
        const auto env = linksim::received_envelope(scenario, tx, i);
        auto observed = stft(principal_component(env), target.window_len(), target.hop());
        report.similarity.push_back(spectrogram_similarity(target, observed));
        report.received.push_back(std::move(observed));
    }
    return report;
}

std::string spectrogram_csv(const Spectrogram &s)
{
    std::string out;
    for (std::size_t t = 0; t < s.frames(); ++t)
    {
        for (std::size_t j = 0; j < s.bins(); ++j)
        {
            if (j)
                out += ',';
            out += io::format_double(s.at(t, j));
        }
        out += '\n';
    }
    return out;
}

std::string spectrogram_sidecar(const Spectrogram &s)
{
    nlohmann::ordered_json j{{"window_len", s.window_len()},
                             {"hop", s.hop()},
                             {"sample_rate", s.sample_rate()},
                             {"frames", s.frames()},
                             {"bins", s.bins()},
                             {"layout", "rows=frames, columns=fftshifted bins"}};
    return j.dump(2) + "\n";
}

Spectrogram parse_spectrogram(const std::string &csv, const std::string &sidecar_json)
{
    nlohmann::json meta;
    try
    {
        meta = nlohmann::json::parse(sidecar_json);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw FormatError(std::string("spectrogram sidecar: ") + e.what());
    }
    std::size_t window_len = 0, hop = 0;
    double fs = 0.0;
    try
    {
        window_len = meta.at("window_len").get<std::size_t>();
        hop = meta.at("hop").get<std::size_t>();
        fs = meta.at("sample_rate").get<double>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw FormatError(std::string("spectrogram sidecar: ") + e.what());
    }
    std::vector<double> mag;
    std::size_t frames = 0;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto row = split_row(line);
        if (row.size() != window_len)
            throw FormatError("spectrogram csv: row " + std::to_string(frames + 1) + " has " + std::to_string(row.size()) +
                              " columns, expected " + std::to_string(window_len));
        mag.insert(mag.end(), row.begin(), row.end());
        ++frames;
    }
    return {window_len, hop, fs, frames, std::move(mag)};
}

} // namespace msa::spoof
