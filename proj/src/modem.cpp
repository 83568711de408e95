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

#include "msa/modem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "msa/error.hpp"

namespace msa::modem
{

namespace
{

int axis_levels(int order)
{
    return static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
}

double axis_scale(int order)
{
    return 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
}

std::uint32_t gray_to_binary(std::uint32_t g)
{
    std::uint32_t b = g;
    for (std::uint32_t s = g >> 1; s != 0; s >>= 1)
        b ^= s;
    return b;
}

std::uint32_t binary_to_gray(std::uint32_t b)
{
    return b ^ (b >> 1);
}

void require_order(int order)
{
    if (!is_supported_order(order))
        throw ConfigError("unsupported QAM order " + std::to_string(order));
}

// Nearest level index on one axis; ties go to the smaller index.
int slice_axis(double value, int m, double scale)
{
    // amplitude(i) = (m - 1 - 2 i) * scale  =>  i = (m - 1 - value/scale) / 2
    const double pos = ((m - 1) - value / scale) / 2.0;
    int lo = static_cast<int>(std::floor(pos));
    lo = std::clamp(lo, 0, m - 1);
    const int hi = std::min(lo + 1, m - 1);
    const double d_lo = std::abs(value - (m - 1 - 2 * lo) * scale);
    const double d_hi = std::abs(value - (m - 1 - 2 * hi) * scale);
    return d_hi < d_lo ? hi : lo;
}

} // namespace

bool is_supported_order(int qam_order)
{
    return qam_order == 4 || qam_order == 16 || qam_order == 64 || qam_order == 256 || qam_order == 1024;
}

int bits_per_symbol(int qam_order)
{
    require_order(qam_order);
    return std::countr_zero(static_cast<unsigned>(qam_order));
}

void ModemConfig::validate() const
{
    if (!is_supported_order(qam_order))
        throw ConfigError("qam_order must be one of 4, 16, 64, 256, 1024");
    if (!(symbol_rate > 0.0) || !(sample_rate > 0.0))
        throw ConfigError("symbol_rate and sample_rate must be positive");
    const double ratio = sample_rate / symbol_rate;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 2)
        throw ConfigError("sample_rate must be an integer multiple (>= 2) of symbol_rate");
    if (!(rrc_beta >= 0.0 && rrc_beta <= 1.0))
        throw ConfigError("rrc_beta must be in [0, 1]");
    if (rrc_span < 2 || rrc_span % 2 != 0)
        throw ConfigError("rrc_span must be an even number of symbols >= 2");
    if (!(f_if > (1.0 + rrc_beta) * symbol_rate / 2.0))
        throw ConfigError("f_if must exceed (1+beta)*symbol_rate/2 so the sidebands separate");
    if (!(f_if + (1.0 + rrc_beta) * symbol_rate / 2.0 < sample_rate / 2.0))
        throw ConfigError("f_if + (1+beta)*symbol_rate/2 must stay below sample_rate/2");
}

int ModemConfig::samples_per_symbol() const
{
    return static_cast<int>(std::lround(sample_rate / symbol_rate));
}

double ModemConfig::bit_rate() const
{
    return symbol_rate * bits_per_symbol(qam_order);
}

std::size_t ModemConfig::guard_samples() const
{
    return static_cast<std::size_t>(rrc_span / 2) * static_cast<std::size_t>(samples_per_symbol());
}

std::size_t ModemConfig::waveform_length(std::size_t symbols) const
{
    return (symbols + static_cast<std::size_t>(rrc_span)) * static_cast<std::size_t>(samples_per_symbol());
}

ModemConfig ModemConfig::prototype()
{
    ModemConfig cfg;
    cfg.qam_order = 256;
    cfg.symbol_rate = 2.5e6;
    cfg.sample_rate = 20e6;
    cfg.f_if = 5e6;
    cfg.validate();
    return cfg;
}

SymbolStream::SymbolStream(int qam_order, std::vector<cplx> symbols) : order_(qam_order), symbols_(std::move(symbols))
{
    require_order(order_);
    const int m = axis_levels(order_);
    const double scale = axis_scale(order_);
    for (const auto &s : symbols_)
    {
        const int iI = slice_axis(s.real(), m, scale);
        const int iQ = slice_axis(s.imag(), m, scale);
        const cplx ref((m - 1 - 2 * iI) * scale, (m - 1 - 2 * iQ) * scale);
        if (std::abs(s - ref) > 1e-9)
            throw ParameterError("SymbolStream: symbol is not a constellation point");
    }
}

void DacConfig::validate() const
{
    if (!(v_min < bias && bias < v_max))
        throw ConfigError("DacConfig: need v_min < bias < v_max");
    if (resolution_bits < 8 || resolution_bits > 16)
        throw ConfigError("DacConfig: resolution_bits must be in [8, 16]");
}

std::vector<cplx> constellation(int qam_order)
{
    require_order(qam_order);
    const int m = axis_levels(qam_order);
    const double scale = axis_scale(qam_order);
    std::vector<cplx> pts;
    pts.reserve(static_cast<std::size_t>(qam_order));
    for (int iI = 0; iI < m; ++iI)
        for (int iQ = 0; iQ < m; ++iQ)
            pts.emplace_back((m - 1 - 2 * iI) * scale, (m - 1 - 2 * iQ) * scale);
    return pts;
}

std::vector<std::uint32_t> constellation_labels(int qam_order)
{
    const int k = bits_per_symbol(qam_order);
    const int m = axis_levels(qam_order);
    std::vector<std::uint32_t> labels;
    labels.reserve(static_cast<std::size_t>(qam_order));
    for (int iI = 0; iI < m; ++iI)
        for (int iQ = 0; iQ < m; ++iQ)
            labels.push_back((binary_to_gray(static_cast<std::uint32_t>(iI)) << (k / 2)) |
                             binary_to_gray(static_cast<std::uint32_t>(iQ)));
    return labels;
}

SymbolStream qam_map(std::span<const std::uint8_t> bits, int qam_order)
{
    const int k = bits_per_symbol(qam_order);
    if (bits.size() % static_cast<std::size_t>(k) != 0)
        throw FramingError("qam_map: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                           std::to_string(k));
    const int m = axis_levels(qam_order);
    const double scale = axis_scale(qam_order);
    const int half = k / 2;
    std::vector<cplx> out;
    out.reserve(bits.size() / static_cast<std::size_t>(k));
    for (std::size_t s = 0; s < bits.size(); s += static_cast<std::size_t>(k))
    {
        std::uint32_t gi = 0, gq = 0;
        for (int b = 0; b < half; ++b)
        {
            gi = (gi << 1) | (bits[s + static_cast<std::size_t>(b)] & 1u);
            gq = (gq << 1) | (bits[s + static_cast<std::size_t>(half + b)] & 1u);
        }
        const auto iI = static_cast<int>(gray_to_binary(gi));
        const auto iQ = static_cast<int>(gray_to_binary(gq));
        out.emplace_back((m - 1 - 2 * iI) * scale, (m - 1 - 2 * iQ) * scale);
    }
    return {qam_order, std::move(out)};
}

Bits qam_demap(std::span<const cplx> symbols, int qam_order)
{
    const int k = bits_per_symbol(qam_order);
    const int m = axis_levels(qam_order);
    const double scale = axis_scale(qam_order);
    const int half = k / 2;
    Bits out;
    out.reserve(symbols.size() * static_cast<std::size_t>(k));
    for (const auto &s : symbols)
    {
        const auto gi = binary_to_gray(static_cast<std::uint32_t>(slice_axis(s.real(), m, scale)));
        const auto gq = binary_to_gray(static_cast<std::uint32_t>(slice_axis(s.imag(), m, scale)));
        for (int b = half - 1; b >= 0; --b)
            out.push_back(static_cast<std::uint8_t>((gi >> b) & 1u));
        for (int b = half - 1; b >= 0; --b)
            out.push_back(static_cast<std::uint8_t>((gq >> b) & 1u));
    }
    return out;
}

SymbolStream pilot_block(int qam_order)
{
    const int k = bits_per_symbol(qam_order);
    Bits bits(pilot_length * static_cast<std::size_t>(k));
    // PRBS9: x^9 + x^5 + 1, all-ones seed.
    std::uint32_t state = 0x1FF;
    for (auto &b : bits)
    {
        const std::uint32_t fb = ((state >> 8) ^ (state >> 4)) & 1u;
        b = static_cast<std::uint8_t>(state >> 8 & 1u);
        state = ((state << 1) | fb) & 0x1FF;
    }
    return qam_map(bits, qam_order);
}

SymbolStream make_frame(const SymbolStream &payload)
{
    auto frame = pilot_block(payload.qam_order()).symbols();
    frame.insert(frame.end(), payload.symbols().begin(), payload.symbols().end());
    return {payload.qam_order(), std::move(frame)};
}

RealWaveform duc(const SymbolStream &stream, const ModemConfig &cfg)
{
    cfg.validate();
    const int sps = cfg.samples_per_symbol();
    const std::size_t guard = cfg.guard_samples();
    const std::size_t len = cfg.waveform_length(stream.size());

    std::vector<cplx> stuffed(len, cplx{});
    for (std::size_t k = 0; k < stream.size(); ++k)
        stuffed[guard + k * static_cast<std::size_t>(sps)] = stream.symbols()[k];

    const auto rrc = design_rrc(cfg.rrc_beta, cfg.rrc_span, sps);
    const auto shaped = fir_filter(ComplexEnvelope(cfg.sample_rate, 0.0, std::move(stuffed)), rrc);

    std::vector<double> x(len);
    const double w = 2.0 * std::numbers::pi * cfg.f_if / cfg.sample_rate;
    for (std::size_t n = 0; n < len; ++n)
    {
        const double ph = w * static_cast<double>(n);
        x[n] = shaped[n].real() * std::cos(ph) - shaped[n].imag() * std::sin(ph);
    }
    return {cfg.sample_rate, std::move(x)};
}

RealWaveform to_dac(const RealWaveform &x, const DacConfig &dac)
{
    dac.validate();
    if (x.empty())
        throw ParameterError("to_dac: empty input");
    double peak = 0.0;
    for (double v : x.samples())
        peak = std::max(peak, std::abs(v));
    if (peak == 0.0)
        return {x.sample_rate(), std::vector<double>(x.size(), dac.bias)};

    const double swing = std::min(dac.v_max - dac.bias, dac.bias - dac.v_min);
    const double gain = swing / peak;
    const long top = (1L << dac.resolution_bits) - 1;
    const double range = dac.v_max - dac.v_min;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double v = dac.bias + x[i] * gain;
        long code = std::lround((v - dac.v_min) / range * static_cast<double>(top));
        code = std::clamp(code, 0L, top);
        out[i] = dac.v_min + range * (static_cast<double>(code) / static_cast<double>(top));
    }
    return {x.sample_rate(), std::move(out)};
}

std::vector<cplx> ddc(const ComplexEnvelope &rx, const ModemConfig &cfg, std::size_t timing_offset,
                      std::span<const cplx> pilots, std::size_t symbol_count)
{
    cfg.validate();
    if (std::abs(rx.sample_rate() - cfg.sample_rate) > 1e-9 * cfg.sample_rate)
        throw ConfigError("ddc: receive sample rate does not match the modem configuration");

    const auto sps = static_cast<std::size_t>(cfg.samples_per_symbol());
    const std::size_t guard = cfg.guard_samples();
    const auto centred = remove_dc(rx);

    std::vector<cplx> mixed(centred.size());
    const double w = 2.0 * std::numbers::pi * cfg.f_if / cfg.sample_rate;
    for (std::size_t n = 0; n < mixed.size(); ++n)
    {
        const double t = static_cast<double>(n) - static_cast<double>(timing_offset);
        mixed[n] = centred[n] * std::polar(1.0, -w * t);
    }
    const auto rrc = design_rrc(cfg.rrc_beta, cfg.rrc_span, static_cast<int>(sps));
    const auto filtered = fir_filter(ComplexEnvelope(rx.sample_rate(), rx.center_frequency(), std::move(mixed)), rrc);

    const std::size_t first = timing_offset + guard;
    std::size_t available = 0;
    if (rx.size() >= first + guard)
        available = (rx.size() - first - guard) / sps;
    if (symbol_count == 0)
        symbol_count = available;
    std::vector<cplx> sym;
    sym.reserve(symbol_count);
    for (std::size_t k = 0; k < symbol_count && first + k * sps < filtered.size(); ++k)
        sym.push_back(filtered[first + k * sps]);

    const std::size_t np = std::min(pilots.size(), sym.size());
    if (np == 0)
        return sym;
    cplx num{};
    double den = 0.0;
    for (std::size_t k = 0; k < np; ++k)
    {
        num += sym[k] * std::conj(pilots[k]);
        den += std::norm(pilots[k]);
    }
    const cplx gain = num / den;
    if (std::abs(gain) <= 1e-300 || !std::isfinite(std::abs(gain)))
        return sym;
    for (auto &s : sym)
        s /= gain;
    return sym;
}

std::size_t frame_sync(const ComplexEnvelope &rx, const SymbolStream &preamble, const ModemConfig &cfg,
                       const SyncOptions &options)
{
    if (preamble.size() < 16)
        throw ParameterError("frame_sync: preamble must be at least 16 symbols");
    const auto tmpl = duc(preamble, cfg);
    const auto &t = tmpl.samples();
    const auto centred = remove_dc(rx);
    const auto &r = centred.samples();
    if (r.size() < t.size())
        throw SyncError("frame_sync: capture shorter than the preamble");

    const std::size_t lags = r.size() - t.size() + 1;
    std::vector<double> mag(lags);
    double t_energy = 0.0;
    for (double v : t)
        t_energy += v * v;

    // Sliding window energy for the coherence check.
    double win_energy = 0.0;
    for (std::size_t n = 0; n < t.size(); ++n)
        win_energy += std::norm(r[n]);

    std::size_t best = 0;
    double best_coherence = 0.0;
    for (std::size_t d = 0; d < lags; ++d)
    {
        cplx acc{};
        for (std::size_t n = 0; n < t.size(); ++n)
            acc += r[d + n] * t[n];
        mag[d] = std::abs(acc);
        if (d == 0 || mag[d] > mag[best])
        {
            best = d;
            best_coherence = win_energy > 0.0 ? mag[d] / std::sqrt(t_energy * win_energy) : 0.0;
        }
        if (d + 1 < lags)
            win_energy = std::max(0.0, win_energy - std::norm(r[d]) + std::norm(r[d + t.size()]));
    }

    auto sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(lags / 2), sorted.end());
    const double median = sorted[lags / 2];
    if (!(mag[best] >= options.peak_to_median * median) || mag[best] == 0.0)
        throw SyncError("frame_sync: correlation peak below " + std::to_string(options.peak_to_median) +
                        "x median");
    if (best_coherence < options.min_coherence)
        throw SyncError("frame_sync: peak coherence " + std::to_string(best_coherence) + " below threshold");
    return best;
}

double evm_percent(std::span<const cplx> rx, std::span<const cplx> ref)
{
    if (rx.size() != ref.size())
        throw ParameterError("evm: length mismatch");
    if (ref.empty())
        throw ParameterError("evm: empty input");
    double err = 0.0, pwr = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i)
    {
        err += std::norm(rx[i] - ref[i]);
        pwr += std::norm(ref[i]);
    }
    if (pwr == 0.0)
        throw ParameterError("evm: reference has zero power");
    return 100.0 * std::sqrt(err / pwr);
}

double bit_error_rate(std::span<const std::uint8_t> rx, std::span<const std::uint8_t> ref)
{
    if (rx.size() != ref.size())
        throw ParameterError("ber: length mismatch");
    if (ref.empty())
        throw ParameterError("ber: empty input");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < rx.size(); ++i)
        errors += (rx[i] & 1u) != (ref[i] & 1u);
    return static_cast<double>(errors) / static_cast<double>(rx.size());
}

Bits random_bits(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Bits bits(n);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i % 64 == 0)
            word = rng();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return bits;
}

} // namespace msa::modem
