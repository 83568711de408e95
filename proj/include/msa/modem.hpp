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

// Bit/symbol mapping and the digital up/down-conversion chain between
// complex baseband symbols and a real IF waveform.
//
// Constellation convention (frozen):
//   M = 2^k square QAM, m = sqrt(M) levels per axis, unit average power.
//   The first k/2 bits of a symbol (MSB first) form the Gray label of the
//   in-phase level, the remaining k/2 bits the quadrature level.
//   Gray label g -> level index i = gray_to_binary(g) -> amplitude
//   (m - 1 - 2 i) / sqrt(2 (M - 1) / 3).
//   4QAM therefore maps 00 -> (+1+j)/sqrt2, 01 -> (+1-j)/sqrt2,
//   10 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2.
//   Constellation point index p = iI * m + iQ; hard decisions that tie
//   resolve to the smaller p (i.e. the smaller level index on each axis).

#include <cstdint>
#include <span>
#include <vector>

#include "msa/sigcore.hpp"

namespace msa::modem
{

using Bits = std::vector<std::uint8_t>;

// Known symbols at the start of every frame, used for the complex gain fit.
inline constexpr std::size_t pilot_length = 64;

bool is_supported_order(int qam_order);
int bits_per_symbol(int qam_order);

struct ModemConfig
{
    int qam_order = 256;
    double symbol_rate = 2.5e6;
    double sample_rate = 20e6;
    double f_if = 5e6;
    double rrc_beta = 0.35;
    int rrc_span = 32;

    // Throws ConfigError on any invariant violation.
    void validate() const;

    int samples_per_symbol() const;
    double bit_rate() const;
    // Samples of pulse tail before the first and after the last symbol.
    std::size_t guard_samples() const;
    // Length of duc() output for n symbols.
    std::size_t waveform_length(std::size_t symbols) const;

    // 20 MS/s DAC, 5 MHz IF, 2.5 MSym/s: 256QAM gives 20 Mb/s.
    static ModemConfig prototype();
};

// Symbols drawn from the unit-power constellation of qam_order.
class SymbolStream
{
public:
    SymbolStream(int qam_order, std::vector<cplx> symbols);

    int qam_order() const noexcept { return order_; }
    const std::vector<cplx> &symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }

private:
    int order_;
    std::vector<cplx> symbols_;
};

struct DacConfig
{
    double v_min = 0.63;
    double v_max = 0.79;
    int resolution_bits = 14;
    double bias = 0.71;

    void validate() const;
    double step() const { return (v_max - v_min) / static_cast<double>((1 << resolution_bits) - 1); }
};

// Points ordered by constellation index p = iI*m + iQ.
std::vector<cplx> constellation(int qam_order);
// Bit label (k bits, MSB first) of every constellation index.
std::vector<std::uint32_t> constellation_labels(int qam_order);

SymbolStream qam_map(std::span<const std::uint8_t> bits, int qam_order);
Bits qam_demap(std::span<const cplx> symbols, int qam_order);

// Deterministic pilot block (PRBS9 bits through qam_map).
SymbolStream pilot_block(int qam_order);
// pilot_block followed by the payload.
SymbolStream make_frame(const SymbolStream &payload);

// I/Q split, zero-stuffing to sps, RRC shaping, then
// x[n] = I[n] cos(2 pi f_if n / fs) - Q[n] sin(2 pi f_if n / fs).
// Guard samples of pulse tail are kept on both ends; symbol k is centred at
// guard_samples() + k*sps.
RealWaveform duc(const SymbolStream &stream, const ModemConfig &cfg);

// Affine map of [-max|x|, max|x|] around bias into [v_min, v_max], then a
// 2^bits-level uniform quantiser whose end levels are v_min and v_max.
// All-zero input returns the constant bias.
RealWaveform to_dac(const RealWaveform &x, const DacConfig &dac);

// Inverse of duc. timing_offset is the sample index in rx where the duc
// waveform starts. symbol_count == 0 recovers every symbol that fits.
// Output is normalised by the least-squares complex gain over the leading
// pilots (skipped when pilots is empty or the fit is degenerate).
std::vector<cplx> ddc(const ComplexEnvelope &rx, const ModemConfig &cfg, std::size_t timing_offset,
                      std::span<const cplx> pilots, std::size_t symbol_count = 0);

struct SyncOptions
{
    double peak_to_median = 3.0;
    // Normalised correlation |<rx_d, t>| / (|rx_d| |t|) required at the peak.
    double min_coherence = 0.5;
};

// Sample offset at which the duc-shaped preamble best matches rx. Earliest
// index wins ties. Throws SyncError when the peak is not trustworthy.
std::size_t frame_sync(const ComplexEnvelope &rx, const SymbolStream &preamble, const ModemConfig &cfg,
                       const SyncOptions &options = {});

double evm_percent(std::span<const cplx> rx, std::span<const cplx> ref);
double bit_error_rate(std::span<const std::uint8_t> rx, std::span<const std::uint8_t> ref);

Bits random_bits(std::size_t n, std::uint64_t seed);

} // namespace msa::modem
