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

// End-to-end backscatter link: modem drive -> surface modulation and
// beamforming -> per-receiver envelope -> demodulation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msa/modem.hpp"
#include "msa/surface.hpp"

namespace msa::linksim
{

struct Receiver
{
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    double distance_m = 10.0;
    // SNR referenced to the receiver's own AC (bias-removed) signal power;
    // in path-loss mode it is the SNR at 1 m. no_noise disables noise.
    double snr_db = no_noise;
    std::string name;
};

struct ScenarioConfig
{
    surface::ArrayGeometry geometry = surface::ArrayGeometry::prototype();
    surface::UnitReflectionModel unit = surface::UnitReflectionModel::operating_preset();
    surface::Codebook codebook = surface::Codebook::uniform(160, 0, {0.0, 0.0});
    surface::DrivePolicy drive = surface::DrivePolicy::equalized;
    // Per-unit phase perturbation; 0 gives the ideal surface.
    double phase_jitter_deg = 0.0;
    modem::ModemConfig modem = modem::ModemConfig::prototype();
    modem::DacConfig dac;
    double incident_azimuth_deg = 0.0;
    double incident_elevation_deg = 0.0;
    std::vector<Receiver> receivers;
    bool path_loss = false;
    std::uint64_t seed = 1;

    void validate() const;
    surface::PlaneWave incident() const;
    surface::PlaneWave receiver_wave(std::size_t index) const;
    std::optional<surface::PhaseJitter> jitter() const;
};

// Seed of the noise stream for one receiver.
std::uint64_t receiver_seed(std::uint64_t scenario_seed, std::size_t index);

// Surface response to one drive frame, shared by all receivers.
struct TxFrame
{
    RealWaveform drive;
    surface::ModulationFactors factors;
};

TxFrame modulate(const ScenarioConfig &scenario, const RealWaveform &drive);

// Reflected field towards the receiver, path loss applied, no noise.
ComplexEnvelope noiseless_envelope(const ScenarioConfig &scenario, const TxFrame &tx, std::size_t rx_index);

// noiseless_envelope plus AWGN; the bias carrier is kept.
ComplexEnvelope received_envelope(const ScenarioConfig &scenario, const TxFrame &tx, std::size_t rx_index);

struct ReceiverReport
{
    std::string name;
    std::vector<cplx> symbols;
    modem::Bits bits;
    double evm_percent = 0.0;
    double ber = 0.0;
    std::size_t bit_errors = 0;
    double power_db = 0.0; // AC signal power before noise
};

struct LinkReport
{
    std::vector<ReceiverReport> receivers;
    std::vector<std::vector<double>> isotropy;
    std::vector<cplx> reference;
    bool clipped = false;
};

// bits: whole payload symbols; a pilot block is prepended internally.
LinkReport run_link(const ScenarioConfig &scenario, const modem::Bits &bits);

// |<a, b>| / (|a| |b|)
double isotropy_metric(std::span<const cplx> a, std::span<const cplx> b);

std::string report_json(const LinkReport &report);
// Columns re, im, ref_re, ref_im.
std::string constellation_csv(const ReceiverReport &rx, std::span<const cplx> reference);

} // namespace msa::linksim
