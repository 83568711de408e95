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

#include "msa/linksim.hpp"

#include <cmath>
#include <future>

#include <json.hpp>

#include "msa/error.hpp"
#include "msa/waveform_io.hpp"

namespace msa::linksim
{

void ScenarioConfig::validate() const
{
    geometry.validate();
    unit.validate();
    modem.validate();
    dac.validate();
    if (codebook.size() != geometry.size())
        throw ConfigError("scenario: codebook has " + std::to_string(codebook.size()) + " entries for " +
                          std::to_string(geometry.size()) + " units");
    if (receivers.empty())
        throw ConfigError("scenario: at least one receiver is required");
    if (!(phase_jitter_deg >= 0.0 && phase_jitter_deg <= 90.0))
        throw ConfigError("scenario: phase_jitter_deg must lie in [0, 90]");
    for (const auto &r : receivers)
    {
        if (!(r.distance_m > 0.0))
            throw ConfigError("scenario: receiver distance must be positive");
        if (std::abs(r.azimuth_deg) > 90.0 || std::abs(r.elevation_deg) > 90.0)
            throw ConfigError("scenario: receiver must lie in the front half-space");
        if (std::isnan(r.snr_db))
            throw ConfigError("scenario: receiver snr_db is NaN");
    }
}

surface::PlaneWave ScenarioConfig::incident() const
{
    return surface::PlaneWave::from_angles(incident_azimuth_deg, incident_elevation_deg, geometry.f_rf);
}

surface::PlaneWave ScenarioConfig::receiver_wave(std::size_t index) const
{
    const auto &r = receivers.at(index);
    return surface::PlaneWave::from_angles(r.azimuth_deg, r.elevation_deg, geometry.f_rf);
}

std::optional<surface::PhaseJitter> ScenarioConfig::jitter() const
{
    if (phase_jitter_deg <= 0.0)
        return std::nullopt;
    return surface::make_phase_jitter(geometry.size(), phase_jitter_deg, seed ^ 0x6a09e667f3bcc909ULL);
}

std::uint64_t receiver_seed(std::uint64_t scenario_seed, std::size_t index)
{
    // splitmix64 finaliser over (seed, index)
    std::uint64_t z = scenario_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

TxFrame modulate(const ScenarioConfig &scenario, const RealWaveform &drive)
{
    return {drive, surface::gamma_sum(drive, scenario.codebook, scenario.unit, scenario.drive)};
}

ComplexEnvelope noiseless_envelope(const ScenarioConfig &scenario, const TxFrame &tx, std::size_t rx_index)
{
    if (rx_index >= scenario.receivers.size())
        throw ParameterError("receiver index " + std::to_string(rx_index) + " out of range");
    const auto jitter = scenario.jitter();
    auto field = surface::reflected_field(tx.factors, scenario.codebook, scenario.geometry, scenario.receiver_wave(rx_index),
                                          scenario.incident(), surface::FieldMode::direct, jitter ? &*jitter : nullptr)
                     .field;
    if (!scenario.path_loss)
        return field;
    const double scale = 1.0 / scenario.receivers[rx_index].distance_m;
    auto s = field.samples();
    for (auto &v : s)
        v *= scale;
    return {field.sample_rate(), field.center_frequency(), std::move(s)};
}

ComplexEnvelope received_envelope(const ScenarioConfig &scenario, const TxFrame &tx, std::size_t rx_index)
{
    auto clean = noiseless_envelope(scenario, tx, rx_index);
    const auto &rx = scenario.receivers[rx_index];
    if (std::isinf(rx.snr_db) && rx.snr_db > 0)
        return clean;
    double ac_power = mean_power(remove_dc(clean).samples());
    // Residue of a constant envelope after DC removal is rounding noise.
    if (!(ac_power > 1e-24 * mean_power(clean.samples())))
        throw ParameterError("received_envelope: no modulated power to reference the SNR to");
    if (scenario.path_loss)
        ac_power *= rx.distance_m * rx.distance_m; // SNR is quoted at 1 m
    return add_noise_power(clean, ac_power / std::pow(10.0, rx.snr_db / 10.0), receiver_seed(scenario.seed, rx_index));
}

double isotropy_metric(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size() || a.size() < 16)
        throw ParameterError("isotropy_metric: need equal lengths >= 16");
    cplx inner{};
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        inner += std::conj(a[i]) * b[i];
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    if (na == 0.0 || nb == 0.0)
        throw ParameterError("isotropy_metric: zero vector");
    return std::min(1.0, std::abs(inner) / std::sqrt(na * nb));
}

LinkReport run_link(const ScenarioConfig &scenario, const modem::Bits &bits)
{
    scenario.validate();
    const int order = scenario.modem.qam_order;
    const auto k = static_cast<std::size_t>(modem::bits_per_symbol(order));
    if (bits.empty() || bits.size() % k != 0)
        throw FramingError("run_link: bit count must be a positive multiple of " + std::to_string(k));

    const auto payload = modem::qam_map(bits, order);
    const auto frame = modem::make_frame(payload);
    const auto drive = modem::to_dac(modem::duc(frame, scenario.modem), scenario.dac);
    const auto tx = modulate(scenario, drive);
    const auto pilots = modem::pilot_block(order);

    auto receive = [&](std::size_t i) {
        ReceiverReport r;
        r.name = scenario.receivers[i].name.empty() ? "rx" + std::to_string(i + 1) : scenario.receivers[i].name;
        const auto clean = noiseless_envelope(scenario, tx, i);
        r.power_db = 10.0 * std::log10(mean_power(remove_dc(clean).samples()));
        const auto env = received_envelope(scenario, tx, i);
        auto sym = modem::ddc(env, scenario.modem, 0, pilots.symbols(), frame.size());
        r.symbols.assign(sym.begin() + static_cast<std::ptrdiff_t>(modem::pilot_length), sym.end());
        r.bits = modem::qam_demap(r.symbols, order);
        r.evm_percent = modem::evm_percent(r.symbols, payload.symbols());
        r.ber = modem::bit_error_rate(r.bits, bits);
        r.bit_errors = static_cast<std::size_t>(std::llround(r.ber * static_cast<double>(bits.size())));
        return r;
    };

    std::vector<std::future<ReceiverReport>> jobs;
    for (std::size_t i = 0; i < scenario.receivers.size(); ++i)
        jobs.push_back(std::async(std::launch::async, receive, i));

    LinkReport report;
    report.clipped = tx.factors.clipped;
    report.reference = payload.symbols();
    for (auto &j : jobs)
        report.receivers.push_back(j.get());

    const std::size_t n = report.receivers.size();
    report.isotropy.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
        {
            const double m = report.receivers[a].symbols.size() >= 16
                                 ? isotropy_metric(report.receivers[a].symbols, report.receivers[b].symbols)
                                 : 0.0;
            report.isotropy[a][b] = report.isotropy[b][a] = m;
        }
    return report;
}

std::string report_json(const LinkReport &report)
{
    nlohmann::ordered_json j;
    j["clipped"] = report.clipped;
    j["symbols"] = report.reference.size();
    auto &rxs = j["receivers"] = nlohmann::ordered_json::array();
    for (const auto &r : report.receivers)
        rxs.push_back({{"name", r.name},
                       {"evm_percent", r.evm_percent},
                       {"ber", r.ber},
                       {"bit_errors", r.bit_errors},
                       {"power_db", r.power_db}});
    j["isotropy"] = report.isotropy;
    return j.dump(2) + "\n";
}

std::string constellation_csv(const ReceiverReport &rx, std::span<const cplx> reference)
{
    if (reference.size() != rx.symbols.size())
        throw ParameterError("constellation_csv: reference length mismatch");
    std::string out = "re,im,ref_re,ref_im\n";
    for (std::size_t i = 0; i < reference.size(); ++i)
        out += io::format_double(rx.symbols[i].real()) + "," + io::format_double(rx.symbols[i].imag()) + "," +
               io::format_double(reference[i].real()) + "," + io::format_double(reference[i].imag()) + "\n";
    return out;
}

} // namespace msa::linksim
