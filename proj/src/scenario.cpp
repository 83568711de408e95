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

#include "msa/scenario.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "msa/error.hpp"
#include "msa/waveform_io.hpp"

namespace msa::scenario
{

namespace
{

using nlohmann::json;

constexpr double deg = std::numbers::pi / 180.0;

json prototype_document()
{
    return json::parse(R"({
  "seed": 1,
  "surface": {
    "nx": 16, "ny": 10, "pitch_m": 0.018, "f_rf_hz": 5.8e9,
    "unit_preset": "operating", "drive": "equalized", "phase_jitter_deg": 0.0,
    "codebook": "optimize"
  },
  "incident": {"azimuth_deg": 0.0, "elevation_deg": 0.0},
  "target": {"azimuth_deg": 45.0, "elevation_deg": 0.0},
  "modem": {"qam_order": 256, "symbol_rate": 2.5e6, "sample_rate": 2.0e7, "f_if": 5.0e6,
            "rrc_beta": 0.35, "rrc_span": 32},
  "dac": {"v_min": 0.63, "v_max": 0.79, "resolution_bits": 14, "bias": 0.71},
  "link": {
    "symbols": 4096, "path_loss": false, "max_ber": 0.0, "min_isotropy": 0.999,
    "receivers": [
      {"name": "main_lobe", "azimuth_deg": 45.0, "elevation_deg": 0.0, "distance_m": 10.0},
      {"name": "sidelobe", "azimuth_deg": 27.0, "elevation_deg": 0.0, "distance_m": 10.0}
    ]
  },
  "loopback": {"orders": [4, 16, 64, 256], "symbols": 4096, "max_evm_percent": 0.5},
  "pattern": {"bias_v": [0.63, 0.71, 0.79], "angles": {"start": -90.0, "stop": 90.0, "step": 0.5}},
  "beamform": {"restarts": 8, "method": "greedy"},
  "spoof": {
    "blade_count": 3, "rotor_hz": 4.0, "tip_doppler_hz": 800.0, "duration_s": 1.0, "rotors": 2,
    "sample_rate": 4096.0, "window_len": 128, "hop": 32, "flash_level": 8.0, "flash_width_samples": 1.0,
    "iterations": 100, "min_similarity": 0.9
  }
})");
}

json named_preset(const std::string &name)
{
    auto doc = prototype_document();
    if (name == "prototype")
        return doc;
    if (name == "measured")
    {
        doc["surface"]["phase_jitter_deg"] = 15.0;
        for (auto &r : doc["link"]["receivers"])
            r["snr_db"] = 35.0;
        return doc;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

template <typename T>
T get(const json &j, const char *key, const std::string &where)
{
    if (!j.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception &)
    {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json &j, const char *key, T fallback, const std::string &where)
{
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

const json &section(const json &doc, const char *key)
{
    if (!doc.contains(key) || !doc.at(key).is_object())
        throw ConfigError(std::string("scenario: missing object '") + key + "'");
    return doc.at(key);
}

std::vector<double> angle_grid(const json &p)
{
    if (!p.contains("angles"))
        throw ConfigError("pattern: missing 'angles'");
    const auto &a = p.at("angles");
    std::vector<double> out;
    if (a.is_array())
    {
        for (const auto &v : a)
        {
            if (!v.is_number())
                throw ConfigError("pattern: angles must be numbers");
            out.push_back(v.get<double>());
        }
    }
    else if (a.is_object())
    {
        const double start = get<double>(a, "start", "pattern.angles");
        const double stop = get<double>(a, "stop", "pattern.angles");
        const double step = get<double>(a, "step", "pattern.angles");
        if (!(step > 0.0) || stop < start)
            throw ConfigError("pattern.angles: need step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(start + static_cast<double>(i) * step);
    }
    else
        throw ConfigError("pattern: 'angles' must be an array or {start, stop, step}");
    if (out.empty())
        throw ConfigError("pattern: empty angle grid");
    for (double v : out)
        if (!(std::abs(v) <= 90.0))
            throw ConfigError("pattern: angles must lie within +/-90 degrees");
    return out;
}

surface::UnitReflectionModel unit_model(const json &s, const std::filesystem::path &base)
{
    if (s.contains("unit_curve_csv"))
    {
        auto path = std::filesystem::path(get<std::string>(s, "unit_curve_csv", "surface"));
        if (path.is_relative())
            path = base / path;
        try
        {
            return surface::UnitReflectionModel::from_csv(io::read_text(path));
        }
        catch (const FormatError &e)
        {
            throw ConfigError(std::string("surface.unit_curve_csv: ") + e.what());
        }
    }
    const auto preset = get_or<std::string>(s, "unit_preset", "operating", "surface");
    if (preset == "operating")
        return surface::UnitReflectionModel::operating_preset();
    if (preset == "wide")
        return surface::UnitReflectionModel::wide_preset();
    throw ConfigError("surface: unknown unit_preset '" + preset + "'");
}

Scenario build(const json &doc, const std::filesystem::path &base)
{
    if (!doc.is_object())
        throw ConfigError("scenario: top level must be an object");
    Scenario sc;
    auto &L = sc.link;
    L.seed = get_or<std::uint64_t>(doc, "seed", 1, "scenario");

    const auto &s = section(doc, "surface");
    L.geometry.nx = get<int>(s, "nx", "surface");
    L.geometry.ny = get<int>(s, "ny", "surface");
    L.geometry.pitch = get<double>(s, "pitch_m", "surface");
    L.geometry.f_rf = get<double>(s, "f_rf_hz", "surface");
    L.geometry.validate();
    L.unit = unit_model(s, base);
    const auto drive = get_or<std::string>(s, "drive", "equalized", "surface");
    if (drive == "equalized")
        L.drive = surface::DrivePolicy::equalized;
    else if (drive == "shared")
        L.drive = surface::DrivePolicy::shared;
    else
        throw ConfigError("surface: drive must be 'equalized' or 'shared'");
    L.phase_jitter_deg = get_or<double>(s, "phase_jitter_deg", 0.0, "surface");

    const auto &inc = section(doc, "incident");
    L.incident_azimuth_deg = get<double>(inc, "azimuth_deg", "incident");
    L.incident_elevation_deg = get_or<double>(inc, "elevation_deg", 0.0, "incident");
    const auto &tgt = section(doc, "target");
    sc.target_azimuth_deg = get<double>(tgt, "azimuth_deg", "target");
    sc.target_elevation_deg = get_or<double>(tgt, "elevation_deg", 0.0, "target");

    const auto &m = section(doc, "modem");
    L.modem.qam_order = get<int>(m, "qam_order", "modem");
    L.modem.symbol_rate = get<double>(m, "symbol_rate", "modem");
    L.modem.sample_rate = get<double>(m, "sample_rate", "modem");
    L.modem.f_if = get<double>(m, "f_if", "modem");
    L.modem.rrc_beta = get<double>(m, "rrc_beta", "modem");
    L.modem.rrc_span = get<int>(m, "rrc_span", "modem");
    L.modem.validate();

    const auto &d = section(doc, "dac");
    L.dac.v_min = get<double>(d, "v_min", "dac");
    L.dac.v_max = get<double>(d, "v_max", "dac");
    L.dac.resolution_bits = get<int>(d, "resolution_bits", "dac");
    L.dac.bias = get<double>(d, "bias", "dac");
    L.dac.validate();

    const auto &l = section(doc, "link");
    sc.link_settings.symbols = get<std::size_t>(l, "symbols", "link");
    sc.link_settings.max_ber = get_or<double>(l, "max_ber", 0.0, "link");
    sc.link_settings.min_isotropy = get_or<double>(l, "min_isotropy", 0.999, "link");
    L.path_loss = get_or<bool>(l, "path_loss", false, "link");
    if (!l.contains("receivers") || !l.at("receivers").is_array() || l.at("receivers").empty())
        throw ConfigError("link: 'receivers' must be a non-empty array");
    for (const auto &r : l.at("receivers"))
    {
        linksim::Receiver rx;
        rx.name = get_or<std::string>(r, "name", "", "receiver");
        rx.azimuth_deg = get<double>(r, "azimuth_deg", "receiver");
        rx.elevation_deg = get_or<double>(r, "elevation_deg", 0.0, "receiver");
        rx.distance_m = get_or<double>(r, "distance_m", 10.0, "receiver");
        if (r.contains("snr_db") && !r.at("snr_db").is_null())
            rx.snr_db = get<double>(r, "snr_db", "receiver");
        L.receivers.push_back(rx);
    }

    const auto &lb = section(doc, "loopback");
    sc.loopback.orders = get<std::vector<int>>(lb, "orders", "loopback");
    sc.loopback.symbols = get<std::size_t>(lb, "symbols", "loopback");
    sc.loopback.max_evm_percent = get<double>(lb, "max_evm_percent", "loopback");
    if (sc.loopback.orders.empty())
        throw ConfigError("loopback: 'orders' is empty");
    for (int o : sc.loopback.orders)
        if (!modem::is_supported_order(o))
            throw ConfigError("loopback: unsupported QAM order " + std::to_string(o));

    const auto &p = section(doc, "pattern");
    sc.pattern.bias_v = get<std::vector<double>>(p, "bias_v", "pattern");
    if (sc.pattern.bias_v.empty())
        throw ConfigError("pattern: 'bias_v' is empty");
    sc.pattern.angle_deg = angle_grid(p);

    const auto &b = section(doc, "beamform");
    sc.beamform.restarts = get<int>(b, "restarts", "beamform");
    const auto method = get_or<std::string>(b, "method", "greedy", "beamform");
    if (method != "greedy" && method != "exhaustive")
        throw ConfigError("beamform: method must be 'greedy' or 'exhaustive'");
    sc.beamform.exhaustive = method == "exhaustive";
    if (sc.beamform.restarts < 1)
        throw ConfigError("beamform: restarts must be >= 1");

    const auto &sp = section(doc, "spoof");
    auto &rp = sc.spoof.rotor;
    rp.blade_count = get<int>(sp, "blade_count", "spoof");
    rp.rotor_hz = get<double>(sp, "rotor_hz", "spoof");
    rp.tip_doppler_hz = get<double>(sp, "tip_doppler_hz", "spoof");
    rp.duration_s = get<double>(sp, "duration_s", "spoof");
    rp.rotors = get<int>(sp, "rotors", "spoof");
    rp.sample_rate = get<double>(sp, "sample_rate", "spoof");
    rp.window_len = get<std::size_t>(sp, "window_len", "spoof");
    rp.hop = get<std::size_t>(sp, "hop", "spoof");
    rp.flash_level = get_or<double>(sp, "flash_level", rp.flash_level, "spoof");
    rp.flash_width_samples = get_or<double>(sp, "flash_width_samples", rp.flash_width_samples, "spoof");
    sc.spoof.iterations = get<int>(sp, "iterations", "spoof");
    sc.spoof.min_similarity = get_or<double>(sp, "min_similarity", 0.9, "spoof");
    try
    {
        rp.validate();
    }
    catch (const ParameterError &e)
    {
        throw ConfigError(std::string("spoof: ") + e.what());
    }
    if (sc.spoof.iterations < 1)
        throw ConfigError("spoof: iterations must be >= 1");

    // Codebook last: optimisation needs geometry, unit phases and target.
    const auto &cb = s.at("codebook");
    const std::size_t n = L.geometry.size();
    if (cb.is_array())
    {
        std::vector<std::uint8_t> states;
        for (const auto &v : cb)
        {
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
                throw ConfigError("surface.codebook: entries must be 0 or 1");
            states.push_back(static_cast<std::uint8_t>(v.get<int>()));
        }
        if (states.size() != n)
            throw ConfigError("surface.codebook: expected " + std::to_string(n) + " entries");
        L.codebook = surface::Codebook(std::move(states), L.unit.phase_rad);
        sc.codebook_source = CodebookSource::explicit_states;
    }
    else if (cb == "uniform")
    {
        L.codebook = surface::Codebook::uniform(n, 0, L.unit.phase_rad);
        sc.codebook_source = CodebookSource::uniform;
    }
    else if (cb == "optimize")
    {
        const auto obj = sc.objective();
        L.codebook = sc.beamform.exhaustive ? beamform::optimize_exhaustive(obj)
                                            : beamform::optimize_greedy(obj, sc.beamform.restarts, L.seed);
        sc.codebook_source = CodebookSource::optimize;
    }
    else
        throw ConfigError("surface.codebook: expected a 0/1 array, \"uniform\" or \"optimize\"");

    L.validate();
    return sc;
}

} // namespace

beamform::BeamObjective Scenario::objective() const
{
    const double f = link.geometry.f_rf;
    return {link.geometry, link.incident(),
            surface::PlaneWave::from_angles(target_azimuth_deg, target_elevation_deg, f), link.unit.phase_rad};
}

std::vector<std::string> preset_names()
{
    return {"prototype", "measured"};
}

std::string preset_json(const std::string &name)
{
    return named_preset(name).dump(2) + "\n";
}

Scenario parse(const std::string &json_text, const std::filesystem::path &base_dir)
{
    json user;
    try
    {
        user = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(std::string("scenario: malformed JSON: ") + e.what());
    }
    if (!user.is_object())
        throw ConfigError("scenario: top level must be an object");
    auto doc = named_preset(user.contains("preset") ? get<std::string>(user, "preset", "scenario") : "prototype");
    user.erase("preset");
    doc.merge_patch(user);
    return build(doc, base_dir);
}

Scenario load_preset(const std::string &name)
{
    return build(named_preset(name), {});
}

} // namespace msa::scenario
