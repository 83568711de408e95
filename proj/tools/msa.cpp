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

// msa: command-line front end for the backscatter transmitter simulator.
//
// Exit codes: 0 success, 1 quality threshold missed, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "msa/beamform.hpp"
#include "msa/error.hpp"
#include "msa/linksim.hpp"
#include "msa/modem.hpp"
#include "msa/scenario.hpp"
#include "msa/spoof.hpp"
#include "msa/surface.hpp"
#include "msa/waveform_io.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace
{

constexpr const char *tool_version = "1.0.0";

enum class Verbosity
{
    quiet,
    info,
    debug
};

Verbosity verbosity()
{
    const char *v = std::getenv("MSA_LOG");
    if (!v)
        return Verbosity::info;
    const std::string s(v);
    if (s == "quiet" || s == "0" || s == "error")
        return Verbosity::quiet;
    if (s == "debug" || s == "2")
        return Verbosity::debug;
    return Verbosity::info;
}

void log(Verbosity level, const std::string &msg)
{
    if (static_cast<int>(verbosity()) >= static_cast<int>(level))
        std::cerr << "[msa] " << msg << "\n";
}

std::string sha256_hex(const std::string &bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

struct Options
{
    std::string config;
    std::string out = "msa_out";
    std::optional<std::uint64_t> seed;
    std::string preset;
    bool normalized = false;
    std::optional<int> iterations;
};

struct Run
{
    std::string subcommand;
    Options opt;
    std::string config_bytes;
    msa::scenario::Scenario sc;
    fs::path out;

    void write(const std::string &name, const std::string &contents) const
    {
        msa::io::write_atomic(out / name, contents);
        log(Verbosity::debug, "wrote " + (out / name).string());
    }
};

Run prepare(const std::string &subcommand, const Options &opt)
{
    Run run{subcommand, opt, {}, {}, fs::path(opt.out)};
    nlohmann::json doc = nlohmann::json::object();
    fs::path base;
    if (!opt.config.empty())
    {
        run.config_bytes = msa::io::read_text(opt.config);
        try
        {
            doc = nlohmann::json::parse(run.config_bytes);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw msa::ConfigError(std::string("malformed JSON in ") + opt.config + ": " + e.what());
        }
        if (!doc.is_object())
            throw msa::ConfigError("config must be a JSON object");
        base = fs::path(opt.config).parent_path();
    }
    else
        run.config_bytes = msa::scenario::preset_json(opt.preset.empty() ? "prototype" : opt.preset);
    if (!opt.preset.empty())
        doc["preset"] = opt.preset;
    if (opt.seed)
        doc["seed"] = *opt.seed;
    if (opt.iterations)
        doc["spoof"]["iterations"] = *opt.iterations;

    run.sc = msa::scenario::parse(doc.dump(), base);

    fs::create_directories(run.out);
    ojson manifest{{"subcommand", subcommand},
                   {"config", opt.config.empty() ? "preset:" + (opt.preset.empty() ? std::string("prototype") : opt.preset)
                                                 : opt.config},
                   {"out", opt.out},
                   {"seed", run.sc.link.seed},
                   {"tool_version", tool_version},
                   {"config_sha256", sha256_hex(run.config_bytes)}};
    run.write("manifest.json", manifest.dump(2) + "\n");
    return run;
}

int cmd_loopback(const Run &run)
{
    const auto &lb = run.sc.loopback;
    ojson report{{"max_evm_percent", lb.max_evm_percent}, {"orders", ojson::array()}};
    bool pass = true;
    for (int order : lb.orders)
    {
        auto cfg = run.sc.link.modem;
        cfg.qam_order = order;
        cfg.validate();
        const auto bits = msa::modem::random_bits(lb.symbols * static_cast<std::size_t>(msa::modem::bits_per_symbol(order)),
                                                  run.sc.link.seed);
        const auto payload = msa::modem::qam_map(bits, order);
        const auto frame = msa::modem::make_frame(payload);
        const auto x = msa::modem::duc(frame, cfg);
        const auto rx = msa::modem::ddc(msa::ComplexEnvelope::from_real(x), cfg, 0, msa::modem::pilot_block(order).symbols(),
                                        frame.size());
        const std::vector<msa::cplx> sym(rx.begin() + static_cast<std::ptrdiff_t>(msa::modem::pilot_length), rx.end());
        const double evm = msa::modem::evm_percent(sym, payload.symbols());
        const double ber = msa::modem::bit_error_rate(msa::modem::qam_demap(sym, order), bits);
        const bool ok = ber == 0.0 && evm < lb.max_evm_percent;
        pass = pass && ok;
        report["orders"].push_back({{"qam_order", order},
                                    {"bit_rate_bps", cfg.bit_rate()},
                                    {"evm_percent", evm},
                                    {"ber", ber},
                                    {"pass", ok}});
        log(Verbosity::info, std::to_string(order) + "QAM loopback EVM " + msa::io::format_double(evm) + "% BER " +
                                 msa::io::format_double(ber));
    }
    report["pass"] = pass;
    run.write("loopback.json", report.dump(2) + "\n");
    return pass ? 0 : 1;
}

int cmd_link(const Run &run)
{
    const auto &L = run.sc.link;
    const auto k = static_cast<std::size_t>(msa::modem::bits_per_symbol(L.modem.qam_order));
    const auto bits = msa::modem::random_bits(run.sc.link_settings.symbols * k, L.seed);
    const auto report = msa::linksim::run_link(L, bits);
    run.write("link_report.json", msa::linksim::report_json(report));
    bool pass = true;
    for (const auto &r : report.receivers)
    {
        run.write("constellation_" + r.name + ".csv", msa::linksim::constellation_csv(r, report.reference));
        pass = pass && r.ber <= run.sc.link_settings.max_ber;
        log(Verbosity::info, r.name + ": EVM " + msa::io::format_double(r.evm_percent) + "% BER " +
                                 msa::io::format_double(r.ber));
    }
    for (std::size_t a = 0; a < report.isotropy.size(); ++a)
        for (std::size_t b = 0; b < report.isotropy.size(); ++b)
            pass = pass && report.isotropy[a][b] >= run.sc.link_settings.min_isotropy;
    if (report.clipped)
        log(Verbosity::info, "warning: drive clipped to the unit voltage range");
    return pass ? 0 : 1;
}

int cmd_pattern(const Run &run)
{
    const auto &L = run.sc.link;
    ojson summary{{"normalized", run.opt.normalized}, {"patterns", ojson::array()}};
    for (double bias : run.sc.pattern.bias_v)
    {
        const auto p = msa::surface::radiation_pattern(L.codebook, L.geometry, L.unit, L.incident(), bias,
                                                       run.sc.pattern.angle_deg, L.drive);
        // --normalized references gain_db to the pattern's own peak as well.
        const double ref = run.opt.normalized ? p.peak() : 1.0;
        std::string csv = "angle_deg,gain_db,gain_db_normalized\n";
        for (std::size_t i = 0; i < p.power.size(); ++i)
            csv += msa::io::format_double(p.angle_deg[i]) + "," + msa::io::format_double(10.0 * std::log10(p.power[i] / ref)) +
                   "," + msa::io::format_double(10.0 * std::log10(p.power[i] / p.peak())) + "\n";
        const std::string name = "pattern_" + msa::io::format_double(bias) + "V.csv";
        run.write(name, csv);
        summary["patterns"].push_back({{"bias_v", bias},
                                       {"file", name},
                                       {"peak_angle_deg", p.angle_deg[p.peak_index()]},
                                       {"peak_gain_db", 10.0 * std::log10(p.peak() / ref)}});
    }
    run.write("pattern_summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_beamform(const Run &run)
{
    const auto obj = run.sc.objective();
    const auto &bf = run.sc.beamform;
    const auto cb = bf.exhaustive ? msa::beamform::optimize_exhaustive(obj)
                                  : msa::beamform::optimize_greedy(obj, bf.restarts, run.sc.link.seed);
    const double gain = msa::beamform::array_gain(cb, obj);
    ojson report{{"method", bf.exhaustive ? "exhaustive" : "greedy"},
                 {"restarts", bf.restarts},
                 {"target_azimuth_deg", run.sc.target_azimuth_deg},
                 {"target_elevation_deg", run.sc.target_elevation_deg},
                 {"units", cb.size()},
                 {"gain_db", gain},
                 {"uniform_gain_db",
                  msa::beamform::array_gain(msa::surface::Codebook::uniform(cb.size(), 0, obj.phase_rad), obj)}};
    if (!bf.exhaustive && cb.size() <= static_cast<std::size_t>(msa::beamform::max_exhaustive_units))
        report["exhaustive_gain_db"] = msa::beamform::array_gain(msa::beamform::optimize_exhaustive(obj), obj);
    report["codebook"] = cb.states();
    run.write("codebook.json", report.dump(2) + "\n");
    log(Verbosity::info, "gain " + msa::io::format_double(gain) + " dB");
    return 0;
}

int cmd_spoof(const Run &run)
{
    const auto &sp = run.sc.spoof;
    const auto target = msa::spoof::rotor_signature(sp.rotor);
    run.write("target.csv", msa::spoof::spectrogram_csv(target));
    run.write("target.json", msa::spoof::spectrogram_sidecar(target));
    const auto rep = msa::spoof::spoof_pipeline(target, run.sc.link, sp.iterations, run.sc.link.seed);
    run.write("drive.msaw", [&] {
        const auto b = msa::io::encode_binary(rep.waveform);
        return std::string(b.begin(), b.end());
    }());
    ojson report{{"iterations", sp.iterations},
                 {"degenerate", rep.degenerate},
                 {"min_similarity", sp.min_similarity},
                 {"residual_first", rep.residual.empty() ? 0.0 : rep.residual.front()},
                 {"residual_last", rep.residual.empty() ? 0.0 : rep.residual.back()},
                 {"receivers", ojson::array()}};
    bool pass = !rep.degenerate;
    for (std::size_t i = 0; i < rep.similarity.size(); ++i)
    {
        const auto &rx = run.sc.link.receivers[i];
        const std::string name = rx.name.empty() ? "rx" + std::to_string(i + 1) : rx.name;
        run.write("received_" + name + ".csv", msa::spoof::spectrogram_csv(rep.received[i]));
        run.write("received_" + name + ".json", msa::spoof::spectrogram_sidecar(rep.received[i]));
        report["receivers"].push_back({{"name", name}, {"azimuth_deg", rx.azimuth_deg}, {"similarity", rep.similarity[i]}});
        pass = pass && rep.similarity[i] >= sp.min_similarity;
        log(Verbosity::info, name + ": similarity " + msa::io::format_double(rep.similarity[i]));
    }
    if (rep.degenerate)
        log(Verbosity::info, "target is all zero: nothing to imitate");
    report["pass"] = pass;
    run.write("spoof_report.json", report.dump(2) + "\n");
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Metasurface superheterodyne backscatter simulator"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1, 1);
    Options opt;
    std::uint64_t seed = 0;
    int iterations = 0;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config, "Scenario JSON file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--seed", seed, "Override the scenario seed");
        sub->add_option("--preset", opt.preset, "Base preset (prototype, measured)");
    };
    struct Entry
    {
        const char *name;
        const char *help;
        int (*fn)(const Run &);
    };
    const Entry entries[] = {
        {"loopback", "Noiseless DUC -> DDC chain per QAM order", cmd_loopback},
        {"link", "End-to-end backscatter link to every receiver", cmd_link},
        {"pattern", "Radiation patterns over the bias sweep", cmd_pattern},
        {"beamform", "Codebook optimisation toward the target", cmd_beamform},
        {"spoof", "Rotor micro-Doppler imitation", cmd_spoof},
    };
    std::vector<CLI::App *> subs;
    for (const auto &e : entries)
    {
        auto *sub = app.add_subcommand(e.name, e.help);
        add_common(sub);
        if (std::string(e.name) == "pattern")
            sub->add_flag("--normalized", opt.normalized, "Report each pattern relative to its own peak");
        if (std::string(e.name) == "spoof")
            sub->add_option("--iterations", iterations, "Griffin-Lim iterations")->check(CLI::PositiveNumber);
        subs.push_back(sub);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        if (!subs[i]->parsed())
            continue;
        if (subs[i]->count("--seed"))
            opt.seed = seed;
        if (const auto *it = subs[i]->get_option_no_throw("--iterations"); it && it->count())
            opt.iterations = iterations;
        try
        {
            const auto run = prepare(entries[i].name, opt);
            const int code = entries[i].fn(run);
            log(Verbosity::info, std::string(entries[i].name) + (code == 0 ? ": ok" : ": quality threshold not met"));
            return code;
        }
        catch (const msa::Error &e)
        {
            std::cerr << "msa " << entries[i].name << ": " << e.what() << "\n";
            return 2;
        }
        catch (const std::exception &e)
        {
            std::cerr << "msa " << entries[i].name << ": " << e.what() << "\n";
            return 2;
        }
    }
    return 2;
}
