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

#include "msa/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "msa/error.hpp"

namespace msa::surface
{

namespace
{

constexpr double deg = std::numbers::pi / 180.0;

double dot(const Vec3 &a, const Vec3 &b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

void require_frequency(const PlaneWave &w, const ArrayGeometry &geom, const char *what)
{
    if (std::abs(w.frequency() - geom.f_rf) > 1e-12 * geom.f_rf)
        throw ConfigError(std::string(what) + ": wave frequency differs from the surface carrier");
}

double wrap_degrees(double d)
{
    d = std::fmod(d, 360.0);
    if (d < 0)
        d += 360.0;
    return d;
}

std::vector<double> split_numbers(const std::string &line)
{
    std::vector<double> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
    {
        try
        {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
        }
        catch (const std::exception &)
        {
            throw FormatError("unit curve csv: bad number '" + cell + "'");
        }
    }
    return out;
}

std::array<cplx, 2> group_array_factors(const Codebook &codebook, std::span<const cplx> steer)
{
    std::array<cplx, 2> a{};
    for (std::size_t n = 0; n < steer.size(); ++n)
        a[codebook.state(n)] += codebook.weight(n) * steer[n];
    return a;
}

} // namespace

void ArrayGeometry::validate() const
{
    if (nx < 1 || ny < 1)
        throw ConfigError("ArrayGeometry: nx and ny must be >= 1");
    if (!(f_rf > 0.0))
        throw ConfigError("ArrayGeometry: f_rf must be positive");
    if (!(pitch > 0.0))
        throw ConfigError("ArrayGeometry: pitch must be positive");
    // Half-wave pitch is the grating-lobe limit; allow it with a hair of slack.
    if (pitch > wavelength() / 2.0 * (1.0 + 1e-12))
        throw ConfigError("ArrayGeometry: pitch must not exceed lambda/2");
}

Vec3 ArrayGeometry::position(std::size_t n) const
{
    const auto ix = static_cast<double>(n % static_cast<std::size_t>(nx));
    const auto iy = static_cast<double>(n / static_cast<std::size_t>(nx));
    return {ix * pitch, iy * pitch, 0.0};
}

ArrayGeometry ArrayGeometry::prototype()
{
    ArrayGeometry g;
    g.validate();
    return g;
}

PlaneWave::PlaneWave(Vec3 direction, double frequency) : direction_(direction), frequency_(frequency)
{
    if (std::abs(std::sqrt(dot(direction_, direction_)) - 1.0) > 1e-12)
        throw ParameterError("PlaneWave: direction must be a unit vector");
    if (!(frequency_ > 0.0))
        throw ParameterError("PlaneWave: frequency must be positive");
}

PlaneWave PlaneWave::from_angles(double azimuth_deg, double elevation_deg, double frequency)
{
    const double az = azimuth_deg * deg;
    const double el = elevation_deg * deg;
    return PlaneWave({std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)}, frequency);
}

double PlaneWave::wavenumber() const
{
    return 2.0 * std::numbers::pi * frequency_ / speed_of_light;
}

Codebook::Codebook(std::vector<std::uint8_t> states, std::array<double, 2> phase_rad)
    : states_(std::move(states)), phase_(phase_rad)
{
    if (states_.empty())
        throw ParameterError("Codebook: empty");
    for (auto s : states_)
        if (s > 1)
            throw ParameterError("Codebook: states must be 0 or 1");
}

Codebook Codebook::uniform(std::size_t n, std::uint8_t state, std::array<double, 2> phase_rad)
{
    return Codebook(std::vector<std::uint8_t>(n, state), phase_rad);
}

cplx Codebook::weight(std::size_t n) const
{
    return std::polar(1.0, phase_[states_[n]]);
}

Codebook Codebook::flipped(std::size_t n) const
{
    auto s = states_;
    s[n] ^= 1u;
    return Codebook(std::move(s), phase_);
}

MagnitudeCurve::MagnitudeCurve(std::vector<std::pair<double, double>> anchors) : anchors_(std::move(anchors))
{
    if (anchors_.size() < 2)
        throw ParameterError("MagnitudeCurve: need at least two anchors");
    for (std::size_t i = 0; i < anchors_.size(); ++i)
    {
        const auto [v, m] = anchors_[i];
        if (!std::isfinite(v) || !(m >= 0.0 && m <= 1.0))
            throw ParameterError("MagnitudeCurve: magnitudes must lie in [0, 1]");
        if (i > 0 && !(v > anchors_[i - 1].first))
            throw ParameterError("MagnitudeCurve: voltages must be strictly increasing");
    }
    increasing_ = anchors_.back().second >= anchors_.front().second;
    for (std::size_t i = 1; i < anchors_.size(); ++i)
    {
        const double d = anchors_[i].second - anchors_[i - 1].second;
        if ((increasing_ && d < 0.0) || (!increasing_ && d > 0.0))
            throw ParameterError("MagnitudeCurve: curve must be monotone");
    }
}

double MagnitudeCurve::operator()(double v) const
{
    if (v <= anchors_.front().first)
        return anchors_.front().second;
    if (v >= anchors_.back().first)
        return anchors_.back().second;
    const auto it = std::upper_bound(anchors_.begin(), anchors_.end(), v,
                                     [](double x, const auto &a) { return x < a.first; });
    const auto &[v1, m1] = *it;
    const auto &[v0, m0] = *(it - 1);
    return m0 + (m1 - m0) * (v - v0) / (v1 - v0);
}

double MagnitudeCurve::inverse(double m) const
{
    const double lo = min_magnitude();
    const double hi = max_magnitude();
    m = std::clamp(m, lo, hi);
    for (std::size_t i = 1; i < anchors_.size(); ++i)
    {
        const auto &[v0, m0] = anchors_[i - 1];
        const auto &[v1, m1] = anchors_[i];
        const bool inside = increasing_ ? (m >= m0 && m <= m1) : (m <= m0 && m >= m1);
        if (!inside)
            continue;
        if (m1 == m0)
            return v0;
        return v0 + (v1 - v0) * (m - m0) / (m1 - m0);
    }
    return increasing_ ? v_max() : v_min();
}

double MagnitudeCurve::min_magnitude() const
{
    return increasing_ ? anchors_.front().second : anchors_.back().second;
}

double MagnitudeCurve::max_magnitude() const
{
    return increasing_ ? anchors_.back().second : anchors_.front().second;
}

std::pair<double, double> MagnitudeCurve::segment(double v) const
{
    v = std::clamp(v, v_min(), v_max());
    for (std::size_t i = 1; i < anchors_.size(); ++i)
        if (v <= anchors_[i].first)
        {
            // Merge collinear neighbours so a straight run counts as one segment.
            std::size_t a = i - 1, b = i;
            auto slope = [&](std::size_t p, std::size_t q) {
                return (anchors_[q].second - anchors_[p].second) / (anchors_[q].first - anchors_[p].first);
            };
            const double s = slope(a, b);
            while (a > 0 && std::abs(slope(a - 1, a) - s) <= 1e-12 * std::max(1.0, std::abs(s)))
                --a;
            while (b + 1 < anchors_.size() && std::abs(slope(b, b + 1) - s) <= 1e-12 * std::max(1.0, std::abs(s)))
                ++b;
            return {anchors_[a].first, anchors_[b].first};
        }
    return {v_min(), v_max()};
}

void UnitReflectionModel::validate() const
{
    const double lo = v_min();
    const double hi = v_max();
    if (!(lo < hi))
        throw ConfigError("UnitReflectionModel: state curves share no voltage range");
    const double diff = wrap_degrees((phase_rad[0] - phase_rad[1]) / deg);
    const double off = std::abs(std::min(diff, 360.0 - diff) - 180.0);
    if (off > 15.0 + 1e-9)
        throw ConfigError("UnitReflectionModel: state phases must differ by 180 +/- 15 degrees");
}

double UnitReflectionModel::v_min() const
{
    return std::max(magnitude[0].v_min(), magnitude[1].v_min());
}

double UnitReflectionModel::v_max() const
{
    return std::min(magnitude[0].v_max(), magnitude[1].v_max());
}

std::pair<double, double> UnitReflectionModel::linear_subrange(double v) const
{
    const auto a = magnitude[0].segment(v);
    const auto b = magnitude[1].segment(v);
    return {std::max({a.first, b.first, v_min()}), std::min({a.second, b.second, v_max()})};
}

UnitReflectionModel UnitReflectionModel::operating_preset()
{
    UnitReflectionModel m{{MagnitudeCurve({{0.63, 0.3}, {0.79, 1.0}}), MagnitudeCurve({{0.63, 0.1}, {0.79, 0.7}})},
                          {-25.0 * deg, 170.0 * deg}};
    m.validate();
    return m;
}

UnitReflectionModel UnitReflectionModel::wide_preset()
{
    UnitReflectionModel m{{MagnitudeCurve({{0.63, 0.2}, {0.79, 1.0}}), MagnitudeCurve({{0.63, 0.1}, {0.79, 0.8}})},
                          {-25.0 * deg, 170.0 * deg}};
    m.validate();
    return m;
}

UnitReflectionModel UnitReflectionModel::from_csv(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<double, double>> a0, a1;
    double p0 = 0.0, p1 = 0.0;
    double p0_min = 1e300, p0_max = -1e300, p1_min = 1e300, p1_max = -1e300;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (std::isalpha(static_cast<unsigned char>(line[0])))
            continue; // header row
        const auto v = split_numbers(line);
        if (v.size() != 5)
            throw FormatError("unit curve csv: expected 5 columns (volts, mag_state0, mag_state1, phase0_deg, phase1_deg)");
        a0.emplace_back(v[0], v[1]);
        a1.emplace_back(v[0], v[2]);
        p0 += v[3];
        p1 += v[4];
        p0_min = std::min(p0_min, v[3]);
        p0_max = std::max(p0_max, v[3]);
        p1_min = std::min(p1_min, v[4]);
        p1_max = std::max(p1_max, v[4]);
    }
    if (a0.size() < 2)
        throw FormatError("unit curve csv: need at least two rows");
    if (p0_max - p0_min > 15.0 || p1_max - p1_min > 15.0)
        throw FormatError("unit curve csv: per-state phase varies by more than 15 degrees");
    const double n = static_cast<double>(a0.size());
    UnitReflectionModel m{{MagnitudeCurve(std::move(a0)), MagnitudeCurve(std::move(a1))},
                          {p0 / n * deg, p1 / n * deg}};
    m.validate();
    return m;
}

Reflection reflection_coefficient(double v, int state, const UnitReflectionModel &model)
{
    if (state != 0 && state != 1)
        throw ParameterError("reflection_coefficient: state must be 0 or 1");
    Reflection r;
    if (v < model.v_min() || v > model.v_max())
    {
        r.clipped = true;
        v = std::clamp(v, model.v_min(), model.v_max());
    }
    r.gamma = std::polar(model.magnitude[static_cast<std::size_t>(state)](v), model.phase_rad[static_cast<std::size_t>(state)]);
    return r;
}

double group_voltage(double v, int state, const UnitReflectionModel &model, DrivePolicy policy)
{
    if (state == 0 || policy == DrivePolicy::shared)
        return v;
    const auto &m0 = model.magnitude[0];
    const auto &m1 = model.magnitude[1];
    const double kappa = m1.max_magnitude() / m0.max_magnitude();
    return m1.inverse(kappa * m0(std::clamp(v, model.v_min(), model.v_max())));
}

PhaseJitter make_phase_jitter(std::size_t units, double max_deg, std::uint64_t seed)
{
    if (!(max_deg >= 0.0))
        throw ParameterError("make_phase_jitter: max_deg must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    PhaseJitter j;
    j.offset_rad.resize(units);
    j.slope_rad.resize(units);
    for (std::size_t n = 0; n < units; ++n)
    {
        j.offset_rad[n] = 0.5 * max_deg * deg * unit(rng);
        j.slope_rad[n] = max_deg * deg * unit(rng);
    }
    return j;
}

ComplexEnvelope ModulationFactors::sum_envelope() const
{
    return {sample_rate, 0.0, std::vector<cplx>(sum.begin(), sum.end())};
}

ComplexEnvelope ModulationFactors::group_envelope(int state) const
{
    const auto &g = group.at(static_cast<std::size_t>(state));
    return {sample_rate, 0.0, std::vector<cplx>(g.begin(), g.end())};
}

ModulationFactors gamma_sum(const RealWaveform &v_state0, const RealWaveform &v_state1, const Codebook &codebook,
                            const UnitReflectionModel &model)
{
    if (v_state0.size() != v_state1.size() || v_state0.sample_rate() != v_state1.sample_rate())
        throw ParameterError("gamma_sum: port drives differ in length or sample rate");
    ModulationFactors f;
    f.sample_rate = v_state0.sample_rate();
    f.unit_state = codebook.states();
    f.voltage_range = {model.v_min(), model.v_max()};
    for (auto s : codebook.states())
        ++f.count[s];
    const std::array<const RealWaveform *, 2> port{&v_state0, &v_state1};
    const std::size_t len = v_state0.size();
    for (std::size_t s = 0; s < 2; ++s)
    {
        f.group[s].resize(len);
        f.group_voltage[s].resize(len);
        for (std::size_t t = 0; t < len; ++t)
        {
            double v = (*port[s])[t];
            if (v < model.v_min() || v > model.v_max())
            {
                f.clipped = true;
                v = std::clamp(v, model.v_min(), model.v_max());
            }
            f.group_voltage[s][t] = v;
            f.group[s][t] = model.magnitude[s](v);
        }
    }
    f.sum.resize(len);
    for (std::size_t t = 0; t < len; ++t)
        f.sum[t] = static_cast<double>(f.count[0]) * f.group[0][t] + static_cast<double>(f.count[1]) * f.group[1][t];
    return f;
}

ModulationFactors gamma_sum(const RealWaveform &v_if, const Codebook &codebook, const UnitReflectionModel &model,
                            DrivePolicy policy)
{
    bool clipped = false;
    std::vector<double> v0(v_if.size()), v1(v_if.size());
    for (std::size_t t = 0; t < v_if.size(); ++t)
    {
        const double v = v_if[t];
        if (v < model.v_min() || v > model.v_max())
            clipped = true;
        v0[t] = std::clamp(v, model.v_min(), model.v_max());
        v1[t] = group_voltage(v0[t], 1, model, policy);
    }
    auto f = gamma_sum(RealWaveform(v_if.sample_rate(), std::move(v0)), RealWaveform(v_if.sample_rate(), std::move(v1)),
                       codebook, model);
    f.clipped = f.clipped || clipped;
    return f;
}

std::vector<cplx> steering_vector(const ArrayGeometry &geom, const PlaneWave &k_r, const PlaneWave &k_i)
{
    geom.validate();
    require_frequency(k_r, geom, "steering_vector");
    require_frequency(k_i, geom, "steering_vector");
    const double k = k_r.wavenumber();
    const Vec3 sum{k_i.direction()[0] + k_r.direction()[0], k_i.direction()[1] + k_r.direction()[1],
                   k_i.direction()[2] + k_r.direction()[2]};
    std::vector<cplx> v(geom.size());
    for (std::size_t n = 0; n < v.size(); ++n)
        v[n] = std::polar(1.0, -k * dot(sum, geom.position(n)));
    return v;
}

FieldResult reflected_field(const ModulationFactors &factors, const Codebook &codebook, const ArrayGeometry &geom,
                            const PlaneWave &k_r, const PlaneWave &k_i, FieldMode mode, const PhaseJitter *jitter)
{
    if (codebook.size() != geom.size() || factors.unit_state.size() != geom.size())
        throw ParameterError("reflected_field: codebook, factors and geometry disagree on unit count");
    if (factors.unit_state != codebook.states())
        throw ParameterError("reflected_field: factors were computed for a different codebook");
    if (jitter && (jitter->offset_rad.size() != geom.size() || jitter->slope_rad.size() != geom.size()))
        throw ParameterError("reflected_field: jitter table size mismatch");

    const auto steer = steering_vector(geom, k_r, k_i);
    const auto groups = group_array_factors(codebook, steer);
    const std::size_t len = factors.length();

    std::vector<cplx> direct(len);
    if (!jitter)
    {
        for (std::size_t t = 0; t < len; ++t)
            direct[t] = factors.group[0][t] * groups[0] + factors.group[1][t] * groups[1];
    }
    else
    {
        const double lo = factors.voltage_range.first;
        const double span = factors.voltage_range.second - lo;
        std::vector<cplx> base(geom.size());
        for (std::size_t n = 0; n < geom.size(); ++n)
            base[n] = codebook.weight(n) * steer[n] * std::polar(1.0, jitter->offset_rad[n]);
        for (std::size_t t = 0; t < len; ++t)
        {
            const std::array<double, 2> u{(factors.group_voltage[0][t] - lo) / span,
                                          (factors.group_voltage[1][t] - lo) / span};
            cplx acc{};
            for (std::size_t n = 0; n < geom.size(); ++n)
            {
                const auto s = codebook.state(n);
                acc += factors.group[s][t] * base[n] * std::polar(1.0, jitter->slope_rad[n] * (u[s] - 0.5));
            }
            direct[t] = acc;
        }
    }

    // Magnitude-weighted array factor; unit weights are the frame-mean
    // magnitudes of each state group.
    std::array<double, 2> rho{};
    for (std::size_t s = 0; s < 2; ++s)
    {
        double acc = 0.0;
        for (double g : factors.group[s])
            acc += g;
        rho[s] = len ? acc / static_cast<double>(len) : 0.0;
    }
    const double weight_total = rho[0] * static_cast<double>(factors.count[0]) + rho[1] * static_cast<double>(factors.count[1]);
    const cplx af = weight_total > 0.0 ? (rho[0] * groups[0] + rho[1] * groups[1]) / weight_total : cplx{};

    std::vector<cplx> factored(len);
    double residual = 0.0;
    for (std::size_t t = 0; t < len; ++t)
    {
        factored[t] = factors.sum[t] * af;
        const double ref = std::abs(factored[t]);
        if (ref > 0.0)
            residual = std::max(residual, std::abs(direct[t] - factored[t]) / ref);
    }

    return {ComplexEnvelope(factors.sample_rate, geom.f_rf, mode == FieldMode::direct ? std::move(direct) : std::move(factored)),
            residual};
}

double Pattern::peak() const
{
    return power.at(peak_index());
}

std::size_t Pattern::peak_index() const
{
    if (power.empty())
        throw ParameterError("Pattern: empty");
    return static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
}

std::vector<double> Pattern::normalized() const
{
    const double p = peak();
    std::vector<double> out(power.size());
    for (std::size_t i = 0; i < power.size(); ++i)
        out[i] = p > 0.0 ? power[i] / p : 0.0;
    return out;
}

Pattern radiation_pattern(const Codebook &codebook, const ArrayGeometry &geom, const UnitReflectionModel &model,
                          const PlaneWave &k_i, double bias_v, std::span<const double> angle_deg, DrivePolicy policy)
{
    if (angle_deg.empty())
        throw ParameterError("radiation_pattern: empty angle grid");
    if (codebook.size() != geom.size())
        throw ParameterError("radiation_pattern: codebook length does not match geometry");
    const std::array<double, 2> m{model.magnitude[0](group_voltage(bias_v, 0, model, policy)),
                                  model.magnitude[1](group_voltage(bias_v, 1, model, policy))};
    Pattern p;
    p.angle_deg.assign(angle_deg.begin(), angle_deg.end());
    p.power.resize(angle_deg.size());
    for (std::size_t a = 0; a < angle_deg.size(); ++a)
    {
        if (angle_deg[a] < -90.0 || angle_deg[a] > 90.0)
            throw ParameterError("radiation_pattern: angles must lie within +/-90 degrees of broadside");
        const auto steer = steering_vector(geom, PlaneWave::from_angles(angle_deg[a], 0.0, geom.f_rf), k_i);
        cplx f{};
        for (std::size_t n = 0; n < steer.size(); ++n)
            f += m[codebook.state(n)] * codebook.weight(n) * steer[n];
        p.power[a] = std::norm(f);
    }
    return p;
}

void DiodeModel::validate() const
{
    if (!(saturation_current > 0.0) || !(alpha > 0.0) || !std::isfinite(v0))
        throw ConfigError("DiodeModel: need I_s > 0, alpha > 0 and a finite operating point");
}

double DiodeModel::current(double v) const
{
    return saturation_current * std::expm1(alpha * v);
}

double DiodeModel::rd() const
{
    return 1.0 / (saturation_current * alpha * std::exp(alpha * v0));
}

double DiodeModel::rd_prime() const
{
    return 1.0 / (saturation_current * alpha * alpha * std::exp(alpha * v0));
}

DiodeModel DiodeModel::from_resistance_sweep(double r_at_lo, double r_at_hi, double v_lo, double v_hi, double v0)
{
    if (!(r_at_lo > r_at_hi && r_at_hi > 0.0 && v_hi > v_lo))
        throw ParameterError("from_resistance_sweep: need r_at_lo > r_at_hi > 0 and v_hi > v_lo");
    DiodeModel d;
    d.alpha = std::log(r_at_lo / r_at_hi) / (v_hi - v_lo);
    d.saturation_current = 1.0 / (r_at_hi * d.alpha * std::exp(d.alpha * v_hi));
    d.v0 = v0;
    d.validate();
    return d;
}

DiodeModel DiodeModel::state0_preset()
{
    return from_resistance_sweep(1001.0, 1.0, 0.63, 0.79, 0.71);
}

DiodeModel DiodeModel::state1_preset()
{
    return from_resistance_sweep(46.0, 1.0, 0.63, 0.79, 0.71);
}

RealWaveform mixer_ac_current(const RealWaveform &v_rf, const RealWaveform &v_if, const DiodeModel &diode, MixerMode mode)
{
    diode.validate();
    if (v_rf.size() != v_if.size() || v_rf.sample_rate() != v_if.sample_rate())
        throw ParameterError("mixer_ac_current: waveforms must share length and sample rate");
    const double rd = diode.rd();
    const double rdp = diode.rd_prime();
    const double scale = diode.saturation_current * std::exp(diode.alpha * diode.v0);
    std::vector<double> out(v_rf.size());
    for (std::size_t n = 0; n < out.size(); ++n)
    {
        const double a = v_rf[n];
        const double b = v_if[n];
        const double v = a + b;
        switch (mode)
        {
        case MixerMode::taylor:
            out[n] = v / rd + v * v / (2.0 * rdp);
            break;
        case MixerMode::cross_term:
            out[n] = a * b / rdp;
            break;
        case MixerMode::exact:
            // i(v0+v) - I_0 - v/R_d = I_s e^{alpha v0} (e^{alpha v} - 1 - alpha v)
            out[n] = scale * (std::expm1(diode.alpha * v) - diode.alpha * v);
            break;
        }
    }
    return {v_rf.sample_rate(), std::move(out)};
}

} // namespace msa::surface
