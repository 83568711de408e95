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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "msa/error.hpp"
#include "msa/surface.hpp"
#include "oracles.hpp"

using namespace msa;
using namespace msa::surface;

namespace
{

constexpr double deg = std::numbers::pi / 180.0;
constexpr double f_rf = 5.8e9;

Codebook random_codebook(std::size_t n, std::uint64_t seed, std::array<double, 2> ph)
{
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> s(n);
    for (auto &v : s)
        v = static_cast<std::uint8_t>(rng() & 1u);
    return Codebook(std::move(s), ph);
}

RealWaveform tone_drive(std::size_t n, double bias, double amp, double cycles_per_sample)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = bias + amp * std::sin(2.0 * std::numbers::pi * cycles_per_sample * static_cast<double>(i));
    return {1e6, std::move(v)};
}

// Operating preset written out by hand: state 0 0.3 -> 1.0, state 1 0.1 -> 0.7
// over 0.63 -> 0.79 V.
double m0_ref(double v)
{
    return 0.3 + 0.7 * (v - 0.63) / 0.16;
}

} // namespace

TEST_CASE("array geometry invariants")
{
    const auto g = ArrayGeometry::prototype();
    CHECK(g.size() == 160);
    CHECK(g.wavelength() == doctest::Approx(0.051688).epsilon(1e-4));
    CHECK(g.pitch < g.wavelength() / 2.0);
    const auto p = g.position(17); // ix = 1, iy = 1
    CHECK(p[0] == doctest::Approx(0.018));
    CHECK(p[1] == doctest::Approx(0.018));
    CHECK(p[2] == 0.0);

    ArrayGeometry half{4, 1, speed_of_light / f_rf / 2.0, f_rf};
    CHECK_NOTHROW(half.validate());
    ArrayGeometry wide{4, 1, 0.03, f_rf};
    CHECK_THROWS_AS(wide.validate(), ConfigError);
    ArrayGeometry empty{0, 10, 0.018, f_rf};
    CHECK_THROWS_AS(empty.validate(), ConfigError);
    ArrayGeometry neg{1, 1, -0.01, f_rf};
    CHECK_THROWS_AS(neg.validate(), ConfigError);
}

TEST_CASE("plane wave directions")
{
    CHECK_THROWS_AS(PlaneWave({1.0, 1.0, 0.0}, f_rf), ParameterError);
    CHECK_THROWS_AS(PlaneWave({0.0, 0.0, 1.0}, 0.0), ParameterError);
    const auto b = PlaneWave::from_angles(0.0, 0.0, f_rf);
    CHECK(b.direction()[2] == 1.0);
    const auto a = PlaneWave::from_angles(30.0, 0.0, f_rf);
    CHECK(a.direction()[0] == doctest::Approx(0.5));
    const auto e = PlaneWave::from_angles(0.0, 90.0, f_rf);
    CHECK(e.direction()[1] == doctest::Approx(1.0));
    CHECK(b.wavenumber() == doctest::Approx(2.0 * std::numbers::pi * f_rf / speed_of_light));
}

TEST_CASE("magnitude curves interpolate, clamp and invert")
{
    const MagnitudeCurve c({{0.0, 0.2}, {1.0, 0.6}, {2.0, 1.0}});
    CHECK(c(0.5) == doctest::Approx(0.4));
    CHECK(c(-1.0) == 0.2);
    CHECK(c(3.0) == 1.0);
    CHECK(c.inverse(0.8) == doctest::Approx(1.5));
    CHECK(c.inverse(5.0) == 2.0);
    // Collinear anchors form one segment.
    CHECK(c.segment(0.3) == std::pair<double, double>{0.0, 2.0});
    const MagnitudeCurve kink({{0.0, 0.2}, {1.0, 0.3}, {2.0, 1.0}});
    CHECK(kink.segment(1.5) == std::pair<double, double>{1.0, 2.0});
    const MagnitudeCurve down({{0.0, 0.9}, {1.0, 0.1}});
    CHECK(down.inverse(0.5) == doctest::Approx(0.5));
    CHECK(down.max_magnitude() == 0.9);

    CHECK_THROWS_AS(MagnitudeCurve({{0.0, 0.5}}), ParameterError);
    CHECK_THROWS_AS(MagnitudeCurve({{0.0, 0.5}, {0.0, 0.6}}), ParameterError);
    CHECK_THROWS_AS(MagnitudeCurve({{0.0, 0.5}, {1.0, 1.2}}), ParameterError);
    CHECK_THROWS_AS(MagnitudeCurve({{0.0, 0.5}, {1.0, 0.8}, {2.0, 0.6}}), ParameterError);
}

TEST_CASE("reflection coefficient presets")
{
    const auto wide = UnitReflectionModel::wide_preset();
    CHECK(std::abs(reflection_coefficient(0.63, 0, wide).gamma) == doctest::Approx(0.2));
    CHECK(std::abs(reflection_coefficient(0.79, 0, wide).gamma) == doctest::Approx(1.0));
    CHECK(std::abs(reflection_coefficient(0.63, 1, wide).gamma) == doctest::Approx(0.1));
    CHECK(std::abs(reflection_coefficient(0.79, 1, wide).gamma) == doctest::Approx(0.8));

    const auto op = UnitReflectionModel::operating_preset();
    CHECK(std::abs(reflection_coefficient(0.63, 0, op).gamma) == doctest::Approx(0.3));
    CHECK(std::abs(reflection_coefficient(0.79, 1, op).gamma) == doctest::Approx(0.7));
    for (double v = 0.63; v <= 0.79; v += 0.01)
    {
        CHECK(std::arg(reflection_coefficient(v, 0, op).gamma) == doctest::Approx(-25.0 * deg));
        CHECK(std::arg(reflection_coefficient(v, 1, op).gamma) == doctest::Approx(170.0 * deg));
        CHECK_FALSE(reflection_coefficient(v, 0, op).clipped);
    }
    const auto hi = reflection_coefficient(0.9, 0, op);
    CHECK(hi.clipped);
    CHECK(std::abs(hi.gamma) == doctest::Approx(1.0));
    CHECK(reflection_coefficient(0.5, 1, op).clipped);
    CHECK_THROWS_AS(reflection_coefficient(0.7, 2, op), ParameterError);
}

TEST_CASE("unit model phase separation")
{
    auto m = UnitReflectionModel::operating_preset();
    m.phase_rad = {0.0, 160.0 * deg};
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m.phase_rad = {0.0, 166.0 * deg};
    CHECK_NOTHROW(m.validate());
    m.phase_rad = {10.0 * deg, -175.0 * deg};
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("unit model from csv")
{
    const std::string csv = "volts,mag_state0,mag_state1,phase0_deg,phase1_deg\n"
                            "0.63,0.3,0.1,-24,171\n"
                            "0.71,0.6,0.35,-25,170\n"
                            "0.79,1.0,0.7,-26,169\n";
    const auto m = UnitReflectionModel::from_csv(csv);
    CHECK(m.magnitude[0](0.67) == doctest::Approx(0.45));
    CHECK(m.phase_rad[0] == doctest::Approx(-25.0 * deg));
    CHECK(m.phase_rad[1] == doctest::Approx(170.0 * deg));
    CHECK(m.linear_subrange(0.65) == std::pair<double, double>{0.63, 0.71});
    CHECK_THROWS_AS(UnitReflectionModel::from_csv("0.63,0.3,0.1\n0.79,1,0.7\n"), FormatError);
    CHECK_THROWS_AS(UnitReflectionModel::from_csv("0.63,0.3,0.1,-25,170\n0.79,1,0.7,0,170\n"), FormatError);
    CHECK_THROWS_AS(UnitReflectionModel::from_csv("0.63,0.3,0.1,-25,170\n"), FormatError);
}

TEST_CASE("equalized drive keeps group magnitudes proportional")
{
    const auto m = UnitReflectionModel::operating_preset();
    const double kappa = 0.7 / 1.0;
    for (double v = 0.63; v <= 0.79 + 1e-12; v += 0.005)
    {
        const double v1 = group_voltage(v, 1, m, DrivePolicy::equalized);
        CHECK(m.magnitude[1](v1) == doctest::Approx(kappa * m.magnitude[0](v)).epsilon(1e-12));
        CHECK(group_voltage(v, 1, m, DrivePolicy::shared) == v);
        CHECK(group_voltage(v, 0, m, DrivePolicy::equalized) == v);
    }
}

TEST_CASE("steering vector examples")
{
    const auto g = ArrayGeometry::prototype();
    const auto b = PlaneWave::from_angles(0.0, 0.0, f_rf);
    for (const auto &v : steering_vector(g, b, b))
        CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-15);
    for (const auto &v : steering_vector(g, PlaneWave::from_angles(37.0, 12.0, f_rf), PlaneWave::from_angles(-20.0, 5.0, f_rf)))
        CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-14));

    const ArrayGeometry row{4, 1, speed_of_light / f_rf / 2.0, f_rf};
    const auto v = steering_vector(row, PlaneWave::from_angles(30.0, 0.0, f_rf), b);
    for (std::size_t n = 0; n < 4; ++n)
        CHECK(std::abs(v[n] - std::polar(1.0, -std::numbers::pi * static_cast<double>(n) / 2.0)) < 1e-12);

    CHECK_THROWS_AS(steering_vector(g, PlaneWave::from_angles(0.0, 0.0, 5.9e9), b), ConfigError);
}

TEST_CASE("gamma_sum examples")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto cb = Codebook::uniform(160, 0, m.phase_rad);
    const auto f = gamma_sum(RealWaveform(1.0, std::vector<double>(8, 0.79)), cb, m);
    for (double s : f.sum)
        CHECK(s == doctest::Approx(160.0));
    CHECK(f.count[0] == 160);
    CHECK_FALSE(f.clipped);

    const Codebook one({1}, m.phase_rad);
    const auto f1 = gamma_sum(RealWaveform(1.0, {0.65, 0.7}), one, m, DrivePolicy::shared);
    CHECK(f1.sum[0] == doctest::Approx(std::abs(reflection_coefficient(0.65, 1, m).gamma)));

    const auto clipped = gamma_sum(RealWaveform(1.0, {0.5, 0.7}), cb, m);
    CHECK(clipped.clipped);
    CHECK(clipped.sum[0] == doctest::Approx(160 * 0.3));
}

TEST_CASE("gamma_sum superposition on a linear sub-range")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto cb = random_codebook(160, 3, m.phase_rad);
    const auto range = m.linear_subrange(0.71);
    CHECK(range.first == 0.63);
    CHECK(range.second == 0.79);
    for (auto policy : {DrivePolicy::equalized, DrivePolicy::shared})
    {
        const double bias = 0.71;
        const auto a = tone_drive(256, bias, 0.03, 0.013);
        const auto b = tone_drive(256, bias, 0.04, 0.071);
        std::vector<double> sum(256);
        for (std::size_t i = 0; i < 256; ++i)
            sum[i] = a[i] + b[i] - bias;
        const auto ga = gamma_sum(a, cb, m, policy);
        const auto gb = gamma_sum(b, cb, m, policy);
        const auto gs = gamma_sum(RealWaveform(1e6, sum), cb, m, policy);
        const auto g0 = gamma_sum(RealWaveform(1e6, std::vector<double>(256, bias)), cb, m, policy);
        for (std::size_t i = 0; i < 256; ++i)
            CHECK(std::abs(gs.sum[i] - (ga.sum[i] + gb.sum[i] - g0.sum[i])) <= 1e-9 * std::abs(gs.sum[i]));
    }
}

TEST_CASE("dual-port drive uses each port for its group")
{
    const auto m = UnitReflectionModel::operating_preset();
    const Codebook cb({0, 1, 1}, m.phase_rad);
    const auto f = gamma_sum(RealWaveform(1.0, {0.63, 0.79}), RealWaveform(1.0, {0.79, 0.63}), cb, m);
    CHECK(f.sum[0] == doctest::Approx(0.3 + 2 * 0.7));
    CHECK(f.sum[1] == doctest::Approx(1.0 + 2 * 0.1));
    CHECK_THROWS_AS(gamma_sum(RealWaveform(1.0, {0.7}), RealWaveform(1.0, {0.7, 0.7}), cb, m), ParameterError);
}

TEST_CASE("reflected field coherent sum")
{
    auto m = UnitReflectionModel::operating_preset();
    m.phase_rad = {0.0, std::numbers::pi};
    const auto g = ArrayGeometry::prototype();
    const auto cb = Codebook::uniform(160, 0, m.phase_rad);
    const auto f = gamma_sum(RealWaveform(1.0, std::vector<double>(4, 0.71)), cb, m);
    const auto b = PlaneWave::from_angles(0.0, 0.0, f_rf);
    const auto e = reflected_field(f, cb, g, b, b, FieldMode::factored).field;
    CHECK(e.center_frequency() == f_rf);
    for (const auto &v : e.samples())
        CHECK(std::abs(v) == doctest::Approx(160.0 * m0_ref(0.71)).epsilon(1e-12));
}

TEST_CASE("direct and factored field agree under proportional group magnitudes")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto g = ArrayGeometry::prototype();
    const auto cb = random_codebook(160, 5, m.phase_rad);
    const auto drive = tone_drive(400, 0.71, 0.07, 0.031);
    const auto f = gamma_sum(drive, cb, m, DrivePolicy::equalized);
    for (double az : {-60.0, -10.0, 0.0, 25.0, 45.0, 80.0})
    {
        const auto r = reflected_field(f, cb, g, PlaneWave::from_angles(az, 0.0, f_rf), PlaneWave::from_angles(10.0, 0.0, f_rf));
        CHECK(r.factorization_residual < 1e-12);
        const auto d = reflected_field(f, cb, g, PlaneWave::from_angles(az, 0.0, f_rf), PlaneWave::from_angles(10.0, 0.0, f_rf),
                                       FieldMode::factored);
        for (std::size_t i = 0; i < r.field.size(); ++i)
            CHECK(std::abs(r.field[i] - d.field[i]) <= 1e-12 * std::abs(d.field[i]));
    }

    // Shared drive with curves of different shape is not separable.
    const auto fs = gamma_sum(drive, cb, m, DrivePolicy::shared);
    const auto rs = reflected_field(fs, cb, g, PlaneWave::from_angles(30.0, 0.0, f_rf), PlaneWave::from_angles(0.0, 0.0, f_rf));
    CHECK(rs.factorization_residual > 1e-3);
}

TEST_CASE("field ratio between two directions is constant in time")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto g = ArrayGeometry::prototype();
    const auto cb = random_codebook(160, 8, m.phase_rad);
    const auto f = gamma_sum(tone_drive(300, 0.71, 0.08, 0.017), cb, m);
    const auto ki = PlaneWave::from_angles(0.0, 0.0, f_rf);
    const auto e1 = reflected_field(f, cb, g, PlaneWave::from_angles(45.0, 0.0, f_rf), ki).field;
    const auto e2 = reflected_field(f, cb, g, PlaneWave::from_angles(-12.0, 3.0, f_rf), ki).field;
    const cplx r0 = e1[0] / e2[0];
    for (std::size_t i = 0; i < e1.size(); ++i)
        if (std::abs(e1[i]) > 1e-9 && std::abs(e2[i]) > 1e-9)
            CHECK(std::abs(e1[i] / e2[i] - r0) <= 1e-10 * std::abs(r0));
}

TEST_CASE("reflected field validation")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto g = ArrayGeometry::prototype();
    const auto cb = random_codebook(160, 1, m.phase_rad);
    const auto f = gamma_sum(RealWaveform(1.0, {0.7}), cb, m);
    const auto b = PlaneWave::from_angles(0.0, 0.0, f_rf);
    const auto other = random_codebook(160, 2, m.phase_rad);
    CHECK_THROWS_AS(reflected_field(f, other, g, b, b), ParameterError);
    const ArrayGeometry small{4, 4, 0.018, f_rf};
    CHECK_THROWS_AS(reflected_field(f, cb, small, b, b), ParameterError);
    PhaseJitter bad;
    CHECK_THROWS_AS(reflected_field(f, cb, g, b, b, FieldMode::direct, &bad), ParameterError);
}

TEST_CASE("phase jitter bounds and effect")
{
    const auto j = make_phase_jitter(1000, 15.0, 7);
    for (std::size_t n = 0; n < 1000; ++n)
        for (double u : {0.0, 0.5, 1.0})
            CHECK(std::abs(j.deviation(n, u)) <= 15.0 * deg + 1e-12);
    CHECK(make_phase_jitter(10, 15.0, 7).offset_rad == make_phase_jitter(10, 15.0, 7).offset_rad);

    const auto m = UnitReflectionModel::operating_preset();
    const auto g = ArrayGeometry::prototype();
    const auto cb = random_codebook(160, 9, m.phase_rad);
    const auto f = gamma_sum(tone_drive(64, 0.71, 0.07, 0.05), cb, m);
    const auto ki = PlaneWave::from_angles(0.0, 0.0, f_rf);
    const auto kr = PlaneWave::from_angles(40.0, 0.0, f_rf);
    const auto jt = make_phase_jitter(160, 15.0, 1);
    const auto ideal = reflected_field(f, cb, g, kr, ki).field;
    const auto jittered = reflected_field(f, cb, g, kr, ki, FieldMode::direct, &jt).field;
    // Zero jitter reproduces the ideal field exactly.
    const auto none = make_phase_jitter(160, 0.0, 1);
    const auto same = reflected_field(f, cb, g, kr, ki, FieldMode::direct, &none).field;
    double diff = 0.0;
    for (std::size_t i = 0; i < ideal.size(); ++i)
    {
        diff = std::max(diff, std::abs(jittered[i] - ideal[i]) / std::abs(ideal[i]));
        CHECK(std::abs(same[i] - ideal[i]) <= 1e-12 * std::abs(ideal[i]));
    }
    CHECK(diff > 1e-3);
}

TEST_CASE("radiation pattern matches a brute-force element sum")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto g = ArrayGeometry::prototype();
    const auto cb = random_codebook(160, 12, m.phase_rad);
    const auto ki = PlaneWave::from_angles(15.0, 0.0, f_rf);
    std::vector<double> angles;
    for (double a = -90.0; a <= 90.0; a += 1.5)
        angles.push_back(a);
    const double bias = 0.67;
    const auto p = radiation_pattern(cb, g, m, ki, bias, angles);
    const double k = 2.0 * std::numbers::pi * f_rf / speed_of_light;
    const double mag[2] = {m0_ref(bias), 0.7 * m0_ref(bias)};
    const double ph[2] = {-25.0 * deg, 170.0 * deg};
    for (std::size_t a = 0; a < angles.size(); ++a)
    {
        const double ux = std::sin(angles[a] * deg) + std::sin(15.0 * deg);
        cplx acc{};
        for (int iy = 0; iy < 10; ++iy)
            for (int ix = 0; ix < 16; ++ix)
            {
                const int s = cb.state(static_cast<std::size_t>(iy * 16 + ix));
                acc += mag[s] * std::polar(1.0, ph[s] - k * ux * ix * 0.018);
            }
        CHECK(p.power[a] == doctest::Approx(std::norm(acc)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(radiation_pattern(cb, g, m, ki, bias, std::vector<double>{}), ParameterError);
    CHECK_THROWS_AS(radiation_pattern(cb, g, m, ki, bias, std::vector<double>{95.0}), ParameterError);
}

TEST_CASE("bias scales the pattern without changing its shape")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto g = ArrayGeometry::prototype();
    const auto cb = random_codebook(160, 13, m.phase_rad);
    const auto ki = PlaneWave::from_angles(0.0, 0.0, f_rf);
    std::vector<double> angles;
    for (double a = -90.0; a <= 90.0; a += 0.5)
        angles.push_back(a);
    const auto hi = radiation_pattern(cb, g, m, ki, 0.79, angles);
    const auto mid = radiation_pattern(cb, g, m, ki, 0.71, angles);
    const auto lo = radiation_pattern(cb, g, m, ki, 0.63, angles);
    const auto nh = hi.normalized(), nm = mid.normalized(), nl = lo.normalized();
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        CHECK(std::abs(nh[i] - nm[i]) < 1e-9);
        CHECK(std::abs(nh[i] - nl[i]) < 1e-9);
    }
    CHECK(hi.peak() > mid.peak());
    CHECK(mid.peak() > lo.peak());
    CHECK(hi.peak_index() == lo.peak_index());
}

TEST_CASE("uniform codebook peaks at the specular direction")
{
    const auto m = UnitReflectionModel::operating_preset();
    const auto g = ArrayGeometry::prototype();
    const auto cb = Codebook::uniform(160, 1, m.phase_rad);
    std::vector<double> angles;
    for (double a = -90.0; a <= 90.0; a += 0.5)
        angles.push_back(a);
    for (double inc : {0.0, 20.0, -35.0})
    {
        const auto p = radiation_pattern(cb, g, m, PlaneWave::from_angles(inc, 0.0, f_rf), 0.71, angles);
        CHECK(p.angle_deg[p.peak_index()] == doctest::Approx(-inc));
    }
}

TEST_CASE("diode model derived from the resistance sweep")
{
    const auto d0 = DiodeModel::state0_preset();
    const auto d1 = DiodeModel::state1_preset();
    auto rd_at = [](DiodeModel d, double v) {
        d.v0 = v;
        return d.rd();
    };
    CHECK(rd_at(d0, 0.63) == doctest::Approx(1001.0).epsilon(1e-9));
    CHECK(rd_at(d0, 0.79) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rd_at(d1, 0.63) == doctest::Approx(46.0).epsilon(1e-9));
    CHECK(rd_at(d1, 0.79) == doctest::Approx(1.0).epsilon(1e-9));

    // Five-point finite differences of the exponential at v0.
    for (const auto &d : {d0, d1})
    {
        const double h = 1e-4;
        auto i = [&](double x) { return d.current(x); };
        const double v = d.v0;
        const double di = (-i(v + 2 * h) + 8 * i(v + h) - 8 * i(v - h) + i(v - 2 * h)) / (12 * h);
        const double d2i = (-i(v + 2 * h) + 16 * i(v + h) - 30 * i(v) + 16 * i(v - h) - i(v - 2 * h)) / (12 * h * h);
        CHECK(1.0 / di == doctest::Approx(d.rd()).epsilon(1e-8));
        CHECK(1.0 / d2i == doctest::Approx(d.rd_prime()).epsilon(1e-6));
        CHECK(d.bias_current() == doctest::Approx(d.saturation_current * std::expm1(d.alpha * d.v0)));
    }
    CHECK_THROWS_AS(DiodeModel::from_resistance_sweep(1.0, 10.0, 0.6, 0.8, 0.7), ParameterError);
    DiodeModel bad;
    bad.alpha = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

namespace
{

struct MixerRun
{
    double lower, upper, carrier, if_line;
};

// f1 = 50 MHz, f2 = 1 MHz at 400 MS/s; 4000 samples puts every line on a bin.
MixerRun run_mixer(double a, double b, const DiodeModel &d, MixerMode mode)
{
    const double fs = 400e6, f1 = 50e6, f2 = 1e6;
    std::vector<double> rf(4000), ifv(4000);
    for (std::size_t n = 0; n < rf.size(); ++n)
    {
        const double t = static_cast<double>(n) / fs;
        rf[n] = a * std::cos(2.0 * std::numbers::pi * f1 * t);
        ifv[n] = b * std::cos(2.0 * std::numbers::pi * f2 * t);
    }
    const auto i = mixer_ac_current(RealWaveform(fs, rf), RealWaveform(fs, ifv), d, mode);
    return {oracle::tone_amplitude(i.samples(), f1 - f2, fs), oracle::tone_amplitude(i.samples(), f1 + f2, fs),
            oracle::tone_amplitude(i.samples(), f1, fs), oracle::tone_amplitude(i.samples(), f2, fs)};
}

} // namespace

TEST_CASE("mixer sidebands follow the cross term")
{
    const auto d = DiodeModel::state0_preset();
    const double a = 0.01 / d.alpha, b = 0.015 / d.alpha;
    const double expect = a * b / (2.0 * d.rd_prime());
    for (auto mode : {MixerMode::taylor, MixerMode::cross_term})
    {
        const auto r = run_mixer(a, b, d, mode);
        CHECK(r.lower == doctest::Approx(expect).epsilon(0.01));
        CHECK(r.upper == doctest::Approx(expect).epsilon(0.01));
    }
    const auto ex = run_mixer(a, b, d, MixerMode::exact);
    CHECK(ex.lower == doctest::Approx(expect).epsilon(0.05));
    CHECK(ex.upper == doctest::Approx(expect).epsilon(0.05));

    const auto quiet = run_mixer(a, 0.0, d, MixerMode::taylor);
    CHECK(quiet.lower < 1e-4 * quiet.carrier);
    CHECK(quiet.upper < 1e-4 * quiet.carrier);
}

TEST_CASE("mixer sideband is bilinear in the drive amplitudes")
{
    const auto d = DiodeModel::state1_preset();
    const double a0 = 0.002 / d.alpha, b0 = 0.002 / d.alpha;
    const double ref = run_mixer(a0, b0, d, MixerMode::taylor).upper / (a0 * b0);
    for (double sa : {1.0, 3.0, 10.0})
        for (double sb : {1.0, 2.0, 10.0})
        {
            const double v = run_mixer(a0 * sa, b0 * sb, d, MixerMode::taylor).upper / (a0 * sa * b0 * sb);
            CHECK(v == doctest::Approx(ref).epsilon(0.02));
        }
    CHECK_THROWS_AS(mixer_ac_current(RealWaveform(1.0, {0.0}), RealWaveform(2.0, {0.0}), d), ParameterError);
    CHECK_THROWS_AS(mixer_ac_current(RealWaveform(1.0, {0.0}), RealWaveform(1.0, {0.0, 1.0}), d), ParameterError);
}
