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
#include "msa/sigcore.hpp"
#include "oracles.hpp"

using namespace msa;

namespace
{

std::vector<double> random_real(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto &x : v)
        x = d(rng);
    return v;
}

std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<cplx> v(n);
    for (auto &x : v)
        x = {d(rng), d(rng)};
    return v;
}

// Peak off-centre value of rrc * rrc at symbol-spaced lags, relative to the centre.
double nyquist_residual(const FilterTaps &h, int sps)
{
    const auto &t = h.taps();
    const auto n = static_cast<long>(t.size());
    auto lag = [&](long d) {
        double acc = 0.0;
        for (long i = 0; i + d < n; ++i)
            acc += t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i + d)];
        return acc;
    };
    const double centre = lag(0);
    double worst = 0.0;
    for (long d = sps; d < n; d += sps)
        worst = std::max(worst, std::abs(lag(d)) / centre);
    return worst;
}

} // namespace

TEST_CASE("waveform containers reject invalid data")
{
    CHECK_THROWS_AS(RealWaveform(0.0, {1.0}), ParameterError);
    CHECK_THROWS_AS(RealWaveform(1.0, {std::nan("")}), ParameterError);
    CHECK_THROWS_AS(RealWaveform(1.0, {INFINITY}), ParameterError);
    CHECK_THROWS_AS(ComplexEnvelope(-1.0, 0.0, {cplx{}}), ParameterError);
    CHECK_THROWS_AS(ComplexEnvelope(1.0, 0.0, {cplx(0.0, std::nan(""))}), ParameterError);
    CHECK_NOTHROW(ComplexEnvelope(1.0, 5.8e9, {}));
}

TEST_CASE("filter taps must be odd and symmetric")
{
    CHECK_THROWS_AS(FilterTaps({1.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(FilterTaps({1.0, 2.0, 1.1}), ParameterError);
    CHECK_THROWS_AS(FilterTaps({}), ParameterError);
    const FilterTaps h({0.25, 0.5, 0.25});
    CHECK(h.nominal_delay() == 1);
}

TEST_CASE("design_rrc shape and parameter checks")
{
    const auto h = design_rrc(0.35, 8, 8);
    REQUIRE(h.size() == 65);
    const auto &t = h.taps();
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(t[i] == t[t.size() - 1 - i]);
    CHECK(std::max_element(t.begin(), t.end()) - t.begin() == 32);
    double energy = 0.0;
    for (double v : t)
        energy += v * v;
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(design_rrc(-0.1, 8, 8), ParameterError);
    CHECK_THROWS_AS(design_rrc(1.1, 8, 8), ParameterError);
    CHECK_THROWS_AS(design_rrc(0.35, 1, 8), ParameterError);
    CHECK_THROWS_AS(design_rrc(0.35, 8, 1), ParameterError);
    CHECK_THROWS_AS(design_rrc(0.35, 3, 3), ParameterError);
}

TEST_CASE("design_rrc with zero roll-off is a sampled sinc")
{
    const auto h = design_rrc(0.0, 10, 4);
    const auto &t = h.taps();
    const double c = t[h.nominal_delay()];
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        const double x = (static_cast<double>(i) - static_cast<double>(h.nominal_delay())) / 4.0;
        const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        CHECK(t[i] / c == doctest::Approx(sinc).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("design_rrc evaluates the 1/(4 beta) singularity by its limit")
{
    // beta = 0.25, sps = 4: t = +-1 symbol hits 4 beta |t| = 1.
    const auto h = design_rrc(0.25, 8, 4);
    const auto &t = h.taps();
    const std::size_t c = h.nominal_delay();
    for (double v : t)
        CHECK(std::isfinite(v));
    // Generic closed form evaluated just off the singular point.
    const double beta = 0.25;
    auto generic = [&](double x) {
        const double pi = std::numbers::pi;
        return (std::sin(pi * x * (1 - beta)) + 4 * beta * x * std::cos(pi * x * (1 + beta))) /
               (pi * x * (1 - 16 * beta * beta * x * x));
    };
    const double at_zero = 1.0 - beta + 4.0 * beta / std::numbers::pi;
    CHECK(t[c + 4] / t[c] == doctest::Approx(generic(1.0 + 1e-7) / at_zero).epsilon(1e-5));
    CHECK(t[c - 4] / t[c] == doctest::Approx(generic(-1.0 - 1e-7) / at_zero).epsilon(1e-5));
}

TEST_CASE("rrc cascade is Nyquist at symbol lags")
{
    // Spans chosen per roll-off so that truncation ripple stays below 1e-3.
    struct Case
    {
        double beta;
        int span;
    };
    for (const auto &c : {Case{0.25, 16}, Case{0.35, 32}, Case{0.5, 8}, Case{1.0, 8}, Case{0.0, 2048}})
    {
        CAPTURE(c.beta);
        CHECK(nyquist_residual(design_rrc(c.beta, c.span, 8), 8) < 1e-3);
    }
}

TEST_CASE("fir_filter reproduces taps for an impulse and is linear")
{
    const auto h = design_rrc(0.35, 4, 4);
    std::vector<double> imp(41, 0.0);
    imp[20] = 1.0;
    const auto y = fir_filter(RealWaveform(1.0, imp), h);
    REQUIRE(y.size() == imp.size());
    for (std::size_t k = 0; k < h.size(); ++k)
        CHECK(y[20 - h.nominal_delay() + k] == doctest::Approx(h.taps()[k]).epsilon(1e-15));

    const auto x1 = random_complex(500, 1);
    const auto x2 = random_complex(500, 2);
    const cplx a(0.7, -1.3), b(-2.1, 0.4);
    std::vector<cplx> mix(500);
    for (std::size_t i = 0; i < 500; ++i)
        mix[i] = a * x1[i] + b * x2[i];
    const auto f1 = fir_filter(ComplexEnvelope(1.0, 0.0, x1), h);
    const auto f2 = fir_filter(ComplexEnvelope(1.0, 0.0, x2), h);
    const auto fm = fir_filter(ComplexEnvelope(1.0, 0.0, mix), h);
    double scale = 0.0;
    for (std::size_t i = 0; i < 500; ++i)
        scale = std::max(scale, std::abs(fm[i]));
    for (std::size_t i = 0; i < 500; ++i)
        CHECK(std::abs(fm[i] - (a * f1[i] + b * f2[i])) <= 1e-12 * scale);
}

TEST_CASE("fir_filter scales a tone by |H(f)|")
{
    const auto h = design_rrc(0.35, 8, 8);
    const double fs = 1.0;
    const double f = 0.09;
    std::vector<double> x(8000);
    for (std::size_t n = 0; n < x.size(); ++n)
        x[n] = std::cos(2.0 * std::numbers::pi * f * static_cast<double>(n));
    const auto y = fir_filter(RealWaveform(fs, x), h);
    // Expected |H(f)| by explicit tap sum, independent of FilterTaps::response.
    cplx hf{};
    for (std::size_t k = 0; k < h.size(); ++k)
        hf += h.taps()[k] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(k));
    const std::vector<double> mid(y.samples().begin() + 200, y.samples().end() - 200);
    double peak = 0.0;
    for (double v : mid)
        peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(std::abs(hf)).epsilon(0.01));
    CHECK(std::abs(h.response(f)) == doctest::Approx(std::abs(hf)).epsilon(1e-12));
}

TEST_CASE("upsample and downsample bookkeeping")
{
    const auto u = upsample(RealWaveform(10.0, {1.0, 2.0}), 3);
    CHECK(u.samples() == std::vector<double>{1, 0, 0, 2, 0, 0});
    CHECK(u.sample_rate() == 30.0);
    const auto x = RealWaveform(7.0, random_real(33, 4));
    const auto back = downsample(upsample(x, 5), 5, 0);
    CHECK(back == x);
    const auto d = downsample(RealWaveform(8.0, {0, 1, 2, 3, 4, 5, 6}), 3, 1);
    CHECK(d.samples() == std::vector<double>{1, 4});
    CHECK(d.sample_rate() == doctest::Approx(8.0 / 3.0));
    CHECK_THROWS_AS(upsample(x, 0), ParameterError);
    CHECK_THROWS_AS(downsample(x, 0), ParameterError);
    CHECK_THROWS_AS(downsample(x, 3, 3), ParameterError);
    const auto cu = upsample(ComplexEnvelope(2.0, 5.0, {cplx(1, 1)}), 2);
    CHECK(cu.size() == 2);
    CHECK(cu.center_frequency() == 5.0);
}

TEST_CASE("resampling is linear")
{
    const auto a = random_real(64, 5), b = random_real(64, 6);
    std::vector<double> m(64);
    for (std::size_t i = 0; i < 64; ++i)
        m[i] = 2.0 * a[i] - 0.5 * b[i];
    const auto ua = upsample(RealWaveform(1.0, a), 3), ub = upsample(RealWaveform(1.0, b), 3), um = upsample(RealWaveform(1.0, m), 3);
    for (std::size_t i = 0; i < um.size(); ++i)
        CHECK(um[i] == doctest::Approx(2.0 * ua[i] - 0.5 * ub[i]).epsilon(1e-12));
}

TEST_CASE("spectrum tone, Parseval and centre frequency")
{
    const double fs = 20e6;
    std::vector<double> x(2000);
    for (std::size_t n = 0; n < x.size(); ++n)
        x[n] = std::cos(2.0 * std::numbers::pi * 1e6 * static_cast<double>(n) / fs);
    const auto s = spectrum(RealWaveform(fs, x), 2048);
    const double df = fs / 2048;
    CHECK(std::abs(std::abs(s.peak_frequency()) - 1e6) <= df);

    auto z = random_complex(512, 7);
    const auto sz = spectrum(ComplexEnvelope(1.0, 0.0, z), 512, Window::rectangular);
    double ex = 0.0, eX = 0.0;
    for (const auto &v : z)
        ex += std::norm(v);
    for (double m : sz.magnitude)
        eX += m * m;
    CHECK(eX / 512.0 == doctest::Approx(ex).epsilon(1e-9));

    const auto zc = spectrum(ComplexEnvelope(100.0, 5.8e9, z), 512);
    CHECK(zc.frequency_hz.front() == doctest::Approx(5.8e9 - 50.0));
    CHECK_THROWS_AS(spectrum(ComplexEnvelope(1.0, 0.0, z), 256), ParameterError);
}

TEST_CASE("spectrum agrees with a direct DFT")
{
    const auto z = random_complex(96, 8);
    const auto s = spectrum(ComplexEnvelope(96.0, 0.0, z), 96, Window::rectangular);
    const auto ref = oracle::naive_dft(z);
    for (std::size_t j = 0; j < 96; ++j)
    {
        // Shifted bin j holds frequency (j - 48) Hz.
        const std::size_t k = (j + 48) % 96;
        CHECK(s.magnitude[j] == doctest::Approx(std::abs(ref[k])).epsilon(1e-10));
        CHECK(s.frequency_hz[j] == doctest::Approx(static_cast<double>(j) - 48.0));
    }
}

TEST_CASE("product of two tones shows sum and difference lines")
{
    const double fs = 200e6;
    std::vector<double> x(4000);
    for (std::size_t n = 0; n < x.size(); ++n)
    {
        const double t = static_cast<double>(n) / fs;
        x[n] = std::cos(2.0 * std::numbers::pi * 5e6 * t) * std::cos(2.0 * std::numbers::pi * 50e6 * t);
    }
    const auto s = spectrum(RealWaveform(fs, x), 4000);
    const double df = fs / 4000;
    const double line45 = s.max_in(45e6 - df, 45e6 + df);
    const double line55 = s.max_in(55e6 - df, 55e6 + df);
    CHECK(line45 == doctest::Approx(line55).epsilon(1e-6));
    CHECK(s.max_in(49e6, 51e6) < 1e-6 * line45);
    CHECK(s.max_in(4e6, 6e6) < 1e-6 * line45);
    CHECK(s.max_in(0.0, 100e6) == doctest::Approx(line45));
}

TEST_CASE("add_awgn power, determinism and degenerate input")
{
    const auto z = random_complex(1000000, 9);
    const ComplexEnvelope x(1.0, 0.0, z);
    CHECK(add_awgn(x, no_noise, 1) == x);
    const auto y = add_awgn(x, 10.0, 42);
    double pn = 0.0, px = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
    {
        pn += std::norm(y[i] - z[i]);
        px += std::norm(z[i]);
    }
    CHECK(std::abs(10.0 * std::log10(px / pn) - 10.0) < 0.1);
    CHECK(add_awgn(x, 10.0, 42) == y);
    CHECK_FALSE(add_awgn(x, 10.0, 43) == y);
    CHECK_THROWS_AS(add_awgn(ComplexEnvelope(1.0, 0.0, std::vector<cplx>(10)), 10.0, 1), ParameterError);

    // Circular symmetry: equal I and Q variance, negligible correlation.
    std::vector<double> re(z.size()), im(z.size());
    double cross = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
    {
        const cplx n = y[i] - z[i];
        re[i] = n.real();
        im[i] = n.imag();
        cross += n.real() * n.imag();
    }
    const auto mr = oracle::moments(re), mi = oracle::moments(im);
    CHECK(mr.sd == doctest::Approx(mi.sd).epsilon(0.01));
    CHECK(std::abs(cross / static_cast<double>(z.size())) < 0.01 * mr.sd * mr.sd);
}

TEST_CASE("remove_dc and mean_power")
{
    const ComplexEnvelope x(1.0, 3.0, {cplx(1, 1), cplx(3, 1), cplx(2, 4)});
    const auto y = remove_dc(x);
    CHECK(y.center_frequency() == 3.0);
    cplx m{};
    for (const auto &v : y.samples())
        m += v;
    CHECK(std::abs(m) < 1e-15);
    CHECK(mean_power(std::vector<double>{1.0, -3.0}) == 5.0);
}
