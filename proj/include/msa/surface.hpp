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

// Metasurface model: per-unit reflection coefficient with a fast-time
// magnitude and a slow-time 1-bit phase, diode mixer small-signal model,
// steering vectors, reflected field and radiation patterns.
//
// Coordinates are surface-local: elements lie in the z = 0 plane, broadside
// is +z. Direction vectors point away from the surface (towards the source
// for the incident wave, towards the observer for the reflected wave).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msa/sigcore.hpp"

namespace msa::surface
{

inline constexpr double speed_of_light = 299792458.0;

using Vec3 = std::array<double, 3>;

struct ArrayGeometry
{
    int nx = 16;
    int ny = 10;
    double pitch = 0.018; // m
    double f_rf = 5.8e9;  // Hz

    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    double wavelength() const { return speed_of_light / f_rf; }
    // Element n = iy*nx + ix sits at (ix*pitch, iy*pitch, 0).
    Vec3 position(std::size_t n) const;

    static ArrayGeometry prototype();
};

class PlaneWave
{
public:
    PlaneWave(Vec3 direction, double frequency);

    // azimuth: angle from broadside in the x-z plane (positive towards +x);
    // elevation: tilt towards +y.
    static PlaneWave from_angles(double azimuth_deg, double elevation_deg, double frequency);

    const Vec3 &direction() const noexcept { return direction_; }
    double frequency() const noexcept { return frequency_; }
    double wavenumber() const;

private:
    Vec3 direction_;
    double frequency_;
};

// 1-bit phase state per unit plus the two phase constants.
class Codebook
{
public:
    Codebook(std::vector<std::uint8_t> states, std::array<double, 2> phase_rad);

    static Codebook uniform(std::size_t n, std::uint8_t state, std::array<double, 2> phase_rad);

    const std::vector<std::uint8_t> &states() const noexcept { return states_; }
    const std::array<double, 2> &phases() const noexcept { return phase_; }
    std::size_t size() const noexcept { return states_.size(); }
    std::uint8_t state(std::size_t n) const { return states_[n]; }
    cplx weight(std::size_t n) const;
    Codebook flipped(std::size_t n) const;

    friend bool operator==(const Codebook &, const Codebook &) = default;

private:
    std::vector<std::uint8_t> states_;
    std::array<double, 2> phase_;
};

// Monotone piecewise-linear voltage -> |Gamma| map.
class MagnitudeCurve
{
public:
    explicit MagnitudeCurve(std::vector<std::pair<double, double>> anchors);

    double v_min() const { return anchors_.front().first; }
    double v_max() const { return anchors_.back().first; }
    // Clamps to [v_min, v_max].
    double operator()(double v) const;
    // Smallest voltage whose magnitude equals m (clamped to the range).
    double inverse(double m) const;
    double min_magnitude() const;
    double max_magnitude() const;
    // Extent of the linear segment that contains v.
    std::pair<double, double> segment(double v) const;
    const std::vector<std::pair<double, double>> &anchors() const { return anchors_; }

private:
    std::vector<std::pair<double, double>> anchors_;
    bool increasing_ = true;
};

struct UnitReflectionModel
{
    std::array<MagnitudeCurve, 2> magnitude;
    std::array<double, 2> phase_rad;

    void validate() const;
    double v_min() const;
    double v_max() const;
    // Largest interval around v on which both state curves are affine.
    std::pair<double, double> linear_subrange(double v) const;

    // Bias sweep 0.63 -> 0.79 V of the prototype unit maps
    // state 0 to 0.3 -> 1.0 and state 1 to 0.1 -> 0.7.
    static UnitReflectionModel operating_preset();
    // Widest magnitude ranges: state 0 0.2 -> 1.0, state 1 0.1 -> 0.8 over
    // the same voltage range.
    static UnitReflectionModel wide_preset();
    // CSV columns: volts, mag_state0, mag_state1, phase0_deg, phase1_deg.
    static UnitReflectionModel from_csv(const std::string &text);
};

struct Reflection
{
    cplx gamma;
    bool clipped = false;
};

Reflection reflection_coefficient(double v, int state, const UnitReflectionModel &model);

// How one IF drive reaches the two diode groups.
//   shared:    both groups see the same voltage.
//   equalized: the state-1 port is predistorted so that
//              m1(v1) = kappa * m0(v), kappa = m1_max / m0_max, which keeps
//              the two groups' magnitudes proportional at every instant.
enum class DrivePolicy
{
    shared,
    equalized
};

// Voltage seen by group `state` when the surface is driven with v.
double group_voltage(double v, int state, const UnitReflectionModel &model, DrivePolicy policy);

// Per-unit phase deviation of the "measured" surface: unit n in its state
// adds offset[n] + slope[n] * (u - 0.5), u the group voltage normalised to
// [0, 1] over the model range.
struct PhaseJitter
{
    std::vector<double> offset_rad;
    std::vector<double> slope_rad;

    double deviation(std::size_t n, double u) const { return offset_rad[n] + slope_rad[n] * (u - 0.5); }
};

// |deviation| <= max_deg and its swing across the voltage range <= max_deg.
PhaseJitter make_phase_jitter(std::size_t units, double max_deg, std::uint64_t seed);

// Fast-time modulation factors for one drive frame.
struct ModulationFactors
{
    double sample_rate = 1.0;
    std::array<std::vector<double>, 2> group;         // |Gamma| of a unit in each state
    std::array<std::vector<double>, 2> group_voltage; // voltage at each group port
    std::array<std::size_t, 2> count{};               // units per state
    std::vector<double> sum;                          // gamma_sum(tau)
    std::vector<std::uint8_t> unit_state;
    std::pair<double, double> voltage_range{0.0, 1.0};
    bool clipped = false;

    std::size_t length() const { return sum.size(); }
    ComplexEnvelope sum_envelope() const;
    ComplexEnvelope group_envelope(int state) const;
};

ModulationFactors gamma_sum(const RealWaveform &v_if, const Codebook &codebook, const UnitReflectionModel &model,
                            DrivePolicy policy = DrivePolicy::equalized);
// Explicit per-port drives (port 0 feeds state-0 units, port 1 state-1 units).
ModulationFactors gamma_sum(const RealWaveform &v_state0, const RealWaveform &v_state1, const Codebook &codebook,
                            const UnitReflectionModel &model);

// v_n = exp(-j k (u_i + u_r) . r_n)
std::vector<cplx> steering_vector(const ArrayGeometry &geom, const PlaneWave &k_r, const PlaneWave &k_i);

enum class FieldMode
{
    // gamma_sum(tau) times the magnitude-weighted array factor.
    factored,
    // sum_n gamma_n(tau) e^{j theta_n} v_n evaluated unit by unit.
    direct
};

struct FieldResult
{
    ComplexEnvelope field;
    // max over tau of |direct - factored| / |factored|.
    double factorization_residual = 0.0;
};

// Carrier-only incidence with unit envelope; the returned envelope is
// referenced to geom.f_rf. jitter (optional) applies only to the direct sum.
FieldResult reflected_field(const ModulationFactors &factors, const Codebook &codebook, const ArrayGeometry &geom,
                            const PlaneWave &k_r, const PlaneWave &k_i, FieldMode mode = FieldMode::direct,
                            const PhaseJitter *jitter = nullptr);

struct Pattern
{
    std::vector<double> angle_deg;
    std::vector<double> power; // |F|^2, linear
    double peak() const;
    std::size_t peak_index() const;
    std::vector<double> normalized() const;
};

// |sum_n m_{s(n)}(bias) e^{j theta_n} v_n(angle)|^2 over azimuth cuts.
Pattern radiation_pattern(const Codebook &codebook, const ArrayGeometry &geom, const UnitReflectionModel &model,
                          const PlaneWave &k_i, double bias_v, std::span<const double> angle_deg,
                          DrivePolicy policy = DrivePolicy::equalized);

// Exponential junction: i = I_s (e^{alpha v} - 1), expanded about v0.
struct DiodeModel
{
    double saturation_current = 1e-12; // A
    double alpha = 20.0;               // 1/V
    double v0 = 0.7;                   // V

    void validate() const;
    double current(double v) const;
    double bias_current() const { return current(v0); }
    // 1 / (di/dv) at v0.
    double rd() const;
    // 1 / (d2i/dv2) at v0.
    double rd_prime() const;

    // Exponential that sweeps the dynamic resistance from r_at_lo (at v_lo)
    // to r_at_hi (at v_hi).
    static DiodeModel from_resistance_sweep(double r_at_lo, double r_at_hi, double v_lo, double v_hi, double v0);
    // 1001 -> 1 ohm and 46 -> 1 ohm over 0.63 -> 0.79 V, operated at 0.71 V.
    static DiodeModel state0_preset();
    static DiodeModel state1_preset();
};

enum class MixerMode
{
    // (v_rf + v_if) / R_d + (v_rf + v_if)^2 / (2 R_d')
    taylor,
    // v_rf v_if / R_d'
    cross_term,
    // i(v0 + v) - I_0 - v / R_d
    exact
};

RealWaveform mixer_ac_current(const RealWaveform &v_rf, const RealWaveform &v_if, const DiodeModel &diode,
                              MixerMode mode = MixerMode::taylor);

} // namespace msa::surface
