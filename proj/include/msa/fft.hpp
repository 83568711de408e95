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

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace msa
{

// Reusable complex DFT of a fixed size. Forward is unnormalised; inverse
// divides by n so that inverse(forward(x)) == x.
class FftPlan
{
public:
    enum class Direction
    {
        forward,
        inverse
    };

    FftPlan(std::size_t n, Direction direction);
    ~FftPlan();
    FftPlan(FftPlan &&) noexcept;
    FftPlan &operator=(FftPlan &&) noexcept;
    FftPlan(const FftPlan &) = delete;
    FftPlan &operator=(const FftPlan &) = delete;

    std::size_t size() const noexcept { return n_; }

    // in.size() and out.size() must equal size(); in and out may alias.
    void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

private:
    struct Impl;
    std::size_t n_;
    Direction direction_;
    std::unique_ptr<Impl> impl_;
};

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x);

} // namespace msa
