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

#include "msa/fft.hpp"

#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "msa/error.hpp"

namespace msa
{

namespace
{
// fftw planning is not thread safe, execution is.
std::mutex &plan_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

struct FftPlan::Impl
{
    fftw_complex *in = nullptr;
    fftw_complex *out = nullptr;
    fftw_plan plan = nullptr;

    ~Impl()
    {
        std::lock_guard lock(plan_mutex());
        if (plan)
            fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
};

FftPlan::FftPlan(std::size_t n, Direction direction) : n_(n), direction_(direction), impl_(std::make_unique<Impl>())
{
    if (n == 0)
        throw ParameterError("FftPlan: size must be positive");
    std::lock_guard lock(plan_mutex());
    impl_->in = fftw_alloc_complex(n);
    impl_->out = fftw_alloc_complex(n);
    // FFTW_ESTIMATE keeps the algorithm choice independent of timing runs,
    // which keeps results bit-reproducible between processes.
    impl_->plan = fftw_plan_dft_1d(static_cast<int>(n), impl_->in, impl_->out,
                                   direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan &&) noexcept = default;
FftPlan &FftPlan::operator=(FftPlan &&) noexcept = default;

void FftPlan::execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const
{
    if (in.size() != n_ || out.size() != n_)
        throw ParameterError("FftPlan::execute: buffer size mismatch");
    std::memcpy(impl_->in, in.data(), n_ * sizeof(fftw_complex));
    fftw_execute(impl_->plan);
    std::memcpy(static_cast<void *>(out.data()), impl_->out, n_ * sizeof(fftw_complex));
    if (direction_ == Direction::inverse)
    {
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto &v : out)
            v *= scale;
    }
}

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x)
{
    std::vector<std::complex<double>> out(x.size());
    FftPlan(x.size(), FftPlan::Direction::forward).execute(x, out);
    return out;
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x)
{
    std::vector<std::complex<double>> out(x.size());
    FftPlan(x.size(), FftPlan::Direction::inverse).execute(x, out);
    return out;
}

} // namespace msa
