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

#include <cstring>
#include <filesystem>
#include <limits>

#include "msa/error.hpp"
#include "msa/waveform_io.hpp"

using namespace msa;

TEST_CASE("binary header layout")
{
    const auto b = io::encode_binary(RealWaveform(20e6, {1.0, -2.5}));
    REQUIRE(b.size() == 16 + 8 + 2 * 8);
    CHECK(std::memcmp(b.data(), "MSAW", 4) == 0);
    CHECK(b[4] == 1);
    CHECK(b[5] == 0);
    CHECK(b[6] == 0); // real
    double fs = 0.0;
    std::memcpy(&fs, b.data() + 8, 8);
    CHECK(fs == 20e6);
    const auto c = io::encode_binary(ComplexEnvelope(1.0, 5.8e9, {cplx(1, 2)}));
    CHECK(c[6] == 1);
    CHECK(c.size() == 16 + 8 + 8 + 16);
}

TEST_CASE("binary round trip is bit exact")
{
    const std::vector<double> r{0.1, -1e-300, 1e300, std::numeric_limits<double>::denorm_min(), -0.0, 3.0};
    const RealWaveform x(123.456, r);
    const auto y = io::decode_real_binary(io::encode_binary(x));
    REQUIRE(y.size() == x.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(std::memcmp(&x.samples()[i], &y.samples()[i], 8) == 0);
    CHECK(y.sample_rate() == x.sample_rate());

    const ComplexEnvelope z(2e7, 5.8e9, {cplx(0.1, 0.2), cplx(-1 / 3.0, 1e-17)});
    CHECK(io::decode_complex_binary(io::encode_binary(z)) == z);
}

TEST_CASE("binary decoding rejects malformed input")
{
    auto b = io::encode_binary(RealWaveform(1.0, {1.0, 2.0}));
    CHECK_THROWS_AS(io::decode_complex_binary(b), FormatError);
    auto trunc = b;
    trunc.pop_back();
    CHECK_THROWS_AS(io::decode_real_binary(trunc), FormatError);
    auto bad = b;
    bad[0] = 'X';
    CHECK_THROWS_AS(io::decode_real_binary(bad), FormatError);
    auto ver = b;
    ver[4] = 9;
    CHECK_THROWS_AS(io::decode_real_binary(ver), FormatError);
    CHECK_THROWS_AS(io::decode_real_binary({}), FormatError);
}

TEST_CASE("csv round trip is exact")
{
    const RealWaveform x(20e6, {0.1, 1.0 / 3.0, -7e-12});
    CHECK(io::decode_real_csv(io::encode_csv(x)) == x);
    const ComplexEnvelope z(20e6, 5.8e9, {cplx(0.1, -0.7), cplx(1e-300, 2.0 / 3.0)});
    CHECK(io::decode_complex_csv(io::encode_csv(z)) == z);
    CHECK_THROWS_AS(io::decode_real_csv("index,value\n0,1\n"), FormatError);
    CHECK_THROWS_AS(io::decode_real_csv("# sample_rate=1\nindex,value\n0,abc\n"), FormatError);
    CHECK_THROWS_AS(io::decode_complex_csv("# sample_rate=1\nindex,re,im\n0,1,2\n"), FormatError);
}

TEST_CASE("format_double is shortest round trip")
{
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(20e6) == "2e+07");
    CHECK(io::format_double(-0.25) == "-0.25");
    const double v = 0.1 + 0.2;
    CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("write_atomic replaces the target and leaves no temporary")
{
    const auto dir = std::filesystem::temp_directory_path() / "msa_io_test";
    std::filesystem::create_directories(dir);
    const auto p = dir / "a.txt";
    io::write_atomic(p, std::string("one"));
    io::write_atomic(p, std::string("two"));
    CHECK(io::read_text(p) == "two");
    CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
    CHECK_THROWS_AS(io::read_text(dir / "missing"), FormatError);
    std::filesystem::remove_all(dir);
}
