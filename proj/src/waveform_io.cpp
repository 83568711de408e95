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

#include "msa/waveform_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "msa/error.hpp"

namespace msa::io
{

namespace
{

constexpr char magic[4] = {'M', 'S', 'A', 'W'};
constexpr std::uint16_t kind_real = 0;
constexpr std::uint16_t kind_complex = 1;

template <typename T>
void put_le(std::vector<std::uint8_t> &out, T value)
{
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    const auto bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
}

class Reader
{
public:
    explicit Reader(const std::vector<std::uint8_t> &bytes) : bytes_(bytes) {}

    template <typename T>
    T get()
    {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
        if (pos_ + sizeof(T) > bytes_.size())
            throw FormatError("waveform binary: truncated");
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bits |= static_cast<U>(bytes_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return std::bit_cast<T>(bits);
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    const std::vector<std::uint8_t> &bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> header(std::uint16_t kind, double sample_rate)
{
    std::vector<std::uint8_t> out(magic, magic + 4);
    put_le(out, waveform_format_version);
    put_le(out, kind);
    put_le(out, sample_rate);
    return out;
}

double check_header(const std::vector<std::uint8_t> &bytes, Reader &r, std::uint16_t expected_kind)
{
    if (bytes.size() < 16 || std::memcmp(bytes.data(), magic, 4) != 0)
        throw FormatError("waveform binary: bad magic");
    (void)r.get<std::uint32_t>();
    const auto version = r.get<std::uint16_t>();
    if (version != waveform_format_version)
        throw FormatError("waveform binary: unsupported version " + std::to_string(version));
    const auto kind = r.get<std::uint16_t>();
    if (kind != expected_kind)
        throw FormatError("waveform binary: wrong kind");
    return r.get<double>();
}

std::vector<std::string> split(const std::string &line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line)
    {
        if (c == sep)
        {
            out.push_back(cur);
            cur.clear();
        }
        else if (c != '\r')
            cur.push_back(c);
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string &s)
{
    double v = 0.0;
    const char *b = s.data();
    const char *e = s.data() + s.size();
    while (b < e && *b == ' ')
        ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p == b)
        throw FormatError("csv: cannot parse number '" + s + "'");
    return v;
}

// "# sample_rate=2e7 center_frequency=5.8e9" -> values by key
double comment_value(const std::string &line, const std::string &key)
{
    const auto pos = line.find(key + "=");
    if (pos == std::string::npos)
        throw FormatError("csv: missing " + key + " in header comment");
    const auto start = pos + key.size() + 1;
    const auto end = line.find(' ', start);
    return parse_double(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
}

struct CsvBody
{
    std::string comment;
    std::vector<std::vector<std::string>> rows;
};

CsvBody parse_csv(const std::string &text)
{
    CsvBody body;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            body.comment = line;
            continue;
        }
        if (!header_seen)
        {
            header_seen = true;
            continue;
        }
        body.rows.push_back(split(line, ','));
    }
    if (body.comment.empty())
        throw FormatError("csv: missing '# sample_rate=' comment line");
    return body;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw FormatError("format_double failed");
    return std::string(buf, p);
}

std::vector<std::uint8_t> encode_binary(const RealWaveform &x)
{
    auto out = header(kind_real, x.sample_rate());
    put_le(out, static_cast<std::uint64_t>(x.size()));
    for (double v : x.samples())
        put_le(out, v);
    return out;
}

std::vector<std::uint8_t> encode_binary(const ComplexEnvelope &x)
{
    auto out = header(kind_complex, x.sample_rate());
    put_le(out, x.center_frequency());
    put_le(out, static_cast<std::uint64_t>(x.size()));
    for (const auto &v : x.samples())
    {
        put_le(out, v.real());
        put_le(out, v.imag());
    }
    return out;
}

RealWaveform decode_real_binary(const std::vector<std::uint8_t> &bytes)
{
    Reader r(bytes);
    const double fs = check_header(bytes, r, kind_real);
    const auto n = r.get<std::uint64_t>();
    if (r.remaining() != n * 8)
        throw FormatError("waveform binary: payload size mismatch");
    std::vector<double> s(n);
    for (auto &v : s)
        v = r.get<double>();
    return {fs, std::move(s)};
}

ComplexEnvelope decode_complex_binary(const std::vector<std::uint8_t> &bytes)
{
    Reader r(bytes);
    const double fs = check_header(bytes, r, kind_complex);
    const double fc = r.get<double>();
    const auto n = r.get<std::uint64_t>();
    if (r.remaining() != n * 16)
        throw FormatError("waveform binary: payload size mismatch");
    std::vector<cplx> s(n);
    for (auto &v : s)
    {
        const double re = r.get<double>();
        const double im = r.get<double>();
        v = {re, im};
    }
    return {fs, fc, std::move(s)};
}

std::string encode_csv(const RealWaveform &x)
{
    std::string out = "# sample_rate=" + format_double(x.sample_rate()) + "\nindex,value\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out += std::to_string(i) + "," + format_double(x[i]) + "\n";
    return out;
}

std::string encode_csv(const ComplexEnvelope &x)
{
    std::string out = "# sample_rate=" + format_double(x.sample_rate()) +
                      " center_frequency=" + format_double(x.center_frequency()) + "\nindex,re,im\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out += std::to_string(i) + "," + format_double(x[i].real()) + "," + format_double(x[i].imag()) + "\n";
    return out;
}

RealWaveform decode_real_csv(const std::string &text)
{
    const auto body = parse_csv(text);
    const double fs = comment_value(body.comment, "sample_rate");
    std::vector<double> s;
    s.reserve(body.rows.size());
    for (const auto &row : body.rows)
    {
        if (row.size() != 2)
            throw FormatError("csv: expected 2 columns (index,value)");
        s.push_back(parse_double(row[1]));
    }
    return {fs, std::move(s)};
}

ComplexEnvelope decode_complex_csv(const std::string &text)
{
    const auto body = parse_csv(text);
    const double fs = comment_value(body.comment, "sample_rate");
    const double fc = comment_value(body.comment, "center_frequency");
    std::vector<cplx> s;
    s.reserve(body.rows.size());
    for (const auto &row : body.rows)
    {
        if (row.size() != 3)
            throw FormatError("csv: expected 3 columns (index,re,im)");
        s.emplace_back(parse_double(row[1]), parse_double(row[2]));
    }
    return {fs, fc, std::move(s)};
}

std::string read_text(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path)
{
    const auto text = read_text(path);
    return {text.begin(), text.end()};
}

void write_atomic(const std::filesystem::path &path, const std::string &contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw FormatError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out)
            throw FormatError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_atomic(const std::filesystem::path &path, const std::vector<std::uint8_t> &contents)
{
    write_atomic(path, std::string(contents.begin(), contents.end()));
}

} // namespace msa::io
