// SPDX-License-Identifier: Apache-2.0
//
// uerislink - link-level simulator for UE-mounted RIS assisted MIMO links
// Copyright (C) 2026 The uerislink authors
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

#include "uerislink/container.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

namespace uerislink {

namespace {

constexpr std::array<char, 8> kMagic = {'U', 'E', 'R', 'I', 'S', 'M', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream &os, std::uint32_t v)
{
    const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                       static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    os.write(b, 4);
}

std::uint32_t get_u32(std::istream &is)
{
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char *>(b), 4))
        throw std::runtime_error("matrix container: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream &os, double v) { put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

double get_f32(std::istream &is) { return std::bit_cast<float>(get_u32(is)); }

} // namespace

void write_container(const std::string &path, const std::vector<NamedMatrix> &matrices)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("matrix container: cannot open " + path + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(matrices.size()));
    for (const auto &m : matrices)
    {
        put_u32(os, static_cast<std::uint32_t>(m.name.size()));
        os.write(m.name.data(), static_cast<std::streamsize>(m.name.size()));
        put_u32(os, static_cast<std::uint32_t>(m.value.rows()));
        put_u32(os, static_cast<std::uint32_t>(m.value.cols()));
        for (Eigen::Index r = 0; r < m.value.rows(); ++r)
            for (Eigen::Index c = 0; c < m.value.cols(); ++c)
            {
                put_f32(os, m.value(r, c).real());
                put_f32(os, m.value(r, c).imag());
            }
    }
    if (!os)
        throw std::runtime_error("matrix container: write failed for " + path);
}

std::vector<NamedMatrix> read_container(const std::string &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("matrix container: cannot open " + path);
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic)
        throw std::runtime_error("matrix container: bad magic in " + path);
    if (get_u32(is) != kVersion)
        throw std::runtime_error("matrix container: unsupported version");
    const std::uint32_t count = get_u32(is);
    std::vector<NamedMatrix> out;
    for (std::uint32_t k = 0; k < count; ++k)
    {
        NamedMatrix m;
        m.name.resize(get_u32(is));
        if (!is.read(m.name.data(), static_cast<std::streamsize>(m.name.size())))
            throw std::runtime_error("matrix container: truncated name");
        const std::uint32_t rows = get_u32(is);
        const std::uint32_t cols = get_u32(is);
        m.value.resize(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c)
            {
                const double re = get_f32(is);
                const double im = get_f32(is);
                m.value(r, c) = {re, im};
            }
        out.push_back(std::move(m));
    }
    return out;
}

void export_channels(const std::string &path, const ChannelSet &channels)
{
    std::vector<NamedMatrix> mats;
    mats.push_back({"H_d", channels.h_direct});
    for (int i = 0; i < channels.n_ues(); ++i)
    {
        mats.push_back({"G/" + std::to_string(i), channels.g_list[static_cast<std::size_t>(i)]});
        mats.push_back({"Q/" + std::to_string(i), channels.q_list[static_cast<std::size_t>(i)]});
    }
    write_container(path, mats);
}

ChannelSet import_channels(const std::string &path)
{
    std::map<int, CMat> g, q;
    ChannelSet ch;
    bool have_direct = false;
    for (auto &m : read_container(path))
    {
        if (m.name == "H_d")
        {
            ch.h_direct = std::move(m.value);
            have_direct = true;
        }
        else if (m.name.rfind("G/", 0) == 0)
            g[std::stoi(m.name.substr(2))] = std::move(m.value);
        else if (m.name.rfind("Q/", 0) == 0)
            q[std::stoi(m.name.substr(2))] = std::move(m.value);
        else
            throw std::runtime_error("channel container: unexpected matrix '" + m.name + "'");
    }
    if (!have_direct || g.size() != q.size())
        throw std::runtime_error("channel container: incomplete channel set in " + path);
    for (int i = 0; i < static_cast<int>(g.size()); ++i)
    {
        if (!g.count(i) || !q.count(i))
            throw std::runtime_error("channel container: missing UE " + std::to_string(i));
        ch.g_list.push_back(std::move(g[i]));
        ch.q_list.push_back(std::move(q[i]));
    }
    ch.check();
    return ch;
}

} // namespace uerislink
