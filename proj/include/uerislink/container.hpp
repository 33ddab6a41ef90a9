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

#ifndef UERISLINK_CONTAINER_HPP
#define UERISLINK_CONTAINER_HPP

#include "uerislink/channel.hpp"

#include <string>
#include <vector>

namespace uerislink {

// Self-describing binary matrix container, all integers little-endian:
//
//   "UERISMAT"                      8-byte magic
//   u32 version (1), u32 count
//   count x { u32 name_len, name bytes, u32 rows, u32 cols,
//             rows*cols x (f32 re, f32 im) row-major }
//
// Channel sets use the names "H_d", "G/<i>" and "Q/<i>"; transceivers use
// "F_A", "F_D", "W_A_H" and "W_D_H".
struct NamedMatrix
{
    std::string name;
    CMat value;
};

void write_container(const std::string &path, const std::vector<NamedMatrix> &matrices);
std::vector<NamedMatrix> read_container(const std::string &path);

void export_channels(const std::string &path, const ChannelSet &channels);
ChannelSet import_channels(const std::string &path);

} // namespace uerislink

#endif
