// Copyright 2026 The hopwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hopwalk {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

std::vector<std::string_view> split(std::string_view s, char sep);

// Locale-independent float formatting (always '.'), round-trippable at the
// file-format tolerances.
std::string fmt_double(double v, int significant_digits = 9);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex16(std::uint64_t v);

// Reads a text file, returning data lines with their 1-based line numbers.
// Lines beginning with '#' and blank lines are skipped.
std::vector<std::pair<std::size_t, std::string>> read_data_lines(
    const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);

}  // namespace hopwalk
