/*
 * Copyright 2026 The capiroles Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Small text helpers shared by the artifact readers and writers.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace capiroles {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

double parse_double(std::string_view token, std::size_t line = 0);
unsigned long long parse_uint(std::string_view token, std::size_t line = 0);

/// Percentage at two decimals with a "<0.01%" sentinel for tiny non-zero
/// values, e.g. 12.144 -> "12.14%".
std::string format_percent(double pct);

std::vector<std::string_view> split_whitespace(std::string_view line);

/// Quotes a CSV field only when it contains a separator, quote or newline.
std::string csv_field(std::string_view value);
/// Parses one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no = 0);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a
/// half-written artifact.
void write_file(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace capiroles
