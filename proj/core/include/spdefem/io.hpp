/* Copyright 2026 The spdefem Authors
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

#pragma once

#include <string>
#include <string_view>

namespace spdefem {

/// Shortest-free fixed form: 17 significant digits, enough to round-trip any
/// double through strtod.
std::string format_double(double v);

/// Reads a whole file. Throws Error naming the path on failure.
std::string read_text_file(const std::string& path);

/// Writes `contents` to `path` via a temporary sibling file and rename(), so
/// readers never observe a partially written file.
void write_file_atomic(const std::string& path, std::string_view contents);

/// Parses a full string as a double / unsigned integer; throws ParseError on
/// trailing garbage or overflow.
double parse_double(std::string_view token, std::size_t line = 0);
std::size_t parse_index(std::string_view token, std::size_t line = 0);

}  // namespace spdefem
