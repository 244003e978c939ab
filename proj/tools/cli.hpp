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

#include <iosfwd>
#include <string>
#include <vector>

namespace spdefem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

/// Largest FEM-vs-Matérn correlation error accepted by `validate` when the
/// mesh satisfies both rules of thumb.
inline constexpr double kMaternTolerance = 0.05;

/// Runs one `spdefem` invocation. args[0] is the program name. Summary lines
/// go to `out`, diagnostics to `err`. Returns 0 on success, 1 on usage or
/// input errors, 2 on numeric or validation failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spdefem::cli
