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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace spdefem {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A draw is a pure function of (key, counter): any sample stream can be
/// regenerated or skipped to without replaying earlier draws.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::string_view kAlgorithm = "philox4x32-10";

  static Counter block(Counter ctr, Key key);
};

/// Standard normal draws keyed by (seed, stream). Draw i of a stream depends
/// only on (seed, stream, i).
class NormalStream {
 public:
  /// Identifier written into sample metadata.
  static constexpr std::string_view kGeneratorId = "philox4x32-10/box-muller";

  NormalStream(std::uint64_t seed, std::uint64_t stream);

  /// Returns normal number `index` of this stream.
  double at(std::uint64_t index) const;

  /// Writes draws 0 .. out.size()-1 of this stream; same values as at().
  void fill(std::span<double> out) const;

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
};

/// Maps two 32-bit words to a double in (0, 1].
double uniform_open_closed(std::uint32_t hi, std::uint32_t lo);

}  // namespace spdefem
