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

#include "spdefem/random.hpp"

#include <cmath>
#include <numbers>

namespace spdefem {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, ctr[0], hi0, lo0);
    mulhilo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

double uniform_open_closed(std::uint32_t hi, std::uint32_t lo) {
  // 53 random bits; k in [0, 2^53) maps to (k + 1) / 2^53.
  const std::uint64_t k = (static_cast<std::uint64_t>(hi >> 5) << 26) | (lo >> 6);
  return (static_cast<double>(k) + 1.0) * 0x1.0p-53;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

namespace {

// One Philox block yields two uniforms and hence a Box-Muller pair.
std::array<double, 2> normal_pair(const Philox4x32::Key& key, std::uint64_t stream, std::uint64_t pair) {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32),
                                   static_cast<std::uint32_t>(stream),
                                   static_cast<std::uint32_t>(stream >> 32)};
  const auto r = Philox4x32::block(ctr, key);
  const double u1 = uniform_open_closed(r[0], r[1]);
  const double u2 = uniform_open_closed(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace

double NormalStream::at(std::uint64_t index) const {
  return normal_pair(key_, stream_, index / 2)[index % 2];
}

void NormalStream::fill(std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const auto z = normal_pair(key_, stream_, i / 2);
    out[i] = z[0];
    if (i + 1 < out.size()) out[i + 1] = z[1];
  }
}

}  // namespace spdefem
