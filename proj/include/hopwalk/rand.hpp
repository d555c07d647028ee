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

namespace hopwalk {

// Seeded PRNG with bit-identical output on every platform. The standard
// distributions are implementation-defined, so bounded draws are done here
// with a fixed-point multiply instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix_scramble(state_);
  }

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t uniform_index(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Independent stream seed for (base, a, b), e.g. one stream per
  // (start node, iteration) pair.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t a,
                              std::uint64_t b = 0) {
    return mix(base ^ mix(a ^ 0x6a09e667f3bcc908ULL) ^
               mix(b ^ 0xbb67ae8584caa73bULL));
  }

 private:
  static std::uint64_t mix_scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t z) {
    return mix_scramble(z + 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t state_;
};

}  // namespace hopwalk
