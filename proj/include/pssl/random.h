// Copyright 2026 The PSSL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PSSL_RANDOM_H_
#define PSSL_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>

#include "pssl/errors.h"

namespace pssl {

// SplitMix64 output function. Used as a bijective mixer when deriving
// independent stream seeds from a root seed plus a counter.
inline std::uint64_t SplitMix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives the seed for substream `index` of the stream rooted at `root`.
// Every concurrent trial and every internal stage of a mechanism draws its
// randomness from a seed produced here, so runs are reproducible regardless
// of scheduling order.
inline std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t index) {
  return SplitMix64(root ^ SplitMix64(index));
}

// Seeded random generator with explicitly specified sampling routines.
// Standard-library distribution objects are avoided on purpose: their output
// is implementation-defined, and reports are required to be reproducible
// bit-for-bit from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Independent generator for the labeled substream. Does not consume any
  // state from this generator.
  Rng Child(std::uint64_t label) const { return Rng(DeriveSeed(seed_, label)); }

  std::uint64_t Next() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double NextDouble() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound) without modulo bias (Lemire's method).
  std::uint64_t NextBelow(std::uint64_t bound) {
    if (bound == 0) throw InvalidInputError("NextBelow: bound must be positive");
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      unsigned __int128 product =
          static_cast<unsigned __int128>(Next()) * bound;
      if (static_cast<std::uint64_t>(product) >= threshold) {
        return static_cast<std::uint64_t>(product >> 64);
      }
    }
  }

  bool NextBernoulli(double p) { return NextDouble() < p; }

  // Standard Gumbel variate; adding these to logits and taking the argmax
  // samples the softmax distribution exactly.
  double NextGumbel() {
    double u;
    do {
      u = NextDouble();
    } while (u == 0.0);
    return -std::log(-std::log(u));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace pssl

#endif  // PSSL_RANDOM_H_
