/*
 Copyright 2026 The sofpg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SOFPG_RANDOM_HPP
#define SOFPG_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sofpg {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a parent seed and a tuple of
/// counters, e.g. derive_seed(run_seed, {k, j, tag}). The mapping depends
/// only on the values, never on call order.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(parent);
    for (std::uint64_t v : path) h = mix64(h ^ mix64(v + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t stream_seed) { return Engine(stream_seed); }

// Stream tags. Each consumer of randomness owns one so that no two draws
// share a stream.
namespace stream {
inline constexpr std::uint64_t kPerturbation = 1;
inline constexpr std::uint64_t kInitialState = 2;
inline constexpr std::uint64_t kGradient = 3;
inline constexpr std::uint64_t kCost = 4;
inline constexpr std::uint64_t kNu0 = 5;
}  // namespace stream

}  // namespace sofpg

#endif  // SOFPG_RANDOM_HPP
