// Copyright 2026 The scenesynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENESYNTH_RANDOM_H_
#define SCENESYNTH_RANDOM_H_

#include <cstdint>
#include <random>

namespace scenesynth {

using Rng = std::mt19937_64;

// Independent, reproducible stream for (seed, stream). Used to give every
// candidate layout and every rendered sample its own generator so results
// do not depend on evaluation order or thread count.
inline Rng make_stream(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(stream >> 32), 0x5ce7e5u};
  return Rng(seq);
}

}  // namespace scenesynth

#endif  // SCENESYNTH_RANDOM_H_
