// SPDX-License-Identifier: Apache-2.0
//
// isaclab - secure multi-UAV ISAC beamforming laboratory
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef ISACLAB_RNG_HPP
#define ISACLAB_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>

namespace isaclab {

// Purpose tags for deriving independent sub-streams from one master seed.
// Stream seed = splitmix64 chain over (master, purpose, index), see derive_stream_seed.
enum class StreamPurpose : std::uint64_t {
    kChannelFading = 1,
    kPolicySampling = 2,
    kParamInit = 3,
    kDecompose = 4,
    kBaseline = 5,
    kShuffle = 6,
    kEval = 7,
};

// SplitMix64 finalizer (Steele et al.), used both for seeding and stream splitting.
std::uint64_t splitmix64_next(std::uint64_t &state);

// Documented splitting rule: two SplitMix64 steps fold purpose and index into
// the master seed so that (master, purpose, index) triples map to distinct,
// well-mixed stream seeds.
std::uint64_t derive_stream_seed(std::uint64_t master, StreamPurpose purpose,
                                 std::uint64_t index = 0);

// xoshiro256++ with SplitMix64 state expansion. Deterministic and portable;
// every stochastic component in the library draws through an explicit Rng so
// runs are reproducible from the scenario seed alone.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    static Rng derive(std::uint64_t master, StreamPurpose purpose, std::uint64_t index = 0)
    {
        return Rng(derive_stream_seed(master, purpose, index));
    }

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    double uniform(double lo, double hi);

    // Standard normal via the Marsaglia polar method (one spare cached).
    double normal();

    // CN(0,1): real and imaginary parts independent N(0, 1/2).
    std::complex<double> complex_normal_unit();

  private:
    std::array<std::uint64_t, 4> state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace isaclab

#endif // ISACLAB_RNG_HPP
