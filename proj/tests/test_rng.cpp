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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "isaclab/rng.hpp"

using namespace isaclab;

TEST_CASE("streams are deterministic per seed")
{
    Rng a(42), b(42), c(43);
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 100; ++i)
    {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("derived stream seeds separate purposes and indices")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t master : {0ull, 1ull, 42ull})
        for (auto purpose : {StreamPurpose::kChannelFading, StreamPurpose::kPolicySampling,
                             StreamPurpose::kParamInit})
            for (std::uint64_t index = 0; index < 4; ++index)
                seen.insert(derive_stream_seed(master, purpose, index));
    CHECK(seen.size() == 3 * 3 * 4); // no collisions across the grid
}

TEST_CASE("uniform01 stays in [0,1)")
{
    Rng rng(7);
    for (int i = 0; i < 10000; ++i)
    {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal moments")
{
    Rng rng(1234);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("complex normal has unit total variance split over parts")
{
    Rng rng(99);
    const int n = 100000;
    double re2 = 0.0, im2 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto z = rng.complex_normal_unit();
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
    }
    CHECK(std::abs(re2 / n - 0.5) < 0.01);
    CHECK(std::abs(im2 / n - 0.5) < 0.01);
}
