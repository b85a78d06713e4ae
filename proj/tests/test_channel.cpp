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
#include <numbers>

#include "isaclab/channel.hpp"

using namespace isaclab;

namespace {

Geometry random_geometry(Rng &rng)
{
    return Geometry{rng.uniform(-std::numbers::pi, std::numbers::pi),
                    rng.uniform(0.0, 0.5 * std::numbers::pi), rng.uniform(5.0, 500.0)};
}

} // namespace

TEST_CASE("boresight geometry")
{
    const Geometry g = angles_from_positions({0, 0, 0}, {0, 0, 50});
    CHECK(g.elevation_rad == doctest::Approx(0.0));
    CHECK(g.distance_m == doctest::Approx(50.0));
}

TEST_CASE("in-plane 3-4-5 triangle")
{
    const Geometry g = angles_from_positions({0, 0, 0}, {30, 40, 0});
    CHECK(g.azimuth_rad == doctest::Approx(0.92729521800161219).epsilon(1e-12));
    CHECK(g.elevation_rad == doctest::Approx(0.5 * std::numbers::pi).epsilon(1e-12));
    CHECK(g.distance_m == doctest::Approx(50.0));
}

TEST_CASE("distance to the first reference UAV")
{
    // 20^2 + 80^2 + 20^2 = 7200
    const Geometry g = angles_from_positions({0, 0, 0}, {20, 80, 20});
    CHECK(g.distance_m == doctest::Approx(std::sqrt(7200.0)).epsilon(1e-14));
}

TEST_CASE("coincident points are rejected")
{
    CHECK_THROWS_AS(angles_from_positions({1, 2, 3}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("boresight steering vector is flat")
{
    const Eigen::VectorXcd a = steering_vector(Geometry{1.234, 0.0, 10.0}, 8, 8);
    REQUIRE(a.size() == 64);
    for (Eigen::Index i = 0; i < a.size(); ++i)
    {
        CHECK(a(i).real() == doctest::Approx(0.125).epsilon(1e-15));
        CHECK(a(i).imag() == doctest::Approx(0.0));
    }
}

TEST_CASE("2x1 endfire steering vector")
{
    const Eigen::VectorXcd a = steering_vector(Geometry{0.0, 0.5 * std::numbers::pi, 1.0}, 2, 1);
    REQUIRE(a.size() == 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(a(0).real() == doctest::Approx(inv_sqrt2));
    CHECK(a(0).imag() == doctest::Approx(0.0));
    CHECK(a(1).real() == doctest::Approx(-inv_sqrt2)); // e^{-j pi}
    CHECK(std::abs(a(1).imag()) < 1e-15);
}

TEST_CASE("steering vectors have unit norm for 1000 random geometries")
{
    Rng rng(5);
    for (int i = 0; i < 1000; ++i)
    {
        const Eigen::VectorXcd a = steering_vector(random_geometry(rng), 4, 2);
        CHECK(std::abs(a.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("steering vector depends on angles only")
{
    Geometry g{0.7, 0.3, 100.0};
    Geometry far = g;
    far.distance_m = 5000.0;
    CHECK((steering_vector(g, 8, 8) - steering_vector(far, 8, 8)).norm() == 0.0);
}

TEST_CASE("amplitude gain regression value")
{
    // g(100 m, 28 GHz, kappa=1.8), pinned once from scalar arithmetic
    CHECK(amplitude_gain(100.0, 28e9, 1.8) ==
          doctest::Approx(2.1402461926723448e-07).epsilon(1e-14));
}

TEST_CASE("amplitude gain decreases with distance")
{
    Rng rng(11);
    for (int i = 0; i < 200; ++i)
    {
        const double d1 = rng.uniform(1.0, 400.0);
        const double d2 = d1 + rng.uniform(0.5, 100.0);
        CHECK(amplitude_gain(d1, 28e9, 1.8) > amplitude_gain(d2, 28e9, 1.8));
    }
}

TEST_CASE("zero fading gives the zero channel")
{
    const Eigen::VectorXcd h = channel_vector(Geometry{0.2, 0.4, 80.0}, {0.0, 0.0}, 28e9, 1.8,
                                              8, 8);
    CHECK(h.norm() == 0.0);
}

TEST_CASE("channel norm equals |g(d) alpha|")
{
    Rng rng(13);
    for (int i = 0; i < 100; ++i)
    {
        const Geometry g = random_geometry(rng);
        const std::complex<double> alpha = rng.complex_normal_unit();
        const Eigen::VectorXcd h = channel_vector(g, alpha, 28e9, 1.8, 4, 4);
        const double expected = amplitude_gain(g.distance_m, 28e9, 1.8) * std::abs(alpha);
        CHECK(h.norm() == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("realize_channels is deterministic and has reference shapes")
{
    const ScenarioConfig config = reference_scenario();
    Rng r1(21), r2(21);
    const ChannelSet a = realize_channels(config, config.legit_init_positions, r1);
    const ChannelSet b = realize_channels(config, config.legit_init_positions, r2);
    REQUIRE(a.legit.size() == 4);
    REQUIRE(a.eves.size() == 3);
    for (const auto &h : a.legit)
        CHECK(h.size() == 64);
    for (const auto &h : a.eves)
        CHECK(h.size() == 64);
    for (std::size_t l = 0; l < a.legit.size(); ++l)
        CHECK((a.legit[l] - b.legit[l]).norm() == 0.0);
    for (std::size_t e = 0; e < a.eves.size(); ++e)
        CHECK((a.eves[e] - b.eves[e]).norm() == 0.0);
}

TEST_CASE("small-scale fading is CN(0,1) empirically")
{
    const ScenarioConfig config = reference_scenario();
    Rng rng(31);
    double sum2 = 0.0;
    long count = 0;
    // 15000 realizations x 7 links > 1e5 draws of alpha
    for (int i = 0; i < 15000; ++i)
    {
        const ChannelSet set = realize_channels(config, config.legit_init_positions, rng);
        for (const auto &alpha : set.legit_alpha)
        {
            sum2 += std::norm(alpha);
            ++count;
        }
        for (const auto &alpha : set.eve_alpha)
        {
            sum2 += std::norm(alpha);
            ++count;
        }
    }
    REQUIRE(count >= 100000);
    CHECK(std::abs(sum2 / count - 1.0) < 0.02);
}
