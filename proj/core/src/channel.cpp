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

#include "isaclab/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace isaclab {

Geometry angles_from_positions(const Eigen::Vector3d &base, const Eigen::Vector3d &node)
{
    const Eigen::Vector3d d = node - base;
    const double dist = d.norm();
    if (dist == 0.0)
        throw std::invalid_argument("angles_from_positions: node coincides with base");

    Geometry g;
    g.distance_m = dist;
    g.azimuth_rad = std::atan2(d.y(), d.x());
    // Polar angle between the base->node ray and the array normal (+z).
    g.elevation_rad = std::acos(std::clamp(d.z() / dist, -1.0, 1.0));
    return g;
}

Eigen::VectorXcd steering_vector(const Geometry &geom, int nx, int ny)
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("steering_vector: nx and ny must be >= 1");

    const int nt = nx * ny;
    const double norm = 1.0 / std::sqrt(static_cast<double>(nt));
    const double sin_theta = std::sin(geom.elevation_rad);
    const double cos_phi = std::cos(geom.azimuth_rad);
    const double sin_phi = std::sin(geom.azimuth_rad);

    Eigen::VectorXcd a(nt);
    for (int ix = 0; ix < nx; ++ix)
    {
        for (int iy = 0; iy < ny; ++iy)
        {
            const double phase =
                -std::numbers::pi * sin_theta * (ix * cos_phi + iy * sin_phi);
            a(ix * ny + iy) = std::polar(norm, phase);
        }
    }
    return a;
}

double amplitude_gain(double distance_m, double carrier_hz, double kappa)
{
    if (distance_m <= 0.0)
        throw std::invalid_argument("amplitude_gain: distance must be positive");
    return kSpeedOfLight / (4.0 * std::numbers::pi * carrier_hz) *
           std::pow(distance_m, -kappa);
}

Eigen::VectorXcd channel_vector(const Geometry &geom, std::complex<double> alpha,
                                double carrier_hz, double kappa, int nx, int ny)
{
    const double g = amplitude_gain(geom.distance_m, carrier_hz, kappa);
    return (g * alpha) * steering_vector(geom, nx, ny);
}

ChannelSet realize_channels(const ScenarioConfig &config,
                            const std::vector<Eigen::Vector3d> &legit_positions, Rng &rng)
{
    if (static_cast<int>(legit_positions.size()) != config.n_legit)
        throw std::invalid_argument("realize_channels: wrong number of legitimate positions");

    ChannelSet set;
    set.legit.reserve(config.n_legit);
    set.legit_geom.reserve(config.n_legit);
    set.legit_alpha.reserve(config.n_legit);
    for (const auto &pos : legit_positions)
    {
        const Geometry geom = angles_from_positions(config.base_position, pos);
        const std::complex<double> alpha = rng.complex_normal_unit();
        set.legit_geom.push_back(geom);
        set.legit_alpha.push_back(alpha);
        set.legit.push_back(channel_vector(geom, alpha, config.carrier_hz,
                                           config.pathloss_exponent, config.n_antennas_x,
                                           config.n_antennas_y));
    }
    set.eves.reserve(config.n_eves);
    set.eve_geom.reserve(config.n_eves);
    set.eve_alpha.reserve(config.n_eves);
    for (const auto &pos : config.eve_positions)
    {
        const Geometry geom = angles_from_positions(config.base_position, pos);
        const std::complex<double> alpha = rng.complex_normal_unit();
        set.eve_geom.push_back(geom);
        set.eve_alpha.push_back(alpha);
        set.eves.push_back(channel_vector(geom, alpha, config.carrier_hz,
                                          config.pathloss_exponent, config.n_antennas_x,
                                          config.n_antennas_y));
    }
    return set;
}

} // namespace isaclab
