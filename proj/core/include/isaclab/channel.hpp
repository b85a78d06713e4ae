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

#ifndef ISACLAB_CHANNEL_HPP
#define ISACLAB_CHANNEL_HPP

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "isaclab/rng.hpp"
#include "isaclab/scenario.hpp"

namespace isaclab {

// Speed of light used by the amplitude gain model [m/s].
inline constexpr double kSpeedOfLight = 2.998e8;

// Link geometry seen from the base-station UPA, which lies in the x-o-y
// plane. Azimuth phi is measured from the x-axis in that plane; elevation
// theta is the polar angle from the array normal (+z), so theta = 0 at
// boresight and theta = pi/2 in-plane.
struct Geometry {
    double azimuth_rad = 0.0;
    double elevation_rad = 0.0;
    double distance_m = 0.0;
};

// Per-slot channels for all base-station->UAV links.
struct ChannelSet {
    std::vector<Eigen::VectorXcd> legit; // L vectors of length N_t
    std::vector<Eigen::VectorXcd> eves;  // E vectors of length N_t
    std::vector<Geometry> legit_geom;
    std::vector<Geometry> eve_geom;
    std::vector<std::complex<double>> legit_alpha; // small-scale fading per link
    std::vector<std::complex<double>> eve_alpha;
};

// Throws std::invalid_argument when node == base.
Geometry angles_from_positions(const Eigen::Vector3d &base, const Eigen::Vector3d &node);

// Half-wavelength UPA response. Entry for antenna (n_x, n_y) is
//   (1/sqrt(N_t)) * exp(-j*pi*sin(theta)*(n_x*cos(phi) + n_y*sin(phi))),
// enumerated row-major: index = n_x * ny + n_y. Unit Euclidean norm.
Eigen::VectorXcd steering_vector(const Geometry &geom, int nx, int ny);

// Distance-dependent amplitude g(d) = (c / (4*pi*f_c)) * d^(-kappa).
double amplitude_gain(double distance_m, double carrier_hz, double kappa);

// h = g(d) * alpha * a(phi, theta).
Eigen::VectorXcd channel_vector(const Geometry &geom, std::complex<double> alpha,
                                double carrier_hz, double kappa, int nx, int ny);

// Draws i.i.d. CN(0,1) small-scale fading per link and assembles all L+E
// channel vectors at the given legitimate UAV positions.
ChannelSet realize_channels(const ScenarioConfig &config,
                            const std::vector<Eigen::Vector3d> &legit_positions, Rng &rng);

} // namespace isaclab

#endif // ISACLAB_CHANNEL_HPP
