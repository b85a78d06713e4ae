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

#ifndef ISACLAB_METRICS_HPP
#define ISACLAB_METRICS_HPP

#include <Eigen/Core>

#include "isaclab/channel.hpp"

namespace isaclab {

// Fully-digital transmit design for one slot: per-user precoder columns plus
// the artificial-noise vector, all of length N_t.
struct DigitalBeamformers {
    Eigen::MatrixXcd precoders; // N_t x L
    Eigen::VectorXcd an_vector; // N_t

    static DigitalBeamformers zeros(int nt, int l)
    {
        return {Eigen::MatrixXcd::Zero(nt, l), Eigen::VectorXcd::Zero(nt)};
    }
};

// Hardware-feasible design: phase-shifter analog stage (every entry of
// magnitude 1/sqrt(N_t)) cascaded with low-dimensional digital parts.
struct HybridBeamformers {
    Eigen::MatrixXcd analog;     // N_t x N_RF
    Eigen::MatrixXcd digital;    // N_RF x L
    Eigen::VectorXcd an_digital; // N_RF
};

// Per-user and aggregate rates, all in bits/s/Hz.
struct SecrecyReport {
    Eigen::VectorXd legit_rates;   // R_l, length L
    Eigen::MatrixXd eve_rates;     // R_{e,l}, E x L
    Eigen::VectorXd secrecy_rates; // R_{s,l} = [R_l - max_e R_{e,l}]^+, length L
    double sum_secrecy = 0.0;
};

// Flattens a hybrid design into its effective digital form:
// precoders = F_RF * F_BB, an = F_RF * w. All metric functions below operate
// on this representation. Throws std::invalid_argument on dimension mismatch.
DigitalBeamformers effective_digital(const HybridBeamformers &hybrid);

// SINR at a receiver with channel h for target stream `target`:
// |h^H f_target|^2 over interference of the other streams, the AN, and noise.
double sinr(const Eigen::VectorXcd &h, const DigitalBeamformers &beams, int target,
            double noise_power);

double sinr_legit(const ChannelSet &channels, const DigitalBeamformers &beams, int l,
                  double noise_power);

// Eavesdropper e wiretapping stream l.
double sinr_eve(const ChannelSet &channels, const DigitalBeamformers &beams, int e, int l,
                double noise_power);

SecrecyReport secrecy_report(const ChannelSet &channels, const DigitalBeamformers &beams,
                             double noise_power);

// Transmit covariance R_x = F F^H + w w^H (Hermitian PSD by construction).
Eigen::MatrixXcd covariance(const DigitalBeamformers &beams);

// Beampattern power a^H(phi,theta) R_x a(phi,theta). Throws when the
// imaginary residue exceeds 1e-10 relative to max(1, |value|), which signals
// a non-Hermitian input.
double beampattern(const Eigen::MatrixXcd &rx, const Geometry &geom, int nx, int ny);

// P(phi_e,theta_e) * d_e^(-2) - Gamma_e; nonnegative means the sensing
// constraint holds at this eavesdropper.
double sensing_margin(const Eigen::MatrixXcd &rx, const Geometry &eve_geom, double gamma_e,
                      int nx, int ny);

// ||F||_F^2 + ||w||_2^2.
double total_power(const DigitalBeamformers &beams);

double total_power(const HybridBeamformers &hybrid);

// Baseline constructors.
//
// Matched-beam heuristic: each precoder steers at its UAV (f_l proportional
// to a(phi_l,theta_l)), the AN points at the eavesdroppers projected onto the
// orthogonal complement of the legitimate steering span, and the power budget
// splits equally over the L+1 components. Deterministic.
DigitalBeamformers matched_beam_beamformers(const std::vector<Geometry> &legit_geom,
                                            const std::vector<Geometry> &eve_geom, int nx,
                                            int ny, double p_t);

// Isotropic random design normalized to the full power budget.
DigitalBeamformers random_beamformers(int nt, int l, double p_t, Rng &rng);

} // namespace isaclab

#endif // ISACLAB_METRICS_HPP
