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

#ifndef ISACLAB_HBF_HPP
#define ISACLAB_HBF_HPP

#include <Eigen/Core>

#include "isaclab/metrics.hpp"
#include "isaclab/rng.hpp"

namespace isaclab {

struct DecompositionResult {
    HybridBeamformers hybrid;
    std::vector<double> residual_trace; // objective after each accepted digital update
    int iterations = 0;
    bool converged = false;
};

struct DecomposeOptions {
    double tol = 1e-6; // relative objective change
    int max_iter = 50;
};

// Random constant-modulus analog matrix: entries (1/sqrt(N_t)) e^{j psi},
// psi uniform on [0, 2pi).
Eigen::MatrixXcd init_analog(int nt, int nrf, Rng &rng);

// Least-squares digital parts for a fixed analog matrix via a rank-revealing
// (SVD) pseudo-inverse with singular-value cutoff max(dim)*eps*sigma_max:
// F_BB = F_RF^+ F_opt, w = F_RF^+ w_opt.
std::pair<Eigen::MatrixXcd, Eigen::VectorXcd> update_digital(const Eigen::MatrixXcd &analog,
                                                             const Eigen::MatrixXcd &f_opt,
                                                             const Eigen::VectorXcd &w_opt);

// Per-entry phase alignment against the correlation
// C = F_opt F_BB^H + w_opt w^H; entries with zero correlation keep the phase
// of previous_analog.
Eigen::MatrixXcd update_analog(const Eigen::MatrixXcd &f_opt, const Eigen::MatrixXcd &f_bb,
                               const Eigen::VectorXcd &w_opt, const Eigen::VectorXcd &w,
                               const Eigen::MatrixXcd &previous_analog);

// Scales the digital parts by eta = sqrt(P_t / P_total) so the realized total
// power meets the budget with equality; the analog matrix is untouched.
// Throws std::invalid_argument when the realized power is zero.
void normalize_power(HybridBeamformers &hybrid, double p_t);

// ||F_opt - F_RF F_BB||_F^2 + ||w_opt - F_RF w||_2^2.
double decomposition_objective(const Eigen::MatrixXcd &f_opt, const Eigen::VectorXcd &w_opt,
                               const HybridBeamformers &hybrid);

// Alternating optimization: digital update, objective bookkeeping, analog
// phase update, cycled until the relative objective change drops below tol or
// max_iter is hit; power normalization runs once at exit. An analog update
// is kept only if the objective after the subsequent digital re-solve does
// not worsen, so the recorded residual trace is non-increasing. Returns the
// best-objective iterate. The all-zero input degenerates to a zero hybrid
// (power normalization skipped, nothing to scale).
DecompositionResult decompose(const Eigen::MatrixXcd &f_opt, const Eigen::VectorXcd &w_opt,
                              int nrf, double p_t, const DecomposeOptions &options, Rng &rng);

} // namespace isaclab

#endif // ISACLAB_HBF_HPP
