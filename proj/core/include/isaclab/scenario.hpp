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

#ifndef ISACLAB_SCENARIO_HPP
#define ISACLAB_SCENARIO_HPP

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isaclab {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training hyperparameters. Learning rates of 0 are legal (freeze updates).
struct RlHyperparams {
    double actor_lr = 1e-4;
    double critic_lr = 3e-4;
    double gamma = 0.9;
    double clip_epsilon = 0.2;
    double gae_lambda = 0.95;
    int batch_size = 1000;
    int minibatch_size = 200;
    int update_epochs = 10;
    long episodes = 10000;
    std::vector<int> hidden_sizes = {256, 256};
    double entropy_coef = 0.0;
    double log_std_init = -0.5;
};

bool operator==(const RlHyperparams &a, const RlHyperparams &b);

// Immutable after construction; safe to share across experiment workers.
struct ScenarioConfig {
    int n_antennas_x = 8; // N_x
    int n_antennas_y = 8; // N_y
    int n_rf_chains = 8;  // N_RF
    int n_legit = 4;      // L
    int n_eves = 3;       // E

    double transmit_power_watts = 10.0; // P_t
    double pathloss_exponent = 1.8;     // kappa
    double carrier_hz = 28e9;           // f_c (default decision, mmWave band)
    double slot_seconds = 0.5;          // Delta_t
    int n_slots = 200;                  // N
    double noise_power_watts = 1e-13;   // sigma^2, applied to every receiver
    double sensing_threshold = 0.5e-5;  // Gamma_e, applied per eavesdropper
    double sensing_penalty_weight = 0.5; // zeta
    double qos_min_rate = 1.0;          // R_min [bits/s/Hz] (default decision)
    double v_max_mps = 10.0;            // V_max (default decision)

    std::vector<Eigen::Vector3d> legit_init_positions;
    std::vector<Eigen::Vector3d> eve_positions;
    Eigen::Vector3d base_position{0.0, 0.0, 0.0};

    // Observation conditioning. channel_obs_scale is the inverse of the
    // median link amplitude gain g(d) of the default scenario (~3.07e-7),
    // rounded; position_obs_scale maps meters to O(1) network inputs.
    double channel_obs_scale = 3.26e6;
    double position_obs_scale = 0.01;

    RlHyperparams rl;
    std::uint64_t seed = 1;

    int n_antennas() const { return n_antennas_x * n_antennas_y; }
    double total_duration_s() const { return n_slots * slot_seconds; }
};

bool operator==(const ScenarioConfig &a, const ScenarioConfig &b);

// The reference scenario: 8x8 UPA, 8 RF chains, 4 legitimate UAVs,
// 3 eavesdroppers, P_t = 10 W, N = 200 slots of 0.5 s.
ScenarioConfig reference_scenario();

// Throws ScenarioError naming the violated invariant.
void validate_scenario(const ScenarioConfig &config);

// Parses the canonical key/value document. Unset keys keep the reference-
// scenario values, so an empty document loads reference_scenario(). Parse
// errors carry 1-based line context; the result is always validated.
ScenarioConfig load_scenario(const std::string &text);

ScenarioConfig load_scenario_file(const std::string &path);

// Canonical serialization; load_scenario(serialize_scenario(c)) == c exactly
// (doubles are printed with round-trip precision).
std::string serialize_scenario(const ScenarioConfig &config);

} // namespace isaclab

#endif // ISACLAB_SCENARIO_HPP
