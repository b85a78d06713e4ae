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

#ifndef ISACLAB_ENV_HPP
#define ISACLAB_ENV_HPP

#include <Eigen/Core>
#include <vector>

#include "isaclab/channel.hpp"
#include "isaclab/metrics.hpp"
#include "isaclab/rng.hpp"
#include "isaclab/scenario.hpp"

namespace isaclab {

struct EnvState {
    int slot = 0;                                 // n in [0, N)
    std::vector<Eigen::Vector3d> legit_positions; // c_l[n], z fixed per episode
    ChannelSet channels;                          // realized for the current slot
    bool done = false;
};

// Power-normalized beams plus velocity-clamped planar moves.
struct DecodedAction {
    DigitalBeamformers beams;
    std::vector<Eigen::Vector2d> moves; // (dx, dy) per legitimate UAV, meters
};

struct RewardComponents {
    double r_com = 0.0; // sum secrecy rate
    double r_sen = 0.0; // -zeta * sum_e [Gamma_e - P_e d_e^-2]^+
    double r_qos = 0.0; // -sum_l [R_min - R_{s,l}]^+
    double total() const { return r_com + r_sen + r_qos; }
};

// Everything a slot evaluation yields; step() reuses it for StepOutcome.
struct SlotEvaluation {
    RewardComponents components;
    SecrecyReport secrecy;
    Eigen::VectorXd sensing_margins; // E, from sensing_margin()
};

struct StepOutcome {
    double reward = 0.0;
    RewardComponents components;
    SecrecyReport secrecy;
    Eigen::VectorXd sensing_margins;
    Eigen::VectorXd observation; // next observation (also defined at done)
    bool done = false;
};

// Action layout: first 2*N_t*L reals pair (re, im) into the precoder matrix
// column by column, the next 2*N_t into the AN vector, then the beam part is
// rescaled so total power equals P_t exactly. The last 2L reals scale by
// V_max*Delta_t into per-UAV moves, clamped to that magnitude. Throws
// std::invalid_argument on wrong length or an all-zero beam part.
DecodedAction decode_action(const Eigen::VectorXd &raw, const ScenarioConfig &config);

// Reward components of problem constraints folded into the return signal.
RewardComponents reward_components(const ChannelSet &channels, const DigitalBeamformers &beams,
                                   const ScenarioConfig &config);

SlotEvaluation evaluate_slot(const ChannelSet &channels, const DigitalBeamformers &beams,
                             const ScenarioConfig &config);

// Episodic MDP over N slots. Observations flatten, in order: per-link
// channel real/imag parts (legitimate links then eavesdropper links, each
// scaled by channel_obs_scale), current legitimate positions, base position,
// and eavesdropper positions (all scaled by position_obs_scale).
// Length = 2*N_t*(L+E) + 3L + 3 + 3E.
class UavEnv {
  public:
    // Channel randomness derives from the config seed unless reset(seed) is
    // called explicitly; successive reset() calls get independent episode
    // streams from the master seed so whole runs replay bit-identically.
    explicit UavEnv(ScenarioConfig config);

    Eigen::VectorXd reset();
    Eigen::VectorXd reset(std::uint64_t episode_seed);

    StepOutcome step(const DecodedAction &action);

    // Clips raw to [-1,1], substitutes an all-ones beam part scaled by 1e-9
    // when the beam coordinates are identically zero, decodes, and steps.
    StepOutcome step_raw(const Eigen::VectorXd &raw);

    DecodedAction decode(const Eigen::VectorXd &raw) const
    {
        return decode_action(raw, config_);
    }

    // The clip + all-zero-substitution path of step_raw, without stepping.
    DecodedAction decode_safe(const Eigen::VectorXd &raw) const;

    // Observation of the current state (same vector reset()/step() return).
    Eigen::VectorXd observation() const { return assemble_observation(); }

    int observation_dim() const;
    int action_dim() const;

    const EnvState &state() const { return state_; }
    const ScenarioConfig &config() const { return config_; }

  private:
    Eigen::VectorXd assemble_observation() const;

    ScenarioConfig config_;
    EnvState state_;
    Rng channel_rng_;
    std::uint64_t episode_counter_ = 0;
};

} // namespace isaclab

#endif // ISACLAB_ENV_HPP
