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

#include "isaclab/env.hpp"

#include <cmath>
#include <stdexcept>

namespace isaclab {

DecodedAction decode_action(const Eigen::VectorXd &raw, const ScenarioConfig &config)
{
    const int nt = config.n_antennas();
    const int l = config.n_legit;
    const int expected = 2 * nt * l + 2 * nt + 2 * l;
    if (raw.size() != expected)
        throw std::invalid_argument("decode_action: expected length " + std::to_string(expected) +
                                    ", got " + std::to_string(raw.size()));

    DecodedAction action;
    action.beams = DigitalBeamformers::zeros(nt, l);
    for (int col = 0; col < l; ++col)
        for (int i = 0; i < nt; ++i)
        {
            const int base = 2 * (col * nt + i);
            action.beams.precoders(i, col) = {raw(base), raw(base + 1)};
        }
    const int an_offset = 2 * nt * l;
    for (int i = 0; i < nt; ++i)
        action.beams.an_vector(i) = {raw(an_offset + 2 * i), raw(an_offset + 2 * i + 1)};

    const double raw_power = total_power(action.beams);
    if (raw_power == 0.0)
        throw std::invalid_argument("decode_action: all-zero beam part, normalization undefined");
    const double eta = std::sqrt(config.transmit_power_watts / raw_power);
    action.beams.precoders *= eta;
    action.beams.an_vector *= eta;

    const double max_move = config.v_max_mps * config.slot_seconds;
    const int move_offset = 2 * nt * l + 2 * nt;
    action.moves.resize(l);
    for (int u = 0; u < l; ++u)
    {
        Eigen::Vector2d move(raw(move_offset + 2 * u) * max_move,
                             raw(move_offset + 2 * u + 1) * max_move);
        double norm = move.norm();
        if (norm > max_move)
            move *= max_move / norm;
        // one-ulp correction so the clamp holds exactly
        while (move.norm() > max_move)
            move *= 1.0 - 0x1p-52;
        action.moves[u] = move;
    }
    return action;
}

SlotEvaluation evaluate_slot(const ChannelSet &channels, const DigitalBeamformers &beams,
                             const ScenarioConfig &config)
{
    SlotEvaluation eval;
    eval.secrecy = secrecy_report(channels, beams, config.noise_power_watts);
    eval.components.r_com = eval.secrecy.sum_secrecy;

    const int n_eves = static_cast<int>(channels.eves.size());
    eval.sensing_margins.resize(n_eves);
    double sensing_penalty = 0.0;
    if (n_eves > 0)
    {
        const Eigen::MatrixXcd rx = covariance(beams);
        for (int e = 0; e < n_eves; ++e)
        {
            const double margin = sensing_margin(rx, channels.eve_geom[e],
                                                 config.sensing_threshold, config.n_antennas_x,
                                                 config.n_antennas_y);
            eval.sensing_margins(e) = margin;
            sensing_penalty += std::max(0.0, -margin);
        }
    }
    eval.components.r_sen = -config.sensing_penalty_weight * sensing_penalty;

    double qos_penalty = 0.0;
    for (int l = 0; l < eval.secrecy.secrecy_rates.size(); ++l)
        qos_penalty += std::max(0.0, config.qos_min_rate - eval.secrecy.secrecy_rates(l));
    eval.components.r_qos = -qos_penalty;
    return eval;
}

RewardComponents reward_components(const ChannelSet &channels, const DigitalBeamformers &beams,
                                   const ScenarioConfig &config)
{
    return evaluate_slot(channels, beams, config).components;
}

UavEnv::UavEnv(ScenarioConfig config)
    : config_(std::move(config)),
      channel_rng_(derive_stream_seed(config_.seed, StreamPurpose::kChannelFading))
{
    validate_scenario(config_);
    reset();
}

Eigen::VectorXd UavEnv::reset()
{
    return reset(derive_stream_seed(config_.seed, StreamPurpose::kChannelFading,
                                    episode_counter_++));
}

Eigen::VectorXd UavEnv::reset(std::uint64_t episode_seed)
{
    channel_rng_ = Rng(episode_seed);
    state_.slot = 0;
    state_.done = false;
    state_.legit_positions = config_.legit_init_positions;
    state_.channels = realize_channels(config_, state_.legit_positions, channel_rng_);
    return assemble_observation();
}

StepOutcome UavEnv::step(const DecodedAction &action)
{
    if (state_.done)
        throw std::logic_error("step: episode already done, call reset()");
    if (static_cast<int>(action.moves.size()) != config_.n_legit)
        throw std::invalid_argument("step: wrong number of moves");

    // Reward comes from the current slot's channels and the chosen beams.
    SlotEvaluation eval = evaluate_slot(state_.channels, action.beams, config_);

    // Kinematics: planar moves, altitude fixed for the whole episode.
    for (int l = 0; l < config_.n_legit; ++l)
    {
        state_.legit_positions[l].x() += action.moves[l].x();
        state_.legit_positions[l].y() += action.moves[l].y();
    }

    state_.slot += 1;
    state_.done = state_.slot >= config_.n_slots;
    state_.channels = realize_channels(config_, state_.legit_positions, channel_rng_);

    StepOutcome outcome;
    outcome.reward = eval.components.total();
    outcome.components = eval.components;
    outcome.secrecy = std::move(eval.secrecy);
    outcome.sensing_margins = std::move(eval.sensing_margins);
    outcome.observation = assemble_observation();
    outcome.done = state_.done;
    return outcome;
}

DecodedAction UavEnv::decode_safe(const Eigen::VectorXd &raw) const
{
    Eigen::VectorXd clipped = raw.cwiseMax(-1.0).cwiseMin(1.0);
    const int beam_len = 2 * config_.n_antennas() * config_.n_legit + 2 * config_.n_antennas();
    if (clipped.head(beam_len).isZero(0.0))
        clipped.head(beam_len).setConstant(1e-9);
    return decode_action(clipped, config_);
}

StepOutcome UavEnv::step_raw(const Eigen::VectorXd &raw)
{
    return step(decode_safe(raw));
}

int UavEnv::observation_dim() const
{
    const int nt = config_.n_antennas();
    return 2 * nt * (config_.n_legit + config_.n_eves) + 3 * config_.n_legit + 3 +
           3 * config_.n_eves;
}

int UavEnv::action_dim() const
{
    const int nt = config_.n_antennas();
    return 2 * nt * config_.n_legit + 2 * nt + 2 * config_.n_legit;
}

Eigen::VectorXd UavEnv::assemble_observation() const
{
    const int nt = config_.n_antennas();
    Eigen::VectorXd obs(observation_dim());
    int k = 0;

    const double cs = config_.channel_obs_scale;
    auto push_channel = [&](const Eigen::VectorXcd &h) {
        for (int i = 0; i < nt; ++i)
            obs(k++) = h(i).real() * cs;
        for (int i = 0; i < nt; ++i)
            obs(k++) = h(i).imag() * cs;
    };
    for (const auto &h : state_.channels.legit)
        push_channel(h);
    for (const auto &h : state_.channels.eves)
        push_channel(h);

    const double ps = config_.position_obs_scale;
    auto push_position = [&](const Eigen::Vector3d &p) {
        obs(k++) = p.x() * ps;
        obs(k++) = p.y() * ps;
        obs(k++) = p.z() * ps;
    };
    for (const auto &p : state_.legit_positions)
        push_position(p);
    push_position(config_.base_position);
    for (const auto &p : config_.eve_positions)
        push_position(p);

    return obs;
}

} // namespace isaclab
