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

#ifndef ISACLAB_PPO_HPP
#define ISACLAB_PPO_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "isaclab/env.hpp"
#include "isaclab/neural.hpp"

namespace isaclab {

// On-policy transitions for one update phase. Columns are samples. The buffer
// is rebuilt from scratch by every collection phase; nothing is reused.
struct RolloutBuffer {
    Eigen::MatrixXd observations; // obs_dim x batch
    Eigen::MatrixXd actions;      // act_dim x batch, raw pre-clip samples
    Eigen::VectorXd log_probs;    // batch
    Eigen::VectorXd rewards;      // batch
    Eigen::VectorXd values;       // V(s_t) recorded at collection time
    std::vector<std::uint8_t> segment_end; // step closes its episode segment
    std::vector<std::uint8_t> terminal;    // absorbing end: never bootstrapped
    Eigen::VectorXd bootstrap_values;      // V(s_{t+1}), consulted where segment_end
    int size = 0;

    void reset(int capacity, int obs_dim, int act_dim);
    int capacity() const { return static_cast<int>(observations.cols()); }
};

// Carries a partially collected episode across buffer boundaries.
struct EpisodeTracker {
    double return_so_far = 0.0;
    RewardComponents components_so_far;
};

struct CollectResult {
    RolloutBuffer buffer;
    std::vector<double> completed_returns; // episodes finished during this phase
    std::vector<RewardComponents> completed_components;
};

// Fills exactly batch_size transitions from the current policy, resetting the
// environment whenever an episode ends. Value predictions are recorded at
// collection time; episode ends and phase-boundary truncations both record a
// bootstrap value V(s_next) (the horizon is a time limit, not an absorbing
// state).
CollectResult collect_rollout(UavEnv &env, const GaussianPolicy &policy,
                              const MlpParams &critic, int batch_size, Rng &rng,
                              EpisodeTracker *tracker = nullptr);

struct GaeResult {
    Eigen::VectorXd advantages;
    Eigen::VectorXd returns; // A_t + V_t
};

// Generalized advantage estimation. delta_t = r_t + gamma*V_{t+1}*(1-terminal)
// - V_t, accumulated within episode segments only; V_{t+1} at a segment end is
// the recorded bootstrap value. Advantages are returned raw; standardization
// happens per minibatch inside the update.
GaeResult compute_gae(const Eigen::VectorXd &rewards, const Eigen::VectorXd &values,
                      const std::vector<std::uint8_t> &segment_end,
                      const std::vector<std::uint8_t> &terminal,
                      const Eigen::VectorXd &bootstrap_values, double gamma, double lambda);

GaeResult compute_gae(const RolloutBuffer &buffer, double gamma, double lambda);

// min(r*A, clip(r, 1-eps, 1+eps)*A).
double clipped_objective(double ratio, double advantage, double clip_epsilon);

enum class Algorithm {
    kPpo,
    kA2c, // degenerate case: single epoch, no ratio, no clipping
};

struct PpoOptions {
    Algorithm algorithm = Algorithm::kPpo;
    double clip_epsilon = 0.2;
    int update_epochs = 10;
    int minibatch_size = 200;
    double entropy_coef = 0.0;

    static PpoOptions from(const RlHyperparams &rl, Algorithm algo)
    {
        PpoOptions o;
        o.algorithm = algo;
        o.clip_epsilon = rl.clip_epsilon;
        o.update_epochs = algo == Algorithm::kA2c ? 1 : rl.update_epochs;
        o.minibatch_size = rl.minibatch_size;
        o.entropy_coef = rl.entropy_coef;
        return o;
    }
};

struct UpdateStats {
    double actor_loss = 0.0;  // negative mean surrogate, averaged over minibatches
    double critic_loss = 0.0; // mean squared error, averaged over minibatches
    double mean_ratio = 0.0;
    double max_ratio_dev_first_epoch = 0.0; // max |r - 1| seen in epoch 0
    double clip_fraction = 0.0;
    double entropy = 0.0;
    int minibatches = 0;
};

// Maximizes the clipped surrogate (or the plain policy gradient for the A2C
// degenerate case) and minimizes the critic squared error over shuffled
// minibatches. Throws std::runtime_error with diagnostics if a loss turns
// non-finite.
UpdateStats ppo_update(const RolloutBuffer &buffer, const GaeResult &gae,
                       GaussianPolicy &policy, MlpParams &critic, const PpoOptions &options,
                       AdamState &actor_opt, AdamVecState &log_std_opt, AdamState &critic_opt,
                       Rng &shuffle_rng);

struct EvalMetrics {
    double mean_return = 0.0;
    double mean_sum_secrecy = 0.0;   // per-slot average of the sum secrecy rate
    Eigen::VectorXd per_uav_secrecy; // per-slot average per legitimate UAV
    double sensing_violation_rate = 0.0; // fraction of slots with any margin < 0
    double qos_violation_rate = 0.0;     // fraction of slots with any R_l < R_min
    int episodes = 0;
};

using SchemeActionFn = std::function<DecodedAction(const UavEnv &, Rng &)>;

// Deterministic-given-seed evaluation loop shared by the policy evaluator and
// the baseline schemes; identical eval_seed means identical channel draws.
EvalMetrics evaluate_scheme(const ScenarioConfig &config, int episodes,
                            std::uint64_t eval_seed, const SchemeActionFn &action_fn);

// Sampling-free policy evaluation: acts with the clipped policy mean.
EvalMetrics evaluate_policy(const GaussianPolicy &policy, const ScenarioConfig &config,
                            int episodes, std::uint64_t eval_seed);

struct TrainReport {
    std::vector<double> episode_returns;
    std::vector<RewardComponents> episode_components;
    std::vector<int> episode_phase;    // update phase that consumed each episode
    std::vector<double> actor_losses;  // per update phase
    std::vector<double> critic_losses; // per update phase
    EvalMetrics final_eval;
    double wall_clock_seconds = 0.0;
    std::uint64_t seed = 0;
    long episodes_run = 0;

    GaussianPolicy best_policy; // highest phase-mean return seen
    MlpParams best_critic;
    GaussianPolicy final_policy;
    MlpParams final_critic;
};

// Alternates collection and updates until the episode budget from
// config.rl.episodes (or the override) is reached. Fully reproducible from
// config.seed.
TrainReport train(const ScenarioConfig &config, Algorithm algorithm = Algorithm::kPpo,
                  long episode_override = -1, int final_eval_episodes = 5);

} // namespace isaclab

#endif // ISACLAB_PPO_HPP
