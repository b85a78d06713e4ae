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

#include "isaclab/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace isaclab {

void RolloutBuffer::reset(int capacity, int obs_dim, int act_dim)
{
    observations.setZero(obs_dim, capacity);
    actions.setZero(act_dim, capacity);
    log_probs.setZero(capacity);
    rewards.setZero(capacity);
    values.setZero(capacity);
    bootstrap_values.setZero(capacity);
    segment_end.assign(capacity, 0);
    terminal.assign(capacity, 0);
    size = 0;
}

CollectResult collect_rollout(UavEnv &env, const GaussianPolicy &policy,
                              const MlpParams &critic, int batch_size, Rng &rng,
                              EpisodeTracker *tracker)
{
    if (batch_size < 1)
        throw std::invalid_argument("collect_rollout: batch_size must be >= 1");

    CollectResult result;
    result.buffer.reset(batch_size, env.observation_dim(), env.action_dim());
    RolloutBuffer &buf = result.buffer;

    EpisodeTracker local;
    EpisodeTracker &track = tracker ? *tracker : local;

    Eigen::VectorXd obs = env.state().done ? env.reset() : env.observation();
    for (int t = 0; t < batch_size; ++t)
    {
        const double value = mlp_forward(critic, obs)(0);
        const SampleResult sample = gaussian_sample_logprob(policy, obs, rng);
        const StepOutcome outcome = env.step_raw(sample.action);

        buf.observations.col(t) = obs;
        buf.actions.col(t) = sample.action;
        buf.log_probs(t) = sample.log_prob;
        buf.rewards(t) = outcome.reward;
        buf.values(t) = value;

        track.return_so_far += outcome.reward;
        track.components_so_far.r_com += outcome.components.r_com;
        track.components_so_far.r_sen += outcome.components.r_sen;
        track.components_so_far.r_qos += outcome.components.r_qos;

        const bool phase_end = (t + 1 == batch_size);
        if (outcome.done)
        {
            buf.segment_end[t] = 1;
            // Time-limit horizon: bootstrap with V(s_N), not a terminal cut.
            buf.bootstrap_values(t) = mlp_forward(critic, outcome.observation)(0);
            result.completed_returns.push_back(track.return_so_far);
            result.completed_components.push_back(track.components_so_far);
            track = EpisodeTracker{};
            obs = env.reset();
        }
        else if (phase_end)
        {
            buf.segment_end[t] = 1;
            buf.bootstrap_values(t) = mlp_forward(critic, outcome.observation)(0);
        }
        else
        {
            obs = outcome.observation;
        }
        buf.size += 1;
    }
    return result;
}

GaeResult compute_gae(const Eigen::VectorXd &rewards, const Eigen::VectorXd &values,
                      const std::vector<std::uint8_t> &segment_end,
                      const std::vector<std::uint8_t> &terminal,
                      const Eigen::VectorXd &bootstrap_values, double gamma, double lambda)
{
    const Eigen::Index n = rewards.size();
    if (values.size() != n || bootstrap_values.size() != n ||
        static_cast<Eigen::Index>(segment_end.size()) != n ||
        static_cast<Eigen::Index>(terminal.size()) != n)
        throw std::invalid_argument("compute_gae: array lengths differ");
    if (n > 0 && !segment_end[n - 1])
        throw std::invalid_argument("compute_gae: last step must close a segment");

    GaeResult out;
    out.advantages.resize(n);
    out.returns.resize(n);

    double carry = 0.0;
    for (Eigen::Index t = n - 1; t >= 0; --t)
    {
        const double v_next = segment_end[t] ? bootstrap_values(t) : values(t + 1);
        const double nonterminal = terminal[t] ? 0.0 : 1.0;
        const double delta = rewards(t) + gamma * v_next * nonterminal - values(t);
        carry = delta + gamma * lambda * nonterminal * (segment_end[t] ? 0.0 : carry);
        out.advantages(t) = carry;
        out.returns(t) = carry + values(t);
    }
    return out;
}

GaeResult compute_gae(const RolloutBuffer &buffer, double gamma, double lambda)
{
    return compute_gae(buffer.rewards.head(buffer.size), buffer.values.head(buffer.size),
                       buffer.segment_end, buffer.terminal,
                       buffer.bootstrap_values.head(buffer.size), gamma, lambda);
}

double clipped_objective(double ratio, double advantage, double clip_epsilon)
{
    const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

UpdateStats ppo_update(const RolloutBuffer &buffer, const GaeResult &gae,
                       GaussianPolicy &policy, MlpParams &critic, const PpoOptions &options,
                       AdamState &actor_opt, AdamVecState &log_std_opt, AdamState &critic_opt,
                       Rng &shuffle_rng)
{
    const int n = buffer.size;
    if (n == 0)
        throw std::invalid_argument("ppo_update: empty buffer");
    if (gae.advantages.size() != n)
        throw std::invalid_argument("ppo_update: advantage length mismatch");

    const int act_dim = policy.action_dim();
    const int epochs = options.algorithm == Algorithm::kA2c ? 1 : options.update_epochs;
    const int mb = std::min(options.minibatch_size, n);
    constexpr double half_log_2pi = 0.9189385332046727;

    UpdateStats stats;
    double ratio_accum = 0.0;
    long ratio_count = 0;
    double clip_count = 0.0;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch)
    {
        // Fisher-Yates with the explicit stream
        for (int i = n - 1; i > 0; --i)
        {
            const int j = static_cast<int>(shuffle_rng.next_u64() % (i + 1));
            std::swap(order[i], order[j]);
        }

        for (int start = 0; start < n; start += mb)
        {
            const int m = std::min(mb, n - start);

            Eigen::MatrixXd obs(buffer.observations.rows(), m);
            Eigen::MatrixXd act(act_dim, m);
            Eigen::VectorXd logp_old(m), adv(m), ret(m);
            for (int k = 0; k < m; ++k)
            {
                const int idx = order[start + k];
                obs.col(k) = buffer.observations.col(idx);
                act.col(k) = buffer.actions.col(idx);
                logp_old(k) = buffer.log_probs(idx);
                adv(k) = gae.advantages(idx);
                ret(k) = gae.returns(idx);
            }

            // Advantage standardization per minibatch.
            const double adv_mean = adv.mean();
            const double adv_std =
                std::sqrt((adv.array() - adv_mean).square().sum() / std::max(1, m));
            adv = (adv.array() - adv_mean) / std::max(adv_std, 1e-8);

            // Actor pass
            ForwardCache cache;
            const Eigen::MatrixXd mu = mlp_forward_batch(policy.mean_net, obs, &cache);
            const Eigen::ArrayXd sigma = policy.stds().array();
            const Eigen::ArrayXd ls_clamped = sigma.log();

            Eigen::MatrixXd d_mu(act_dim, m);
            Eigen::VectorXd log_std_grad = Eigen::VectorXd::Zero(act_dim);
            double surrogate = 0.0;
            for (int k = 0; k < m; ++k)
            {
                const Eigen::ArrayXd diff = (act.col(k) - mu.col(k)).array();
                const Eigen::ArrayXd z = diff / sigma;
                const double logp_new =
                    (-0.5 * z.square() - ls_clamped - half_log_2pi).sum();
                const double ratio = std::exp(logp_new - logp_old(k));
                ratio_accum += ratio;
                ratio_count += 1;
                if (epoch == 0)
                    stats.max_ratio_dev_first_epoch =
                        std::max(stats.max_ratio_dev_first_epoch, std::abs(ratio - 1.0));

                double objective_weight; // d(objective)/d(logp_new)
                if (options.algorithm == Algorithm::kA2c)
                {
                    surrogate += logp_new * adv(k);
                    objective_weight = adv(k);
                }
                else
                {
                    const double unclipped = ratio * adv(k);
                    const double clipped = std::clamp(ratio, 1.0 - options.clip_epsilon,
                                                      1.0 + options.clip_epsilon) *
                                           adv(k);
                    surrogate += std::min(unclipped, clipped);
                    objective_weight = unclipped <= clipped ? ratio * adv(k) : 0.0;
                    if (unclipped > clipped)
                        clip_count += 1.0;
                }

                // dlogp/dmu = (a - mu)/sigma^2; dlogp/dlog_std = z^2 - 1.
                // Gradient ascent on the mean objective -> feed the negated
                // gradient to Adam.
                d_mu.col(k) = (-objective_weight / m) * (diff / sigma.square()).matrix();
                log_std_grad.array() -= (objective_weight / m) * (z.square() - 1.0);
            }
            surrogate /= m;

            const double entropy =
                (ls_clamped + 0.5 + half_log_2pi).sum(); // diagonal Gaussian
            // Entropy bonus (off by default): d(entropy)/d(log_std_i) = 1.
            log_std_grad.array() -= options.entropy_coef;

            const double actor_loss = -(surrogate + options.entropy_coef * entropy);
            if (!std::isfinite(actor_loss))
                throw std::runtime_error(
                    "ppo_update: non-finite actor loss (epoch " + std::to_string(epoch) +
                    ", minibatch at " + std::to_string(start) +
                    ", adv mean " + std::to_string(adv_mean) + ")");

            const MlpGrads actor_grads = mlp_backward_batch(policy.mean_net, cache, d_mu);
            adam_step(policy.mean_net, actor_grads, actor_opt);
            adam_step(policy.log_std, log_std_grad, log_std_opt);
            policy.log_std = policy.log_std.array()
                                 .max(GaussianPolicy::kLogStdMin)
                                 .min(GaussianPolicy::kLogStdMax);

            // Critic pass
            ForwardCache critic_cache;
            const Eigen::MatrixXd v = mlp_forward_batch(critic, obs, &critic_cache);
            const Eigen::VectorXd err = v.row(0).transpose() - ret;
            const double critic_loss = err.squaredNorm() / m;
            if (!std::isfinite(critic_loss))
                throw std::runtime_error(
                    "ppo_update: non-finite critic loss (epoch " + std::to_string(epoch) +
                    ", minibatch at " + std::to_string(start) + ")");
            Eigen::MatrixXd d_v(1, m);
            d_v.row(0) = (2.0 / m) * err.transpose();
            const MlpGrads critic_grads = mlp_backward_batch(critic, critic_cache, d_v);
            adam_step(critic, critic_grads, critic_opt);

            stats.actor_loss += actor_loss;
            stats.critic_loss += critic_loss;
            stats.entropy = entropy;
            stats.minibatches += 1;
        }
    }

    stats.actor_loss /= stats.minibatches;
    stats.critic_loss /= stats.minibatches;
    stats.mean_ratio = ratio_accum / static_cast<double>(ratio_count);
    stats.clip_fraction = clip_count / static_cast<double>(ratio_count);
    return stats;
}

EvalMetrics evaluate_scheme(const ScenarioConfig &config, int episodes,
                            std::uint64_t eval_seed, const SchemeActionFn &action_fn)
{
    UavEnv env(config);
    Rng scheme_rng = Rng::derive(eval_seed, StreamPurpose::kBaseline);

    EvalMetrics metrics;
    metrics.per_uav_secrecy = Eigen::VectorXd::Zero(config.n_legit);
    metrics.episodes = episodes;

    long slots = 0;
    long sensing_violations = 0;
    long qos_violations = 0;
    for (int ep = 0; ep < episodes; ++ep)
    {
        env.reset(derive_stream_seed(eval_seed, StreamPurpose::kEval, ep));
        double ep_return = 0.0;
        while (!env.state().done)
        {
            const DecodedAction action = action_fn(env, scheme_rng);
            const StepOutcome outcome = env.step(action);
            ep_return += outcome.reward;
            metrics.mean_sum_secrecy += outcome.secrecy.sum_secrecy;
            metrics.per_uav_secrecy += outcome.secrecy.secrecy_rates;
            if (outcome.sensing_margins.size() > 0 && outcome.sensing_margins.minCoeff() < 0.0)
                sensing_violations += 1;
            if ((outcome.secrecy.legit_rates.array() < config.qos_min_rate).any())
                qos_violations += 1;
            slots += 1;
        }
        metrics.mean_return += ep_return;
    }

    if (slots > 0)
    {
        metrics.mean_sum_secrecy /= static_cast<double>(slots);
        metrics.per_uav_secrecy /= static_cast<double>(slots);
        metrics.sensing_violation_rate =
            static_cast<double>(sensing_violations) / static_cast<double>(slots);
        metrics.qos_violation_rate =
            static_cast<double>(qos_violations) / static_cast<double>(slots);
    }
    if (episodes > 0)
        metrics.mean_return /= episodes;
    return metrics;
}

EvalMetrics evaluate_policy(const GaussianPolicy &policy, const ScenarioConfig &config,
                            int episodes, std::uint64_t eval_seed)
{
    return evaluate_scheme(config, episodes, eval_seed,
                           [&policy](const UavEnv &env, Rng &) {
                               return env.decode_safe(policy.mean(env.observation()));
                           });
}

TrainReport train(const ScenarioConfig &config, Algorithm algorithm, long episode_override,
                  int final_eval_episodes)
{
    const auto t_start = std::chrono::steady_clock::now();
    const long episode_budget =
        episode_override >= 0 ? episode_override : config.rl.episodes;

    UavEnv env(config);
    Rng init_rng = Rng::derive(config.seed, StreamPurpose::kParamInit);
    Rng sample_rng = Rng::derive(config.seed, StreamPurpose::kPolicySampling);
    Rng shuffle_rng = Rng::derive(config.seed, StreamPurpose::kShuffle);

    TrainReport report;
    report.seed = config.seed;
    GaussianPolicy policy = make_policy(env.observation_dim(), config.rl.hidden_sizes,
                                        env.action_dim(), config.rl.log_std_init, init_rng);
    MlpParams critic = make_critic(env.observation_dim(), config.rl.hidden_sizes, init_rng);

    AdamState actor_opt = AdamState::for_params(policy.mean_net, config.rl.actor_lr);
    AdamVecState log_std_opt = AdamVecState::for_size(policy.log_std.size(), config.rl.actor_lr);
    AdamState critic_opt = AdamState::for_params(critic, config.rl.critic_lr);
    const PpoOptions options = PpoOptions::from(config.rl, algorithm);

    report.best_policy = policy;
    report.best_critic = critic;
    double best_mean_return = -std::numeric_limits<double>::infinity();

    EpisodeTracker tracker;
    while (report.episodes_run < episode_budget)
    {
        CollectResult collected =
            collect_rollout(env, policy, critic, config.rl.batch_size, sample_rng, &tracker);
        const GaeResult gae = compute_gae(collected.buffer, config.rl.gamma, config.rl.gae_lambda);
        const UpdateStats stats = ppo_update(collected.buffer, gae, policy, critic, options,
                                             actor_opt, log_std_opt, critic_opt, shuffle_rng);

        const int phase = static_cast<int>(report.actor_losses.size());
        report.actor_losses.push_back(stats.actor_loss);
        report.critic_losses.push_back(stats.critic_loss);
        for (std::size_t i = 0; i < collected.completed_returns.size(); ++i)
        {
            report.episode_returns.push_back(collected.completed_returns[i]);
            report.episode_components.push_back(collected.completed_components[i]);
            report.episode_phase.push_back(phase);
        }
        report.episodes_run += static_cast<long>(collected.completed_returns.size());

        if (!collected.completed_returns.empty())
        {
            const double phase_mean =
                std::accumulate(collected.completed_returns.begin(),
                                collected.completed_returns.end(), 0.0) /
                static_cast<double>(collected.completed_returns.size());
            if (phase_mean > best_mean_return)
            {
                best_mean_return = phase_mean;
                report.best_policy = policy;
                report.best_critic = critic;
            }
        }
    }

    report.final_policy = policy;
    report.final_critic = critic;
    if (final_eval_episodes > 0)
        report.final_eval = evaluate_policy(
            report.best_policy, config, final_eval_episodes,
            derive_stream_seed(config.seed, StreamPurpose::kEval));

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace isaclab
