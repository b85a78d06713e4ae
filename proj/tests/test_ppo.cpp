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

#include "isaclab/ppo.hpp"
#include "oracles.hpp"

using namespace isaclab;

namespace {

ScenarioConfig tiny_config()
{
    ScenarioConfig c = reference_scenario();
    c.n_antennas_x = 2;
    c.n_antennas_y = 2;
    c.n_rf_chains = 2;
    c.n_legit = 1;
    c.n_eves = 1;
    c.n_slots = 20;
    c.legit_init_positions = {{30.0, 30.0, 20.0}};
    c.eve_positions = {{-40.0, 40.0, 20.0}};
    c.qos_min_rate = 0.5;
    c.sensing_threshold = 1e-6;
    c.rl.hidden_sizes = {32, 32};
    c.rl.batch_size = 100;
    c.rl.minibatch_size = 50;
    c.rl.actor_lr = 3e-4;
    c.rl.critic_lr = 1e-3;
    c.rl.episodes = 10;
    return c;
}

struct Setup {
    UavEnv env;
    GaussianPolicy policy;
    MlpParams critic;

    explicit Setup(const ScenarioConfig &config, double log_std_init = -0.5)
        : env(config), policy(), critic()
    {
        Rng init(derive_stream_seed(config.seed, StreamPurpose::kParamInit));
        policy = make_policy(env.observation_dim(), config.rl.hidden_sizes, env.action_dim(),
                             log_std_init, init);
        critic = make_critic(env.observation_dim(), config.rl.hidden_sizes, init);
    }
};

} // namespace

TEST_CASE("a full-scale batch holds five complete episodes")
{
    ScenarioConfig config = reference_scenario();
    config.rl.hidden_sizes = {16};
    config.rl.batch_size = 1000;
    Setup s(config);
    Rng rng(5);
    const CollectResult result = collect_rollout(s.env, s.policy, s.critic, 1000, rng);
    CHECK(result.buffer.size == 1000);
    CHECK(result.completed_returns.size() == 5); // N = 200
    int ends = 0;
    for (const auto flag : result.buffer.segment_end)
        ends += flag;
    CHECK(ends == 5);
}

TEST_CASE("collection is deterministic for a fixed seed")
{
    const ScenarioConfig config = tiny_config();
    Setup s1(config), s2(config);
    Rng r1(9), r2(9);
    const CollectResult a = collect_rollout(s1.env, s1.policy, s1.critic, 60, r1);
    const CollectResult b = collect_rollout(s2.env, s2.policy, s2.critic, 60, r2);
    CHECK((a.buffer.observations - b.buffer.observations).norm() == 0.0);
    CHECK((a.buffer.actions - b.buffer.actions).norm() == 0.0);
    CHECK((a.buffer.rewards - b.buffer.rewards).norm() == 0.0);
    CHECK((a.buffer.log_probs - b.buffer.log_probs).norm() == 0.0);
}

TEST_CASE("log-probs are finite and bounded by the unit-variance density")
{
    const ScenarioConfig config = tiny_config();
    Setup s(config, 0.0); // sigma = 1 everywhere: density <= (2*pi)^(-A/2) < 1
    Rng rng(11);
    const CollectResult result = collect_rollout(s.env, s.policy, s.critic, 80, rng);
    for (int t = 0; t < result.buffer.size; ++t)
    {
        CHECK(std::isfinite(result.buffer.log_probs(t)));
        CHECK(result.buffer.log_probs(t) < 0.0);
    }
}

TEST_CASE("every collection phase refills the buffer from scratch")
{
    const ScenarioConfig config = tiny_config();
    Setup s(config);
    Rng rng(13);
    EpisodeTracker tracker;
    const CollectResult a = collect_rollout(s.env, s.policy, s.critic, 50, rng, &tracker);
    const CollectResult b = collect_rollout(s.env, s.policy, s.critic, 50, rng, &tracker);
    CHECK(a.buffer.size == 50);
    CHECK(b.buffer.size == 50);
    // phase boundary cut an episode in half; the tracker carried it over
    CHECK(a.completed_returns.size() == 2);
    CHECK(b.completed_returns.size() == 3);
    // truncation bootstraps: last step of phase 1 is a segment end but not done
    CHECK(a.buffer.segment_end[49] == 1);
}

TEST_CASE("GAE collapses to the TD residual for lambda = 0")
{
    Eigen::VectorXd rewards(4), values(4), bootstrap(4);
    rewards << 1.0, -0.5, 2.0, 0.25;
    values << 0.3, 0.1, -0.2, 0.4;
    bootstrap << 0, 0, 0, 0.7;
    std::vector<std::uint8_t> ends = {0, 0, 0, 1}, terminal = {0, 0, 0, 0};
    const GaeResult g = compute_gae(rewards, values, ends, terminal, bootstrap, 0.9, 0.0);
    for (int t = 0; t < 4; ++t)
    {
        const double v_next = t == 3 ? bootstrap(3) : values(t + 1);
        const double delta = rewards(t) + 0.9 * v_next - values(t);
        CHECK(g.advantages(t) == doctest::Approx(delta).epsilon(1e-15));
        CHECK(g.returns(t) == doctest::Approx(delta + values(t)).epsilon(1e-15));
    }
}

TEST_CASE("GAE with lambda = 1 and zero values is the discounted return")
{
    Eigen::VectorXd rewards(3), values = Eigen::VectorXd::Zero(3),
                                bootstrap = Eigen::VectorXd::Zero(3);
    rewards << 1.0, 2.0, 4.0;
    std::vector<std::uint8_t> ends = {0, 0, 1}, terminal = {0, 0, 1};
    const GaeResult g = compute_gae(rewards, values, ends, terminal, bootstrap, 0.5, 1.0);
    CHECK(g.advantages(2) == doctest::Approx(4.0));
    CHECK(g.advantages(1) == doctest::Approx(2.0 + 0.5 * 4.0));
    CHECK(g.advantages(0) == doctest::Approx(1.0 + 0.5 * 2.0 + 0.25 * 4.0));
}

TEST_CASE("GAE equals brute-force double summation on random multi-episode buffers")
{
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial)
    {
        const int n = 30;
        std::vector<double> rewards(n), values(n), bootstrap(n, 0.0);
        std::vector<std::uint8_t> ends(n, 0), terminal(n, 0);
        for (int t = 0; t < n; ++t)
        {
            rewards[t] = rng.normal();
            values[t] = rng.normal();
        }
        // three random episode boundaries
        ends[9] = 1;
        ends[21] = 1;
        ends[n - 1] = 1;
        for (int t : {9, 21, n - 1})
        {
            bootstrap[t] = rng.normal();
            terminal[t] = rng.uniform01() < 0.5 ? 1 : 0;
        }

        Eigen::VectorXd r = Eigen::Map<Eigen::VectorXd>(rewards.data(), n);
        Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(values.data(), n);
        Eigen::VectorXd bv = Eigen::Map<Eigen::VectorXd>(bootstrap.data(), n);
        const GaeResult g = compute_gae(r, v, ends, terminal, bv, 0.93, 0.87);
        const std::vector<double> want =
            oracles::brute_force_gae(rewards, values, ends, terminal, bootstrap, 0.93, 0.87);
        for (int t = 0; t < n; ++t)
            CHECK(std::abs(g.advantages(t) - want[t]) <=
                  1e-12 * std::max(1.0, std::abs(want[t])));
    }
}

TEST_CASE("clip arithmetic hand cases")
{
    // r = 1.3, eps = 0.2, A > 0 -> objective 1.2 A
    CHECK(clipped_objective(1.3, 2.0, 0.2) == doctest::Approx(1.2 * 2.0));
    // r = 0.5, eps = 0.2, A < 0 -> objective 0.8 A
    CHECK(clipped_objective(0.5, -3.0, 0.2) == doctest::Approx(0.8 * -3.0));
    // inside the trust region the clip is inactive
    CHECK(clipped_objective(1.05, 2.0, 0.2) == doctest::Approx(1.05 * 2.0));
}

TEST_CASE("clipped objective never exceeds the unclipped one when the clip binds")
{
    Rng rng(19);
    for (int i = 0; i < 1000; ++i)
    {
        const double r = rng.uniform(0.0, 3.0);
        const double a = rng.normal();
        const double eps = 0.2;
        const double clipped = clipped_objective(r, a, eps);
        CHECK(clipped <= r * a + 1e-15);
        if ((r > 1.0 + eps && a > 0.0) || (r < 1.0 - eps && a < 0.0))
            CHECK(clipped < r * a);
    }
}

TEST_CASE("first-epoch probability ratios equal one")
{
    const ScenarioConfig config = tiny_config();
    Setup s(config);
    Rng rng(23), shuffle(29);
    const CollectResult result = collect_rollout(s.env, s.policy, s.critic, 100, rng);
    const GaeResult gae = compute_gae(result.buffer, 0.9, 0.95);

    PpoOptions options = PpoOptions::from(config.rl, Algorithm::kPpo);
    options.update_epochs = 1;
    AdamState actor_opt = AdamState::for_params(s.policy.mean_net, 0.0);
    AdamVecState ls_opt = AdamVecState::for_size(s.policy.log_std.size(), 0.0);
    AdamState critic_opt = AdamState::for_params(s.critic, 0.0);

    const UpdateStats stats = ppo_update(result.buffer, gae, s.policy, s.critic, options,
                                         actor_opt, ls_opt, critic_opt, shuffle);
    CHECK(stats.max_ratio_dev_first_epoch < 1e-10);
    CHECK(stats.mean_ratio == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("zero learning rates leave parameters bit-identical")
{
    ScenarioConfig config = tiny_config();
    config.rl.actor_lr = 0.0;
    config.rl.critic_lr = 0.0;
    Setup s(config);
    const GaussianPolicy policy_before = s.policy;
    const MlpParams critic_before = s.critic;

    Rng rng(31), shuffle(37);
    const CollectResult result = collect_rollout(s.env, s.policy, s.critic, 100, rng);
    const GaeResult gae = compute_gae(result.buffer, 0.9, 0.95);
    PpoOptions options = PpoOptions::from(config.rl, Algorithm::kPpo);
    AdamState actor_opt = AdamState::for_params(s.policy.mean_net, 0.0);
    AdamVecState ls_opt = AdamVecState::for_size(s.policy.log_std.size(), 0.0);
    AdamState critic_opt = AdamState::for_params(s.critic, 0.0);
    (void)ppo_update(result.buffer, gae, s.policy, s.critic, options, actor_opt, ls_opt,
                     critic_opt, shuffle);

    for (std::size_t i = 0; i < s.policy.mean_net.weights.size(); ++i)
        CHECK((s.policy.mean_net.weights[i] - policy_before.mean_net.weights[i]).norm() == 0.0);
    CHECK((s.policy.log_std - policy_before.log_std).norm() == 0.0);
    for (std::size_t i = 0; i < s.critic.weights.size(); ++i)
        CHECK((s.critic.weights[i] - critic_before.weights[i]).norm() == 0.0);
}

TEST_CASE("the A2C degenerate case runs a single epoch")
{
    const ScenarioConfig config = tiny_config();
    Setup s(config);
    Rng rng(41), shuffle(43);
    const CollectResult result = collect_rollout(s.env, s.policy, s.critic, 100, rng);
    const GaeResult gae = compute_gae(result.buffer, 0.9, 0.95);
    PpoOptions options = PpoOptions::from(config.rl, Algorithm::kA2c);
    CHECK(options.update_epochs == 1);
    AdamState actor_opt = AdamState::for_params(s.policy.mean_net, 1e-4);
    AdamVecState ls_opt = AdamVecState::for_size(s.policy.log_std.size(), 1e-4);
    AdamState critic_opt = AdamState::for_params(s.critic, 3e-4);
    const UpdateStats stats = ppo_update(result.buffer, gae, s.policy, s.critic, options,
                                         actor_opt, ls_opt, critic_opt, shuffle);
    CHECK(stats.minibatches == 2); // 100 samples / 50 minibatch, one epoch
}

TEST_CASE("non-finite inputs abort the update with diagnostics")
{
    const ScenarioConfig config = tiny_config();
    Setup s(config);
    Rng rng(47), shuffle(53);
    CollectResult result = collect_rollout(s.env, s.policy, s.critic, 60, rng);
    GaeResult gae = compute_gae(result.buffer, 0.9, 0.95);
    gae.advantages(10) = std::numeric_limits<double>::quiet_NaN();
    PpoOptions options = PpoOptions::from(config.rl, Algorithm::kPpo);
    AdamState actor_opt = AdamState::for_params(s.policy.mean_net, 1e-4);
    AdamVecState ls_opt = AdamVecState::for_size(s.policy.log_std.size(), 1e-4);
    AdamState critic_opt = AdamState::for_params(s.critic, 3e-4);
    CHECK_THROWS_AS(ppo_update(result.buffer, gae, s.policy, s.critic, options, actor_opt,
                               ls_opt, critic_opt, shuffle),
                    std::runtime_error);
}

TEST_CASE("zero episode budget returns the initial policy and empty traces")
{
    ScenarioConfig config = tiny_config();
    const TrainReport report = train(config, Algorithm::kPpo, 0, 0);
    CHECK(report.episode_returns.empty());
    CHECK(report.actor_losses.empty());
    CHECK(report.episodes_run == 0);

    Rng init(derive_stream_seed(config.seed, StreamPurpose::kParamInit));
    UavEnv env(config);
    const GaussianPolicy fresh = make_policy(env.observation_dim(), config.rl.hidden_sizes,
                                             env.action_dim(), config.rl.log_std_init, init);
    for (std::size_t i = 0; i < fresh.mean_net.weights.size(); ++i)
        CHECK((report.final_policy.mean_net.weights[i] - fresh.mean_net.weights[i]).norm() ==
              0.0);
}

TEST_CASE("training is reproducible from the scenario seed")
{
    ScenarioConfig config = tiny_config();
    config.seed = 77;
    const TrainReport a = train(config, Algorithm::kPpo, 10, 0);
    const TrainReport b = train(config, Algorithm::kPpo, 10, 0);
    REQUIRE(a.episode_returns.size() == b.episode_returns.size());
    REQUIRE(a.episode_returns.size() == 10);
    for (std::size_t i = 0; i < a.episode_returns.size(); ++i)
        CHECK(a.episode_returns[i] == b.episode_returns[i]);
    REQUIRE(a.actor_losses.size() == b.actor_losses.size());
    for (std::size_t i = 0; i < a.actor_losses.size(); ++i)
        CHECK(a.actor_losses[i] == b.actor_losses[i]);
    CHECK(a.episode_phase.size() == a.episode_returns.size());
}

TEST_CASE("evaluation is sampling-free and repeatable")
{
    const ScenarioConfig config = tiny_config();
    Setup s(config);
    const EvalMetrics a = evaluate_policy(s.policy, config, 3, 123);
    const EvalMetrics b = evaluate_policy(s.policy, config, 3, 123);
    CHECK(a.mean_return == b.mean_return);
    CHECK(a.mean_sum_secrecy == b.mean_sum_secrecy);
    CHECK((a.per_uav_secrecy - b.per_uav_secrecy).norm() == 0.0);
    CHECK(std::isfinite(a.mean_return));
    CHECK(a.sensing_violation_rate >= 0.0);
    CHECK(a.sensing_violation_rate <= 1.0);
    CHECK(a.qos_violation_rate >= 0.0);
    CHECK(a.qos_violation_rate <= 1.0);
    CHECK(a.per_uav_secrecy.minCoeff() >= 0.0);
}

TEST_CASE("a trained policy evaluates strictly better than its initialization")
{
    ScenarioConfig config = tiny_config();
    config.seed = 3;
    config.rl.batch_size = 400;
    const TrainReport report = train(config, Algorithm::kPpo, 320, 0);

    Rng init(derive_stream_seed(config.seed, StreamPurpose::kParamInit));
    UavEnv env(config);
    const GaussianPolicy untrained = make_policy(env.observation_dim(), config.rl.hidden_sizes,
                                                 env.action_dim(), config.rl.log_std_init, init);

    const std::uint64_t eval_seed = 99;
    const EvalMetrics before = evaluate_policy(untrained, config, 5, eval_seed);
    const EvalMetrics after = evaluate_policy(report.best_policy, config, 5, eval_seed);
    CHECK(after.mean_sum_secrecy > before.mean_sum_secrecy);
    CHECK(after.mean_return > before.mean_return);
}

TEST_CASE("matched-beam heuristic beats random beams in most paired trials")
{
    ScenarioConfig config = tiny_config();
    config.n_slots = 4;
    const int nt = config.n_antennas();
    const std::vector<Eigen::Vector2d> no_moves(config.n_legit, Eigen::Vector2d::Zero());

    int heuristic_wins = 0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const std::uint64_t seed = 1000 + trial;
        const EvalMetrics random_m = evaluate_scheme(
            config, 1, seed, [&](const UavEnv &env, Rng &rng) {
                return DecodedAction{
                    random_beamformers(nt, env.config().n_legit,
                                       env.config().transmit_power_watts, rng),
                    no_moves};
            });
        const EvalMetrics matched_m = evaluate_scheme(
            config, 1, seed, [&](const UavEnv &env, Rng &) {
                const auto &ch = env.state().channels;
                return DecodedAction{
                    matched_beam_beamformers(ch.legit_geom, ch.eve_geom,
                                             env.config().n_antennas_x,
                                             env.config().n_antennas_y,
                                             env.config().transmit_power_watts),
                    no_moves};
            });
        if (matched_m.mean_sum_secrecy >= random_m.mean_sum_secrecy)
            ++heuristic_wins;
    }
    CHECK(heuristic_wins > 50);
}
