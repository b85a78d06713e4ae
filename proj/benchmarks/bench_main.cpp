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

#include <benchmark/benchmark.h>

#include "isaclab/env.hpp"
#include "isaclab/hbf.hpp"
#include "isaclab/neural.hpp"
#include "isaclab/ppo.hpp"

using namespace isaclab;

namespace {

ScenarioConfig reference_config()
{
    ScenarioConfig c = reference_scenario();
    c.rl.hidden_sizes = {256, 256};
    return c;
}

void BM_SteeringVector(benchmark::State &state)
{
    const Geometry g{0.7, 0.4, 80.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(steering_vector(g, 8, 8));
}
BENCHMARK(BM_SteeringVector);

void BM_RealizeChannels(benchmark::State &state)
{
    const ScenarioConfig config = reference_config();
    Rng rng(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(realize_channels(config, config.legit_init_positions, rng));
}
BENCHMARK(BM_RealizeChannels);

void BM_SecrecyReport(benchmark::State &state)
{
    const ScenarioConfig config = reference_config();
    Rng rng(2);
    const ChannelSet channels = realize_channels(config, config.legit_init_positions, rng);
    const DigitalBeamformers beams = random_beamformers(64, 4, 10.0, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(secrecy_report(channels, beams, config.noise_power_watts));
}
BENCHMARK(BM_SecrecyReport);

void BM_Beampattern(benchmark::State &state)
{
    Rng rng(3);
    const DigitalBeamformers beams = random_beamformers(64, 4, 10.0, rng);
    const Eigen::MatrixXcd rx = covariance(beams);
    const Geometry g{0.3, 0.8, 50.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(beampattern(rx, g, 8, 8));
}
BENCHMARK(BM_Beampattern);

void BM_EnvStep(benchmark::State &state)
{
    UavEnv env(reference_config());
    Rng rng(4);
    Eigen::VectorXd raw(env.action_dim());
    for (int i = 0; i < raw.size(); ++i)
        raw(i) = rng.uniform(-1.0, 1.0);
    env.reset(1);
    for (auto _ : state)
    {
        if (env.state().done)
            env.reset();
        benchmark::DoNotOptimize(env.step_raw(raw));
    }
}
BENCHMARK(BM_EnvStep);

void BM_MlpForwardBackward(benchmark::State &state)
{
    Rng rng(5);
    const MlpParams net = make_mlp({920, 256, 256, 648}, rng, 0.01);
    Eigen::MatrixXd x(920, 200);
    for (int c = 0; c < x.cols(); ++c)
        for (int r = 0; r < x.rows(); ++r)
            x(r, c) = rng.normal();
    const Eigen::MatrixXd d_out = Eigen::MatrixXd::Constant(648, 200, 1e-3);
    for (auto _ : state)
    {
        ForwardCache cache;
        benchmark::DoNotOptimize(mlp_forward_batch(net, x, &cache));
        benchmark::DoNotOptimize(mlp_backward_batch(net, cache, d_out));
    }
}
BENCHMARK(BM_MlpForwardBackward);

void BM_DecomposeFullArray(benchmark::State &state)
{
    Rng rng(6);
    Eigen::MatrixXcd f_opt(64, 4);
    Eigen::VectorXcd w_opt(64);
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 64; ++r)
            f_opt(r, c) = rng.complex_normal_unit();
    for (int r = 0; r < 64; ++r)
        w_opt(r) = rng.complex_normal_unit();
    for (auto _ : state)
        benchmark::DoNotOptimize(decompose(f_opt, w_opt, 8, 10.0, DecomposeOptions{}, rng));
}
BENCHMARK(BM_DecomposeFullArray);

} // namespace

BENCHMARK_MAIN();
