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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <unistd.h>

#include "isaclab/io.hpp"

using namespace isaclab;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path() /
               ("isaclab_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string &name) const { return (path / name).string(); }
};

Eigen::MatrixXcd random_complex(int rows, int cols, Rng &rng)
{
    Eigen::MatrixXcd m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            m(r, c) = rng.complex_normal_unit();
    return m;
}

} // namespace

TEST_CASE("checkpoints round-trip bit-exactly")
{
    TempDir dir;
    Rng rng(3);
    GaussianPolicy policy = make_policy(25, {32, 16}, 18, -0.5, rng);
    MlpParams critic = make_critic(25, {32, 16}, rng);

    const std::string path = dir.file("policy.ckpt");
    save_checkpoint(path, policy, critic);
    const Checkpoint back = load_checkpoint(path);

    REQUIRE(back.policy.mean_net.n_layers() == policy.mean_net.n_layers());
    for (std::size_t i = 0; i < policy.mean_net.weights.size(); ++i)
    {
        CHECK((back.policy.mean_net.weights[i] - policy.mean_net.weights[i]).norm() == 0.0);
        CHECK((back.policy.mean_net.biases[i] - policy.mean_net.biases[i]).norm() == 0.0);
    }
    CHECK((back.policy.log_std - policy.log_std).norm() == 0.0);
    for (std::size_t i = 0; i < critic.weights.size(); ++i)
        CHECK((back.critic.weights[i] - critic.weights[i]).norm() == 0.0);
}

TEST_CASE("loading a non-checkpoint fails cleanly")
{
    TempDir dir;
    const std::string path = dir.file("junk.ckpt");
    {
        std::ofstream out(path);
        out << "not a checkpoint";
    }
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
    CHECK_THROWS_AS(load_checkpoint(dir.file("missing.ckpt")), IoError);
}

TEST_CASE("digital beam files round-trip exactly")
{
    TempDir dir;
    Rng rng(5);
    std::vector<DigitalBeamformers> slots;
    for (int s = 0; s < 3; ++s)
    {
        DigitalBeamformers b;
        b.precoders = random_complex(8, 2, rng);
        b.an_vector = random_complex(8, 1, rng);
        slots.push_back(std::move(b));
    }
    const std::string path = dir.file("digital.txt");
    save_digital_beams(path, slots);
    const auto back = load_digital_beams(path);
    REQUIRE(back.size() == 3);
    for (int s = 0; s < 3; ++s)
    {
        CHECK((back[s].precoders - slots[s].precoders).norm() == 0.0);
        CHECK((back[s].an_vector - slots[s].an_vector).norm() == 0.0);
    }
}

TEST_CASE("hybrid beam files round-trip exactly")
{
    TempDir dir;
    Rng rng(7);
    std::vector<HybridSlotRecord> slots;
    for (int s = 0; s < 2; ++s)
    {
        HybridSlotRecord rec;
        rec.hybrid.analog = random_complex(8, 4, rng);
        rec.hybrid.digital = random_complex(4, 2, rng);
        rec.hybrid.an_digital = random_complex(4, 1, rng);
        rec.residual_trace = {3.5, 1.25, 0.125};
        rec.iterations = 3;
        rec.converged = (s == 0);
        slots.push_back(std::move(rec));
    }
    const std::string path = dir.file("hybrid.txt");
    save_hybrid_beams(path, slots);
    const auto back = load_hybrid_beams(path);
    REQUIRE(back.size() == 2);
    for (int s = 0; s < 2; ++s)
    {
        CHECK((back[s].hybrid.analog - slots[s].hybrid.analog).norm() == 0.0);
        CHECK((back[s].hybrid.digital - slots[s].hybrid.digital).norm() == 0.0);
        CHECK((back[s].hybrid.an_digital - slots[s].hybrid.an_digital).norm() == 0.0);
        CHECK(back[s].residual_trace == slots[s].residual_trace);
        CHECK(back[s].iterations == slots[s].iterations);
        CHECK(back[s].converged == slots[s].converged);
    }
}

TEST_CASE("identity covariance grid is flat")
{
    const BeampatternGrid grid =
        compute_beampattern_grid(Eigen::MatrixXcd::Identity(16, 16), 4, 4, 19, 10);
    CHECK(grid.power.rows() == 19);
    CHECK(grid.power.cols() == 10);
    CHECK((grid.power.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("matched beam grid peaks at the target cell")
{
    // target on exact grid nodes: azimuth 30 deg, elevation 40 deg
    constexpr double deg = std::numbers::pi / 180.0;
    const Geometry target{30.0 * deg, 40.0 * deg, 10.0};
    DigitalBeamformers b = DigitalBeamformers::zeros(64, 1);
    b.precoders.col(0) = std::sqrt(10.0) * steering_vector(target, 8, 8);
    const BeampatternGrid grid = compute_beampattern_grid(covariance(b), 8, 8, 181, 91);

    Eigen::Index ia_max, ie_max;
    grid.power.maxCoeff(&ia_max, &ie_max);
    CHECK(grid.azimuth_start_deg + ia_max * grid.azimuth_step_deg == doctest::Approx(30.0));
    CHECK(grid.elevation_start_deg + ie_max * grid.elevation_step_deg == doctest::Approx(40.0));
    CHECK(grid.power(ia_max, ie_max) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("beampattern grids round-trip exactly")
{
    TempDir dir;
    Rng rng(9);
    DigitalBeamformers b;
    b.precoders = random_complex(16, 2, rng);
    b.an_vector = random_complex(16, 1, rng);
    const BeampatternGrid grid =
        compute_beampattern_grid(covariance(b), 4, 4, 21, 11, "digital", 40);
    const std::string path = dir.file("grid.txt");
    save_beampattern_grid(path, grid);
    const BeampatternGrid back = load_beampattern_grid(path);
    CHECK(back.scheme == "digital");
    CHECK(back.slot == 40);
    CHECK(back.nx == 4);
    CHECK((back.power - grid.power).norm() == 0.0);
}

TEST_CASE("pearson correlation endpoints")
{
    Eigen::MatrixXd a(2, 3);
    a << 1, 2, 3, 4, 5, 6;
    CHECK(pearson_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson_correlation(a, (-a).eval()) == doctest::Approx(-1.0).epsilon(1e-12));
    Eigen::MatrixXd shifted = a.array() + 100.0;
    CHECK(pearson_correlation(a, shifted) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("azimuth cut agrees with the grid row")
{
    Rng rng(11);
    DigitalBeamformers b;
    b.precoders = random_complex(16, 2, rng);
    b.an_vector = random_complex(16, 1, rng);
    const Eigen::MatrixXcd rx = covariance(b);
    const BeampatternGrid grid = compute_beampattern_grid(rx, 4, 4, 181, 91);
    // elevation 20 deg lives at column 20 of the default grid
    constexpr double deg = std::numbers::pi / 180.0;
    const Eigen::VectorXd cut = azimuth_cut(rx, 4, 4, 20.0 * deg, 181);
    CHECK((cut - grid.power.col(20)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("delimited products round-trip through read_delimited")
{
    TempDir dir;

    SUBCASE("training log")
    {
        TrainReport report;
        report.episode_returns = {1.5, -0.25, 3.0};
        report.episode_components = {{1.0, -0.5, 0.0}, {0.5, 0.0, -0.75}, {3.0, 0.0, 0.0}};
        report.episode_phase = {0, 0, 1};
        report.actor_losses = {0.1, 0.2};
        report.critic_losses = {4.0, 2.0};
        const std::string path = dir.file("train.csv");
        write_training_log(path, report);
        const auto rows = read_delimited(path);
        REQUIRE(rows.size() == 4); // header + 3 episodes
        CHECK(rows[0][0] == "episode");
        CHECK(rows[0].size() == 7);
        CHECK(std::stod(rows[1][1]) == 1.5);
        CHECK(std::stod(rows[3][6]) == 2.0); // critic loss of phase 1
    }

    SUBCASE("episode trace")
    {
        std::vector<EpisodeTraceRow> rows(2);
        rows[0].slot = 0;
        rows[0].reward = 0.5;
        rows[0].components = {0.5, 0.0, 0.0};
        rows[0].sum_secrecy = 0.5;
        rows[0].positions = {{1.0, 2.0, 3.0}};
        rows[1] = rows[0];
        rows[1].slot = 1;
        const std::string path = dir.file("trace.csv");
        write_episode_trace(path, rows);
        const auto back = read_delimited(path);
        REQUIRE(back.size() == 3);
        CHECK(back[0].size() == 6 + 3);
        CHECK(std::stod(back[1][6]) == 1.0);
    }

    SUBCASE("metrics table")
    {
        EvalMetrics m;
        m.mean_return = -1.25;
        m.mean_sum_secrecy = 0.75;
        m.per_uav_secrecy = Eigen::VectorXd::Constant(2, 0.375);
        m.sensing_violation_rate = 0.1;
        m.qos_violation_rate = 0.2;
        m.episodes = 4;
        const std::string path = dir.file("metrics.csv");
        write_metrics_csv(path, {{"ppo", m}, {"random", m}});
        const auto back = read_delimited(path);
        REQUIRE(back.size() == 3);
        CHECK(back[1][0] == "ppo");
        CHECK(back[2][0] == "random");
        CHECK(std::stod(back[1][3]) == 0.75); // total = sum of per-UAV
    }
}
