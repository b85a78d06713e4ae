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

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "isaclab/io.hpp"
#include "isaclab/scenario.hpp"

using namespace isaclab;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path root;
    Workspace()
    {
        root = fs::temp_directory_path() / ("isaclab_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(root);
        std::ofstream cfg(root / "tiny.cfg");
        cfg << "n_antennas_x = 2\n"
               "n_antennas_y = 2\n"
               "n_rf_chains = 2\n"
               "n_legit = 1\n"
               "n_eves = 1\n"
               "n_slots = 10\n"
               "legit_init_positions = 30 30 20\n"
               "eve_positions = -40 40 20\n"
               "qos_min_rate = 0.5\n"
               "sensing_threshold = 1e-6\n"
               "batch_size = 50\n"
               "minibatch_size = 25\n"
               "hidden_sizes = 16 16\n"
               "episodes = 5\n";
    }
    ~Workspace() { fs::remove_all(root); }

    std::string file(const std::string &name) const { return (root / name).string(); }
    bool exists(const std::string &name) const { return fs::exists(root / name); }
};

int run(const std::vector<std::string> &args)
{
    return cli::run_command(args);
}

} // namespace

TEST_CASE("cli end-to-end products")
{
    Workspace ws;
    const std::string cfg = ws.file("tiny.cfg");

    // train fans out over seeds
    REQUIRE(run({"train", "--scenario", cfg, "--seeds", "0..1", "--episodes", "5", "--out",
                 ws.file("run")}) == 0);
    CHECK(ws.exists("run/train_seed0.csv"));
    CHECK(ws.exists("run/train_seed1.csv"));
    CHECK(ws.exists("run/checkpoint_seed0.ckpt"));
    CHECK(ws.exists("run/checkpoint_seed1.ckpt"));
    CHECK(ws.exists("run/resolved_scenario.cfg"));
    CHECK(ws.exists("run/manifest.json"));

    // the resolved scenario reloads to the same config
    const ScenarioConfig resolved = load_scenario_file(ws.file("run/resolved_scenario.cfg"));
    CHECK(resolved == load_scenario_file(cfg));

    // the manifest captures the full resolved config for bit-reproduction
    {
        std::ifstream in(ws.file("run/manifest.json"));
        const nlohmann::json manifest = nlohmann::json::parse(in);
        CHECK(manifest.at("command") == "train");
        CHECK(manifest.at("seeds").size() == 2);
        const ScenarioConfig embedded =
            load_scenario(manifest.at("resolved_scenario").get<std::string>());
        CHECK(embedded == resolved);
    }

    // per-seed logs carry one row per episode
    CHECK(read_delimited(ws.file("run/train_seed0.csv")).size() == 1 + 5);

    // a2c training for the baselines row
    REQUIRE(run({"train", "--scenario", cfg, "--seeds", "0", "--episodes", "5", "--algo", "a2c",
                 "--out", ws.file("run_a2c")}) == 0);

    // eval writes metrics and an optional trajectory
    REQUIRE(run({"eval", "--scenario", cfg, "--checkpoint", ws.file("run/checkpoint_seed0.ckpt"),
                 "--episodes", "2", "--export-trajectory", "--out", ws.file("eval")}) == 0);
    CHECK(ws.exists("eval/metrics.csv"));
    CHECK(ws.exists("eval/trajectory_ep0.csv"));
    const auto metrics = read_delimited(ws.file("eval/metrics.csv"));
    REQUIRE(metrics.size() == 2);
    CHECK(metrics[1][0] == "ppo");
    CHECK(read_delimited(ws.file("eval/trajectory_ep0.csv")).size() == 1 + 10);

    // baselines table has all schemes on identical seeds, secrecy >= 0
    REQUIRE(run({"baselines", "--scenario", cfg, "--checkpoint",
                 ws.file("run/checkpoint_seed0.ckpt"), "--a2c-checkpoint",
                 ws.file("run_a2c/checkpoint_seed0.ckpt"), "--episodes", "2", "--out",
                 ws.file("base")}) == 0);
    const auto table = read_delimited(ws.file("base/baselines.csv"));
    REQUIRE(table.size() == 5); // header + ppo + a2c + random + matched
    CHECK(table[1][0] == "ppo");
    CHECK(table[2][0] == "a2c");
    CHECK(table[3][0] == "random");
    CHECK(table[4][0] == "matched");
    for (std::size_t r = 1; r < table.size(); ++r)
    {
        CHECK(std::stod(table[r][1]) >= 0.0); // per-UAV secrecy
        CHECK(std::stod(table[r][2]) >= 0.0); // total secrecy
    }

    // build a digital beams file from the matched heuristic, then decompose
    {
        const ScenarioConfig config = load_scenario_file(cfg);
        UavEnv env(config);
        env.reset(3);
        std::vector<DigitalBeamformers> slots;
        for (int s = 0; s < 3; ++s)
            slots.push_back(matched_beam_beamformers(env.state().channels.legit_geom,
                                                     env.state().channels.eve_geom, 2, 2,
                                                     config.transmit_power_watts));
        save_digital_beams(ws.file("digital.txt"), slots);
    }
    REQUIRE(run({"decompose", "--input", ws.file("digital.txt"), "--nrf", "2", "--pt", "10",
                 "--out", ws.file("dec")}) == 0);
    CHECK(ws.exists("dec/hybrid_beams.txt"));
    CHECK(ws.exists("dec/residuals.csv"));
    const auto hybrids = load_hybrid_beams(ws.file("dec/hybrid_beams.txt"));
    REQUIRE(hybrids.size() == 3);
    for (const auto &rec : hybrids)
    {
        CHECK(std::isfinite(rec.residual_trace.back()));
        CHECK(total_power(rec.hybrid) <= 10.0 * (1.0 + 1e-9));
    }

    // export both grids and their correlation
    REQUIRE(run({"export", "--scenario", cfg, "--digital", ws.file("digital.txt"), "--hybrid",
                 ws.file("dec/hybrid_beams.txt"), "--slot", "1", "--grid", "37x19", "--out",
                 ws.file("exp")}) == 0);
    CHECK(ws.exists("exp/beampattern_slot1_digital.txt"));
    CHECK(ws.exists("exp/beampattern_slot1_hybrid.txt"));
    CHECK(ws.exists("exp/cuts_slot1_digital.csv"));
    CHECK(ws.exists("exp/cuts_slot1_hybrid.csv"));
    CHECK(ws.exists("exp/correlation.csv"));
    const BeampatternGrid grid = load_beampattern_grid(ws.file("exp/beampattern_slot1_digital.txt"));
    CHECK(grid.power.rows() == 37);
    CHECK(grid.power.cols() == 19);
}

TEST_CASE("cli rejects bad invocations")
{
    Workspace ws;
    CHECK(run({"train", "--scenario", ws.file("missing.cfg")}) != 0);
    CHECK(run({"frobnicate"}) != 0);
    CHECK(run({"train", "--scenario", ws.file("tiny.cfg"), "--bogus-flag"}) != 0);
    CHECK(run({"eval", "--scenario", ws.file("tiny.cfg"), "--checkpoint",
               ws.file("missing.ckpt")}) != 0);
    CHECK(run({}) != 0);

    // dimension mismatch between checkpoint and scenario
    REQUIRE(run({"train", "--scenario", ws.file("tiny.cfg"), "--seeds", "0", "--episodes", "1",
                 "--out", ws.file("mini")}) == 0);
    std::ofstream other(ws.root / "other.cfg");
    other << "n_antennas_x = 2\nn_antennas_y = 2\nn_rf_chains = 2\nn_legit = 1\nn_eves = 2\n"
             "n_slots = 10\nlegit_init_positions = 30 30 20\n"
             "eve_positions = -40 40 20; 10 10 10\n";
    other.close();
    CHECK(run({"eval", "--scenario", ws.file("other.cfg"), "--checkpoint",
               ws.file("mini/checkpoint_seed0.ckpt")}) != 0);
}
