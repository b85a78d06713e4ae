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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "isaclab/env.hpp"
#include "isaclab/hbf.hpp"
#include "isaclab/io.hpp"
#include "isaclab/ppo.hpp"
#include "isaclab/scenario.hpp"

namespace isaclab::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

fs::path resolve_out_dir(const std::string &out)
{
    fs::path p(out);
    if (p.is_relative())
    {
        if (const char *root = std::getenv("ISACLAB_OUT_ROOT"))
            p = fs::path(root) / p;
    }
    fs::create_directories(p);
    return p;
}

void write_manifest(const fs::path &out_dir, const std::string &command,
                    const std::vector<std::string> &args, const ScenarioConfig *config,
                    const std::string &scenario_path, const std::vector<std::uint64_t> &seeds,
                    const std::vector<std::string> &products)
{
    ordered_json manifest;
    manifest["tool"] = "isaclab";
    manifest["version"] = "0.1.0";
    manifest["command"] = command;
    manifest["args"] = args;
    if (!scenario_path.empty())
        manifest["scenario_path"] = scenario_path;
    if (config != nullptr)
        manifest["resolved_scenario"] = serialize_scenario(*config);
    manifest["seeds"] = seeds;
    manifest["products"] = products;

    std::ofstream out(out_dir / "manifest.json");
    if (!out)
        throw IoError("cannot write manifest in " + out_dir.string());
    out << manifest.dump(2) << "\n";
}

// "a..b", "a,b,c", or a single integer.
std::vector<std::uint64_t> parse_seed_list(const std::string &text)
{
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos)
    {
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo)
            throw std::invalid_argument("seed range is empty: " + text);
        for (std::uint64_t s = lo; s <= hi; ++s)
            seeds.push_back(s);
        return seeds;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty())
            seeds.push_back(std::stoull(tok));
    if (seeds.empty())
        throw std::invalid_argument("no seeds in '" + text + "'");
    return seeds;
}

Algorithm parse_algorithm(const std::string &name)
{
    if (name == "ppo")
        return Algorithm::kPpo;
    if (name == "a2c")
        return Algorithm::kA2c;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected ppo or a2c)");
}

GaussianPolicy load_policy_for(const ScenarioConfig &config, const std::string &path)
{
    Checkpoint ckpt = load_checkpoint(path);
    UavEnv probe(config);
    if (ckpt.policy.mean_net.input_dim() != probe.observation_dim() ||
        ckpt.policy.action_dim() != probe.action_dim())
        throw std::runtime_error("checkpoint '" + path +
                                 "' does not match the scenario dimensions");
    return std::move(ckpt.policy);
}

int cmd_train(const std::string &scenario_path, const std::string &seeds_text,
              long episode_override, const std::string &algo_name, const std::string &out,
              int eval_episodes, const std::vector<std::string> &args)
{
    const ScenarioConfig base = load_scenario_file(scenario_path);
    const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_text);
    const Algorithm algo = parse_algorithm(algo_name);
    const fs::path out_dir = resolve_out_dir(out);

    // Seeds fan out to independent workers; each writes its own files.
    std::vector<std::future<std::pair<std::string, std::string>>> workers;
    for (const std::uint64_t seed : seeds)
    {
        workers.push_back(std::async(std::launch::async, [&, seed] {
            ScenarioConfig config = base;
            config.seed = seed;
            const TrainReport report = train(config, algo, episode_override, eval_episodes);

            const std::string log_name = "train_seed" + std::to_string(seed) + ".csv";
            const std::string ckpt_name = "checkpoint_seed" + std::to_string(seed) + ".ckpt";
            write_training_log((out_dir / log_name).string(), report);
            save_checkpoint((out_dir / ckpt_name).string(), report.best_policy,
                            report.best_critic);
            return std::make_pair(log_name, ckpt_name);
        }));
    }

    std::vector<std::string> products;
    for (auto &w : workers)
    {
        auto [log_name, ckpt_name] = w.get();
        products.push_back(log_name);
        products.push_back(ckpt_name);
    }

    std::ofstream resolved(out_dir / "resolved_scenario.cfg");
    resolved << serialize_scenario(base);
    products.push_back("resolved_scenario.cfg");
    write_manifest(out_dir, "train", args, &base, scenario_path, seeds, products);

    std::cout << "trained " << seeds.size() << " seed(s) -> " << out_dir.string() << "\n";
    return 0;
}

int cmd_eval(const std::string &scenario_path, const std::string &checkpoint_path,
             int episodes, std::uint64_t eval_seed, bool export_trajectory,
             const std::string &out, const std::vector<std::string> &args)
{
    const ScenarioConfig config = load_scenario_file(scenario_path);
    const GaussianPolicy policy = load_policy_for(config, checkpoint_path);
    const fs::path out_dir = resolve_out_dir(out);

    const EvalMetrics metrics = evaluate_policy(policy, config, episodes, eval_seed);
    write_metrics_csv((out_dir / "metrics.csv").string(), {{"ppo", metrics}});
    std::vector<std::string> products = {"metrics.csv"};

    if (export_trajectory)
    {
        UavEnv env(config);
        env.reset(derive_stream_seed(eval_seed, StreamPurpose::kEval, 0));
        std::vector<EpisodeTraceRow> rows;
        while (!env.state().done)
        {
            const DecodedAction action = env.decode_safe(policy.mean(env.observation()));
            const StepOutcome outcome = env.step(action);
            EpisodeTraceRow row;
            row.slot = env.state().slot - 1;
            row.reward = outcome.reward;
            row.components = outcome.components;
            row.sum_secrecy = outcome.secrecy.sum_secrecy;
            row.positions = env.state().legit_positions;
            rows.push_back(std::move(row));
        }
        write_episode_trace((out_dir / "trajectory_ep0.csv").string(), rows);
        products.push_back("trajectory_ep0.csv");
    }

    write_manifest(out_dir, "eval", args, &config, scenario_path, {eval_seed}, products);
    std::cout << "mean sum secrecy rate: " << metrics.mean_sum_secrecy << " bits/s/Hz over "
              << episodes << " episode(s)\n";
    return 0;
}

int cmd_decompose(const std::string &input_path, int nrf, double p_t, double tol, int max_iter,
                  std::uint64_t seed, const std::string &out,
                  const std::vector<std::string> &args)
{
    const std::vector<DigitalBeamformers> slots = load_digital_beams(input_path);
    const fs::path out_dir = resolve_out_dir(out);

    Rng rng = Rng::derive(seed, StreamPurpose::kDecompose);
    const DecomposeOptions options{tol, max_iter};

    std::vector<HybridSlotRecord> records;
    records.reserve(slots.size());
    for (const auto &beams : slots)
    {
        DecompositionResult result =
            decompose(beams.precoders, beams.an_vector, nrf, p_t, options, rng);
        records.push_back({std::move(result.hybrid), std::move(result.residual_trace),
                           result.iterations, result.converged});
    }
    save_hybrid_beams((out_dir / "hybrid_beams.txt").string(), records);

    std::ofstream residuals(out_dir / "residuals.csv");
    residuals << "slot,iteration,objective\n";
    for (std::size_t s = 0; s < records.size(); ++s)
        for (std::size_t i = 0; i < records[s].residual_trace.size(); ++i)
            residuals << s << ',' << i << ',' << records[s].residual_trace[i] << "\n";

    write_manifest(out_dir, "decompose", args, nullptr, "", {seed},
                   {"hybrid_beams.txt", "residuals.csv"});
    std::cout << "decomposed " << records.size() << " slot(s) -> " << out_dir.string() << "\n";
    return 0;
}

int cmd_baselines(const std::string &scenario_path, const std::string &checkpoint_path,
                  const std::string &a2c_checkpoint_path, int episodes, std::uint64_t eval_seed,
                  const std::string &out, const std::vector<std::string> &args)
{
    const ScenarioConfig config = load_scenario_file(scenario_path);
    const GaussianPolicy ppo_policy = load_policy_for(config, checkpoint_path);
    const fs::path out_dir = resolve_out_dir(out);

    std::vector<std::pair<std::string, EvalMetrics>> table;
    table.emplace_back("ppo", evaluate_policy(ppo_policy, config, episodes, eval_seed));
    if (!a2c_checkpoint_path.empty())
    {
        const GaussianPolicy a2c_policy = load_policy_for(config, a2c_checkpoint_path);
        table.emplace_back("a2c", evaluate_policy(a2c_policy, config, episodes, eval_seed));
    }

    // Beam-only schemes hold the initial positions (zero moves).
    const int nt = config.n_antennas();
    const double p_t = config.transmit_power_watts;
    const std::vector<Eigen::Vector2d> no_moves(config.n_legit, Eigen::Vector2d::Zero());
    table.emplace_back("random", evaluate_scheme(config, episodes, eval_seed,
                                                 [&](const UavEnv &env, Rng &rng) {
                                                     return DecodedAction{
                                                         random_beamformers(
                                                             nt, env.config().n_legit, p_t, rng),
                                                         no_moves};
                                                 }));
    table.emplace_back("matched",
                       evaluate_scheme(config, episodes, eval_seed,
                                       [&](const UavEnv &env, Rng &) {
                                           const auto &ch = env.state().channels;
                                           return DecodedAction{
                                               matched_beam_beamformers(
                                                   ch.legit_geom, ch.eve_geom,
                                                   env.config().n_antennas_x,
                                                   env.config().n_antennas_y, p_t),
                                               no_moves};
                                       }));

    write_metrics_csv((out_dir / "baselines.csv").string(), table);
    write_manifest(out_dir, "baselines", args, &config, scenario_path, {eval_seed},
                   {"baselines.csv"});

    for (const auto &[name, m] : table)
        std::cout << name << ": total secrecy " << m.per_uav_secrecy.sum() << " bits/s/Hz\n";
    return 0;
}

int cmd_export(const std::string &scenario_path, const std::string &digital_path,
               const std::string &hybrid_path, int slot, const std::string &grid_arg,
               const std::string &out, const std::vector<std::string> &args)
{
    if (digital_path.empty() && hybrid_path.empty())
        throw std::invalid_argument("export: need --digital and/or --hybrid input");

    const ScenarioConfig config = load_scenario_file(scenario_path);
    const fs::path out_dir = resolve_out_dir(out);
    const int nx = config.n_antennas_x;
    const int ny = config.n_antennas_y;

    const auto x_pos = grid_arg.find('x');
    if (x_pos == std::string::npos)
        throw std::invalid_argument("grid must look like 181x91");
    const int n_az = std::stoi(grid_arg.substr(0, x_pos));
    const int n_el = std::stoi(grid_arg.substr(x_pos + 1));

    std::vector<std::string> products;
    std::vector<std::pair<std::string, BeampatternGrid>> grids;

    auto export_one = [&](const Eigen::MatrixXcd &rx, const std::string &scheme) {
        BeampatternGrid grid = compute_beampattern_grid(rx, nx, ny, n_az, n_el, scheme, slot);
        const std::string grid_name =
            "beampattern_slot" + std::to_string(slot) + "_" + scheme + ".txt";
        save_beampattern_grid((out_dir / grid_name).string(), grid);
        products.push_back(grid_name);

        // Azimuth cuts at each legitimate UAV's elevation.
        const std::string cuts_name = "cuts_slot" + std::to_string(slot) + "_" + scheme + ".csv";
        std::ofstream cuts(out_dir / cuts_name);
        cuts << "az_deg";
        std::vector<Eigen::VectorXd> cut_rows;
        for (int l = 0; l < config.n_legit; ++l)
        {
            const Geometry geom =
                angles_from_positions(config.base_position, config.legit_init_positions[l]);
            cut_rows.push_back(azimuth_cut(rx, nx, ny, geom.elevation_rad, n_az,
                                           grid.azimuth_start_deg, grid.azimuth_step_deg));
            cuts << ",uav" << l << "_el"
                 << static_cast<int>(geom.elevation_rad * 180.0 / 3.14159265358979) << "deg";
        }
        cuts << "\n";
        for (int ia = 0; ia < n_az; ++ia)
        {
            cuts << grid.azimuth_start_deg + ia * grid.azimuth_step_deg;
            for (const auto &cut : cut_rows)
                cuts << ',' << cut(ia);
            cuts << "\n";
        }
        products.push_back(cuts_name);
        grids.emplace_back(scheme, std::move(grid));
    };

    if (!digital_path.empty())
    {
        const auto slots = load_digital_beams(digital_path);
        if (slot < 0 || slot >= static_cast<int>(slots.size()))
            throw std::invalid_argument("slot index out of range for " + digital_path);
        export_one(covariance(slots[slot]), "digital");
    }
    if (!hybrid_path.empty())
    {
        const auto slots = load_hybrid_beams(hybrid_path);
        if (slot < 0 || slot >= static_cast<int>(slots.size()))
            throw std::invalid_argument("slot index out of range for " + hybrid_path);
        export_one(covariance(effective_digital(slots[slot].hybrid)), "hybrid");
    }

    if (grids.size() == 2)
    {
        const double corr = pearson_correlation(grids[0].second.power, grids[1].second.power);
        std::ofstream summary(out_dir / "correlation.csv");
        summary << "scheme_a,scheme_b,pearson\n";
        summary << grids[0].first << ',' << grids[1].first << ',' << corr << "\n";
        products.push_back("correlation.csv");
        std::cout << "digital/hybrid beampattern correlation: " << corr << "\n";
    }

    write_manifest(out_dir, "export", args, &config, scenario_path, {}, products);
    return 0;
}

} // namespace

int run_command(const std::vector<std::string> &args)
{
    CLI::App app{"secure multi-UAV ISAC beamforming laboratory"};
    app.require_subcommand(1);

    // train
    auto *train_cmd = app.add_subcommand("train", "PPO/A2C training runs over one or more seeds");
    std::string train_scenario, train_seeds = "1", train_algo = "ppo", train_out = ".";
    long train_episodes = -1;
    int train_eval_episodes = 5;
    train_cmd->add_option("--scenario", train_scenario, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--seeds", train_seeds, "seed list: 3, 0..4, or 1,5,9");
    train_cmd->add_option("--seed", train_seeds, "single seed (alias of --seeds)");
    train_cmd->add_option("--episodes", train_episodes,
                          "episode budget override (default: scenario value)");
    train_cmd->add_option("--algo", train_algo, "ppo | a2c")->check(CLI::IsMember({"ppo", "a2c"}));
    train_cmd->add_option("--eval-episodes", train_eval_episodes,
                          "deterministic eval episodes appended to each report");
    train_cmd->add_option("--out", train_out, "output directory");

    // eval
    auto *eval_cmd = app.add_subcommand("eval", "deterministic policy evaluation");
    std::string eval_scenario, eval_checkpoint, eval_out = ".";
    int eval_episodes = 10;
    std::uint64_t eval_seed = 1;
    bool eval_trajectory = false;
    eval_cmd->add_option("--scenario", eval_scenario, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "policy checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--episodes", eval_episodes, "evaluation episodes");
    eval_cmd->add_option("--eval-seed", eval_seed, "evaluation channel seed");
    eval_cmd->add_flag("--export-trajectory", eval_trajectory, "write per-slot episode trace");
    eval_cmd->add_option("--out", eval_out, "output directory");

    // decompose
    auto *dec_cmd = app.add_subcommand("decompose", "factor digital beams into hybrid form");
    std::string dec_input, dec_out = ".";
    int dec_nrf = 8, dec_max_iter = 50;
    double dec_pt = 10.0, dec_tol = 1e-6;
    std::uint64_t dec_seed = 1;
    dec_cmd->add_option("--input", dec_input, "digital beams file")
        ->required()
        ->check(CLI::ExistingFile);
    dec_cmd->add_option("--nrf", dec_nrf, "number of RF chains")->required();
    dec_cmd->add_option("--pt", dec_pt, "transmit power budget [W]");
    dec_cmd->add_option("--tol", dec_tol, "relative objective tolerance");
    dec_cmd->add_option("--max-iter", dec_max_iter, "iteration cap");
    dec_cmd->add_option("--seed", dec_seed, "analog init seed");
    dec_cmd->add_option("--out", dec_out, "output directory");

    // baselines
    auto *base_cmd = app.add_subcommand("baselines", "scheme comparison table");
    std::string base_scenario, base_checkpoint, base_a2c, base_out = ".";
    int base_episodes = 5;
    std::uint64_t base_seed = 1;
    base_cmd->add_option("--scenario", base_scenario, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    base_cmd->add_option("--checkpoint", base_checkpoint, "trained PPO checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    base_cmd->add_option("--a2c-checkpoint", base_a2c, "trained A2C checkpoint (optional row)")
        ->check(CLI::ExistingFile);
    base_cmd->add_option("--episodes", base_episodes, "evaluation episodes per scheme");
    base_cmd->add_option("--eval-seed", base_seed, "shared evaluation seed");
    base_cmd->add_option("--out", base_out, "output directory");

    // export
    auto *exp_cmd = app.add_subcommand("export", "beampattern grids and azimuth cuts");
    std::string exp_scenario, exp_digital, exp_hybrid, exp_grid = "181x91", exp_out = ".";
    int exp_slot = 0;
    exp_cmd->add_option("--scenario", exp_scenario, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    exp_cmd->add_option("--digital", exp_digital, "digital beams file")->check(CLI::ExistingFile);
    exp_cmd->add_option("--hybrid", exp_hybrid, "hybrid beams file")->check(CLI::ExistingFile);
    exp_cmd->add_option("--slot", exp_slot, "slot index to export");
    exp_cmd->add_option("--grid", exp_grid, "azimuth x elevation resolution, e.g. 181x91");
    exp_cmd->add_option("--out", exp_out, "output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e);
    }

    try
    {
        if (train_cmd->parsed())
            return cmd_train(train_scenario, train_seeds, train_episodes, train_algo, train_out,
                             train_eval_episodes, args);
        if (eval_cmd->parsed())
            return cmd_eval(eval_scenario, eval_checkpoint, eval_episodes, eval_seed,
                            eval_trajectory, eval_out, args);
        if (dec_cmd->parsed())
            return cmd_decompose(dec_input, dec_nrf, dec_pt, dec_tol, dec_max_iter, dec_seed,
                                 dec_out, args);
        if (base_cmd->parsed())
            return cmd_baselines(base_scenario, base_checkpoint, base_a2c, base_episodes,
                                 base_seed, base_out, args);
        if (exp_cmd->parsed())
            return cmd_export(exp_scenario, exp_digital, exp_hybrid, exp_slot, exp_grid, exp_out,
                              args);
    }
    catch (const std::exception &e)
    {
        std::cerr << "isaclab: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace isaclab::cli
