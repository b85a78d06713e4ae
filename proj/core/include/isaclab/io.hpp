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

#ifndef ISACLAB_IO_HPP
#define ISACLAB_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "isaclab/hbf.hpp"
#include "isaclab/metrics.hpp"
#include "isaclab/ppo.hpp"

namespace isaclab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parameter checkpoints. Binary, little-endian, versioned:
//   magic "ISACCKP1", u32 version,
//   actor mean net  (u32 n_layers, u32 sizes[n_layers+1],
//                    per layer: row-major f64 weights then f64 biases),
//   u32 action_dim, f64 log_std[action_dim],
//   critic net      (same layout as the actor).
// ---------------------------------------------------------------------------

struct Checkpoint {
    GaussianPolicy policy;
    MlpParams critic;
};

void save_checkpoint(const std::string &path, const GaussianPolicy &policy,
                     const MlpParams &critic);
Checkpoint load_checkpoint(const std::string &path);

// ---------------------------------------------------------------------------
// Per-slot digital beamformers; text format with a versioned header so the
// decomposition batch mode can consume products from any run.
// ---------------------------------------------------------------------------

void save_digital_beams(const std::string &path, const std::vector<DigitalBeamformers> &slots);
std::vector<DigitalBeamformers> load_digital_beams(const std::string &path);

// Hybrid decomposition products plus their residual traces.
struct HybridSlotRecord {
    HybridBeamformers hybrid;
    std::vector<double> residual_trace;
    int iterations = 0;
    bool converged = false;
};

void save_hybrid_beams(const std::string &path, const std::vector<HybridSlotRecord> &slots);
std::vector<HybridSlotRecord> load_hybrid_beams(const std::string &path);

// ---------------------------------------------------------------------------
// Beampattern products: angle grids and azimuth cuts.
// ---------------------------------------------------------------------------

struct BeampatternGrid {
    std::string scheme; // "digital" or "hybrid"
    int slot = 0;
    int nx = 0, ny = 0;
    double azimuth_start_deg = -90.0, azimuth_step_deg = 1.0;
    double elevation_start_deg = 0.0, elevation_step_deg = 1.0;
    Eigen::MatrixXd power; // n_azimuth x n_elevation
};

// Samples a^H R_x a over the rectangular angle grid (defaults: 181 x 91,
// 1-degree steps over azimuth [-90, 90] and elevation [0, 90]).
BeampatternGrid compute_beampattern_grid(const Eigen::MatrixXcd &rx, int nx, int ny,
                                         int n_azimuth = 181, int n_elevation = 91,
                                         const std::string &scheme = "digital", int slot = 0);

void save_beampattern_grid(const std::string &path, const BeampatternGrid &grid);
BeampatternGrid load_beampattern_grid(const std::string &path);

double pearson_correlation(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);

// Azimuth cut at a fixed elevation (per-UAV beampattern plots).
Eigen::VectorXd azimuth_cut(const Eigen::MatrixXcd &rx, int nx, int ny, double elevation_rad,
                            int n_azimuth = 181, double azimuth_start_deg = -90.0,
                            double azimuth_step_deg = 1.0);

// ---------------------------------------------------------------------------
// Row-oriented delimited products (comma-separated, '#' comments).
// ---------------------------------------------------------------------------

// episode,return,r_com,r_sen,r_qos,actor_loss,critic_loss — the loss columns
// carry the statistics of the update phase that consumed the episode.
void write_training_log(const std::string &path, const TrainReport &report);

struct EpisodeTraceRow {
    int slot = 0;
    double reward = 0.0;
    RewardComponents components;
    double sum_secrecy = 0.0;
    std::vector<Eigen::Vector3d> positions; // legitimate UAVs after the move
};

void write_episode_trace(const std::string &path, const std::vector<EpisodeTraceRow> &rows);

void write_metrics_csv(const std::string &path,
                       const std::vector<std::pair<std::string, EvalMetrics>> &rows);

// Reader used by the round-trip tests and downstream tooling: skips '#'
// comment lines, splits on the delimiter, keeps fields as strings.
std::vector<std::vector<std::string>> read_delimited(const std::string &path, char delim = ',');

} // namespace isaclab

#endif // ISACLAB_IO_HPP
