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

#ifndef ISACLAB_NEURAL_HPP
#define ISACLAB_NEURAL_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "isaclab/rng.hpp"

namespace isaclab {

// Dense network with tanh hidden layers and a linear output layer. Double
// precision throughout; gradients are hand-derived and verified against
// central finite differences.
struct MlpParams {
    std::vector<Eigen::MatrixXd> weights; // layer i maps in_i -> out_i
    std::vector<Eigen::VectorXd> biases;

    int input_dim() const { return static_cast<int>(weights.front().cols()); }
    int output_dim() const { return static_cast<int>(weights.back().rows()); }
    std::size_t n_layers() const { return weights.size(); }
    std::size_t n_params() const;
};

// Gradient container mirroring MlpParams shapes.
struct MlpGrads {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static MlpGrads zeros_like(const MlpParams &params);
    void accumulate(const MlpGrads &other);
    void scale(double factor);
};

// Orthogonal initialization: each weight matrix is an orthogonal slice scaled
// by sqrt(2) on hidden layers and by final_gain on the output layer (0.01 for
// policy heads so initial actions are near zero); biases start at zero.
// sizes = [input, hidden..., output].
MlpParams make_mlp(const std::vector<int> &sizes, Rng &rng, double final_gain = 1.0);

// Column-per-sample activations recorded during forward, enough for an exact
// backward pass.
struct ForwardCache {
    Eigen::MatrixXd input;                  // in x batch
    std::vector<Eigen::MatrixXd> hidden;    // post-tanh output of each hidden layer
};

// Batched forward: X is in x batch, result is out x batch.
Eigen::MatrixXd mlp_forward_batch(const MlpParams &params, const Eigen::MatrixXd &x,
                                  ForwardCache *cache = nullptr);

Eigen::VectorXd mlp_forward(const MlpParams &params, const Eigen::VectorXd &x,
                            ForwardCache *cache = nullptr);

// Exact gradients of the scalar loss whose per-sample output gradient is
// d_output (out x batch); gradients sum over the batch. Throws on a cache
// that does not match the parameters.
MlpGrads mlp_backward_batch(const MlpParams &params, const ForwardCache &cache,
                            const Eigen::MatrixXd &d_output);

MlpGrads mlp_backward(const MlpParams &params, const ForwardCache &cache,
                      const Eigen::VectorXd &d_output);

// Standard bias-corrected Adam.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step_count = 0;
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;

    static AdamState for_params(const MlpParams &params, double lr);
};

void adam_step(MlpParams &params, const MlpGrads &grads, AdamState &state);

struct AdamVecState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step_count = 0;
    Eigen::VectorXd m, v;

    static AdamVecState for_size(Eigen::Index n, double lr);
};

void adam_step(Eigen::VectorXd &params, const Eigen::VectorXd &grads, AdamVecState &state);

// Diagonal Gaussian policy: state-dependent mean from an MLP, one learnable
// state-independent log standard deviation per action dimension. Log-stds
// live in [-20, 2]; optimizer steps re-project into that range.
struct GaussianPolicy {
    static constexpr double kLogStdMin = -20.0;
    static constexpr double kLogStdMax = 2.0;

    MlpParams mean_net;
    Eigen::VectorXd log_std;

    Eigen::VectorXd stds() const
    {
        return log_std.array().max(kLogStdMin).min(kLogStdMax).exp();
    }
    Eigen::VectorXd mean(const Eigen::VectorXd &obs) const
    {
        return mlp_forward(mean_net, obs);
    }
    int action_dim() const { return mean_net.output_dim(); }
};

GaussianPolicy make_policy(int obs_dim, const std::vector<int> &hidden_sizes, int action_dim,
                           double log_std_init, Rng &rng);

MlpParams make_critic(int obs_dim, const std::vector<int> &hidden_sizes, Rng &rng);

struct SampleResult {
    Eigen::VectorXd action; // pre-clip; the environment clips to [-1,1]
    double log_prob = 0.0;
};

// a = mu + sigma .* xi with xi ~ N(0, I); log-prob is the diagonal Gaussian
// density at a (before any clipping).
SampleResult gaussian_sample_logprob(const GaussianPolicy &policy, const Eigen::VectorXd &obs,
                                     Rng &rng);

double gaussian_log_prob(const Eigen::VectorXd &action, const Eigen::VectorXd &mean,
                         const Eigen::VectorXd &log_std);

// Central finite differences (step 1e-5) on probe_count randomly chosen
// coordinates; returns the worst relative discrepancy against the supplied
// analytic gradient, with denominators floored at 1e-8.
double finite_diff_check(const std::function<double(const MlpParams &)> &loss,
                         const MlpParams &params, const MlpGrads &analytic, int probe_count,
                         Rng &rng, double step = 1e-5);

} // namespace isaclab

#endif // ISACLAB_NEURAL_HPP
