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

#include "isaclab/neural.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace isaclab {

namespace {

constexpr double kHiddenGain = 1.4142135623730951; // sqrt(2)

Eigen::MatrixXd orthogonal_matrix(int rows, int cols, Rng &rng)
{
    const int big = std::max(rows, cols);
    const int small = std::min(rows, cols);
    Eigen::MatrixXd gauss(big, small);
    for (int j = 0; j < small; ++j)
        for (int i = 0; i < big; ++i)
            gauss(i, j) = rng.normal();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
    // Sign correction keeps the distribution Haar-uniform.
    for (int j = 0; j < small; ++j)
        if (r(j, j) < 0.0)
            q.col(j) = -q.col(j);

    if (rows >= cols)
        return q;
    return q.transpose();
}

void check_shapes(const MlpParams &params, const MlpGrads &grads)
{
    if (grads.weights.size() != params.weights.size() ||
        grads.biases.size() != params.biases.size())
        throw std::invalid_argument("gradient/parameter layer count mismatch");
    for (std::size_t i = 0; i < params.weights.size(); ++i)
    {
        if (grads.weights[i].rows() != params.weights[i].rows() ||
            grads.weights[i].cols() != params.weights[i].cols() ||
            grads.biases[i].size() != params.biases[i].size())
            throw std::invalid_argument("gradient/parameter shape mismatch at layer " +
                                        std::to_string(i));
    }
}

} // namespace

std::size_t MlpParams::n_params() const
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        n += static_cast<std::size_t>(weights[i].size()) + biases[i].size();
    return n;
}

MlpGrads MlpGrads::zeros_like(const MlpParams &params)
{
    MlpGrads g;
    g.weights.reserve(params.weights.size());
    g.biases.reserve(params.biases.size());
    for (std::size_t i = 0; i < params.weights.size(); ++i)
    {
        g.weights.emplace_back(
            Eigen::MatrixXd::Zero(params.weights[i].rows(), params.weights[i].cols()));
        g.biases.emplace_back(Eigen::VectorXd::Zero(params.biases[i].size()));
    }
    return g;
}

void MlpGrads::accumulate(const MlpGrads &other)
{
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        weights[i] += other.weights[i];
        biases[i] += other.biases[i];
    }
}

void MlpGrads::scale(double factor)
{
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        weights[i] *= factor;
        biases[i] *= factor;
    }
}

MlpParams make_mlp(const std::vector<int> &sizes, Rng &rng, double final_gain)
{
    if (sizes.size() < 2)
        throw std::invalid_argument("make_mlp: need at least input and output sizes");
    MlpParams params;
    const std::size_t n_layers = sizes.size() - 1;
    for (std::size_t i = 0; i < n_layers; ++i)
    {
        const double gain = (i + 1 == n_layers) ? final_gain : kHiddenGain;
        params.weights.push_back(gain * orthogonal_matrix(sizes[i + 1], sizes[i], rng));
        params.biases.emplace_back(Eigen::VectorXd::Zero(sizes[i + 1]));
    }
    return params;
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams &params, const Eigen::MatrixXd &x,
                                  ForwardCache *cache)
{
    if (x.rows() != params.input_dim())
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    if (cache)
    {
        cache->input = x;
        cache->hidden.clear();
    }

    Eigen::MatrixXd h = x;
    const std::size_t n_layers = params.n_layers();
    for (std::size_t i = 0; i < n_layers; ++i)
    {
        Eigen::MatrixXd z = (params.weights[i] * h).colwise() + params.biases[i];
        if (i + 1 < n_layers)
        {
            h = z.array().tanh();
            if (cache)
                cache->hidden.push_back(h);
        }
        else
            h = std::move(z);
    }
    return h;
}

Eigen::VectorXd mlp_forward(const MlpParams &params, const Eigen::VectorXd &x,
                            ForwardCache *cache)
{
    return mlp_forward_batch(params, x, cache);
}

MlpGrads mlp_backward_batch(const MlpParams &params, const ForwardCache &cache,
                            const Eigen::MatrixXd &d_output)
{
    const std::size_t n_layers = params.n_layers();
    if (cache.hidden.size() + 1 != n_layers || cache.input.rows() != params.input_dim())
        throw std::invalid_argument("mlp_backward: stale or mismatched cache");
    for (std::size_t i = 0; i + 1 < n_layers; ++i)
        if (cache.hidden[i].rows() != params.weights[i].rows() ||
            cache.hidden[i].cols() != cache.input.cols())
            throw std::invalid_argument("mlp_backward: stale or mismatched cache");
    if (d_output.rows() != params.output_dim() || d_output.cols() != cache.input.cols())
        throw std::invalid_argument("mlp_backward: output gradient shape mismatch");

    MlpGrads grads = MlpGrads::zeros_like(params);
    Eigen::MatrixXd delta = d_output;
    for (std::size_t i = n_layers; i-- > 0;)
    {
        const Eigen::MatrixXd &layer_in = (i == 0) ? cache.input : cache.hidden[i - 1];
        grads.weights[i] = delta * layer_in.transpose();
        grads.biases[i] = delta.rowwise().sum();
        if (i > 0)
        {
            // tanh'(z) = 1 - tanh(z)^2, with tanh(z) cached
            delta = (params.weights[i].transpose() * delta).array() *
                    (1.0 - cache.hidden[i - 1].array().square());
        }
    }
    return grads;
}

MlpGrads mlp_backward(const MlpParams &params, const ForwardCache &cache,
                      const Eigen::VectorXd &d_output)
{
    return mlp_backward_batch(params, cache, d_output);
}

AdamState AdamState::for_params(const MlpParams &params, double lr)
{
    AdamState s;
    s.lr = lr;
    for (std::size_t i = 0; i < params.weights.size(); ++i)
    {
        s.m_w.emplace_back(
            Eigen::MatrixXd::Zero(params.weights[i].rows(), params.weights[i].cols()));
        s.v_w.emplace_back(
            Eigen::MatrixXd::Zero(params.weights[i].rows(), params.weights[i].cols()));
        s.m_b.emplace_back(Eigen::VectorXd::Zero(params.biases[i].size()));
        s.v_b.emplace_back(Eigen::VectorXd::Zero(params.biases[i].size()));
    }
    return s;
}

void adam_step(MlpParams &params, const MlpGrads &grads, AdamState &state)
{
    check_shapes(params, grads);
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, state.step_count);
    const double bc2 = 1.0 - std::pow(state.beta2, state.step_count);

    for (std::size_t i = 0; i < params.weights.size(); ++i)
    {
        state.m_w[i] = state.beta1 * state.m_w[i] + (1.0 - state.beta1) * grads.weights[i];
        state.v_w[i] = state.beta2 * state.v_w[i] +
                       (1.0 - state.beta2) * grads.weights[i].array().square().matrix();
        params.weights[i].array() -= state.lr * (state.m_w[i].array() / bc1) /
                                     ((state.v_w[i].array() / bc2).sqrt() + state.eps);

        state.m_b[i] = state.beta1 * state.m_b[i] + (1.0 - state.beta1) * grads.biases[i];
        state.v_b[i] = state.beta2 * state.v_b[i] +
                       (1.0 - state.beta2) * grads.biases[i].array().square().matrix();
        params.biases[i].array() -= state.lr * (state.m_b[i].array() / bc1) /
                                    ((state.v_b[i].array() / bc2).sqrt() + state.eps);
    }
}

AdamVecState AdamVecState::for_size(Eigen::Index n, double lr)
{
    AdamVecState s;
    s.lr = lr;
    s.m = Eigen::VectorXd::Zero(n);
    s.v = Eigen::VectorXd::Zero(n);
    return s;
}

void adam_step(Eigen::VectorXd &params, const Eigen::VectorXd &grads, AdamVecState &state)
{
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: vector shape mismatch");
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, state.step_count);
    const double bc2 = 1.0 - std::pow(state.beta2, state.step_count);
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.array().square().matrix();
    params.array() -=
        state.lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + state.eps);
}

GaussianPolicy make_policy(int obs_dim, const std::vector<int> &hidden_sizes, int action_dim,
                           double log_std_init, Rng &rng)
{
    std::vector<int> sizes;
    sizes.push_back(obs_dim);
    sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
    sizes.push_back(action_dim);

    GaussianPolicy policy;
    policy.mean_net = make_mlp(sizes, rng, 0.01);
    policy.log_std = Eigen::VectorXd::Constant(action_dim, log_std_init);
    return policy;
}

MlpParams make_critic(int obs_dim, const std::vector<int> &hidden_sizes, Rng &rng)
{
    std::vector<int> sizes;
    sizes.push_back(obs_dim);
    sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
    sizes.push_back(1);
    return make_mlp(sizes, rng, 1.0);
}

double gaussian_log_prob(const Eigen::VectorXd &action, const Eigen::VectorXd &mean,
                         const Eigen::VectorXd &log_std)
{
    constexpr double half_log_2pi = 0.9189385332046727; // 0.5*log(2*pi)
    const Eigen::ArrayXd ls =
        log_std.array().max(GaussianPolicy::kLogStdMin).min(GaussianPolicy::kLogStdMax);
    const Eigen::ArrayXd z = (action - mean).array() / ls.exp();
    return (-0.5 * z.square() - ls - half_log_2pi).sum();
}

SampleResult gaussian_sample_logprob(const GaussianPolicy &policy, const Eigen::VectorXd &obs,
                                     Rng &rng)
{
    const Eigen::VectorXd mu = policy.mean(obs);
    const Eigen::VectorXd sigma = policy.stds();

    SampleResult result;
    result.action.resize(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        result.action(i) = mu(i) + sigma(i) * rng.normal();
    result.log_prob = gaussian_log_prob(result.action, mu, policy.log_std);
    return result;
}

double finite_diff_check(const std::function<double(const MlpParams &)> &loss,
                         const MlpParams &params, const MlpGrads &analytic, int probe_count,
                         Rng &rng, double step)
{
    check_shapes(params, analytic);
    const std::size_t total = params.n_params();
    if (total == 0)
        return 0.0;

    // Flat coordinate k -> (layer, weight-or-bias, offset).
    auto probe = [&](std::size_t k) -> double {
        MlpParams perturbed = params;
        double analytic_value = 0.0;
        std::size_t offset = k;
        for (std::size_t i = 0; i < params.weights.size(); ++i)
        {
            const std::size_t wn = static_cast<std::size_t>(params.weights[i].size());
            if (offset < wn)
            {
                analytic_value = analytic.weights[i].data()[offset];
                perturbed.weights[i].data()[offset] += step;
                const double up = loss(perturbed);
                perturbed.weights[i].data()[offset] -= 2.0 * step;
                const double down = loss(perturbed);
                const double fd = (up - down) / (2.0 * step);
                return std::abs(fd - analytic_value) /
                       std::max({std::abs(fd), std::abs(analytic_value), 1e-8});
            }
            offset -= wn;
            const std::size_t bn = static_cast<std::size_t>(params.biases[i].size());
            if (offset < bn)
            {
                analytic_value = analytic.biases[i](static_cast<Eigen::Index>(offset));
                perturbed.biases[i](static_cast<Eigen::Index>(offset)) += step;
                const double up = loss(perturbed);
                perturbed.biases[i](static_cast<Eigen::Index>(offset)) -= 2.0 * step;
                const double down = loss(perturbed);
                const double fd = (up - down) / (2.0 * step);
                return std::abs(fd - analytic_value) /
                       std::max({std::abs(fd), std::abs(analytic_value), 1e-8});
            }
            offset -= bn;
        }
        return 0.0;
    };

    double worst = 0.0;
    for (int p = 0; p < probe_count; ++p)
    {
        const std::size_t k = static_cast<std::size_t>(rng.next_u64() % total);
        worst = std::max(worst, probe(k));
    }
    return worst;
}

} // namespace isaclab
