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

#include "isaclab/hbf.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace isaclab {

namespace {

// Moore-Penrose pseudo-inverse with rank-revealing cutoff.
Eigen::MatrixXcd pseudo_inverse(const Eigen::MatrixXcd &a)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = svd.singularValues();
    const double cutoff = std::max(a.rows(), a.cols()) *
                          std::numeric_limits<double>::epsilon() *
                          (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff)
            inv_sv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

double min_singular_ratio(const Eigen::MatrixXcd &a)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const Eigen::VectorXd &sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0.0;
    return sv(sv.size() - 1) / sv(0);
}

} // namespace

Eigen::MatrixXcd init_analog(int nt, int nrf, Rng &rng)
{
    if (nrf < 1 || nrf > nt)
        throw std::invalid_argument("init_analog: need 1 <= N_RF <= N_t");
    const double modulus = 1.0 / std::sqrt(static_cast<double>(nt));
    Eigen::MatrixXcd analog(nt, nrf);
    for (int j = 0; j < nrf; ++j)
        for (int i = 0; i < nt; ++i)
            analog(i, j) = std::polar(modulus, rng.uniform(0.0, 2.0 * std::numbers::pi));
    return analog;
}

std::pair<Eigen::MatrixXcd, Eigen::VectorXcd> update_digital(const Eigen::MatrixXcd &analog,
                                                             const Eigen::MatrixXcd &f_opt,
                                                             const Eigen::VectorXcd &w_opt)
{
    if (f_opt.rows() != analog.rows() || w_opt.size() != analog.rows())
        throw std::invalid_argument("update_digital: dimension mismatch");
    const Eigen::MatrixXcd pinv = pseudo_inverse(analog);
    return {pinv * f_opt, pinv * w_opt};
}

Eigen::MatrixXcd update_analog(const Eigen::MatrixXcd &f_opt, const Eigen::MatrixXcd &f_bb,
                               const Eigen::VectorXcd &w_opt, const Eigen::VectorXcd &w,
                               const Eigen::MatrixXcd &previous_analog)
{
    const Eigen::Index nt = f_opt.rows();
    const Eigen::Index nrf = f_bb.rows();
    if (f_opt.cols() != f_bb.cols() || w_opt.size() != nt || w.size() != nrf ||
        previous_analog.rows() != nt || previous_analog.cols() != nrf)
        throw std::invalid_argument("update_analog: dimension mismatch");

    const double modulus = 1.0 / std::sqrt(static_cast<double>(nt));
    const Eigen::MatrixXcd correlation = f_opt * f_bb.adjoint() + w_opt * w.adjoint();

    Eigen::MatrixXcd analog(nt, nrf);
    for (Eigen::Index j = 0; j < nrf; ++j)
        for (Eigen::Index i = 0; i < nt; ++i)
        {
            const std::complex<double> c = correlation(i, j);
            const double mag = std::abs(c);
            // zero correlation: any phase is stationary, hold the previous one
            analog(i, j) = mag == 0.0 ? previous_analog(i, j) : modulus * (c / mag);
        }
    return analog;
}

void normalize_power(HybridBeamformers &hybrid, double p_t)
{
    const double p_total = total_power(hybrid);
    if (p_total <= 0.0)
        throw std::invalid_argument("normalize_power: zero realized power");
    const double eta = std::sqrt(p_t / p_total);
    hybrid.digital *= eta;
    hybrid.an_digital *= eta;
}

double decomposition_objective(const Eigen::MatrixXcd &f_opt, const Eigen::VectorXcd &w_opt,
                               const HybridBeamformers &hybrid)
{
    return (f_opt - hybrid.analog * hybrid.digital).squaredNorm() +
           (w_opt - hybrid.analog * hybrid.an_digital).squaredNorm();
}

DecompositionResult decompose(const Eigen::MatrixXcd &f_opt, const Eigen::VectorXcd &w_opt,
                              int nrf, double p_t, const DecomposeOptions &options, Rng &rng)
{
    const int nt = static_cast<int>(f_opt.rows());
    if (w_opt.size() != nt)
        throw std::invalid_argument("decompose: AN vector length mismatch");
    if (p_t <= 0.0)
        throw std::invalid_argument("decompose: power budget must be positive");

    DecompositionResult result;
    result.hybrid.analog = init_analog(nt, nrf, rng);
    // Rare near-singular draws would poison the least-squares step; redraw.
    for (int attempt = 0; attempt < 8 && min_singular_ratio(result.hybrid.analog) < 1e-8;
         ++attempt)
        result.hybrid.analog = init_analog(nt, nrf, rng);

    const int l = static_cast<int>(f_opt.cols());
    result.hybrid.digital = Eigen::MatrixXcd::Zero(nrf, l);
    result.hybrid.an_digital = Eigen::VectorXcd::Zero(nrf);

    if (f_opt.squaredNorm() + w_opt.squaredNorm() == 0.0)
    {
        result.residual_trace.push_back(0.0);
        result.iterations = 1;
        result.converged = true;
        return result;
    }

    HybridBeamformers best = result.hybrid;
    double best_objective = std::numeric_limits<double>::infinity();
    double prev_objective = std::numeric_limits<double>::infinity();
    Eigen::MatrixXcd accepted_analog = result.hybrid.analog;

    for (int iter = 0; iter < options.max_iter; ++iter)
    {
        auto [f_bb, w] = update_digital(result.hybrid.analog, f_opt, w_opt);
        result.hybrid.digital = std::move(f_bb);
        result.hybrid.an_digital = std::move(w);
        const double objective = decomposition_objective(f_opt, w_opt, result.hybrid);
        result.iterations = iter + 1;

        if (objective > prev_objective)
        {
            // The phase update worsened the joint objective: keep the prior
            // analog matrix and stop (re-running would reproduce the same
            // candidate).
            result.hybrid.analog = accepted_analog;
            result.converged = true;
            break;
        }

        result.residual_trace.push_back(objective);
        if (objective <= best_objective)
        {
            best_objective = objective;
            best = result.hybrid;
        }
        if (std::isfinite(prev_objective) &&
            std::abs(prev_objective - objective) <=
                options.tol * std::max(prev_objective, 1e-300))
        {
            result.converged = true;
            break;
        }
        prev_objective = objective;
        accepted_analog = result.hybrid.analog;

        result.hybrid.analog = update_analog(f_opt, result.hybrid.digital, w_opt,
                                             result.hybrid.an_digital, accepted_analog);
    }

    result.hybrid = best;
    if (total_power(result.hybrid) > 0.0)
        normalize_power(result.hybrid, p_t);
    return result;
}

} // namespace isaclab
