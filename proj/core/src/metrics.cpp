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

#include "isaclab/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace isaclab {

DigitalBeamformers effective_digital(const HybridBeamformers &hybrid)
{
    if (hybrid.analog.cols() != hybrid.digital.rows() ||
        hybrid.analog.cols() != hybrid.an_digital.size())
        throw std::invalid_argument("effective_digital: dimension mismatch");
    return {hybrid.analog * hybrid.digital, hybrid.analog * hybrid.an_digital};
}

double sinr(const Eigen::VectorXcd &h, const DigitalBeamformers &beams, int target,
            double noise_power)
{
    const int n_streams = static_cast<int>(beams.precoders.cols());
    if (target < 0 || target >= n_streams)
        throw std::invalid_argument("sinr: target stream out of range");
    if (h.size() != beams.precoders.rows() || h.size() != beams.an_vector.size())
        throw std::invalid_argument("sinr: dimension mismatch");

    const double desired = std::norm(h.dot(beams.precoders.col(target)));
    double interference = 0.0;
    for (int j = 0; j < n_streams; ++j)
    {
        if (j == target)
            continue;
        interference += std::norm(h.dot(beams.precoders.col(j)));
    }
    const double an = std::norm(h.dot(beams.an_vector));
    return desired / (interference + an + noise_power);
}

double sinr_legit(const ChannelSet &channels, const DigitalBeamformers &beams, int l,
                  double noise_power)
{
    return sinr(channels.legit.at(l), beams, l, noise_power);
}

double sinr_eve(const ChannelSet &channels, const DigitalBeamformers &beams, int e, int l,
                double noise_power)
{
    return sinr(channels.eves.at(e), beams, l, noise_power);
}

SecrecyReport secrecy_report(const ChannelSet &channels, const DigitalBeamformers &beams,
                             double noise_power)
{
    const int n_legit = static_cast<int>(channels.legit.size());
    const int n_eves = static_cast<int>(channels.eves.size());

    SecrecyReport report;
    report.legit_rates.resize(n_legit);
    report.eve_rates.resize(n_eves, n_legit);
    report.secrecy_rates.resize(n_legit);

    for (int l = 0; l < n_legit; ++l)
        report.legit_rates(l) = std::log2(1.0 + sinr_legit(channels, beams, l, noise_power));

    for (int e = 0; e < n_eves; ++e)
        for (int l = 0; l < n_legit; ++l)
            report.eve_rates(e, l) =
                std::log2(1.0 + sinr_eve(channels, beams, e, l, noise_power));

    for (int l = 0; l < n_legit; ++l)
    {
        double worst = 0.0;
        for (int e = 0; e < n_eves; ++e)
            worst = std::max(worst, report.eve_rates(e, l));
        const double secrecy = n_eves > 0 ? report.legit_rates(l) - worst : report.legit_rates(l);
        report.secrecy_rates(l) = std::max(0.0, secrecy);
    }
    report.sum_secrecy = report.secrecy_rates.sum();
    return report;
}

Eigen::MatrixXcd covariance(const DigitalBeamformers &beams)
{
    return beams.precoders * beams.precoders.adjoint() +
           beams.an_vector * beams.an_vector.adjoint();
}

double beampattern(const Eigen::MatrixXcd &rx, const Geometry &geom, int nx, int ny)
{
    if (rx.rows() != rx.cols() || rx.rows() != static_cast<Eigen::Index>(nx) * ny)
        throw std::invalid_argument("beampattern: covariance dimension mismatch");

    const Eigen::VectorXcd a = steering_vector(geom, nx, ny);
    const std::complex<double> p = a.dot(rx * a); // a^H Rx a
    if (std::abs(p.imag()) > 1e-10 * std::max(1.0, std::abs(p.real())))
        throw std::invalid_argument("beampattern: non-Hermitian covariance (imaginary residue " +
                                    std::to_string(p.imag()) + ")");
    return p.real();
}

double sensing_margin(const Eigen::MatrixXcd &rx, const Geometry &eve_geom, double gamma_e,
                      int nx, int ny)
{
    if (eve_geom.distance_m <= 0.0)
        throw std::invalid_argument("sensing_margin: distance must be positive");
    const double p = beampattern(rx, eve_geom, nx, ny);
    return p / (eve_geom.distance_m * eve_geom.distance_m) - gamma_e;
}

double total_power(const DigitalBeamformers &beams)
{
    return beams.precoders.squaredNorm() + beams.an_vector.squaredNorm();
}

double total_power(const HybridBeamformers &hybrid)
{
    return total_power(effective_digital(hybrid));
}

DigitalBeamformers matched_beam_beamformers(const std::vector<Geometry> &legit_geom,
                                            const std::vector<Geometry> &eve_geom, int nx,
                                            int ny, double p_t)
{
    const int nt = nx * ny;
    const int n_legit = static_cast<int>(legit_geom.size());
    if (n_legit < 1 || n_legit >= nt)
        throw std::invalid_argument("matched_beam_beamformers: need 1 <= L < N_t");

    const double per_component = p_t / (n_legit + 1);
    DigitalBeamformers beams = DigitalBeamformers::zeros(nt, n_legit);

    Eigen::MatrixXcd steer(nt, n_legit);
    for (int l = 0; l < n_legit; ++l)
    {
        steer.col(l) = steering_vector(legit_geom[l], nx, ny);
        beams.precoders.col(l) = std::sqrt(per_component) * steer.col(l);
    }

    // AN direction: aggregate eavesdropper steering projected onto the
    // orthogonal complement of the legitimate steering span. Falls back to
    // canonical basis vectors when the projection degenerates.
    auto project_out = [&](const Eigen::VectorXcd &v) -> Eigen::VectorXcd {
        Eigen::VectorXcd residual = v;
        // Gram-Schmidt against an orthonormalized copy of the steering span.
        Eigen::MatrixXcd q(nt, n_legit);
        int rank = 0;
        for (int l = 0; l < n_legit; ++l)
        {
            Eigen::VectorXcd u = steer.col(l);
            for (int k = 0; k < rank; ++k)
                u -= q.col(k).dot(u) * q.col(k);
            const double n = u.norm();
            if (n > 1e-12)
                q.col(rank++) = u / n;
        }
        for (int k = 0; k < rank; ++k)
            residual -= q.col(k).dot(residual) * q.col(k);
        return residual;
    };

    Eigen::VectorXcd an_dir = Eigen::VectorXcd::Zero(nt);
    if (!eve_geom.empty())
    {
        Eigen::VectorXcd target = Eigen::VectorXcd::Zero(nt);
        for (const auto &g : eve_geom)
            target += steering_vector(g, nx, ny);
        an_dir = project_out(target);
    }
    if (an_dir.norm() <= 1e-10)
    {
        for (int k = 0; k < nt && an_dir.norm() <= 1e-10; ++k)
        {
            Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(nt);
            basis(k) = 1.0;
            an_dir = project_out(basis);
        }
    }
    beams.an_vector = std::sqrt(per_component) * an_dir / an_dir.norm();
    return beams;
}

DigitalBeamformers random_beamformers(int nt, int l, double p_t, Rng &rng)
{
    DigitalBeamformers beams = DigitalBeamformers::zeros(nt, l);
    for (int j = 0; j < l; ++j)
        for (int i = 0; i < nt; ++i)
            beams.precoders(i, j) = rng.complex_normal_unit();
    for (int i = 0; i < nt; ++i)
        beams.an_vector(i) = rng.complex_normal_unit();
    const double power = total_power(beams);
    const double eta = std::sqrt(p_t / power);
    beams.precoders *= eta;
    beams.an_vector *= eta;
    return beams;
}

} // namespace isaclab
