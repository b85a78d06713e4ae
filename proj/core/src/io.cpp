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

#include "isaclab/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace isaclab {

namespace {

constexpr char kCheckpointMagic[8] = {'I', 'S', 'A', 'C', 'C', 'K', 'P', '1'};

void write_u32(std::ostream &out, std::uint32_t v)
{
    out.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream &in)
{
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char *>(&v), sizeof(v));
    if (!in)
        throw IoError("checkpoint: unexpected end of file");
    return v;
}

void write_f64(std::ostream &out, const double *data, std::size_t n)
{
    out.write(reinterpret_cast<const char *>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_f64(std::istream &in, double *data, std::size_t n)
{
    in.read(reinterpret_cast<char *>(data), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in)
        throw IoError("checkpoint: unexpected end of file");
}

void write_mlp(std::ostream &out, const MlpParams &params)
{
    const std::uint32_t n_layers = static_cast<std::uint32_t>(params.n_layers());
    write_u32(out, n_layers);
    write_u32(out, static_cast<std::uint32_t>(params.input_dim()));
    for (std::uint32_t i = 0; i < n_layers; ++i)
        write_u32(out, static_cast<std::uint32_t>(params.weights[i].rows()));
    for (std::uint32_t i = 0; i < n_layers; ++i)
    {
        const auto &w = params.weights[i];
        // row-major blocks
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
            {
                const double v = w(r, c);
                write_f64(out, &v, 1);
            }
        write_f64(out, params.biases[i].data(), static_cast<std::size_t>(params.biases[i].size()));
    }
}

MlpParams read_mlp(std::istream &in)
{
    const std::uint32_t n_layers = read_u32(in);
    if (n_layers == 0 || n_layers > 64)
        throw IoError("checkpoint: implausible layer count");
    std::vector<int> sizes(n_layers + 1);
    sizes[0] = static_cast<int>(read_u32(in));
    for (std::uint32_t i = 0; i < n_layers; ++i)
        sizes[i + 1] = static_cast<int>(read_u32(in));

    MlpParams params;
    for (std::uint32_t i = 0; i < n_layers; ++i)
    {
        Eigen::MatrixXd w(sizes[i + 1], sizes[i]);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                read_f64(in, &w(r, c), 1);
        Eigen::VectorXd b(sizes[i + 1]);
        read_f64(in, b.data(), static_cast<std::size_t>(b.size()));
        params.weights.push_back(std::move(w));
        params.biases.push_back(std::move(b));
    }
    return params;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_double(const std::string &tok, const std::string &context)
{
    try
    {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size())
            throw IoError(context + ": trailing characters in '" + tok + "'");
        return v;
    }
    catch (const IoError &)
    {
        throw;
    }
    catch (const std::exception &)
    {
        throw IoError(context + ": cannot parse number '" + tok + "'");
    }
}

std::vector<std::string> tokens_of(const std::string &line)
{
    std::vector<std::string> toks;
    std::stringstream ss(line);
    std::string t;
    while (ss >> t)
        toks.push_back(t);
    return toks;
}

// header lines "key value" until the first "slot" line
std::string next_content_line(std::istream &in)
{
    std::string line;
    while (std::getline(in, line))
    {
        if (!line.empty() && line[0] == '#')
            continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        return line;
    }
    return "";
}

void write_complex_row(std::ostream &out, const Eigen::MatrixXcd &m, Eigen::Index row)
{
    for (Eigen::Index c = 0; c < m.cols(); ++c)
    {
        if (c)
            out << ' ';
        out << fmt(m(row, c).real()) << ' ' << fmt(m(row, c).imag());
    }
}

} // namespace

void save_checkpoint(const std::string &path, const GaussianPolicy &policy,
                     const MlpParams &critic)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open checkpoint for writing: " + path);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_u32(out, 1); // version
    write_mlp(out, policy.mean_net);
    write_u32(out, static_cast<std::uint32_t>(policy.log_std.size()));
    write_f64(out, policy.log_std.data(), static_cast<std::size_t>(policy.log_std.size()));
    write_mlp(out, critic);
    if (!out)
        throw IoError("write failure on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw IoError("not an isaclab checkpoint: " + path);
    const std::uint32_t version = read_u32(in);
    if (version != 1)
        throw IoError("unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    ckpt.policy.mean_net = read_mlp(in);
    const std::uint32_t act_dim = read_u32(in);
    ckpt.policy.log_std.resize(act_dim);
    read_f64(in, ckpt.policy.log_std.data(), act_dim);
    ckpt.critic = read_mlp(in);
    return ckpt;
}

void save_digital_beams(const std::string &path, const std::vector<DigitalBeamformers> &slots)
{
    if (slots.empty())
        throw IoError("save_digital_beams: nothing to write");
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);

    const Eigen::Index nt = slots[0].precoders.rows();
    const Eigen::Index l = slots[0].precoders.cols();
    out << "# isaclab digital beams v1\n";
    out << "nt " << nt << "\n";
    out << "streams " << l << "\n";
    out << "slots " << slots.size() << "\n";
    for (std::size_t s = 0; s < slots.size(); ++s)
    {
        const auto &b = slots[s];
        if (b.precoders.rows() != nt || b.precoders.cols() != l || b.an_vector.size() != nt)
            throw IoError("save_digital_beams: inconsistent slot shapes");
        out << "slot " << s << "\n";
        for (Eigen::Index i = 0; i < nt; ++i)
        {
            write_complex_row(out, b.precoders, i);
            out << ' ' << fmt(b.an_vector(i).real()) << ' ' << fmt(b.an_vector(i).imag())
                << "\n";
        }
    }
    if (!out)
        throw IoError("write failure: " + path);
}

std::vector<DigitalBeamformers> load_digital_beams(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);

    Eigen::Index nt = 0, l = 0;
    std::size_t n_slots = 0;
    for (int h = 0; h < 3; ++h)
    {
        const auto toks = tokens_of(next_content_line(in));
        if (toks.size() != 2)
            throw IoError("digital beams: malformed header in " + path);
        if (toks[0] == "nt")
            nt = static_cast<Eigen::Index>(to_double(toks[1], "nt"));
        else if (toks[0] == "streams")
            l = static_cast<Eigen::Index>(to_double(toks[1], "streams"));
        else if (toks[0] == "slots")
            n_slots = static_cast<std::size_t>(to_double(toks[1], "slots"));
        else
            throw IoError("digital beams: unknown header key '" + toks[0] + "'");
    }
    if (nt < 1 || l < 1 || n_slots < 1)
        throw IoError("digital beams: incomplete header in " + path);

    std::vector<DigitalBeamformers> slots;
    slots.reserve(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s)
    {
        const auto marker = tokens_of(next_content_line(in));
        if (marker.size() != 2 || marker[0] != "slot")
            throw IoError("digital beams: expected slot marker, slot " + std::to_string(s));
        DigitalBeamformers b = DigitalBeamformers::zeros(static_cast<int>(nt), static_cast<int>(l));
        for (Eigen::Index i = 0; i < nt; ++i)
        {
            const auto toks = tokens_of(next_content_line(in));
            if (static_cast<Eigen::Index>(toks.size()) != 2 * (l + 1))
                throw IoError("digital beams: wrong row width at slot " + std::to_string(s));
            for (Eigen::Index c = 0; c < l; ++c)
                b.precoders(i, c) = {to_double(toks[2 * c], "re"), to_double(toks[2 * c + 1], "im")};
            b.an_vector(i) = {to_double(toks[2 * l], "re"), to_double(toks[2 * l + 1], "im")};
        }
        slots.push_back(std::move(b));
    }
    return slots;
}

void save_hybrid_beams(const std::string &path, const std::vector<HybridSlotRecord> &slots)
{
    if (slots.empty())
        throw IoError("save_hybrid_beams: nothing to write");
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);

    const Eigen::Index nt = slots[0].hybrid.analog.rows();
    const Eigen::Index nrf = slots[0].hybrid.analog.cols();
    const Eigen::Index l = slots[0].hybrid.digital.cols();
    out << "# isaclab hybrid beams v1\n";
    out << "nt " << nt << "\n";
    out << "nrf " << nrf << "\n";
    out << "streams " << l << "\n";
    out << "slots " << slots.size() << "\n";
    for (std::size_t s = 0; s < slots.size(); ++s)
    {
        const auto &rec = slots[s];
        out << "slot " << s << "\n";
        out << "converged " << (rec.converged ? 1 : 0) << "\n";
        out << "iterations " << rec.iterations << "\n";
        out << "residuals";
        for (double r : rec.residual_trace)
            out << ' ' << fmt(r);
        out << "\n";
        for (Eigen::Index i = 0; i < nt; ++i)
        {
            write_complex_row(out, rec.hybrid.analog, i);
            out << "\n";
        }
        for (Eigen::Index i = 0; i < nrf; ++i)
        {
            write_complex_row(out, rec.hybrid.digital, i);
            out << ' ' << fmt(rec.hybrid.an_digital(i).real()) << ' '
                << fmt(rec.hybrid.an_digital(i).imag()) << "\n";
        }
    }
    if (!out)
        throw IoError("write failure: " + path);
}

std::vector<HybridSlotRecord> load_hybrid_beams(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);

    Eigen::Index nt = 0, nrf = 0, l = 0;
    std::size_t n_slots = 0;
    for (int h = 0; h < 4; ++h)
    {
        const auto toks = tokens_of(next_content_line(in));
        if (toks.size() != 2)
            throw IoError("hybrid beams: malformed header in " + path);
        if (toks[0] == "nt")
            nt = static_cast<Eigen::Index>(to_double(toks[1], "nt"));
        else if (toks[0] == "nrf")
            nrf = static_cast<Eigen::Index>(to_double(toks[1], "nrf"));
        else if (toks[0] == "streams")
            l = static_cast<Eigen::Index>(to_double(toks[1], "streams"));
        else if (toks[0] == "slots")
            n_slots = static_cast<std::size_t>(to_double(toks[1], "slots"));
        else
            throw IoError("hybrid beams: unknown header key '" + toks[0] + "'");
    }
    if (nt < 1 || nrf < 1 || l < 1 || n_slots < 1)
        throw IoError("hybrid beams: incomplete header in " + path);

    std::vector<HybridSlotRecord> slots;
    slots.reserve(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s)
    {
        const auto marker = tokens_of(next_content_line(in));
        if (marker.size() != 2 || marker[0] != "slot")
            throw IoError("hybrid beams: expected slot marker at slot " + std::to_string(s));

        HybridSlotRecord rec;
        const auto conv = tokens_of(next_content_line(in));
        if (conv.size() != 2 || conv[0] != "converged")
            throw IoError("hybrid beams: expected converged flag");
        rec.converged = to_double(conv[1], "converged") != 0.0;
        const auto iters = tokens_of(next_content_line(in));
        if (iters.size() != 2 || iters[0] != "iterations")
            throw IoError("hybrid beams: expected iteration count");
        rec.iterations = static_cast<int>(to_double(iters[1], "iterations"));
        const auto residuals = tokens_of(next_content_line(in));
        if (residuals.empty() || residuals[0] != "residuals")
            throw IoError("hybrid beams: expected residual trace");
        for (std::size_t i = 1; i < residuals.size(); ++i)
            rec.residual_trace.push_back(to_double(residuals[i], "residual"));

        rec.hybrid.analog.resize(nt, nrf);
        for (Eigen::Index i = 0; i < nt; ++i)
        {
            const auto toks = tokens_of(next_content_line(in));
            if (static_cast<Eigen::Index>(toks.size()) != 2 * nrf)
                throw IoError("hybrid beams: wrong analog row width");
            for (Eigen::Index c = 0; c < nrf; ++c)
                rec.hybrid.analog(i, c) = {to_double(toks[2 * c], "re"),
                                           to_double(toks[2 * c + 1], "im")};
        }
        rec.hybrid.digital.resize(nrf, l);
        rec.hybrid.an_digital.resize(nrf);
        for (Eigen::Index i = 0; i < nrf; ++i)
        {
            const auto toks = tokens_of(next_content_line(in));
            if (static_cast<Eigen::Index>(toks.size()) != 2 * (l + 1))
                throw IoError("hybrid beams: wrong digital row width");
            for (Eigen::Index c = 0; c < l; ++c)
                rec.hybrid.digital(i, c) = {to_double(toks[2 * c], "re"),
                                            to_double(toks[2 * c + 1], "im")};
            rec.hybrid.an_digital(i) = {to_double(toks[2 * l], "re"),
                                        to_double(toks[2 * l + 1], "im")};
        }
        slots.push_back(std::move(rec));
    }
    return slots;
}

BeampatternGrid compute_beampattern_grid(const Eigen::MatrixXcd &rx, int nx, int ny,
                                         int n_azimuth, int n_elevation,
                                         const std::string &scheme, int slot)
{
    if (n_azimuth < 2 || n_elevation < 2)
        throw std::invalid_argument("compute_beampattern_grid: resolution must be >= 2 per axis");

    BeampatternGrid grid;
    grid.scheme = scheme;
    grid.slot = slot;
    grid.nx = nx;
    grid.ny = ny;
    grid.azimuth_step_deg = 180.0 / (n_azimuth - 1);
    grid.elevation_step_deg = 90.0 / (n_elevation - 1);
    grid.power.resize(n_azimuth, n_elevation);

    constexpr double deg = std::numbers::pi / 180.0;
    for (int ia = 0; ia < n_azimuth; ++ia)
    {
        const double az = (grid.azimuth_start_deg + ia * grid.azimuth_step_deg) * deg;
        for (int ie = 0; ie < n_elevation; ++ie)
        {
            const double el = (grid.elevation_start_deg + ie * grid.elevation_step_deg) * deg;
            Geometry g{az, el, 1.0};
            grid.power(ia, ie) = beampattern(rx, g, nx, ny);
        }
    }
    return grid;
}

void save_beampattern_grid(const std::string &path, const BeampatternGrid &grid)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << "# isaclab beampattern grid v1\n";
    out << "scheme " << grid.scheme << "\n";
    out << "slot " << grid.slot << "\n";
    out << "nx " << grid.nx << "\n";
    out << "ny " << grid.ny << "\n";
    out << "n_azimuth " << grid.power.rows() << "\n";
    out << "n_elevation " << grid.power.cols() << "\n";
    out << "azimuth_start_deg " << fmt(grid.azimuth_start_deg) << "\n";
    out << "azimuth_step_deg " << fmt(grid.azimuth_step_deg) << "\n";
    out << "elevation_start_deg " << fmt(grid.elevation_start_deg) << "\n";
    out << "elevation_step_deg " << fmt(grid.elevation_step_deg) << "\n";
    out << "# az_deg el_deg power\n";
    for (Eigen::Index ia = 0; ia < grid.power.rows(); ++ia)
        for (Eigen::Index ie = 0; ie < grid.power.cols(); ++ie)
            out << fmt(grid.azimuth_start_deg + ia * grid.azimuth_step_deg) << ' '
                << fmt(grid.elevation_start_deg + ie * grid.elevation_step_deg) << ' '
                << fmt(grid.power(ia, ie)) << "\n";
    if (!out)
        throw IoError("write failure: " + path);
}

BeampatternGrid load_beampattern_grid(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);

    BeampatternGrid grid;
    int n_az = 0, n_el = 0;
    for (int h = 0; h < 10; ++h)
    {
        const auto toks = tokens_of(next_content_line(in));
        if (toks.size() != 2)
            throw IoError("beampattern grid: malformed header in " + path);
        const std::string &key = toks[0];
        if (key == "scheme")
            grid.scheme = toks[1];
        else if (key == "slot")
            grid.slot = static_cast<int>(to_double(toks[1], key));
        else if (key == "nx")
            grid.nx = static_cast<int>(to_double(toks[1], key));
        else if (key == "ny")
            grid.ny = static_cast<int>(to_double(toks[1], key));
        else if (key == "n_azimuth")
            n_az = static_cast<int>(to_double(toks[1], key));
        else if (key == "n_elevation")
            n_el = static_cast<int>(to_double(toks[1], key));
        else if (key == "azimuth_start_deg")
            grid.azimuth_start_deg = to_double(toks[1], key);
        else if (key == "azimuth_step_deg")
            grid.azimuth_step_deg = to_double(toks[1], key);
        else if (key == "elevation_start_deg")
            grid.elevation_start_deg = to_double(toks[1], key);
        else if (key == "elevation_step_deg")
            grid.elevation_step_deg = to_double(toks[1], key);
        else
            throw IoError("beampattern grid: unknown header key '" + key + "'");
    }
    if (n_az < 2 || n_el < 2)
        throw IoError("beampattern grid: incomplete header in " + path);

    grid.power.resize(n_az, n_el);
    for (int ia = 0; ia < n_az; ++ia)
        for (int ie = 0; ie < n_el; ++ie)
        {
            const auto toks = tokens_of(next_content_line(in));
            if (toks.size() != 3)
                throw IoError("beampattern grid: malformed data row");
            grid.power(ia, ie) = to_double(toks[2], "power");
        }
    return grid;
}

double pearson_correlation(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() < 2)
        throw std::invalid_argument("pearson_correlation: shape mismatch");
    const double ma = a.mean();
    const double mb = b.mean();
    const Eigen::ArrayXXd da = a.array() - ma;
    const Eigen::ArrayXXd db = b.array() - mb;
    const double cov = (da * db).sum();
    const double denom = std::sqrt(da.square().sum() * db.square().sum());
    if (denom == 0.0)
        throw std::invalid_argument("pearson_correlation: zero variance input");
    return cov / denom;
}

Eigen::VectorXd azimuth_cut(const Eigen::MatrixXcd &rx, int nx, int ny, double elevation_rad,
                            int n_azimuth, double azimuth_start_deg, double azimuth_step_deg)
{
    constexpr double deg = std::numbers::pi / 180.0;
    Eigen::VectorXd cut(n_azimuth);
    for (int ia = 0; ia < n_azimuth; ++ia)
    {
        const double az = (azimuth_start_deg + ia * azimuth_step_deg) * deg;
        cut(ia) = beampattern(rx, Geometry{az, elevation_rad, 1.0}, nx, ny);
    }
    return cut;
}

void write_training_log(const std::string &path, const TrainReport &report)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << "episode,return,r_com,r_sen,r_qos,actor_loss,critic_loss\n";
    for (std::size_t i = 0; i < report.episode_returns.size(); ++i)
    {
        const int phase = report.episode_phase[i];
        out << i << ',' << fmt(report.episode_returns[i]) << ','
            << fmt(report.episode_components[i].r_com) << ','
            << fmt(report.episode_components[i].r_sen) << ','
            << fmt(report.episode_components[i].r_qos) << ','
            << fmt(report.actor_losses[phase]) << ',' << fmt(report.critic_losses[phase])
            << "\n";
    }
    if (!out)
        throw IoError("write failure: " + path);
}

void write_episode_trace(const std::string &path, const std::vector<EpisodeTraceRow> &rows)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    const std::size_t n_uavs = rows.empty() ? 0 : rows[0].positions.size();
    out << "slot,reward,r_com,r_sen,r_qos,sum_secrecy";
    for (std::size_t u = 0; u < n_uavs; ++u)
        out << ",x" << u << ",y" << u << ",z" << u;
    out << "\n";
    for (const auto &row : rows)
    {
        out << row.slot << ',' << fmt(row.reward) << ',' << fmt(row.components.r_com) << ','
            << fmt(row.components.r_sen) << ',' << fmt(row.components.r_qos) << ','
            << fmt(row.sum_secrecy);
        for (const auto &p : row.positions)
            out << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z());
        out << "\n";
    }
    if (!out)
        throw IoError("write failure: " + path);
}

void write_metrics_csv(const std::string &path,
                       const std::vector<std::pair<std::string, EvalMetrics>> &rows)
{
    if (rows.empty())
        throw IoError("write_metrics_csv: nothing to write");
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);

    const Eigen::Index n_uavs = rows[0].second.per_uav_secrecy.size();
    out << "scheme";
    for (Eigen::Index u = 0; u < n_uavs; ++u)
        out << ",secrecy_uav" << u;
    out << ",total_secrecy,mean_return,sensing_violation_rate,qos_violation_rate,episodes\n";
    for (const auto &[name, m] : rows)
    {
        out << name;
        for (Eigen::Index u = 0; u < n_uavs; ++u)
            out << ',' << fmt(m.per_uav_secrecy(u));
        out << ',' << fmt(m.per_uav_secrecy.sum()) << ',' << fmt(m.mean_return) << ','
            << fmt(m.sensing_violation_rate) << ',' << fmt(m.qos_violation_rate) << ','
            << m.episodes << "\n";
    }
    if (!out)
        throw IoError("write failure: " + path);
}

std::vector<std::vector<std::string>> read_delimited(const std::string &path, char delim)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, delim))
            fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace isaclab
