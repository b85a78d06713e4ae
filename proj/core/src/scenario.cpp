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

#include "isaclab/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace isaclab {

namespace {

std::string trim(const std::string &s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string &msg)
{
    throw ScenarioError("scenario parse error at line " + std::to_string(line_no) + ": " + msg);
}

double parse_double(const std::string &tok, std::size_t line_no)
{
    try
    {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size())
            fail_line(line_no, "trailing characters in number '" + tok + "'");
        return v;
    }
    catch (const ScenarioError &)
    {
        throw;
    }
    catch (const std::exception &)
    {
        fail_line(line_no, "cannot parse number '" + tok + "'");
    }
}

long parse_long(const std::string &tok, std::size_t line_no)
{
    try
    {
        std::size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size())
            fail_line(line_no, "trailing characters in integer '" + tok + "'");
        return v;
    }
    catch (const ScenarioError &)
    {
        throw;
    }
    catch (const std::exception &)
    {
        fail_line(line_no, "cannot parse integer '" + tok + "'");
    }
}

std::uint64_t parse_u64(const std::string &tok, std::size_t line_no)
{
    try
    {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(tok, &pos);
        if (pos != tok.size())
            fail_line(line_no, "trailing characters in integer '" + tok + "'");
        return static_cast<std::uint64_t>(v);
    }
    catch (const ScenarioError &)
    {
        throw;
    }
    catch (const std::exception &)
    {
        fail_line(line_no, "cannot parse unsigned integer '" + tok + "'");
    }
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep))
        out.push_back(item);
    return out;
}

// "x y z; x y z; ..." -> list of 3-vectors
std::vector<Eigen::Vector3d> parse_positions(const std::string &value, std::size_t line_no)
{
    std::vector<Eigen::Vector3d> out;
    for (const auto &chunk : split(value, ';'))
    {
        const std::string t = trim(chunk);
        if (t.empty())
            continue;
        std::stringstream ss(t);
        std::vector<std::string> toks;
        std::string tok;
        while (ss >> tok)
            toks.push_back(tok);
        if (toks.size() != 3)
            fail_line(line_no, "position needs exactly 3 coordinates, got '" + t + "'");
        out.emplace_back(parse_double(toks[0], line_no), parse_double(toks[1], line_no),
                         parse_double(toks[2], line_no));
    }
    if (out.empty())
        fail_line(line_no, "empty position list");
    return out;
}

std::vector<int> parse_int_list(const std::string &value, std::size_t line_no)
{
    std::vector<int> out;
    std::stringstream ss(value);
    std::string tok;
    while (ss >> tok)
        out.push_back(static_cast<int>(parse_long(tok, line_no)));
    if (out.empty())
        fail_line(line_no, "empty integer list");
    return out;
}

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_positions(const std::vector<Eigen::Vector3d> &ps)
{
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i)
    {
        if (i)
            out += "; ";
        out += fmt_double(ps[i].x()) + " " + fmt_double(ps[i].y()) + " " + fmt_double(ps[i].z());
    }
    return out;
}

void require(bool cond, const std::string &invariant)
{
    if (!cond)
        throw ScenarioError("scenario validation error: " + invariant + " violated");
}

} // namespace

bool operator==(const RlHyperparams &a, const RlHyperparams &b)
{
    return a.actor_lr == b.actor_lr && a.critic_lr == b.critic_lr && a.gamma == b.gamma &&
           a.clip_epsilon == b.clip_epsilon && a.gae_lambda == b.gae_lambda &&
           a.batch_size == b.batch_size && a.minibatch_size == b.minibatch_size &&
           a.update_epochs == b.update_epochs && a.episodes == b.episodes &&
           a.hidden_sizes == b.hidden_sizes && a.entropy_coef == b.entropy_coef &&
           a.log_std_init == b.log_std_init;
}

bool operator==(const ScenarioConfig &a, const ScenarioConfig &b)
{
    auto pos_eq = [](const std::vector<Eigen::Vector3d> &x, const std::vector<Eigen::Vector3d> &y) {
        if (x.size() != y.size())
            return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if ((x[i] - y[i]).squaredNorm() != 0.0)
                return false;
        return true;
    };
    return a.n_antennas_x == b.n_antennas_x && a.n_antennas_y == b.n_antennas_y &&
           a.n_rf_chains == b.n_rf_chains && a.n_legit == b.n_legit && a.n_eves == b.n_eves &&
           a.transmit_power_watts == b.transmit_power_watts &&
           a.pathloss_exponent == b.pathloss_exponent && a.carrier_hz == b.carrier_hz &&
           a.slot_seconds == b.slot_seconds && a.n_slots == b.n_slots &&
           a.noise_power_watts == b.noise_power_watts &&
           a.sensing_threshold == b.sensing_threshold &&
           a.sensing_penalty_weight == b.sensing_penalty_weight &&
           a.qos_min_rate == b.qos_min_rate && a.v_max_mps == b.v_max_mps &&
           pos_eq(a.legit_init_positions, b.legit_init_positions) &&
           pos_eq(a.eve_positions, b.eve_positions) &&
           (a.base_position - b.base_position).squaredNorm() == 0.0 &&
           a.channel_obs_scale == b.channel_obs_scale &&
           a.position_obs_scale == b.position_obs_scale && a.rl == b.rl && a.seed == b.seed;
}

ScenarioConfig reference_scenario()
{
    ScenarioConfig c;
    c.legit_init_positions = {
        {20.0, 80.0, 20.0},
        {20.0, 70.0, 15.0},
        {70.0, 30.0, 30.0},
        {80.0, 10.0, 15.0},
    };
    c.eve_positions = {
        {20.0, 40.0, 20.0},
        {50.0, 50.0, 30.0},
        {80.0, 70.0, 40.0},
    };
    return c;
}

void validate_scenario(const ScenarioConfig &c)
{
    require(c.n_antennas_x >= 1, "n_antennas_x >= 1");
    require(c.n_antennas_y >= 1, "n_antennas_y >= 1");
    require(c.n_rf_chains >= 1, "n_rf_chains >= 1");
    require(c.n_legit >= 1, "n_legit >= 1");
    require(c.n_eves >= 0, "n_eves >= 0");
    require(c.n_legit <= c.n_rf_chains, "L <= N_RF");
    require(c.n_rf_chains <= c.n_antennas(), "N_RF <= N_t");
    require(c.transmit_power_watts > 0.0, "transmit_power_watts > 0");
    require(c.pathloss_exponent > 0.0, "pathloss_exponent > 0");
    require(c.carrier_hz > 0.0, "carrier_hz > 0");
    require(c.slot_seconds > 0.0, "slot_seconds > 0");
    require(c.n_slots >= 1, "n_slots >= 1");
    require(c.noise_power_watts > 0.0, "noise_power_watts > 0");
    require(c.sensing_threshold > 0.0, "sensing_threshold > 0");
    require(c.sensing_penalty_weight >= 0.0, "sensing_penalty_weight >= 0");
    require(c.qos_min_rate >= 0.0, "qos_min_rate >= 0");
    require(c.v_max_mps > 0.0, "v_max_mps > 0");
    require(static_cast<int>(c.legit_init_positions.size()) == c.n_legit,
            "len(legit_init_positions) = L");
    require(static_cast<int>(c.eve_positions.size()) == c.n_eves, "len(eve_positions) = E");
    for (const auto &p : c.legit_init_positions)
        require(p.z() > 0.0, "legitimate UAV altitude > 0");
    for (const auto &p : c.eve_positions)
        require(p.z() > 0.0, "eavesdropper UAV altitude > 0");
    require(c.channel_obs_scale > 0.0, "channel_obs_scale > 0");
    require(c.position_obs_scale > 0.0, "position_obs_scale > 0");

    const auto &rl = c.rl;
    require(rl.actor_lr >= 0.0, "actor_lr >= 0");
    require(rl.critic_lr >= 0.0, "critic_lr >= 0");
    require(rl.gamma > 0.0 && rl.gamma <= 1.0, "gamma in (0,1]");
    require(rl.clip_epsilon >= 0.0, "clip_epsilon >= 0");
    require(rl.gae_lambda >= 0.0 && rl.gae_lambda <= 1.0, "gae_lambda in [0,1]");
    require(rl.batch_size >= 1, "batch_size >= 1");
    require(rl.minibatch_size >= 1 && rl.minibatch_size <= rl.batch_size,
            "1 <= minibatch_size <= batch_size");
    require(rl.update_epochs >= 1, "update_epochs >= 1");
    require(rl.episodes >= 0, "episodes >= 0");
    require(!rl.hidden_sizes.empty(), "hidden_sizes nonempty");
    for (int h : rl.hidden_sizes)
        require(h >= 1, "hidden size >= 1");
    require(rl.entropy_coef >= 0.0, "entropy_coef >= 0");
}

ScenarioConfig load_scenario(const std::string &text)
{
    ScenarioConfig c = reference_scenario();
    std::set<std::string> seen;

    std::size_t line_no = 0;
    std::stringstream ss(text);
    std::string raw;
    while (std::getline(ss, raw))
    {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail_line(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            fail_line(line_no, "empty key");
        if (value.empty())
            fail_line(line_no, "empty value for key '" + key + "'");
        if (!seen.insert(key).second)
            fail_line(line_no, "duplicate key '" + key + "'");

        if (key == "n_antennas_x")
            c.n_antennas_x = static_cast<int>(parse_long(value, line_no));
        else if (key == "n_antennas_y")
            c.n_antennas_y = static_cast<int>(parse_long(value, line_no));
        else if (key == "n_rf_chains")
            c.n_rf_chains = static_cast<int>(parse_long(value, line_no));
        else if (key == "n_legit")
            c.n_legit = static_cast<int>(parse_long(value, line_no));
        else if (key == "n_eves")
            c.n_eves = static_cast<int>(parse_long(value, line_no));
        else if (key == "transmit_power_watts")
            c.transmit_power_watts = parse_double(value, line_no);
        else if (key == "pathloss_exponent")
            c.pathloss_exponent = parse_double(value, line_no);
        else if (key == "carrier_hz")
            c.carrier_hz = parse_double(value, line_no);
        else if (key == "slot_seconds")
            c.slot_seconds = parse_double(value, line_no);
        else if (key == "n_slots")
            c.n_slots = static_cast<int>(parse_long(value, line_no));
        else if (key == "noise_power_watts")
            c.noise_power_watts = parse_double(value, line_no);
        else if (key == "sensing_threshold")
            c.sensing_threshold = parse_double(value, line_no);
        else if (key == "sensing_penalty_weight")
            c.sensing_penalty_weight = parse_double(value, line_no);
        else if (key == "qos_min_rate")
            c.qos_min_rate = parse_double(value, line_no);
        else if (key == "v_max_mps")
            c.v_max_mps = parse_double(value, line_no);
        else if (key == "legit_init_positions")
            c.legit_init_positions = parse_positions(value, line_no);
        else if (key == "eve_positions")
            c.eve_positions = parse_positions(value, line_no);
        else if (key == "base_position")
        {
            const auto v = parse_positions(value, line_no);
            if (v.size() != 1)
                fail_line(line_no, "base_position must be a single 3-vector");
            c.base_position = v[0];
        }
        else if (key == "channel_obs_scale")
            c.channel_obs_scale = parse_double(value, line_no);
        else if (key == "position_obs_scale")
            c.position_obs_scale = parse_double(value, line_no);
        else if (key == "seed")
            c.seed = parse_u64(value, line_no);
        else if (key == "actor_lr")
            c.rl.actor_lr = parse_double(value, line_no);
        else if (key == "critic_lr")
            c.rl.critic_lr = parse_double(value, line_no);
        else if (key == "gamma")
            c.rl.gamma = parse_double(value, line_no);
        else if (key == "clip_epsilon")
            c.rl.clip_epsilon = parse_double(value, line_no);
        else if (key == "gae_lambda")
            c.rl.gae_lambda = parse_double(value, line_no);
        else if (key == "batch_size")
            c.rl.batch_size = static_cast<int>(parse_long(value, line_no));
        else if (key == "minibatch_size")
            c.rl.minibatch_size = static_cast<int>(parse_long(value, line_no));
        else if (key == "update_epochs")
            c.rl.update_epochs = static_cast<int>(parse_long(value, line_no));
        else if (key == "episodes")
            c.rl.episodes = parse_long(value, line_no);
        else if (key == "hidden_sizes")
            c.rl.hidden_sizes = parse_int_list(value, line_no);
        else if (key == "entropy_coef")
            c.rl.entropy_coef = parse_double(value, line_no);
        else if (key == "log_std_init")
            c.rl.log_std_init = parse_double(value, line_no);
        else
            fail_line(line_no, "unknown key '" + key + "'");
    }

    validate_scenario(c);
    return c;
}

ScenarioConfig load_scenario_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioConfig &c)
{
    std::string hidden;
    for (std::size_t i = 0; i < c.rl.hidden_sizes.size(); ++i)
    {
        if (i)
            hidden += " ";
        hidden += std::to_string(c.rl.hidden_sizes[i]);
    }

    std::string out;
    out += "# isaclab scenario\n";
    out += "n_antennas_x = " + std::to_string(c.n_antennas_x) + "\n";
    out += "n_antennas_y = " + std::to_string(c.n_antennas_y) + "\n";
    out += "n_rf_chains = " + std::to_string(c.n_rf_chains) + "\n";
    out += "n_legit = " + std::to_string(c.n_legit) + "\n";
    out += "n_eves = " + std::to_string(c.n_eves) + "\n";
    out += "transmit_power_watts = " + fmt_double(c.transmit_power_watts) + "\n";
    out += "pathloss_exponent = " + fmt_double(c.pathloss_exponent) + "\n";
    out += "carrier_hz = " + fmt_double(c.carrier_hz) + "\n";
    out += "slot_seconds = " + fmt_double(c.slot_seconds) + "\n";
    out += "n_slots = " + std::to_string(c.n_slots) + "\n";
    out += "noise_power_watts = " + fmt_double(c.noise_power_watts) + "\n";
    out += "sensing_threshold = " + fmt_double(c.sensing_threshold) + "\n";
    out += "sensing_penalty_weight = " + fmt_double(c.sensing_penalty_weight) + "\n";
    out += "qos_min_rate = " + fmt_double(c.qos_min_rate) + "\n";
    out += "v_max_mps = " + fmt_double(c.v_max_mps) + "\n";
    out += "base_position = " + fmt_positions({c.base_position}) + "\n";
    out += "legit_init_positions = " + fmt_positions(c.legit_init_positions) + "\n";
    out += "eve_positions = " + fmt_positions(c.eve_positions) + "\n";
    out += "channel_obs_scale = " + fmt_double(c.channel_obs_scale) + "\n";
    out += "position_obs_scale = " + fmt_double(c.position_obs_scale) + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";
    out += "actor_lr = " + fmt_double(c.rl.actor_lr) + "\n";
    out += "critic_lr = " + fmt_double(c.rl.critic_lr) + "\n";
    out += "gamma = " + fmt_double(c.rl.gamma) + "\n";
    out += "clip_epsilon = " + fmt_double(c.rl.clip_epsilon) + "\n";
    out += "gae_lambda = " + fmt_double(c.rl.gae_lambda) + "\n";
    out += "batch_size = " + std::to_string(c.rl.batch_size) + "\n";
    out += "minibatch_size = " + std::to_string(c.rl.minibatch_size) + "\n";
    out += "update_epochs = " + std::to_string(c.rl.update_epochs) + "\n";
    out += "episodes = " + std::to_string(c.rl.episodes) + "\n";
    out += "hidden_sizes = " + hidden + "\n";
    out += "entropy_coef = " + fmt_double(c.rl.entropy_coef) + "\n";
    out += "log_std_init = " + fmt_double(c.rl.log_std_init) + "\n";
    return out;
}

} // namespace isaclab
