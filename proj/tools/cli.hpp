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

#ifndef ISACLAB_CLI_HPP
#define ISACLAB_CLI_HPP

#include <string>
#include <vector>

namespace isaclab::cli {

// Executes one subcommand (train | eval | decompose | baselines | export)
// and writes its products plus a manifest.json into the output directory.
// Returns 0 on success, nonzero with a diagnostic on stderr otherwise.
// Relative --out paths resolve under $ISACLAB_OUT_ROOT when that is set.
int run_command(const std::vector<std::string> &args);

} // namespace isaclab::cli

#endif // ISACLAB_CLI_HPP
