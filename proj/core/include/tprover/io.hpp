// Copyright 2026 The tprover Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tprover/grpo.hpp"
#include "tprover/policy.hpp"
#include "tprover/sft.hpp"

namespace tprover {

// {"feature_dim":13,"action_dim":13,"weights":[[...13 per row] x 13]}
void save_params(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_params(const std::filesystem::path& path);

// Line-delimited step records.
void write_train_log(const TrainLog& log, const std::filesystem::path& path);
TrainLog read_train_log(const std::filesystem::path& path);
void write_sft_curve(const std::vector<SftStep>& curve, const std::filesystem::path& path);
std::vector<SftStep> read_sft_curve(const std::filesystem::path& path);

// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace tprover
