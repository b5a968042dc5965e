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

#include "tprover/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tprover/errors.hpp"

namespace tprover {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_params(const PolicyParams& params, const std::filesystem::path& path) {
  json rows = json::array();
  for (int r = 0; r < kFeatureDim; ++r) {
    json row = json::array();
    for (int c = 0; c < kActionDim; ++c) row.push_back(params.weights(r, c));
    rows.push_back(std::move(row));
  }
  json j{{"feature_dim", kFeatureDim}, {"action_dim", kActionDim}, {"weights", rows}};
  write_text_file(path, j.dump() + "\n");
}

PolicyParams load_params(const std::filesystem::path& path) {
  PolicyParams p;
  try {
    const json j = json::parse(read_text_file(path));
    if (j.at("feature_dim").get<int>() != kFeatureDim || j.at("action_dim").get<int>() != kActionDim) {
      throw SchemaError("parameter shape mismatch", 1);
    }
    const auto& rows = j.at("weights");
    if (rows.size() != kFeatureDim) throw SchemaError("expected 13 weight rows", 1);
    for (int r = 0; r < kFeatureDim; ++r) {
      if (rows[r].size() != kActionDim) throw SchemaError("expected 13 weight columns", 1);
      for (int c = 0; c < kActionDim; ++c) p.weights(r, c) = rows[r][c].get<double>();
    }
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what(), 1);
  }
  if (!p.all_finite()) throw SchemaError(path.string() + ": non-finite weight", 1);
  return p;
}

void write_train_log(const TrainLog& log, const std::filesystem::path& path) {
  std::string text;
  for (const auto& r : log) {
    json j{{"iteration", r.iteration},
           {"epoch", r.epoch},
           {"mean_reward", r.mean_reward},
           {"mean_format_reward", r.mean_format_reward},
           {"mean_accuracy_reward", r.mean_accuracy_reward},
           {"loss", r.loss},
           {"grad_norm", r.grad_norm},
           {"kl_to_ref", r.kl_to_ref},
           {"degenerate", r.degenerate}};
    text += j.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

TrainLog read_train_log(const std::filesystem::path& path) {
  TrainLog log;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    try {
      const json j = json::parse(line);
      TrainRecord r;
      r.iteration = j.at("iteration").get<std::size_t>();
      r.epoch = j.at("epoch").get<std::size_t>();
      r.mean_reward = j.at("mean_reward").get<double>();
      r.mean_format_reward = j.at("mean_format_reward").get<double>();
      r.mean_accuracy_reward = j.at("mean_accuracy_reward").get<double>();
      r.loss = j.at("loss").get<double>();
      r.grad_norm = j.at("grad_norm").get<double>();
      r.kl_to_ref = j.at("kl_to_ref").get<double>();
      r.degenerate = j.at("degenerate").get<bool>();
      log.push_back(r);
    } catch (const json::exception& e) {
      throw SchemaError(e.what(), n);
    }
  }
  return log;
}

void write_sft_curve(const std::vector<SftStep>& curve, const std::filesystem::path& path) {
  std::string text;
  for (const auto& s : curve) {
    text += json{{"step", s.step}, {"epoch", s.epoch}, {"loss", s.loss}}.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<SftStep> read_sft_curve(const std::filesystem::path& path) {
  std::vector<SftStep> curve;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    try {
      const json j = json::parse(line);
      curve.push_back({j.at("step").get<std::size_t>(), j.at("epoch").get<std::size_t>(), j.at("loss").get<double>()});
    } catch (const json::exception& e) {
      throw SchemaError(e.what(), n);
    }
  }
  return curve;
}

}  // namespace tprover
