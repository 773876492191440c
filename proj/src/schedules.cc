// Copyright 2026 The vocab-graft Authors
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

#include "vocab_graft/schedules.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "vocab_graft/errors.h"

namespace vocab_graft {

LayerStack LayerStack::Default() {
  std::vector<std::string> layers = {"added_embeddings", "existing_embeddings"};
  for (int i = 1; i <= 12; ++i) layers.push_back("block_" + std::to_string(i));
  layers.push_back("lm_head");
  return LayerStack(std::move(layers));
}

LayerStack::LayerStack(std::vector<std::string> layers) : layers_(std::move(layers)) {
  if (layers_.size() != kLayerCount) {
    throw InvalidArgument("layer stack needs exactly " + std::to_string(kLayerCount) +
                          " layers, got " + std::to_string(layers_.size()));
  }
  if (std::set<std::string>(layers_.begin(), layers_.end()).size() != layers_.size()) {
    throw InvalidArgument("layer names must be unique");
  }
}

size_t LayerStack::IndexOf(std::string_view name) const {
  const auto it = std::find(layers_.begin(), layers_.end(), name);
  if (it == layers_.end()) throw InvalidArgument("unknown layer '" + std::string(name) + "'");
  return static_cast<size_t>(it - layers_.begin());
}

int LayerStack::DecayExponent(size_t index) const {
  if (index == 0) return 0;
  return static_cast<int>(layers_.size() - index);
}

void ScheduleConfig::Validate() const {
  if (!(decay_factor > 1.0)) throw InvalidArgument("decay_factor must be > 1");
  if (!(peak_lr >= 0.0)) throw InvalidArgument("peak_lr must be >= 0");
  if (warmup_steps < 0 || warmup_steps >= max_steps) {
    throw InvalidArgument("need 0 <= warmup_steps < max_steps");
  }
  if (unfreeze_interval <= 0) throw InvalidArgument("unfreeze_interval must be positive");
  if (scheduler_steps_per_update <= 0) {
    throw InvalidArgument("scheduler_steps_per_update must be positive");
  }
  for (size_t i = 0; i < resets.size(); ++i) {
    if (resets[i] < 0 || (i > 0 && resets[i] <= resets[i - 1])) {
      throw InvalidArgument("resets must be non-negative and strictly increasing");
    }
  }
}

double LrAt(const ScheduleConfig& config, int64_t step) {
  config.Validate();
  if (step < 0) throw InvalidArgument("step must be >= 0");
  int64_t origin = 0;
  const auto it = std::upper_bound(config.resets.begin(), config.resets.end(), step);
  if (it != config.resets.begin()) origin = *std::prev(it);
  const int64_t s = (step - origin) * config.scheduler_steps_per_update;
  if (s < config.warmup_steps) {
    return config.peak_lr * static_cast<double>(s) / static_cast<double>(config.warmup_steps);
  }
  const double remaining = static_cast<double>(config.max_steps - s) /
                           static_cast<double>(config.max_steps - config.warmup_steps);
  return config.peak_lr * std::max(0.0, remaining);
}

double LayerLr(const ScheduleConfig& config, const LayerStack& stack, std::string_view layer,
               int64_t step) {
  const size_t index = stack.IndexOf(layer);
  const double lr = LrAt(config, step);
  if (!config.discriminative_enabled) return lr;
  return lr / std::pow(config.decay_factor, stack.DecayExponent(index));
}

std::vector<LayerState> FrozenMask(const ScheduleConfig& config, const LayerStack& stack,
                                   int64_t step) {
  config.Validate();
  if (step < 0) throw InvalidArgument("step must be >= 0");
  const auto unfrozen = static_cast<size_t>(step / config.unfreeze_interval);
  std::vector<LayerState> mask;
  mask.reserve(stack.layers().size());
  for (size_t i = 0; i < stack.layers().size(); ++i) {
    mask.push_back({stack.layers()[i], stack.UnfreezeRank(i) > unfrozen});
  }
  return mask;
}

}  // namespace vocab_graft
