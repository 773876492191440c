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

// Training-control signals as pure functions of the update step: a linear
// warmup/decay learning rate with explicit restarts, per-layer
// discriminative rates, and gradual unfreezing.

#ifndef VOCAB_GRAFT_SCHEDULES_H_
#define VOCAB_GRAFT_SCHEDULES_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vocab_graft {

inline constexpr size_t kLayerCount = 15;

// Parameter groups in forward-pass order:
//   added_embeddings, existing_embeddings, block_1 .. block_12, lm_head
class LayerStack {
 public:
  static LayerStack Default();

  // Throws InvalidArgument unless there are exactly 15 unique names.
  explicit LayerStack(std::vector<std::string> layers);

  const std::vector<std::string>& layers() const { return layers_; }
  // Position in forward order; throws InvalidArgument for unknown names.
  size_t IndexOf(std::string_view name) const;

  // Number of /decay_factor steps below the peak: 0 for the first layer
  // (added embeddings), 1 for the last layer, growing towards the front.
  int DecayExponent(size_t index) const;

  // Rank at which the layer is unfrozen: 0 for the first layer (never
  // frozen), 1 for the last layer, up to 14 for the second layer.
  size_t UnfreezeRank(size_t index) const { return DecayExponent(index); }

 private:
  std::vector<std::string> layers_;
};

struct ScheduleConfig {
  double peak_lr = 3e-4;
  double decay_factor = 2.6;
  int64_t warmup_steps = 24000;
  int64_t max_steps = 500000;
  int64_t unfreeze_interval = 1000;
  // Update steps at which the warmup/decay ramp restarts from zero.
  std::vector<int64_t> resets;
  bool discriminative_enabled = true;
  // Scheduler steps advanced per optimizer update.
  int64_t scheduler_steps_per_update = 1;

  // Throws InvalidArgument on decay_factor <= 1, warmup >= max_steps,
  // non-increasing resets, non-positive interval or multiplier.
  void Validate() const;
};

// Learning rate at update step `step` >= 0.
double LrAt(const ScheduleConfig& config, int64_t step);

double LayerLr(const ScheduleConfig& config, const LayerStack& stack, std::string_view layer,
               int64_t step);

struct LayerState {
  std::string name;
  bool frozen = false;
};

// Freeze state of every layer, in forward order, for the update at `step`.
// Unfreeze events at step s apply to the update at step s.
std::vector<LayerState> FrozenMask(const ScheduleConfig& config, const LayerStack& stack,
                                   int64_t step);

}  // namespace vocab_graft

#endif  // VOCAB_GRAFT_SCHEDULES_H_
