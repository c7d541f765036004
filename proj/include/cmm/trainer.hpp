#pragma once
// Deterministic mini-batch SGD-with-momentum training over any ablation
// strategy, with loss logging and optional periodic checkpoints.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmm/model.hpp"
#include "cmm/objective.hpp"
#include "cmm/synthgen.hpp"

namespace cmm {

struct TrainConfig {
  Strategy strategy = Strategy::kStie;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  bool shuffle = true;

  // When non-empty, a checkpoint is written to "<prefix>.epNNN.json" every
  // checkpoint_every epochs and to "<prefix>.json" at completion.
  std::string checkpoint_prefix;
  std::size_t checkpoint_every = 0;
};

struct EpochLoss {
  std::size_t epoch = 0;
  double l_cmm = 0.0;
  double l_rgb = 0.0;
  double l_thermal = 0.0;
  double l_total = 0.0;
};

// Raised when a training step produces a non-finite loss; surfaces
// numerical-stability bugs instead of clipping them away.
struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trains in place; returns the per-epoch mean loss trace.
std::vector<EpochLoss> train(CmmModel& model, const Dataset& data,
                             const TrainConfig& cfg);

void save_loss_trace(const std::vector<EpochLoss>& trace,
                     const std::string& path);

}  // namespace cmm
