// iterative.hpp - prune / group / column-combine-prune / retrain loop.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colpack/core/types.hpp"
#include "colpack/training/dataset.hpp"
#include "colpack/training/model.hpp"
#include "colpack/training/sgd.hpp"

namespace colpack::training {

struct HistoryEntry {
  std::size_t epoch = 0;  // 1-based global epoch count
  std::size_t nnz = 0;
  double accuracy = 0.0;  // evaluation accuracy after the epoch
};

struct PruneEvent {
  std::size_t iteration = 0;
  std::size_t epoch = 0;  // epochs completed before the event
  double beta = 0.0;
  std::size_t nnz_before = 0;
  std::size_t nnz_after_magnitude = 0;
  std::size_t nnz_after = 0;
};

struct TrainHistory {
  std::vector<HistoryEntry> epochs;
  std::vector<PruneEvent> events;
};

struct IterativeResult {
  FloatNet net;  // every layer carries its final grouping
  std::vector<ColumnGrouping> groupings;
  TrainHistory history;
  std::size_t iterations = 0;
};

// Runs pruning iterations until the network holds at most rho weights,
// then final_epochs of retraining with the learning rate decaying to zero.
// Each iteration, per layer: magnitude_prune(beta), group_columns(alpha,
// gamma), group_prune; then epochs_per_iteration of retraining with a cosine
// schedule from eta to lr_floor_fraction * eta; then beta *= beta_decay.
// Throws InvariantError (stagnation) when an iteration prunes nothing while
// nnz > rho. With rho >= nnz no iteration runs and every layer gets the
// identity grouping.
IterativeResult iterative_train(const FloatNet& net, const PackingParams& params,
                                const TrainConfig& cfg, const Dataset& train,
                                const Dataset& eval, const Retrainer& retrainer);

// Dense training from scratch (no pruning): `epochs` with cosine decay to 0.
void train_dense(FloatNet& net, const Dataset& train, const TrainConfig& cfg, std::size_t epochs,
                 const Dataset* eval = nullptr, TrainHistory* history = nullptr);

std::string history_csv(const TrainHistory& history);

}  // namespace colpack::training
