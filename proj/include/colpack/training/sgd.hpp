// sgd.hpp - reference mask-preserving retrainer.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "colpack/training/dataset.hpp"
#include "colpack/training/model.hpp"

namespace colpack::training {

struct TrainConfig {
  double eta = 0.05;                 // initial learning rate
  double momentum = 0.9;             // Nesterov
  std::size_t epochs_per_iteration = 20;
  std::size_t final_epochs = 100;
  double lr_floor_fraction = 0.2;    // lr at the end of each pruning iteration
  double beta_decay = 0.9;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;

  void validate() const;
};

// One retraining call: `epochs` passes over the data with a cosine learning
// rate going from lr_start to lr_end over all minibatch steps.
struct RetrainRequest {
  std::size_t epochs = 0;
  double lr_start = 0.05;
  double lr_end = 0.01;
  std::uint64_t seed = 1;  // minibatch order
};

// Called after each epoch with the 0-based epoch index within the call.
using EpochCallback = std::function<void(const FloatNet&, std::size_t)>;

// Any procedure that trains `net` in place while keeping masked weights zero.
using Retrainer = std::function<void(FloatNet&, const Dataset&, const RetrainRequest&,
                                     const EpochCallback&)>;

// Minibatch SGD with Nesterov momentum and softmax cross-entropy. Masked
// weights (and their momentum) are forced to zero after every update.
// Throws InvariantError when the loss becomes non-finite.
void sgd_retrain(FloatNet& net, const Dataset& data, const RetrainRequest& request,
                 const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Mean cross-entropy over `data` and its gradient with respect to every
// unmasked weight (masked entries of `grads` stay zero).
double loss_and_gradient(const FloatNet& net, const Dataset& data, std::vector<FloatMatrix>& grads);

// Binds sgd_retrain to a configuration.
Retrainer sgd_retrainer(const TrainConfig& cfg);

// Cosine interpolation from start (step 0) to end (step == steps).
double cosine_lr(double start, double end, std::size_t step, std::size_t steps);

}  // namespace colpack::training
