#include "colpack/training/iterative.hpp"

#include <sstream>

#include "colpack/core/error.hpp"
#include "colpack/packing/grouping.hpp"
#include "colpack/packing/prune.hpp"
#include "colpack/training/prune.hpp"

namespace colpack::training {

namespace {

EpochCallback recorder(TrainHistory& history, const Dataset& eval) {
  return [&history, &eval](const FloatNet& net, std::size_t) {
    const std::size_t epoch = history.epochs.empty() ? 1 : history.epochs.back().epoch + 1;
    history.epochs.push_back(HistoryEntry{epoch, net.nnz(), accuracy(net, eval)});
  };
}

std::size_t epochs_done(const TrainHistory& history) {
  return history.epochs.empty() ? 0 : history.epochs.back().epoch;
}

}  // namespace

IterativeResult iterative_train(const FloatNet& net, const PackingParams& params,
                                const TrainConfig& cfg, const Dataset& train,
                                const Dataset& eval, const Retrainer& retrainer) {
  params.validate();
  cfg.validate();
  IterativeResult result;
  result.net = net;
  for (FloatLayer& layer : result.net.layers) {
    layer.mask_zeros();
    layer.apply_mask();
  }
  TrainHistory& history = result.history;
  const EpochCallback on_epoch = recorder(history, eval);
  double beta = params.beta;

  while (result.net.nnz() > params.rho) {
    PruneEvent event;
    event.iteration = result.iterations;
    event.epoch = epochs_done(history);
    event.beta = beta;
    event.nnz_before = result.net.nnz();
    std::size_t after_magnitude = 0;
    for (FloatLayer& layer : result.net.layers) {
      layer.weights = magnitude_prune(layer.weights, beta);
      layer.mask_zeros();
      after_magnitude += layer.nnz();
      const auto groups = packing::group_columns(layer.weights, params.alpha, params.gamma);
      layer.weights = packing::group_prune(layer.weights, groups.grouping);
      layer.mask_zeros();
      layer.grouping = groups.grouping;
    }
    event.nnz_after_magnitude = after_magnitude;
    event.nnz_after = result.net.nnz();
    history.events.push_back(event);
    if (event.nnz_after == event.nnz_before) {
      std::ostringstream msg;
      msg << "iterative_train: stagnation at iteration " << result.iterations << " (beta "
          << beta << ", nnz " << event.nnz_after << " > rho " << params.rho << ")";
      throw InvariantError(msg.str());
    }
    ++result.iterations;
    const RetrainRequest request{cfg.epochs_per_iteration, cfg.eta, cfg.lr_floor_fraction * cfg.eta,
                                 cfg.seed * 1000003u + result.iterations};
    retrainer(result.net, train, request, on_epoch);
    for (FloatLayer& layer : result.net.layers) layer.apply_mask();
    beta *= cfg.beta_decay;
  }

  const RetrainRequest final_request{cfg.final_epochs, cfg.eta, 0.0, cfg.seed * 1000003u};
  retrainer(result.net, train, final_request, on_epoch);
  for (FloatLayer& layer : result.net.layers) {
    layer.apply_mask();
    if (!layer.grouping) layer.grouping = ColumnGrouping::identity(layer.weights.cols());
    result.groupings.push_back(*layer.grouping);
  }
  return result;
}

void train_dense(FloatNet& net, const Dataset& train, const TrainConfig& cfg, std::size_t epochs,
                 const Dataset* eval, TrainHistory* history) {
  EpochCallback cb;
  if (eval != nullptr && history != nullptr) cb = recorder(*history, *eval);
  sgd_retrain(net, train, RetrainRequest{epochs, cfg.eta, 0.0, cfg.seed * 7919u + 17u}, cfg, cb);
}

std::string history_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,nnz,accuracy\n";
  for (const HistoryEntry& e : history.epochs) {
    out << e.epoch << ',' << e.nnz << ',' << e.accuracy << '\n';
  }
  return out.str();
}

}  // namespace colpack::training
