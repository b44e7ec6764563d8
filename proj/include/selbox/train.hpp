#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "selbox/embedding.hpp"
#include "selbox/losses.hpp"

namespace selbox {

struct TrainConfig {
  int dim = 16;
  int epochs = 30;
  int batch_size = 256;
  double lr = 0.05;
  std::uint64_t seed = 0;
  double beta = 10.0;
  // Geometric cooling from t_start down to t_end across the epochs.
  double t_start = 1.0;
  double t_end = 1e-3;
  bool use_loc = true;
  bool use_vol = true;
  RelationMode relation_mode = RelationMode::Affine;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  LossConfig loss_config(double temperature) const;
  void validate() const;
};

struct TrainReport {
  std::uint64_t seed = 0;
  // Softplus total loss (sum over axioms plus regularizers) evaluated at
  // the end of each epoch, at that epoch's temperature.
  std::vector<double> epoch_loss;
  // Axioms-only hard-volume loss of the final embedding; 0 certifies that
  // the geometric interpretation satisfies the TBox.
  double final_axiom_loss_hard = 0.0;
  double seconds_per_epoch = 0.0;
};

// Deterministic for a given seed: lower corners land in [0, beta - side]
// with side = exp(delta), delta ~ U[log(0.1 beta), log(0.5 beta)], so every
// initial box sits inside [0, beta]^n.  Role maps start near the identity
// (exactly at it in translation mode).
BoxEmbedding init_embedding(const Signature& sig, const TrainConfig& cfg);

// Mini-batch Adam over the normalized TBox.  Batches are a fresh seeded
// shuffle each epoch; the batch objective is the mean axiom loss plus
// regularizers / number-of-batches, so reported epoch losses stay on the
// summed scale while step sizes are batch-size independent.
std::pair<BoxEmbedding, TrainReport> train(const TBox& t, const TrainConfig& cfg);

// Continues from an existing embedding instead of re-initializing.
std::pair<BoxEmbedding, TrainReport> train_from(BoxEmbedding start, const TBox& t,
                                                const TrainConfig& cfg);

// Independent runs with seeds cfg.seed .. cfg.seed + count - 1, optionally
// spread over worker threads; results do not depend on the thread count.
std::vector<std::pair<BoxEmbedding, TrainReport>> train_ensemble(
    const TBox& t, const TrainConfig& cfg, int count, int threads = 1);

} // namespace selbox
