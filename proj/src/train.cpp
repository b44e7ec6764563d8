#include "selbox/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <mutex>
#include <thread>

#include "selbox/normalize.hpp"
#include "selbox/rng.hpp"

namespace selbox {

LossConfig TrainConfig::loss_config(double temperature) const {
  LossConfig cfg;
  cfg.beta = beta;
  cfg.temperature = temperature;
  cfg.use_loc = use_loc;
  cfg.use_vol = use_vol;
  cfg.relation_mode = relation_mode;
  return cfg;
}

void TrainConfig::validate() const {
  if (dim < 1) throw UserError("dim must be >= 1");
  if (epochs < 1) throw UserError("epochs must be >= 1");
  if (batch_size < 1) throw UserError("batch size must be >= 1");
  if (!(lr > 0.0)) throw UserError("learning rate must be positive");
  if (!(beta > 0.0)) throw UserError("beta must be positive");
  if (!(t_end > 0.0) || !(t_start >= t_end))
    throw UserError("temperature schedule needs t_start >= t_end > 0");
}

BoxEmbedding init_embedding(const Signature& sig, const TrainConfig& cfg) {
  cfg.validate();
  BoxEmbedding e(cfg.dim, sig.concepts, sig.roles);
  Rng rng(mix_seed(cfg.seed, 0));
  const double lo_delta = std::log(0.1 * cfg.beta);
  const double hi_delta = std::log(0.5 * cfg.beta);
  for (std::size_t i = 0; i < e.num_concepts(); ++i) {
    auto delta = e.concept_delta(i);
    auto m = e.concept_lower(i);
    for (int k = 0; k < cfg.dim; ++k) delta[k] = rng.uniform(lo_delta, hi_delta);
    for (int k = 0; k < cfg.dim; ++k)
      m[k] = rng.uniform(0.0, cfg.beta - std::exp(delta[k]));
  }
  for (std::size_t j = 0; j < e.num_roles(); ++j) {
    auto g = e.role_log_diag(j);
    auto b = e.role_b(j);
    for (int k = 0; k < cfg.dim; ++k)
      g[k] = cfg.relation_mode == RelationMode::Affine ? rng.uniform(-0.1, 0.1) : 0.0;
    for (int k = 0; k < cfg.dim; ++k)
      b[k] = rng.uniform(-0.1 * cfg.beta, 0.1 * cfg.beta);
  }
  e.meta.seed = cfg.seed;
  e.meta.epochs = 0;
  e.meta.beta = cfg.beta;
  e.meta.relation_mode = cfg.relation_mode;
  return e;
}

namespace {

double temperature_at(const TrainConfig& cfg, int epoch) {
  if (cfg.epochs == 1) return cfg.t_start;
  double frac = static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
  return cfg.t_start * std::pow(cfg.t_end / cfg.t_start, frac);
}

} // namespace

std::pair<BoxEmbedding, TrainReport> train_from(BoxEmbedding start, const TBox& t,
                                                const TrainConfig& cfg) {
  cfg.validate();
  if (!is_normal_form(t))
    throw UserError("training requires a TBox in normal form; run normalize first");
  if (!is_safe(t))
    std::cerr << "warning: TBox is not safe (a probabilistic conditional is "
                 "deterministically equivalent to top)\n";

  BoxEmbedding e = std::move(start);
  std::vector<CompiledAxiom> axioms;
  axioms.reserve(t.size());
  for (const auto& c : t.conditionals) axioms.push_back(compile_axiom(c, e));

  const std::size_t num_axioms = axioms.size();
  const std::size_t num_params = e.num_params();
  std::vector<double> grad(num_params, 0.0);
  std::vector<double> adam_m(num_params, 0.0), adam_v(num_params, 0.0);
  std::vector<std::size_t> order(num_axioms);
  for (std::size_t i = 0; i < num_axioms; ++i) order[i] = i;

  Rng shuffle_rng(mix_seed(cfg.seed, 1));
  TrainReport report;
  report.seed = cfg.seed;
  long long steps = 0;

  auto t0 = std::chrono::steady_clock::now();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const LossConfig lc = cfg.loss_config(temperature_at(cfg, epoch));
    shuffle_rng.shuffle(order);
    const std::size_t num_batches =
        num_axioms == 0
            ? 1
            : (num_axioms + cfg.batch_size - 1) / static_cast<std::size_t>(cfg.batch_size);

    for (std::size_t b = 0; b < num_batches; ++b) {
      const std::size_t begin = b * static_cast<std::size_t>(cfg.batch_size);
      const std::size_t end = std::min(num_axioms, begin + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      if (end > begin) {
        const double scale = 1.0 / static_cast<double>(end - begin);
        for (std::size_t i = begin; i < end; ++i)
          axiom_loss_grad(axioms[order[i]], e, lc, scale, grad);
      }
      regularizer_loss_grad(e, lc, 1.0 / static_cast<double>(num_batches), grad);

      ++steps;
      const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(steps));
      const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(steps));
      auto& w = e.params();
      for (std::size_t p = 0; p < num_params; ++p) {
        const double g = grad[p];
        adam_m[p] = cfg.adam_beta1 * adam_m[p] + (1.0 - cfg.adam_beta1) * g;
        adam_v[p] = cfg.adam_beta2 * adam_v[p] + (1.0 - cfg.adam_beta2) * g * g;
        const double mhat = adam_m[p] / bc1;
        const double vhat = adam_v[p] / bc2;
        w[p] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
      }
    }

    // End-of-epoch loss on the summed scale, at this epoch's temperature.
    double epoch_loss = regularizer_loss(e, lc);
    for (const auto& a : axioms) epoch_loss += axiom_loss(a, e, lc);
    report.epoch_loss.push_back(epoch_loss);
  }
  auto t1 = std::chrono::steady_clock::now();
  report.seconds_per_epoch =
      std::chrono::duration<double>(t1 - t0).count() / cfg.epochs;

  const LossConfig lc_final = cfg.loss_config(cfg.t_end);
  report.final_axiom_loss_hard = 0.0;
  for (const auto& a : axioms)
    report.final_axiom_loss_hard += axiom_loss_hard(a, e, lc_final);

  e.meta.seed = cfg.seed;
  e.meta.epochs += cfg.epochs;
  e.meta.beta = cfg.beta;
  e.meta.relation_mode = cfg.relation_mode;
  return {std::move(e), std::move(report)};
}

std::pair<BoxEmbedding, TrainReport> train(const TBox& t, const TrainConfig& cfg) {
  return train_from(init_embedding(signature_of(t), cfg), t, cfg);
}

std::vector<std::pair<BoxEmbedding, TrainReport>> train_ensemble(
    const TBox& t, const TrainConfig& cfg, int count, int threads) {
  if (count < 1) throw UserError("ensemble size must be >= 1");
  std::vector<std::pair<BoxEmbedding, TrainReport>> results(count);
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      TrainConfig c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(i);
      results[i] = train(t, c);
    }
    return results;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          TrainConfig c = cfg;
          c.seed = cfg.seed + static_cast<std::uint64_t>(i);
          results[i] = train(t, c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

} // namespace selbox
