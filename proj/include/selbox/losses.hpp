#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selbox/common.hpp"
#include "selbox/concepts.hpp"
#include "selbox/embedding.hpp"

namespace selbox {

struct LossConfig {
  double beta = 10.0;          // intended side-length bound of the embedding cube
  double eps = kEps;           // hinge margin and denominator floor
  double temperature = 1.0;    // softplus temperature for training volumes
  bool use_loc = true;         // keep boxes inside [0, beta]^n
  bool use_vol = true;         // push volumes up toward beta^n
  RelationMode relation_mode = RelationMode::Affine;
};

// A normal-form conditional resolved against an embedding's name tables.
// Compiling once lets the trainer skip name lookups in the inner loop.
struct CompiledAxiom {
  enum class Shape : std::uint8_t {
    Zero,    // trivially satisfied (e.g. top as superclass): loss identically 0
    Nf1,     // c <= d
    Nf1Bot,  // c <= bottom
    Nf2,     // c and d <= e
    Nf2Bot,  // c and d <= bottom
    Nf3,     // c <= some r d
    Nf4,     // some r c <= d
    Prob,    // (d | c)[lower, upper]
  };

  Shape shape = Shape::Zero;
  std::size_t c = 0, d = 0, e = 0; // concept indices into the embedding
  std::size_t r = 0;               // role index (Nf3 / Nf4)
  double lower = 1.0, upper = 1.0; // Prob bounds
};

// Throws UserError for axioms outside the supported normal-form shapes
// (including top in a subclass position, which no finite box can model)
// and for names missing from the embedding.
CompiledAxiom compile_axiom(const Conditional& axiom, const BoxEmbedding& e);

// Softplus-volume loss of one axiom at cfg.temperature.
double axiom_loss(const CompiledAxiom& axiom, const BoxEmbedding& e, const LossConfig& cfg);
double axiom_loss(const Conditional& axiom, const BoxEmbedding& e, const LossConfig& cfg);

// Hard-volume variant used by satisfaction checks and reports.
double axiom_loss_hard(const CompiledAxiom& axiom, const BoxEmbedding& e, const LossConfig& cfg);
double axiom_loss_hard(const Conditional& axiom, const BoxEmbedding& e, const LossConfig& cfg);

// Adds scale * d(axiom loss)/d(params) into grad (laid out like e.params())
// and returns the loss.  Translation mode leaves role log_diag entries
// untouched.
double axiom_loss_grad(const CompiledAxiom& axiom, const BoxEmbedding& e,
                       const LossConfig& cfg, double scale, std::span<double> grad);

// Sum of the enabled regularizers (softplus volumes at cfg.temperature).
double regularizer_loss(const BoxEmbedding& e, const LossConfig& cfg);
double regularizer_loss_grad(const BoxEmbedding& e, const LossConfig& cfg,
                             double scale, std::span<double> grad);

// Sum of axiom losses plus regularizer_loss.
double total_loss(const TBox& t, const BoxEmbedding& e, const LossConfig& cfg);

// Axioms only, hard volumes: the quantity that certifies satisfaction when
// it reaches 0.
double total_axiom_loss_hard(const TBox& t, const BoxEmbedding& e, const LossConfig& cfg);

// Gradient of total_loss with respect to every free parameter.
std::vector<double> loss_gradient(const TBox& t, const BoxEmbedding& e, const LossConfig& cfg);

} // namespace selbox
