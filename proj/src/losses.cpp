#include "selbox/losses.hpp"

#include <cmath>
#include <cstdint>

#include "selbox/boxes.hpp"
#include "selbox/parse.hpp"

namespace selbox {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

bool is_top(const Concept& c) { return c.kind() == ConceptKind::Top; }
bool is_bot(const Concept& c) { return c.kind() == ConceptKind::Bottom; }

std::size_t concept_id(const BoxEmbedding& e, const Concept& c) {
  auto idx = e.concept_index(c.name());
  if (!idx) throw UserError("concept '" + c.name() + "' is not in the embedding");
  return *idx;
}

std::size_t role_id(const BoxEmbedding& e, const std::string& r) {
  auto idx = e.role_index(r);
  if (!idx) throw UserError("role '" + r + "' is not in the embedding");
  return *idx;
}

[[noreturn]] void unsupported(const Conditional& axiom, const char* why) {
  throw UserError(std::string("axiom not in a supported normal-form shape (") + why +
                  "): " + serialize(axiom));
}

// ----- gradient scaffolding ----------------------------------------------

// A box in corner form with adjoint accumulators for both corners.
struct BoxVal {
  std::vector<double> lo, hi;
  std::vector<double> dlo, dhi;

  void init(std::size_t n) {
    lo.assign(n, 0.0);
    hi.assign(n, 0.0);
    dlo.assign(n, 0.0);
    dhi.assign(n, 0.0);
  }
};

void load_concept_box(const BoxEmbedding& e, std::size_t ci, BoxVal& out) {
  const std::size_t n = static_cast<std::size_t>(e.dim());
  out.init(n);
  auto m = e.concept_lower(ci);
  auto d = e.concept_delta(ci);
  for (std::size_t k = 0; k < n; ++k) {
    out.lo[k] = m[k];
    out.hi[k] = m[k] + std::exp(d[k]);
  }
}

// Corner adjoints -> (m, delta) gradient entries.
void store_concept_grad(const BoxEmbedding& e, std::size_t ci, const BoxVal& b,
                        double scale, std::span<double> grad) {
  const std::size_t n = static_cast<std::size_t>(e.dim());
  const std::size_t off = e.concept_offset(ci);
  auto d = e.concept_delta(ci);
  for (std::size_t k = 0; k < n; ++k) {
    grad[off + k] += scale * (b.dlo[k] + b.dhi[k]);
    grad[off + n + k] += scale * b.dhi[k] * std::exp(d[k]);
  }
}

void load_affine(const BoxEmbedding& e, std::size_t rj, const BoxVal& base,
                 bool inverse, BoxVal& out) {
  const std::size_t n = static_cast<std::size_t>(e.dim());
  out.init(n);
  auto g = e.role_log_diag(rj);
  auto b = e.role_b(rj);
  for (std::size_t k = 0; k < n; ++k) {
    double dk = std::exp(g[k]);
    if (inverse) {
      out.lo[k] = (base.lo[k] - b[k]) / dk;
      out.hi[k] = (base.hi[k] - b[k]) / dk;
    } else {
      out.lo[k] = dk * base.lo[k] + b[k];
      out.hi[k] = dk * base.hi[k] + b[k];
    }
  }
}

// Routes the adjoints of the transformed box back onto the base box and the
// role parameters.  Translation mode keeps log_diag frozen.
void store_affine_grad(const BoxEmbedding& e, std::size_t rj, const BoxVal& out,
                       bool inverse, const LossConfig& cfg, double scale,
                       std::span<double> grad, BoxVal& base) {
  const std::size_t n = static_cast<std::size_t>(e.dim());
  const std::size_t off = e.role_offset(rj);
  auto g = e.role_log_diag(rj);
  const bool train_diag = cfg.relation_mode == RelationMode::Affine;
  for (std::size_t k = 0; k < n; ++k) {
    double dk = std::exp(g[k]);
    if (inverse) {
      base.dlo[k] += out.dlo[k] / dk;
      base.dhi[k] += out.dhi[k] / dk;
      grad[off + n + k] += scale * -(out.dlo[k] + out.dhi[k]) / dk;
      if (train_diag)
        grad[off + k] += scale * -(out.dlo[k] * out.lo[k] + out.dhi[k] * out.hi[k]);
    } else {
      base.dlo[k] += out.dlo[k] * dk;
      base.dhi[k] += out.dhi[k] * dk;
      grad[off + n + k] += scale * (out.dlo[k] + out.dhi[k]);
      if (train_diag)
        grad[off + k] += scale * dk * (out.dlo[k] * base.lo[k] + out.dhi[k] * base.hi[k]);
    }
  }
}

// Intersection with winner masks; ties route to p, the subgradient choice.
struct Meet {
  BoxVal box;
  std::vector<std::uint8_t> lo_from_q, hi_from_q;
};

void meet(const BoxVal& p, const BoxVal& q, Meet& out) {
  const std::size_t n = p.lo.size();
  out.box.init(n);
  out.lo_from_q.assign(n, 0);
  out.hi_from_q.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (q.lo[k] > p.lo[k]) {
      out.box.lo[k] = q.lo[k];
      out.lo_from_q[k] = 1;
    } else {
      out.box.lo[k] = p.lo[k];
    }
    if (q.hi[k] < p.hi[k]) {
      out.box.hi[k] = q.hi[k];
      out.hi_from_q[k] = 1;
    } else {
      out.box.hi[k] = p.hi[k];
    }
  }
}

void route_meet(const Meet& m, BoxVal& p, BoxVal& q) {
  const std::size_t n = m.box.lo.size();
  for (std::size_t k = 0; k < n; ++k) {
    (m.lo_from_q[k] ? q : p).dlo[k] += m.box.dlo[k];
    (m.hi_from_q[k] ? q : p).dhi[k] += m.box.dhi[k];
  }
}

// Softplus volume with per-dimension partials w.r.t. the side lengths.
// Prefix/suffix products keep the partials exact even when single factors
// underflow to zero.
double soft_vol(const BoxVal& b, double t, std::vector<double>& dside) {
  const std::size_t n = b.lo.size();
  std::vector<double> sp(n), pre(n + 1), suf(n + 1);
  for (std::size_t k = 0; k < n; ++k) sp[k] = softplus(b.hi[k] - b.lo[k], t);
  pre[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) pre[k + 1] = pre[k] * sp[k];
  suf[n] = 1.0;
  for (std::size_t k = n; k > 0; --k) suf[k - 1] = suf[k] * sp[k - 1];
  dside.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    dside[k] = softplus_deriv(b.hi[k] - b.lo[k], t) * pre[k] * suf[k + 1];
  return pre[n];
}

void add_vol_adjoint(BoxVal& b, const std::vector<double>& dside, double w) {
  for (std::size_t k = 0; k < b.lo.size(); ++k) {
    b.dhi[k] += w * dside[k];
    b.dlo[k] -= w * dside[k];
  }
}

// ----- value-only evaluation ---------------------------------------------

Box to_box(const BoxEmbedding& e, std::size_t ci) { return e.concept_box(ci); }

// Shared by the soft and hard variants; vol is the volume functional.
template <typename VolFn>
double eval_axiom(const CompiledAxiom& a, const BoxEmbedding& e, const LossConfig& cfg,
                  VolFn vol) {
  switch (a.shape) {
    case CompiledAxiom::Shape::Zero:
      return 0.0;
    case CompiledAxiom::Shape::Nf1: {
      Box c = to_box(e, a.c), d = to_box(e, a.d);
      return 1.0 - vol(intersect(c, d)) / std::max(vol(c), cfg.eps);
    }
    case CompiledAxiom::Shape::Nf1Bot: {
      Box c = to_box(e, a.c);
      return pos(c.upper[0] - c.lower[0] + cfg.eps);
    }
    case CompiledAxiom::Shape::Nf2: {
      Box p = intersect(to_box(e, a.c), to_box(e, a.d));
      return 1.0 - vol(intersect(p, to_box(e, a.e))) / std::max(vol(p), cfg.eps);
    }
    case CompiledAxiom::Shape::Nf2Bot: {
      Box c = to_box(e, a.c), d = to_box(e, a.d);
      return vol(intersect(c, d)) / std::max(vol(c) + vol(d), cfg.eps);
    }
    case CompiledAxiom::Shape::Nf3:
    case CompiledAxiom::Shape::Nf4: {
      bool inverse = a.shape == CompiledAxiom::Shape::Nf4;
      AffineMap t = e.role_map(a.r);
      Box c = to_box(e, a.c);
      Box p = inverse ? apply_inverse(t, c) : apply(t, c);
      return 1.0 - vol(intersect(p, to_box(e, a.d))) / std::max(vol(p), cfg.eps);
    }
    case CompiledAxiom::Shape::Prob: {
      Box c = to_box(e, a.c), d = to_box(e, a.d);
      double va = vol(c);
      double vx = vol(intersect(c, d));
      return pos(a.lower * va - vx) + pos(vx - a.upper * va);
    }
  }
  throw InternalError("unreachable axiom shape");
}

} // namespace

CompiledAxiom compile_axiom(const Conditional& axiom, const BoxEmbedding& e) {
  CompiledAxiom out;
  const Concept& body = axiom.body;
  const Concept& head = axiom.head;

  if (!axiom.deterministic()) {
    if (body.kind() != ConceptKind::Atomic || head.kind() != ConceptKind::Atomic)
      unsupported(axiom, "probabilistic conditional with a non-name side");
    out.shape = CompiledAxiom::Shape::Prob;
    out.c = concept_id(e, body);
    out.d = concept_id(e, head);
    out.lower = axiom.lower;
    out.upper = axiom.upper;
    return out;
  }

  // Superclass top is satisfied by every interpretation, as is a subclass
  // that is bottom or mentions bottom anywhere.
  if (is_top(head)) return out;
  if (head.kind() == ConceptKind::Exists && is_top(head.left())) return out;
  if (is_bot(body)) return out;

  switch (body.kind()) {
    case ConceptKind::Top:
      unsupported(axiom, "top in subclass position has no finite box");
    case ConceptKind::Atomic: {
      out.c = concept_id(e, body);
      if (head.kind() == ConceptKind::Atomic) {
        out.shape = CompiledAxiom::Shape::Nf1;
        out.d = concept_id(e, head);
      } else if (is_bot(head)) {
        out.shape = CompiledAxiom::Shape::Nf1Bot;
      } else if (head.kind() == ConceptKind::Exists &&
                 head.left().kind() == ConceptKind::Atomic) {
        out.shape = CompiledAxiom::Shape::Nf3;
        out.r = role_id(e, head.role());
        out.d = concept_id(e, head.left());
      } else {
        unsupported(axiom, "superclass must be a name, bottom or (some r NAME)");
      }
      return out;
    }
    case ConceptKind::And: {
      Concept l = body.left(), r = body.right();
      if (is_bot(l) || is_bot(r)) return out; // empty subclass, trivially holds
      if (is_top(l) || is_top(r)) {
        // A top conjunct is the identity of conjunction: drop it.
        const Concept& keep = is_top(l) ? r : l;
        if (is_top(keep)) unsupported(axiom, "top in subclass position has no finite box");
        if (keep.kind() != ConceptKind::Atomic)
          unsupported(axiom, "conjunct must be a name or top");
        out.c = concept_id(e, keep);
        if (head.kind() == ConceptKind::Atomic) {
          out.shape = CompiledAxiom::Shape::Nf1;
          out.d = concept_id(e, head);
        } else if (is_bot(head)) {
          out.shape = CompiledAxiom::Shape::Nf1Bot;
        } else {
          unsupported(axiom, "superclass of a conjunction must be a name or bottom");
        }
        return out;
      }
      if (l.kind() != ConceptKind::Atomic || r.kind() != ConceptKind::Atomic)
        unsupported(axiom, "conjuncts must be names or top");
      out.c = concept_id(e, l);
      out.d = concept_id(e, r);
      if (head.kind() == ConceptKind::Atomic) {
        out.shape = CompiledAxiom::Shape::Nf2;
        out.e = concept_id(e, head);
      } else if (is_bot(head)) {
        out.shape = CompiledAxiom::Shape::Nf2Bot;
      } else {
        unsupported(axiom, "superclass of a conjunction must be a name or bottom");
      }
      return out;
    }
    case ConceptKind::Exists: {
      Concept filler = body.left();
      if (is_bot(filler)) return out; // empty subclass
      if (is_top(filler))
        unsupported(axiom, "top under a role restriction in subclass position");
      if (filler.kind() != ConceptKind::Atomic)
        unsupported(axiom, "role filler must be a name");
      if (head.kind() != ConceptKind::Atomic)
        unsupported(axiom, "superclass of an existential subclass must be a name");
      out.shape = CompiledAxiom::Shape::Nf4;
      out.r = role_id(e, body.role());
      out.c = concept_id(e, filler);
      out.d = concept_id(e, head);
      return out;
    }
    case ConceptKind::Bottom:
      return out; // handled above; keep the compiler satisfied
  }
  throw InternalError("unreachable concept kind");
}

double axiom_loss(const CompiledAxiom& a, const BoxEmbedding& e, const LossConfig& cfg) {
  return eval_axiom(a, e, cfg, [&](const Box& b) { return softplus_volume(b, cfg.temperature); });
}

double axiom_loss(const Conditional& axiom, const BoxEmbedding& e, const LossConfig& cfg) {
  return axiom_loss(compile_axiom(axiom, e), e, cfg);
}

double axiom_loss_hard(const CompiledAxiom& a, const BoxEmbedding& e, const LossConfig& cfg) {
  return eval_axiom(a, e, cfg, [](const Box& b) { return volume(b); });
}

double axiom_loss_hard(const Conditional& axiom, const BoxEmbedding& e, const LossConfig& cfg) {
  return axiom_loss_hard(compile_axiom(axiom, e), e, cfg);
}

double axiom_loss_grad(const CompiledAxiom& a, const BoxEmbedding& e,
                       const LossConfig& cfg, double scale, std::span<double> grad) {
  if (grad.size() != e.num_params())
    throw InternalError("gradient table size does not match the embedding");
  const double t = cfg.temperature;
  std::vector<double> dsX, dsP;

  switch (a.shape) {
    case CompiledAxiom::Shape::Zero:
      return 0.0;

    case CompiledAxiom::Shape::Nf1: {
      BoxVal c, d;
      load_concept_box(e, a.c, c);
      load_concept_box(e, a.d, d);
      Meet x;
      meet(c, d, x);
      double vX = soft_vol(x.box, t, dsX);
      double vC = soft_vol(c, t, dsP);
      double den = std::max(vC, cfg.eps);
      double loss = 1.0 - vX / den;
      add_vol_adjoint(x.box, dsX, -1.0 / den);
      if (vC > cfg.eps) add_vol_adjoint(c, dsP, vX / (den * den));
      route_meet(x, c, d);
      store_concept_grad(e, a.c, c, scale, grad);
      store_concept_grad(e, a.d, d, scale, grad);
      return loss;
    }

    case CompiledAxiom::Shape::Nf1Bot: {
      BoxVal c;
      load_concept_box(e, a.c, c);
      double arg = c.hi[0] - c.lo[0] + cfg.eps;
      if (arg <= 0.0) return 0.0;
      c.dhi[0] += 1.0;
      c.dlo[0] -= 1.0;
      store_concept_grad(e, a.c, c, scale, grad);
      return arg;
    }

    case CompiledAxiom::Shape::Nf2: {
      BoxVal c, d, h;
      load_concept_box(e, a.c, c);
      load_concept_box(e, a.d, d);
      load_concept_box(e, a.e, h);
      Meet p;
      meet(c, d, p);
      Meet x;
      meet(p.box, h, x);
      double vX = soft_vol(x.box, t, dsX);
      double vP = soft_vol(p.box, t, dsP);
      double den = std::max(vP, cfg.eps);
      double loss = 1.0 - vX / den;
      add_vol_adjoint(x.box, dsX, -1.0 / den);
      if (vP > cfg.eps) add_vol_adjoint(p.box, dsP, vX / (den * den));
      route_meet(x, p.box, h);
      route_meet(p, c, d);
      store_concept_grad(e, a.c, c, scale, grad);
      store_concept_grad(e, a.d, d, scale, grad);
      store_concept_grad(e, a.e, h, scale, grad);
      return loss;
    }

    case CompiledAxiom::Shape::Nf2Bot: {
      BoxVal c, d;
      load_concept_box(e, a.c, c);
      load_concept_box(e, a.d, d);
      Meet p;
      meet(c, d, p);
      std::vector<double> dsC, dsD;
      double vP = soft_vol(p.box, t, dsP);
      double vC = soft_vol(c, t, dsC);
      double vD = soft_vol(d, t, dsD);
      double den = std::max(vC + vD, cfg.eps);
      double loss = vP / den;
      add_vol_adjoint(p.box, dsP, 1.0 / den);
      if (vC + vD > cfg.eps) {
        add_vol_adjoint(c, dsC, -vP / (den * den));
        add_vol_adjoint(d, dsD, -vP / (den * den));
      }
      route_meet(p, c, d);
      store_concept_grad(e, a.c, c, scale, grad);
      store_concept_grad(e, a.d, d, scale, grad);
      return loss;
    }

    case CompiledAxiom::Shape::Nf3:
    case CompiledAxiom::Shape::Nf4: {
      const bool inverse = a.shape == CompiledAxiom::Shape::Nf4;
      BoxVal c, d, img;
      load_concept_box(e, a.c, c);
      load_concept_box(e, a.d, d);
      load_affine(e, a.r, c, inverse, img);
      Meet x;
      meet(img, d, x);
      double vX = soft_vol(x.box, t, dsX);
      double vP = soft_vol(img, t, dsP);
      double den = std::max(vP, cfg.eps);
      double loss = 1.0 - vX / den;
      add_vol_adjoint(x.box, dsX, -1.0 / den);
      if (vP > cfg.eps) add_vol_adjoint(img, dsP, vX / (den * den));
      route_meet(x, img, d);
      store_affine_grad(e, a.r, img, inverse, cfg, scale, grad, c);
      store_concept_grad(e, a.c, c, scale, grad);
      store_concept_grad(e, a.d, d, scale, grad);
      return loss;
    }

    case CompiledAxiom::Shape::Prob: {
      BoxVal c, d;
      load_concept_box(e, a.c, c);
      load_concept_box(e, a.d, d);
      Meet x;
      meet(c, d, x);
      double vX = soft_vol(x.box, t, dsX);
      double vA = soft_vol(c, t, dsP);
      double h1 = a.lower * vA - vX;
      double h2 = vX - a.upper * vA;
      double loss = pos(h1) + pos(h2);
      double wA = (h1 > 0.0 ? a.lower : 0.0) + (h2 > 0.0 ? -a.upper : 0.0);
      double wX = (h1 > 0.0 ? -1.0 : 0.0) + (h2 > 0.0 ? 1.0 : 0.0);
      if (wX != 0.0) add_vol_adjoint(x.box, dsX, wX);
      if (wA != 0.0) add_vol_adjoint(c, dsP, wA);
      route_meet(x, c, d);
      store_concept_grad(e, a.c, c, scale, grad);
      store_concept_grad(e, a.d, d, scale, grad);
      return loss;
    }
  }
  throw InternalError("unreachable axiom shape");
}

double regularizer_loss(const BoxEmbedding& e, const LossConfig& cfg) {
  double loss = 0.0;
  const std::size_t n = static_cast<std::size_t>(e.dim());
  const double cube = std::pow(cfg.beta, static_cast<double>(n));
  for (std::size_t i = 0; i < e.num_concepts(); ++i) {
    auto m = e.concept_lower(i);
    auto d = e.concept_delta(i);
    if (cfg.use_loc) {
      for (std::size_t k = 0; k < n; ++k) {
        double upper = m[k] + std::exp(d[k]);
        loss += pos(upper - cfg.beta + cfg.eps) + pos(-m[k] - cfg.eps);
      }
    }
    if (cfg.use_vol)
      loss += pos(cube - softplus_volume(e.concept_box(i), cfg.temperature) - cfg.eps);
  }
  return loss;
}

double regularizer_loss_grad(const BoxEmbedding& e, const LossConfig& cfg,
                             double scale, std::span<double> grad) {
  if (grad.size() != e.num_params())
    throw InternalError("gradient table size does not match the embedding");
  double loss = 0.0;
  const std::size_t n = static_cast<std::size_t>(e.dim());
  const double cube = std::pow(cfg.beta, static_cast<double>(n));
  std::vector<double> dside;
  for (std::size_t i = 0; i < e.num_concepts(); ++i) {
    auto m = e.concept_lower(i);
    auto d = e.concept_delta(i);
    const std::size_t off = e.concept_offset(i);
    if (cfg.use_loc) {
      for (std::size_t k = 0; k < n; ++k) {
        double side = std::exp(d[k]);
        double a1 = m[k] + side - cfg.beta + cfg.eps;
        if (a1 > 0.0) {
          loss += a1;
          grad[off + k] += scale;
          grad[off + n + k] += scale * side;
        }
        double a2 = -m[k] - cfg.eps;
        if (a2 > 0.0) {
          loss += a2;
          grad[off + k] -= scale;
        }
      }
    }
    if (cfg.use_vol) {
      // Concept box sides are exp(delta) directly, so only delta moves.
      BoxVal b;
      load_concept_box(e, i, b);
      double v = soft_vol(b, cfg.temperature, dside);
      double arg = cube - v - cfg.eps;
      if (arg > 0.0) {
        loss += arg;
        for (std::size_t k = 0; k < n; ++k)
          grad[off + n + k] -= scale * dside[k] * std::exp(d[k]);
      }
    }
  }
  return loss;
}

double total_loss(const TBox& t, const BoxEmbedding& e, const LossConfig& cfg) {
  double loss = regularizer_loss(e, cfg);
  for (const auto& c : t.conditionals) loss += axiom_loss(c, e, cfg);
  return loss;
}

double total_axiom_loss_hard(const TBox& t, const BoxEmbedding& e, const LossConfig& cfg) {
  double loss = 0.0;
  for (const auto& c : t.conditionals) loss += axiom_loss_hard(c, e, cfg);
  return loss;
}

std::vector<double> loss_gradient(const TBox& t, const BoxEmbedding& e, const LossConfig& cfg) {
  std::vector<double> grad(e.num_params(), 0.0);
  for (const auto& c : t.conditionals)
    axiom_loss_grad(compile_axiom(c, e), e, cfg, 1.0, grad);
  regularizer_loss_grad(e, cfg, 1.0, grad);
  return grad;
}

} // namespace selbox
