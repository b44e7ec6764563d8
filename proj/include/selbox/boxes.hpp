#pragma once

#include <cstddef>
#include <vector>

namespace selbox {

// Axis-parallel box given by two corners.  upper >= lower is not required;
// a box with any inverted side simply has volume zero.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
};

// prod_i max(0, upper_i - lower_i)
double volume(const Box& b);

// Smooth upper bound on volume: prod_i softplus_t(upper_i - lower_i).
// Monotonically approaches volume() as t -> 0.
double softplus_volume(const Box& b, double t);

// Elementwise max of lowers, min of uppers.
Box intersect(const Box& a, const Box& b);

// 1 - vol(a ∩ b) / vol(a), in [0, 1]; the denominator is floored at kEps
// so degenerate boxes read as fully disjoint from everything.
double disjoint_measure(const Box& a, const Box& b);
// Same with softplus volumes at temperature t.
double disjoint_measure(const Box& a, const Box& b, double t);

// x -> diag * x + offset with diag = exp(log_diag), so the scaling is
// strictly positive by construction and corner order is preserved.
struct AffineMap {
  std::vector<double> log_diag;
  std::vector<double> offset;

  std::size_t dim() const { return log_diag.size(); }
};

Box apply(const AffineMap& t, const Box& b);
// x -> (x - offset) / diag, the exact inverse of apply.
Box apply_inverse(const AffineMap& t, const Box& b);

// t * log(1 + exp(x / t)), overflow-safe at both tails.
double softplus(double x, double t);
// d/dx softplus(x, t) = sigmoid(x / t)
double softplus_deriv(double x, double t);
// sigmoid(x / t) / softplus(x, t); finite for arbitrarily negative x
// (limit 1/t), used for logarithmic derivatives of softplus volumes.
double softplus_ratio(double x, double t);

} // namespace selbox
