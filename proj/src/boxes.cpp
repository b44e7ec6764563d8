#include "selbox/boxes.hpp"

#include <algorithm>
#include <cmath>

#include "selbox/common.hpp"

namespace selbox {

namespace {

void check_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) throw InternalError(std::string("dimension mismatch in ") + where);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

} // namespace

double volume(const Box& b) {
  check_same_dim(b.lower.size(), b.upper.size(), "volume");
  double v = 1.0;
  for (std::size_t i = 0; i < b.lower.size(); ++i)
    v *= std::max(0.0, b.upper[i] - b.lower[i]);
  return v;
}

double softplus(double x, double t) {
  double z = x / t;
  if (z > 0.0) return x + t * std::log1p(std::exp(-z));
  return t * std::log1p(std::exp(z));
}

double softplus_deriv(double x, double t) { return sigmoid(x / t); }

double softplus_ratio(double x, double t) {
  double z = x / t;
  // Both tails have clean limits; the direct quotient would overflow or
  // divide 0/0 there.
  if (z <= -30.0) return 1.0 / t;
  if (z >= 30.0) return 1.0 / x;
  return sigmoid(z) / (t * std::log1p(std::exp(z)));
}

double softplus_volume(const Box& b, double t) {
  check_same_dim(b.lower.size(), b.upper.size(), "softplus_volume");
  double v = 1.0;
  for (std::size_t i = 0; i < b.lower.size(); ++i)
    v *= softplus(b.upper[i] - b.lower[i], t);
  return v;
}

Box intersect(const Box& a, const Box& b) {
  check_same_dim(a.dim(), b.dim(), "intersect");
  Box out;
  out.lower.resize(a.dim());
  out.upper.resize(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.lower[i] = std::max(a.lower[i], b.lower[i]);
    out.upper[i] = std::min(a.upper[i], b.upper[i]);
  }
  return out;
}

double disjoint_measure(const Box& a, const Box& b) {
  double va = volume(a);
  double vab = volume(intersect(a, b));
  return 1.0 - vab / std::max(va, kEps);
}

double disjoint_measure(const Box& a, const Box& b, double t) {
  double va = softplus_volume(a, t);
  double vab = softplus_volume(intersect(a, b), t);
  return 1.0 - vab / std::max(va, kEps);
}

Box apply(const AffineMap& t, const Box& b) {
  check_same_dim(t.dim(), b.dim(), "apply");
  check_same_dim(t.log_diag.size(), t.offset.size(), "apply");
  Box out;
  out.lower.resize(b.dim());
  out.upper.resize(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    double d = std::exp(t.log_diag[i]);
    out.lower[i] = d * b.lower[i] + t.offset[i];
    out.upper[i] = d * b.upper[i] + t.offset[i];
  }
  return out;
}

Box apply_inverse(const AffineMap& t, const Box& b) {
  check_same_dim(t.dim(), b.dim(), "apply_inverse");
  check_same_dim(t.log_diag.size(), t.offset.size(), "apply_inverse");
  Box out;
  out.lower.resize(b.dim());
  out.upper.resize(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    double d = std::exp(t.log_diag[i]);
    out.lower[i] = (b.lower[i] - t.offset[i]) / d;
    out.upper[i] = (b.upper[i] - t.offset[i]) / d;
  }
  return out;
}

} // namespace selbox
