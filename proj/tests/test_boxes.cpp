#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "selbox/boxes.hpp"

using namespace selbox;

namespace {

Box make_box(std::vector<double> lo, std::vector<double> hi) {
  return Box{std::move(lo), std::move(hi)};
}

std::mt19937_64& rng() {
  static std::mt19937_64 r(99);
  return r;
}

Box random_box(int dim, double span = 2.0) {
  std::uniform_real_distribution<double> u(-span, span);
  Box b;
  for (int k = 0; k < dim; ++k) {
    double a = u(rng()), c = u(rng());
    b.lower.push_back(std::min(a, c));
    b.upper.push_back(std::max(a, c) + 0.05); // keep sides positive
  }
  return b;
}

} // namespace

TEST_SUITE("boxes") {

TEST_CASE("hard volume") {
  CHECK(volume(make_box({0, 0}, {2, 3})) == doctest::Approx(6.0));
  CHECK(volume(make_box({-1}, {1})) == doctest::Approx(2.0));
  // Any inverted side zeroes the whole product.
  CHECK(volume(make_box({0, 5}, {2, 3})) == 0.0);
  CHECK(volume(make_box({1, 1}, {1, 2})) == 0.0);
  CHECK(volume(Box{}) == doctest::Approx(1.0)); // empty product
}

TEST_CASE("intersection") {
  Box a = make_box({0, 0}, {2, 2});
  Box b = make_box({1, -1}, {3, 1});
  Box m = intersect(a, b);
  CHECK(m.lower == std::vector<double>{1, 0});
  CHECK(m.upper == std::vector<double>{2, 1});
  CHECK(volume(m) == doctest::Approx(1.0));

  Box far = make_box({5, 5}, {6, 6});
  CHECK(volume(intersect(a, far)) == 0.0);
}

TEST_CASE("softplus volume upper-bounds and converges to hard volume") {
  for (int i = 0; i < 50; ++i) {
    Box b = random_box(3);
    double hard = volume(b);
    double prev = softplus_volume(b, 1.0);
    CHECK(prev >= hard);
    for (double t : {0.3, 0.1, 0.03, 0.01}) {
      double cur = softplus_volume(b, t);
      CHECK(cur >= hard - 1e-12);
      CHECK(cur <= prev + 1e-12); // monotone in t
      prev = cur;
    }
    CHECK(softplus_volume(b, 1e-5) == doctest::Approx(hard).epsilon(1e-6));
  }
}

TEST_CASE("softplus volume of a degenerate box stays positive") {
  Box b = make_box({0, 0}, {-1, 2});
  CHECK(volume(b) == 0.0);
  CHECK(softplus_volume(b, 0.1) > 0.0);
}

TEST_CASE("disjoint measure") {
  Box a = make_box({0, 0}, {2, 2});
  CHECK(disjoint_measure(a, make_box({-1, -1}, {3, 3})) == doctest::Approx(0.0));
  CHECK(disjoint_measure(a, make_box({5, 5}, {6, 6})) == doctest::Approx(1.0));
  // Half of a hangs outside b.
  CHECK(disjoint_measure(a, make_box({1, 0}, {3, 2})) == doctest::Approx(0.5));
  // Degenerate first box reads as fully disjoint.
  CHECK(disjoint_measure(make_box({0, 0}, {-1, 2}), a) == doctest::Approx(1.0));
  // Softplus variant approaches the hard value.
  CHECK(disjoint_measure(a, make_box({1, 0}, {3, 2}), 1e-5) ==
        doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("affine apply and inverse are inverses") {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    AffineMap t;
    for (int k = 0; k < 3; ++k) {
      t.log_diag.push_back(u(rng()));
      t.offset.push_back(2.0 * u(rng()));
    }
    Box b = random_box(3);
    Box fwd = apply(t, b);
    Box back = apply_inverse(t, fwd);
    for (int k = 0; k < 3; ++k) {
      CHECK(back.lower[k] == doctest::Approx(b.lower[k]).epsilon(1e-12));
      CHECK(back.upper[k] == doctest::Approx(b.upper[k]).epsilon(1e-12));
    }
    // Positive diagonal scaling preserves corner order.
    for (int k = 0; k < 3; ++k) CHECK(fwd.lower[k] <= fwd.upper[k]);
  }
}

TEST_CASE("identity map") {
  AffineMap id;
  id.log_diag = {0, 0};
  id.offset = {0, 0};
  Box b = make_box({0, 1}, {2, 3});
  Box f = apply(id, b);
  CHECK(f.lower == b.lower);
  CHECK(f.upper == b.upper);
}

TEST_CASE("affine scales volume by the diagonal product") {
  AffineMap t;
  t.log_diag = {std::log(2.0), std::log(3.0)};
  t.offset = {5.0, -1.0};
  Box b = make_box({0, 0}, {1, 1});
  CHECK(volume(apply(t, b)) == doctest::Approx(6.0));
  CHECK(volume(apply_inverse(t, b)) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("softplus scalar functions") {
  // Large arguments: softplus(x) -> x, without overflow.
  CHECK(softplus(1e6, 1.0) == doctest::Approx(1e6));
  CHECK(softplus(50.0, 0.01) == doctest::Approx(50.0));
  // Large negative arguments underflow to zero, not NaN.
  CHECK(softplus(-1e6, 1.0) == 0.0);
  CHECK(std::isfinite(softplus(-1e6, 1.0)));
  // softplus(0, t) = t log 2.
  CHECK(softplus(0.0, 0.5) == doctest::Approx(0.5 * std::log(2.0)));
  // Scaling identity softplus(x, t) = t softplus(x/t, 1).
  CHECK(softplus(0.3, 0.2) == doctest::Approx(0.2 * softplus(0.3 / 0.2, 1.0)));
}

TEST_CASE("softplus_deriv matches finite differences") {
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  std::uniform_real_distribution<double> ut(0.05, 1.0);
  for (int i = 0; i < 200; ++i) {
    double x = ux(rng()), t = ut(rng());
    double h = 1e-6;
    double num = (softplus(x + h, t) - softplus(x - h, t)) / (2 * h);
    CHECK(softplus_deriv(x, t) == doctest::Approx(num).epsilon(1e-5));
    CHECK(softplus_deriv(x, t) > 0.0);
    CHECK(softplus_deriv(x, t) < 1.0);
  }
}

TEST_CASE("softplus_ratio stays finite for very negative arguments") {
  for (double t : {1.0, 0.1, 0.01}) {
    double r = softplus_ratio(-1000.0, t);
    CHECK(std::isfinite(r));
    CHECK(r == doctest::Approx(1.0 / t).epsilon(1e-6));
    // At moderate arguments it equals deriv / value.
    double x = 0.7;
    CHECK(softplus_ratio(x, t) ==
          doctest::Approx(softplus_deriv(x, t) / softplus(x, t)).epsilon(1e-10));
  }
}

} // TEST_SUITE
