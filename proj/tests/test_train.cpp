#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "selbox/boxes.hpp"
#include "selbox/generate.hpp"
#include "selbox/losses.hpp"
#include "selbox/normalize.hpp"
#include "selbox/parse.hpp"
#include "selbox/train.hpp"

using namespace selbox;

namespace {

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 5;
  cfg.batch_size = 16;
  return cfg;
}

// Hard axiom loss of an embedding, for before/after comparisons.
double hard_loss(const TBox& t, const BoxEmbedding& e) {
  return total_axiom_loss_hard(t, e, LossConfig{});
}

} // namespace

TEST_SUITE("train") {

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), UserError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), UserError);
  cfg = TrainConfig{};
  cfg.t_end = 2.0; // above t_start
  CHECK_THROWS_AS(cfg.validate(), UserError);
  cfg = TrainConfig{};
  cfg.t_end = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UserError);
  cfg = TrainConfig{};
  cfg.lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UserError);
  CHECK_NOTHROW(TrainConfig{}.validate());
}

TEST_CASE("initialization is deterministic and inside the beta cube") {
  TBox t = parse_tbox("gci A B\ngci B (some r C)\n");
  Signature sig = signature_of(t);
  TrainConfig cfg = quick_config();
  BoxEmbedding a = init_embedding(sig, cfg);
  BoxEmbedding b = init_embedding(sig, cfg);
  CHECK(a.params() == b.params());

  for (std::size_t i = 0; i < a.num_concepts(); ++i) {
    Box box = a.concept_box(i);
    CHECK(volume(box) > 0.0);
    for (int k = 0; k < a.dim(); ++k) {
      CHECK(box.lower[k] >= 0.0);
      CHECK(box.upper[k] <= cfg.beta + 1e-12);
    }
  }
  cfg.seed = 1;
  BoxEmbedding c = init_embedding(sig, cfg);
  CHECK(a.params() != c.params());
}

TEST_CASE("translation mode pins role diagonals at identity") {
  TBox t = parse_tbox("gci A (some r B)\n");
  TrainConfig cfg = quick_config();
  cfg.relation_mode = RelationMode::Translation;
  auto [e, report] = train(normalize(t), cfg);
  auto ld = e.role_log_diag(0);
  for (double v : ld) CHECK(v == 0.0);
}

TEST_CASE("training is deterministic per seed") {
  TBox t = normalize(parse_tbox("cond 0.4 0.4 B | A\ngci A C\n"));
  TrainConfig cfg = quick_config();
  auto [e1, r1] = train(t, cfg);
  auto [e2, r2] = train(t, cfg);
  CHECK(e1.params() == e2.params());
  CHECK(r1.epoch_loss == r2.epoch_loss);
  CHECK(r1.final_axiom_loss_hard == r2.final_axiom_loss_hard);

  cfg.seed = 7;
  auto [e3, r3] = train(t, cfg);
  CHECK(e1.params() != e3.params());
}

TEST_CASE("empty TBox trains with zero axiom loss") {
  TBox t;
  TrainConfig cfg = quick_config();
  SUBCASE("no regularizers, parameters stay put") {
    cfg.use_loc = false;
    cfg.use_vol = false;
    auto [e, report] = train(t, cfg);
    for (double l : report.epoch_loss) CHECK(l == 0.0);
    CHECK(report.final_axiom_loss_hard == 0.0);
  }
  SUBCASE("with regularizers the loss is regularization only") {
    auto [e, report] = train(t, cfg);
    CHECK(report.final_axiom_loss_hard == 0.0);
    for (double l : report.epoch_loss) CHECK(l >= 0.0);
  }
}

TEST_CASE("single point conditional reaches small hard loss in 200 epochs") {
  // Two-stage cooling: settle the topology, then polish with a small step
  // size at low temperature.  200 epochs in total.
  TBox t = normalize(parse_tbox("cond 0.5 0.5 B | A\n"));
  TrainConfig p1;
  p1.dim = 2;
  p1.beta = 2.0;
  p1.use_vol = false;
  p1.epochs = 140;
  p1.t_start = 1.0;
  p1.t_end = 0.01;
  TrainConfig p2 = p1;
  p2.epochs = 60;
  p2.lr = 0.005;
  p2.t_start = 0.01;
  p2.t_end = 1e-4;
  for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
    p1.seed = p2.seed = seed;
    auto [e1, r1] = train(t, p1);
    auto [e2, r2] = train_from(e1, t, p2);
    CHECK(r2.final_axiom_loss_hard < 1e-3);
  }
}

TEST_CASE("hard loss drops by an order of magnitude on generated TBoxes") {
  // Two-stage schedule: the volume regularizer arranges the topology at
  // moderate temperature, then a regularizer-free polish settles the boxes
  // into the stated interval slabs.
  GenConfig gc;
  gc.concepts = 6;
  gc.roles = 0;
  gc.domain = 40;
  gc.seed = 4;
  gc.widen = 0.1;
  TBox raw = role_free_projection(generate(gc).tbox);
  TBox t;
  for (const auto& c : raw.conditionals)
    if (classify_pnf(c) == Pnf::Pnf1) t.conditionals.push_back(c);
  REQUIRE(is_normal_form(t));

  std::vector<double> ratios;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TrainConfig arrange;
    arrange.dim = 8;
    arrange.beta = 2.0;
    arrange.epochs = 150;
    arrange.batch_size = 64;
    arrange.seed = seed;
    arrange.t_end = 0.05;
    BoxEmbedding init = init_embedding(signature_of(t), arrange);
    double before = hard_loss(t, init);
    auto [e1, r1] = train(t, arrange);
    TrainConfig settle = arrange;
    settle.use_vol = false;
    settle.epochs = 60;
    settle.lr = 0.02;
    settle.t_start = 0.05;
    settle.t_end = 0.01;
    auto [e2, r2] = train_from(e1, t, settle);
    TrainConfig polish = settle;
    polish.lr = 0.005;
    polish.t_start = 0.01;
    polish.t_end = 1e-3;
    auto [e3, r3] = train_from(e2, t, polish);
    REQUIRE(before > 0.0);
    ratios.push_back(r3.final_axiom_loss_hard / before);
  }
  std::sort(ratios.begin(), ratios.end());
  CHECK(ratios[ratios.size() / 2] <= 0.1);
}

TEST_CASE("report epoch count and timing fields") {
  TBox t = normalize(parse_tbox("gci A B\n"));
  TrainConfig cfg = quick_config();
  auto [e, report] = train(t, cfg);
  CHECK(report.epoch_loss.size() == std::size_t(cfg.epochs));
  CHECK(report.seconds_per_epoch >= 0.0);
  CHECK(report.seed == cfg.seed);
  for (double l : report.epoch_loss) CHECK(l >= 0.0);
}

TEST_CASE("ensemble seeds are consecutive and runs are independent") {
  TBox t = normalize(parse_tbox("cond 0.3 0.3 B | A\n"));
  TrainConfig cfg = quick_config();
  cfg.seed = 10;
  auto runs = train_ensemble(t, cfg, 3);
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].second.seed == 10);
  CHECK(runs[1].second.seed == 11);
  CHECK(runs[2].second.seed == 12);
  CHECK(runs[0].first.params() != runs[1].first.params());
  CHECK(runs[1].first.params() != runs[2].first.params());

  // The N = 1 ensemble is exactly train().
  auto single = train_ensemble(t, cfg, 1);
  auto [e, report] = train(t, cfg);
  CHECK(single[0].first.params() == e.params());

  // Each member matches a solo run with the shifted seed.
  TrainConfig shifted = cfg;
  shifted.seed = 11;
  auto [es, rs] = train(t, shifted);
  CHECK(runs[1].first.params() == es.params());
}

TEST_CASE("ensemble results do not depend on the thread count") {
  TBox t = normalize(parse_tbox("cond 0.6 0.8 B | A\ngci B C\n"));
  TrainConfig cfg = quick_config();
  auto serial = train_ensemble(t, cfg, 4, 1);
  auto parallel = train_ensemble(t, cfg, 4, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].first.params() == parallel[i].first.params());
    CHECK(serial[i].second.epoch_loss == parallel[i].second.epoch_loss);
  }
}

TEST_CASE("non-normalized input is rejected") {
  TBox t = parse_tbox("gci (and A (and B C)) D\n");
  CHECK_THROWS_AS((void)train(t, quick_config()), UserError);
}

} // TEST_SUITE
