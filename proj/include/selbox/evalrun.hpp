#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selbox/concepts.hpp"
#include "selbox/embedding.hpp"
#include "selbox/metrics.hpp"
#include "selbox/pmp.hpp"
#include "selbox/train.hpp"

namespace selbox {

// One full experiment over a TBox.  Per repeat: sample a query set, drop
// the queries from the TBox, normalize and train an ensemble on the rest,
// then score embedding error (stated probabilities vs realized proportions
// of the training conditionals) and inference error (ensemble intervals vs
// the modus-ponens intervals of the held-out queries).
struct EvalConfig {
  TBox tbox;
  // Directory for metrics.csv, per-repeat metrics_rep<k>.csv, ag_curve.csv,
  // runtime.csv and summary.txt; empty means compute without writing.
  std::string out_dir;
  int ensemble = 10;
  double fraction = 0.3;
  int repeats = 1;
  int threads = 1;
  // Repeat k trains with seeds train.seed + k*ensemble .. + (k+1)*ensemble - 1.
  TrainConfig train;
  // Repeat k samples queries with query_seed + k.
  std::uint64_t query_seed = 0;
  PmpSlack slack = PmpSlack::FirstPremise;
};

struct EvalResult {
  // Metric rows are means over repeats, count rows are totals.
  MetricReport aggregate;
  std::vector<MetricReport> per_repeat;
  // Mean approximation gap using only the first N embeddings, at index N-1.
  std::vector<double> ag_curve;
  std::string focus;
  double s_per_epoch = 0.0;
  double ms_per_query = 0.0;
};

EvalResult run_eval(const EvalConfig& cfg);

// Embedding error alone: every conditional of t against each embedding's
// realized proportion, averaged over embeddings.  Interval conditionals
// are scored against their midpoint; embeddings skip items whose body box
// is degenerate.
MetricReport run_embedding_error(const TBox& t,
                                 const std::vector<BoxEmbedding>& embeddings);

} // namespace selbox
