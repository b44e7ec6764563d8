#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "selbox/common.hpp"
#include "selbox/concepts.hpp"

namespace selbox {

// One training conditional: stated probability p against the proportion
// realized by the embedding (mean over an ensemble, usually).
struct CondObs {
  double p = 0.0;
  double estimate = 0.0;
  Pnf pnf = Pnf::Other;
};

// One query: exact interval against the estimated interval.
struct QueryObs {
  double true_lower = 0.0;
  double true_upper = 1.0;
  double est_lower = 0.0;
  double est_upper = 1.0;
  Pnf pnf = Pnf::Other;
};

// Mean absolute / relative error.  The relative error divides by p, with
// denominator kEps when p = 0.  Both error on an empty list.
double mae(const std::vector<CondObs>& items);
double mre(const std::vector<CondObs>& items);

// (1/q) sum of [l - l_est]+ + [u_est - u]+ : how far estimates stick out of
// the true interval.  soundness_accuracy is the fraction of estimates fully
// contained (closed intervals, boundaries count as inside).
double soundness_error(const std::vector<QueryObs>& items);
double soundness_accuracy(const std::vector<QueryObs>& items);

// (1/q) sum of |l - l_est| + |u - u_est|.
double approximation_gap(const std::vector<QueryObs>& items);

// Everything in one struct: totals, a breakdown over the four supported
// conditional shapes, and low/high-probability strata (p <= 0.1 vs p > 0.1).
// Buckets without items hold NaN; the emitters leave those cells blank.
struct MetricReport {
  static constexpr double kEmptyCell = std::numeric_limits<double>::quiet_NaN();

  std::size_t cond_count = 0;
  std::array<std::size_t, kNumPnfBuckets> cond_count_pnf{};
  double mae_total = kEmptyCell;
  double mre_total = kEmptyCell;
  std::array<double, kNumPnfBuckets> mae_pnf{};
  std::array<double, kNumPnfBuckets> mre_pnf{};
  std::size_t low_count = 0;
  std::size_t high_count = 0;
  double mae_low = kEmptyCell, mre_low = kEmptyCell;
  double mae_high = kEmptyCell, mre_high = kEmptyCell;

  std::size_t query_count = 0;
  std::array<std::size_t, kNumPnfBuckets> query_count_pnf{};
  double se_total = kEmptyCell;
  double sa_total = kEmptyCell;
  double ag_total = kEmptyCell;
  std::array<double, kNumPnfBuckets> se_pnf{};
  std::array<double, kNumPnfBuckets> sa_pnf{};
  std::array<double, kNumPnfBuckets> ag_pnf{};
};

// Either list may be empty; the corresponding section then reports zero
// counts and blank cells.
MetricReport build_report(const std::vector<CondObs>& conds,
                          const std::vector<QueryObs>& queries);

// Field-wise mean over reports: metric cells average over the reports in
// which they are defined (all-NaN stays NaN), counts average and round.
// Counts only differ between inputs when some embeddings skipped items.
MetricReport average_reports(const std::vector<MetricReport>& reports);

// CSV with header "metric,total,pnf1,pnf2,pnf3,pnf4,other".  Doubles are
// rendered with the shortest round-trip form, so equal reports produce
// byte-identical text.
std::string report_csv(const MetricReport& r);

// Human-readable aligned table with the same cells.
std::string report_table(const MetricReport& r);

} // namespace selbox
