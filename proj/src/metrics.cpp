#include "selbox/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace selbox {

namespace {

void require_items(std::size_t n, const char* what) {
  if (n == 0) throw UserError(std::string(what) + " needs at least one item");
}

double pos(double x) { return x > 0.0 ? x : 0.0; }

double abs_err(const CondObs& o) { return std::fabs(o.p - o.estimate); }

double rel_err(const CondObs& o) {
  return abs_err(o) / (o.p == 0.0 ? kEps : o.p);
}

double se_term(const QueryObs& o) {
  return pos(o.true_lower - o.est_lower) + pos(o.est_upper - o.true_upper);
}

bool contained(const QueryObs& o) {
  return o.est_lower >= o.true_lower && o.est_upper <= o.true_upper;
}

double ag_term(const QueryObs& o) {
  return std::fabs(o.true_lower - o.est_lower) +
         std::fabs(o.true_upper - o.est_upper);
}

double mean_of(double sum, std::size_t n) {
  if (n == 0) return MetricReport::kEmptyCell;
  return sum / static_cast<double>(n);
}

std::string fmt(double x) {
  if (std::isnan(x)) return std::string();
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::size_t bucket(Pnf p) { return static_cast<std::size_t>(p); }

} // namespace

double mae(const std::vector<CondObs>& items) {
  require_items(items.size(), "mae");
  double sum = 0.0;
  for (const CondObs& o : items) sum += abs_err(o);
  return sum / static_cast<double>(items.size());
}

double mre(const std::vector<CondObs>& items) {
  require_items(items.size(), "mre");
  double sum = 0.0;
  for (const CondObs& o : items) sum += rel_err(o);
  return sum / static_cast<double>(items.size());
}

double soundness_error(const std::vector<QueryObs>& items) {
  require_items(items.size(), "soundness_error");
  double sum = 0.0;
  for (const QueryObs& o : items) sum += se_term(o);
  return sum / static_cast<double>(items.size());
}

double soundness_accuracy(const std::vector<QueryObs>& items) {
  require_items(items.size(), "soundness_accuracy");
  double sum = 0.0;
  for (const QueryObs& o : items) sum += contained(o) ? 1.0 : 0.0;
  return sum / static_cast<double>(items.size());
}

double approximation_gap(const std::vector<QueryObs>& items) {
  require_items(items.size(), "approximation_gap");
  double sum = 0.0;
  for (const QueryObs& o : items) sum += ag_term(o);
  return sum / static_cast<double>(items.size());
}

MetricReport build_report(const std::vector<CondObs>& conds,
                          const std::vector<QueryObs>& queries) {
  MetricReport r;

  std::array<double, kNumPnfBuckets> abs_sum{}, rel_sum{};
  double abs_total = 0.0, rel_total = 0.0;
  double abs_low = 0.0, rel_low = 0.0, abs_high = 0.0, rel_high = 0.0;
  for (const CondObs& o : conds) {
    const double a = abs_err(o);
    const double rel = rel_err(o);
    const std::size_t b = bucket(o.pnf);
    abs_total += a;
    rel_total += rel;
    abs_sum[b] += a;
    rel_sum[b] += rel;
    ++r.cond_count_pnf[b];
    if (o.p <= 0.1) {
      abs_low += a;
      rel_low += rel;
      ++r.low_count;
    } else {
      abs_high += a;
      rel_high += rel;
      ++r.high_count;
    }
  }
  r.cond_count = conds.size();
  r.mae_total = mean_of(abs_total, r.cond_count);
  r.mre_total = mean_of(rel_total, r.cond_count);
  for (std::size_t b = 0; b < kNumPnfBuckets; ++b) {
    r.mae_pnf[b] = mean_of(abs_sum[b], r.cond_count_pnf[b]);
    r.mre_pnf[b] = mean_of(rel_sum[b], r.cond_count_pnf[b]);
  }
  r.mae_low = mean_of(abs_low, r.low_count);
  r.mre_low = mean_of(rel_low, r.low_count);
  r.mae_high = mean_of(abs_high, r.high_count);
  r.mre_high = mean_of(rel_high, r.high_count);

  std::array<double, kNumPnfBuckets> se_sum{}, sa_sum{}, ag_sum{};
  double se_total = 0.0, sa_total = 0.0, ag_total = 0.0;
  for (const QueryObs& o : queries) {
    const double se = se_term(o);
    const double sa = contained(o) ? 1.0 : 0.0;
    const double ag = ag_term(o);
    const std::size_t b = bucket(o.pnf);
    se_total += se;
    sa_total += sa;
    ag_total += ag;
    se_sum[b] += se;
    sa_sum[b] += sa;
    ag_sum[b] += ag;
    ++r.query_count_pnf[b];
  }
  r.query_count = queries.size();
  r.se_total = mean_of(se_total, r.query_count);
  r.sa_total = mean_of(sa_total, r.query_count);
  r.ag_total = mean_of(ag_total, r.query_count);
  for (std::size_t b = 0; b < kNumPnfBuckets; ++b) {
    r.se_pnf[b] = mean_of(se_sum[b], r.query_count_pnf[b]);
    r.sa_pnf[b] = mean_of(sa_sum[b], r.query_count_pnf[b]);
    r.ag_pnf[b] = mean_of(ag_sum[b], r.query_count_pnf[b]);
  }
  return r;
}

MetricReport average_reports(const std::vector<MetricReport>& reports) {
  if (reports.empty()) throw UserError("average_reports needs at least one report");
  MetricReport out;
  auto avg_count = [&](auto pick) {
    double sum = 0.0;
    for (const MetricReport& r : reports) sum += static_cast<double>(pick(r));
    return static_cast<std::size_t>(
        std::llround(sum / static_cast<double>(reports.size())));
  };
  auto avg_value = [&](auto pick) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (const MetricReport& r : reports) {
      const double v = pick(r);
      if (std::isnan(v)) continue;
      sum += v;
      ++defined;
    }
    return defined == 0 ? MetricReport::kEmptyCell
                        : sum / static_cast<double>(defined);
  };

  out.cond_count = avg_count([](const MetricReport& r) { return r.cond_count; });
  out.low_count = avg_count([](const MetricReport& r) { return r.low_count; });
  out.high_count = avg_count([](const MetricReport& r) { return r.high_count; });
  out.query_count = avg_count([](const MetricReport& r) { return r.query_count; });
  out.mae_total = avg_value([](const MetricReport& r) { return r.mae_total; });
  out.mre_total = avg_value([](const MetricReport& r) { return r.mre_total; });
  out.mae_low = avg_value([](const MetricReport& r) { return r.mae_low; });
  out.mre_low = avg_value([](const MetricReport& r) { return r.mre_low; });
  out.mae_high = avg_value([](const MetricReport& r) { return r.mae_high; });
  out.mre_high = avg_value([](const MetricReport& r) { return r.mre_high; });
  out.se_total = avg_value([](const MetricReport& r) { return r.se_total; });
  out.sa_total = avg_value([](const MetricReport& r) { return r.sa_total; });
  out.ag_total = avg_value([](const MetricReport& r) { return r.ag_total; });
  for (std::size_t b = 0; b < kNumPnfBuckets; ++b) {
    out.cond_count_pnf[b] =
        avg_count([b](const MetricReport& r) { return r.cond_count_pnf[b]; });
    out.query_count_pnf[b] =
        avg_count([b](const MetricReport& r) { return r.query_count_pnf[b]; });
    out.mae_pnf[b] = avg_value([b](const MetricReport& r) { return r.mae_pnf[b]; });
    out.mre_pnf[b] = avg_value([b](const MetricReport& r) { return r.mre_pnf[b]; });
    out.se_pnf[b] = avg_value([b](const MetricReport& r) { return r.se_pnf[b]; });
    out.sa_pnf[b] = avg_value([b](const MetricReport& r) { return r.sa_pnf[b]; });
    out.ag_pnf[b] = avg_value([b](const MetricReport& r) { return r.ag_pnf[b]; });
  }
  return out;
}

namespace {

struct RowSink {
  std::string out;

  void csv_cells(const std::string& name, const std::vector<std::string>& cells) {
    out += name;
    for (const std::string& c : cells) {
      out += ',';
      out += c;
    }
    out += '\n';
  }

  void table_cells(const std::string& name, const std::vector<std::string>& cells) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-14s", name.c_str());
    out += buf;
    for (const std::string& c : cells) {
      std::snprintf(buf, sizeof(buf), " %12s", c.empty() ? "-" : c.c_str());
      out += buf;
    }
    out += '\n';
  }
};

std::vector<std::string> value_cells(double total,
                                     const std::array<double, kNumPnfBuckets>* per) {
  std::vector<std::string> cells{fmt(total)};
  for (std::size_t b = 0; b < kNumPnfBuckets; ++b)
    cells.push_back(per != nullptr ? fmt((*per)[b]) : std::string());
  return cells;
}

std::vector<std::string> count_cells(std::size_t total,
                                     const std::array<std::size_t, kNumPnfBuckets>* per) {
  std::vector<std::string> cells{std::to_string(total)};
  for (std::size_t b = 0; b < kNumPnfBuckets; ++b)
    cells.push_back(per != nullptr ? std::to_string((*per)[b]) : std::string());
  return cells;
}

template <typename Emit>
void emit_report(const MetricReport& r, Emit&& emit) {
  emit("axioms", count_cells(r.cond_count, &r.cond_count_pnf));
  emit("mae", value_cells(r.mae_total, &r.mae_pnf));
  emit("mre", value_cells(r.mre_total, &r.mre_pnf));
  emit("axioms_p_low", count_cells(r.low_count, nullptr));
  emit("mae_p_low", value_cells(r.mae_low, nullptr));
  emit("mre_p_low", value_cells(r.mre_low, nullptr));
  emit("axioms_p_high", count_cells(r.high_count, nullptr));
  emit("mae_p_high", value_cells(r.mae_high, nullptr));
  emit("mre_p_high", value_cells(r.mre_high, nullptr));
  emit("queries", count_cells(r.query_count, &r.query_count_pnf));
  emit("se", value_cells(r.se_total, &r.se_pnf));
  emit("sa", value_cells(r.sa_total, &r.sa_pnf));
  emit("ag", value_cells(r.ag_total, &r.ag_pnf));
}

} // namespace

std::string report_csv(const MetricReport& r) {
  RowSink sink;
  sink.out = "metric,total,pnf1,pnf2,pnf3,pnf4,other\n";
  emit_report(r, [&](const char* name, const std::vector<std::string>& cells) {
    sink.csv_cells(name, cells);
  });
  return sink.out;
}

std::string report_table(const MetricReport& r) {
  RowSink sink;
  sink.table_cells("metric", {"total", "pnf1", "pnf2", "pnf3", "pnf4", "other"});
  emit_report(r, [&](const char* name, const std::vector<std::string>& cells) {
    sink.table_cells(name, cells);
  });
  return sink.out;
}

} // namespace selbox
