#include "selbox/evalrun.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <utility>

#include "selbox/infer.hpp"
#include "selbox/normalize.hpp"

namespace selbox {

namespace {

// Failures carry the pipeline stage they happened in.
template <typename F>
auto stage(const char* label, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InternalError& e) {
    throw InternalError(std::string(label) + ": " + e.what());
  } catch (const UserError& e) {
    throw UserError(std::string(label) + ": " + e.what());
  }
}

std::string fmt_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& text) {
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw UserError("cannot write file: " + p.string());
  out << text;
  if (!out) throw UserError("failed writing file: " + p.string());
}

// One report per embedding over the conditionals of t (plus the shared
// query observations), skipping items the embedding cannot evaluate.
std::vector<MetricReport> per_embedding_reports(
    const TBox& t, std::span<const BoxEmbedding> embeddings,
    const std::vector<QueryObs>& queries) {
  std::vector<MetricReport> reports;
  reports.reserve(embeddings.size());
  for (const BoxEmbedding& e : embeddings) {
    std::vector<CondObs> conds;
    conds.reserve(t.size());
    for (const Conditional& c : t.conditionals) {
      try {
        const double est = point_estimate(e, c.head, c.body);
        conds.push_back({(c.lower + c.upper) / 2.0, est, classify_pnf(c)});
      } catch (const DegenerateBodyError&) {
        // this embedding cannot realize the proportion; leave it out
      }
    }
    reports.push_back(build_report(conds, queries));
  }
  return reports;
}

// Counts summed, metric cells averaged over the repeats where defined.
MetricReport aggregate_over_repeats(const std::vector<MetricReport>& reports) {
  MetricReport out;
  auto sum_count = [&](auto pick) {
    std::size_t s = 0;
    for (const MetricReport& r : reports) s += pick(r);
    return s;
  };
  auto mean_value = [&](auto pick) {
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
  out.cond_count = sum_count([](const MetricReport& r) { return r.cond_count; });
  out.low_count = sum_count([](const MetricReport& r) { return r.low_count; });
  out.high_count = sum_count([](const MetricReport& r) { return r.high_count; });
  out.query_count = sum_count([](const MetricReport& r) { return r.query_count; });
  out.mae_total = mean_value([](const MetricReport& r) { return r.mae_total; });
  out.mre_total = mean_value([](const MetricReport& r) { return r.mre_total; });
  out.mae_low = mean_value([](const MetricReport& r) { return r.mae_low; });
  out.mre_low = mean_value([](const MetricReport& r) { return r.mre_low; });
  out.mae_high = mean_value([](const MetricReport& r) { return r.mae_high; });
  out.mre_high = mean_value([](const MetricReport& r) { return r.mre_high; });
  out.se_total = mean_value([](const MetricReport& r) { return r.se_total; });
  out.sa_total = mean_value([](const MetricReport& r) { return r.sa_total; });
  out.ag_total = mean_value([](const MetricReport& r) { return r.ag_total; });
  for (std::size_t b = 0; b < kNumPnfBuckets; ++b) {
    out.cond_count_pnf[b] =
        sum_count([b](const MetricReport& r) { return r.cond_count_pnf[b]; });
    out.query_count_pnf[b] =
        sum_count([b](const MetricReport& r) { return r.query_count_pnf[b]; });
    out.mae_pnf[b] = mean_value([b](const MetricReport& r) { return r.mae_pnf[b]; });
    out.mre_pnf[b] = mean_value([b](const MetricReport& r) { return r.mre_pnf[b]; });
    out.se_pnf[b] = mean_value([b](const MetricReport& r) { return r.se_pnf[b]; });
    out.sa_pnf[b] = mean_value([b](const MetricReport& r) { return r.sa_pnf[b]; });
    out.ag_pnf[b] = mean_value([b](const MetricReport& r) { return r.ag_pnf[b]; });
  }
  return out;
}

} // namespace

EvalResult run_eval(const EvalConfig& cfg) {
  if (cfg.ensemble < 1) throw UserError("ensemble size must be at least 1");
  if (cfg.repeats < 1) throw UserError("repeat count must be at least 1");
  if (!(cfg.fraction > 0.0 && cfg.fraction <= 1.0))
    throw UserError("query fraction must lie in (0, 1]");
  cfg.train.validate();

  EvalResult result;
  std::vector<std::vector<double>> ag_curves;
  double epoch_seconds = 0.0;
  std::size_t train_runs = 0;
  double query_ms = 0.0;
  std::size_t queries_timed = 0;

  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const QuerySet qs = stage("queryset", [&] {
      return generate_query_set(cfg.tbox, cfg.fraction,
                                cfg.query_seed + static_cast<std::uint64_t>(rep));
    });
    if (rep == 0) result.focus = qs.focus;
    const TBox normalized = stage("normalize", [&] { return normalize(qs.training); });

    TrainConfig tc = cfg.train;
    tc.seed = cfg.train.seed +
              static_cast<std::uint64_t>(rep) * static_cast<std::uint64_t>(cfg.ensemble);
    auto trained = stage("train", [&] {
      return train_ensemble(normalized, tc, cfg.ensemble, cfg.threads);
    });
    std::vector<BoxEmbedding> embeddings;
    embeddings.reserve(trained.size());
    for (auto& [e, report] : trained) {
      embeddings.push_back(std::move(e));
      epoch_seconds += report.seconds_per_epoch;
      ++train_runs;
    }

    std::vector<QueryObs> qobs;
    std::vector<ProbInterval> truths;
    qobs.reserve(qs.queries.size());
    const auto t0 = std::chrono::steady_clock::now();
    for (const PmpPremises& q : qs.queries) {
      const ProbInterval truth = pmp_bounds(q, cfg.slack);
      const ProbInterval est = ensemble_interval(embeddings, q.query.head, q.query.body);
      truths.push_back(truth);
      qobs.push_back({truth.lower, truth.upper, est.lower, est.upper,
                      classify_pnf(q.query)});
    }
    const auto t1 = std::chrono::steady_clock::now();
    query_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
    queries_timed += qs.queries.size();

    std::vector<double> ag(static_cast<std::size_t>(cfg.ensemble), 0.0);
    for (int n = 1; n <= cfg.ensemble; ++n) {
      std::vector<QueryObs> sub;
      sub.reserve(qs.queries.size());
      for (std::size_t qi = 0; qi < qs.queries.size(); ++qi) {
        const PmpPremises& q = qs.queries[qi];
        const ProbInterval est = ensemble_interval(
            std::span(embeddings.data(), static_cast<std::size_t>(n)),
            q.query.head, q.query.body);
        sub.push_back({truths[qi].lower, truths[qi].upper, est.lower, est.upper,
                       classify_pnf(q.query)});
      }
      ag[static_cast<std::size_t>(n) - 1] = approximation_gap(sub);
    }
    ag_curves.push_back(std::move(ag));

    const auto reports = stage("score", [&] {
      return per_embedding_reports(qs.training, embeddings, qobs);
    });
    result.per_repeat.push_back(average_reports(reports));
  }

  result.aggregate = aggregate_over_repeats(result.per_repeat);
  result.ag_curve.assign(static_cast<std::size_t>(cfg.ensemble), 0.0);
  for (std::size_t n = 0; n < result.ag_curve.size(); ++n) {
    double sum = 0.0;
    for (const auto& curve : ag_curves) sum += curve[n];
    result.ag_curve[n] = sum / static_cast<double>(ag_curves.size());
  }
  result.s_per_epoch = train_runs > 0 ? epoch_seconds / static_cast<double>(train_runs) : 0.0;
  result.ms_per_query =
      queries_timed > 0 ? query_ms / static_cast<double>(queries_timed) : 0.0;

  if (!cfg.out_dir.empty()) {
    stage("write", [&] {
      std::filesystem::create_directories(cfg.out_dir);
      write_file(cfg.out_dir, "metrics.csv", report_csv(result.aggregate));
      for (std::size_t rep = 0; rep < result.per_repeat.size(); ++rep)
        write_file(cfg.out_dir, "metrics_rep" + std::to_string(rep) + ".csv",
                   report_csv(result.per_repeat[rep]));
      std::string ag = "N,AG\n";
      for (std::size_t n = 0; n < result.ag_curve.size(); ++n)
        ag += std::to_string(n + 1) + "," + fmt_double(result.ag_curve[n]) + "\n";
      write_file(cfg.out_dir, "ag_curve.csv", ag);
      std::string rt = "metric,value\n";
      rt += "s_per_epoch," + fmt_double(result.s_per_epoch) + "\n";
      rt += "ms_per_query," + fmt_double(result.ms_per_query) + "\n";
      write_file(cfg.out_dir, "runtime.csv", rt);
      std::string summary;
      summary += "axioms: " + std::to_string(cfg.tbox.size()) + "\n";
      summary += "repeats: " + std::to_string(cfg.repeats) + "\n";
      summary += "ensemble: " + std::to_string(cfg.ensemble) + "\n";
      summary += "query fraction: " + fmt_double(cfg.fraction) + "\n";
      summary += "query body: " + result.focus + "\n";
      summary += "s/epoch: " + fmt_double(result.s_per_epoch) + "\n";
      summary += "ms/query: " + fmt_double(result.ms_per_query) + "\n\n";
      summary += report_table(result.aggregate);
      write_file(cfg.out_dir, "summary.txt", summary);
    });
  }
  return result;
}

MetricReport run_embedding_error(const TBox& t,
                                 const std::vector<BoxEmbedding>& embeddings) {
  if (embeddings.empty()) throw UserError("no embeddings given");
  return average_reports(per_embedding_reports(t, embeddings, {}));
}

} // namespace selbox
