#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selbox/evalrun.hpp"
#include "selbox/generate.hpp"
#include "selbox/infer.hpp"
#include "selbox/normalize.hpp"
#include "selbox/oracle.hpp"
#include "selbox/parse.hpp"
#include "selbox/pmp.hpp"
#include "selbox/train.hpp"

namespace {

using namespace selbox;

// The CLI reads every TBox leniently so files produced by `normalize`
// (which contain reserved "_N" names) feed back into later commands.
ParseOptions lenient() {
  ParseOptions opts;
  opts.allow_reserved_names = true;
  return opts;
}

std::string fmt(double x) { return format_probability(x); }

struct TrainFlags {
  TrainConfig cfg;
  std::string relation_mode = "affine";
  bool no_loc = false;
  bool no_vol = false;

  void add_to(CLI::App& app) {
    app.add_option("--dim", cfg.dim, "Embedding dimension")->capture_default_str();
    app.add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    app.add_option("--batch", cfg.batch_size, "Mini-batch size")->capture_default_str();
    app.add_option("--lr", cfg.lr, "Adam learning rate")->capture_default_str();
    app.add_option("--beta", cfg.beta, "Box side-length bound")->capture_default_str();
    app.add_option("--t-start", cfg.t_start, "Initial softplus temperature")
        ->capture_default_str();
    app.add_option("--t-end", cfg.t_end, "Final softplus temperature")
        ->capture_default_str();
    app.add_flag("--no-loc", no_loc, "Disable the location regularizer");
    app.add_flag("--no-vol", no_vol, "Disable the volume regularizer");
    app.add_option("--relation-mode", relation_mode,
                   "Role map family: affine or translation")
        ->check(CLI::IsMember({"affine", "translation"}))
        ->capture_default_str();
  }

  TrainConfig resolve(std::uint64_t seed) {
    cfg.seed = seed;
    cfg.use_loc = !no_loc;
    cfg.use_vol = !no_vol;
    cfg.relation_mode = relation_mode_from_name(relation_mode);
    return cfg;
  }
};

PmpSlack slack_from_name(const std::string& name) {
  return name == "premise2" ? PmpSlack::SecondPremise : PmpSlack::FirstPremise;
}

int run(int argc, char** argv) {
  CLI::App app{"Box embeddings and reasoning for statistical EL ontologies"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--seed", seed, "Base random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads for ensembles")
      ->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a ground truth and emit its TBox");
  GenConfig gen_cfg;
  std::string gen_out, gen_gt;
  gen->add_option("--concepts", gen_cfg.concepts, "Concept count")->capture_default_str();
  gen->add_option("--roles", gen_cfg.roles, "Role count")->capture_default_str();
  gen->add_option("--domain", gen_cfg.domain, "Domain size")->capture_default_str();
  gen->add_option("--widen", gen_cfg.widen, "Symmetric interval slack around each proportion")
      ->capture_default_str();
  gen->add_option("-o,--output", gen_out, "Output TBox file")->required();
  gen->add_option("--ground-truth", gen_gt, "Also write the sampled interpretation as JSON");
  gen->callback([&] {
    gen_cfg.seed = seed;
    GenResult res = generate(gen_cfg);
    save_tbox(res.tbox, gen_out);
    if (!gen_gt.empty()) save_ground_truth(res.truth, gen_gt);
    std::fprintf(stderr, "wrote %zu conditionals to %s\n", res.tbox.size(),
                 gen_out.c_str());
  });

  // normalize
  auto* norm = app.add_subcommand("normalize", "Rewrite a TBox into normal form");
  std::string norm_in, norm_out;
  norm->add_option("input", norm_in, "Input TBox file")->required();
  norm->add_option("-o,--output", norm_out, "Output file (default: stdout)");
  norm->callback([&] {
    const TBox t = load_tbox(norm_in, lenient());
    const TBox n = normalize(t);
    const SafetyReport safety = check_safety(n);
    if (!safety.safe)
      std::fprintf(stderr,
                   "warning: %zu probabilistic conditionals involve a concept "
                   "equivalent to top\n",
                   safety.offending.size());
    if (norm_out.empty()) {
      std::fputs(serialize(n).c_str(), stdout);
    } else {
      save_tbox(n, norm_out);
      std::fprintf(stderr, "wrote %zu conditionals to %s\n", n.size(), norm_out.c_str());
    }
  });

  // queryset
  auto* qsc = app.add_subcommand("queryset", "Sample held-out queries for modus ponens");
  std::string qs_in, qs_out, qs_train_out;
  double qs_fraction = 0.3;
  qsc->add_option("input", qs_in, "Input TBox file")->required();
  qsc->add_option("--fraction", qs_fraction, "Fraction of eligible conditionals to hold out")
      ->capture_default_str();
  qsc->add_option("-o,--output", qs_out, "Query file, one conditional per line")->required();
  qsc->add_option("--train-out", qs_train_out, "TBox file without the held-out queries");
  qsc->callback([&] {
    const TBox t = load_tbox(qs_in, lenient());
    const QuerySet qs = generate_query_set(t, qs_fraction, seed);
    TBox queries;
    for (const PmpPremises& q : qs.queries) queries.conditionals.push_back(q.query);
    save_tbox(queries, qs_out);
    if (!qs_train_out.empty()) save_tbox(qs.training, qs_train_out);
    std::fprintf(stderr, "body %s: %zu queries, %zu training conditionals\n",
                 qs.focus.c_str(), qs.queries.size(), qs.training.size());
  });

  // train
  auto* tr = app.add_subcommand("train", "Fit box embeddings to a normalized TBox");
  std::string tr_in, tr_out;
  int tr_count = 1;
  TrainFlags tr_flags;
  tr->add_option("input", tr_in, "Normalized TBox file")->required();
  tr->add_option("-o,--output", tr_out,
                 "Embedding JSON file; a directory with emb<i>.json when --ensemble > 1")
      ->required();
  tr->add_option("--ensemble", tr_count, "Number of independently seeded runs")
      ->capture_default_str();
  tr_flags.add_to(*tr);
  tr->callback([&] {
    const TBox t = load_tbox(tr_in, lenient());
    const TrainConfig cfg = tr_flags.resolve(seed);
    if (tr_count < 1) throw UserError("--ensemble must be at least 1");
    auto runs = train_ensemble(t, cfg, tr_count, threads);
    if (tr_count == 1) {
      save_embedding(runs[0].first, tr_out);
    } else {
      std::filesystem::create_directories(tr_out);
      for (std::size_t i = 0; i < runs.size(); ++i)
        save_embedding(runs[i].first,
                       std::filesystem::path(tr_out) / ("emb" + std::to_string(i) + ".json"));
    }
    for (const auto& run : runs) {
      const TrainReport& report = run.second;
      std::printf("seed %llu\tfinal_loss %s\thard_axiom_loss %s\ts_per_epoch %s\n",
                  static_cast<unsigned long long>(report.seed),
                  fmt(report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back()).c_str(),
                  fmt(report.final_axiom_loss_hard).c_str(),
                  fmt(report.seconds_per_epoch).c_str());
    }
  });

  // infer
  auto* inf = app.add_subcommand("infer", "Point estimates and ensemble interval for a query");
  std::vector<std::string> inf_paths;
  std::string inf_query;
  inf->add_option("embeddings", inf_paths, "Embedding JSON files")->required();
  inf->add_option("--query", inf_query, "Query \"<HEAD> | <BODY>\"")->required();
  inf->callback([&] {
    const auto [head, body] = parse_query(inf_query, lenient());
    std::vector<BoxEmbedding> ensemble;
    ensemble.reserve(inf_paths.size());
    for (const std::string& p : inf_paths) ensemble.push_back(load_embedding(p));
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
      try {
        std::printf("%s\t%s\n", inf_paths[i].c_str(),
                    fmt(point_estimate(ensemble[i], head, body)).c_str());
      } catch (const DegenerateBodyError&) {
        std::printf("%s\tdegenerate\n", inf_paths[i].c_str());
      }
    }
    int skipped = 0;
    const ProbInterval interval = ensemble_interval(ensemble, head, body, &skipped);
    if (skipped > 0)
      std::fprintf(stderr, "skipped %d member(s) with a degenerate body box\n", skipped);
    if (interval.vacuous)
      std::printf("interval\tvacuous\n");
    else
      std::printf("interval\t%s\t%s\n", fmt(interval.lower).c_str(),
                  fmt(interval.upper).c_str());
  });

  // pmp
  auto* pm = app.add_subcommand("pmp", "Probabilistic modus ponens bounds for a query");
  std::string pm_in, pm_query, pm_slack = "premise1";
  pm->add_option("input", pm_in, "TBox file with the premises")->required();
  pm->add_option("--query", pm_query, "Query \"<HEAD> | <BODY>\"")->required();
  pm->add_option("--slack-from", pm_slack,
                 "Premise whose lower bound feeds the upper-bound slack")
      ->check(CLI::IsMember({"premise1", "premise2"}))
      ->capture_default_str();
  pm->callback([&] {
    const TBox t = load_tbox(pm_in, lenient());
    const auto [head, body] = parse_query(pm_query, lenient());
    const auto premises = find_premises(t, head, body);
    if (!premises)
      throw UserError("query has no premises in the TBox: " + pm_query);
    const ProbInterval b = pmp_bounds(*premises, slack_from_name(pm_slack));
    std::fprintf(stderr, "mediator %s, premises [%s, %s] and [%s, %s]\n",
                 premises->mediator.c_str(), fmt(premises->l1).c_str(),
                 fmt(premises->u1).c_str(), fmt(premises->l2).c_str(),
                 fmt(premises->u2).c_str());
    std::printf("%s %s\n", fmt(b.lower).c_str(), fmt(b.upper).c_str());
  });

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exact role-free bounds via linear programming");
  std::string orc_in, orc_query;
  orc->add_option("input", orc_in, "Role-free TBox file")->required();
  orc->add_option("--query", orc_query,
                  "Query \"<HEAD> | <BODY>\"; omitted: check consistency only");
  orc->callback([&] {
    const TBox t = load_tbox(orc_in, lenient());
    if (orc_query.empty()) {
      std::printf("%s\n", check_consistency(t) ? "CONSISTENT" : "INCONSISTENT");
      return;
    }
    const auto [head, body] = parse_query(orc_query, lenient());
    try {
      const ProbInterval b = query_bounds(t, head, body);
      if (b.vacuous)
        std::printf("VACUOUS\n");
      else
        std::printf("%s %s\n", fmt(b.lower).c_str(), fmt(b.upper).c_str());
    } catch (const InconsistentError&) {
      std::printf("INCONSISTENT\n");
    }
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Full split/train/score experiment");
  std::string ev_in, ev_out, ev_slack = "premise1";
  EvalConfig ev_cfg;
  TrainFlags ev_flags;
  ev->add_option("input", ev_in, "TBox file")->required();
  ev->add_option("-o,--out-dir", ev_out, "Report directory")->required();
  ev->add_option("--ensemble", ev_cfg.ensemble, "Embeddings per repeat")->capture_default_str();
  ev->add_option("--fraction", ev_cfg.fraction, "Held-out query fraction")->capture_default_str();
  ev->add_option("--repeats", ev_cfg.repeats, "Independent repeats")->capture_default_str();
  ev->add_option("--slack-from", ev_slack,
                 "Premise whose lower bound feeds the upper-bound slack")
      ->check(CLI::IsMember({"premise1", "premise2"}))
      ->capture_default_str();
  ev_flags.add_to(*ev);
  ev->callback([&] {
    ev_cfg.tbox = load_tbox(ev_in, lenient());
    ev_cfg.out_dir = ev_out;
    ev_cfg.threads = threads;
    ev_cfg.train = ev_flags.resolve(seed);
    ev_cfg.query_seed = seed;
    ev_cfg.slack = slack_from_name(ev_slack);
    const EvalResult res = run_eval(ev_cfg);
    std::fputs(report_table(res.aggregate).c_str(), stdout);
    std::printf("s/epoch %s\tms/query %s\n", fmt(res.s_per_epoch).c_str(),
                fmt(res.ms_per_query).c_str());
  });

  // emb-error
  auto* ee = app.add_subcommand("emb-error", "Embedding error of stored embeddings");
  std::string ee_in, ee_csv;
  std::vector<std::string> ee_paths;
  ee->add_option("input", ee_in, "TBox file")->required();
  ee->add_option("embeddings", ee_paths, "Embedding JSON files")->required();
  ee->add_option("--csv", ee_csv, "Also write the report as CSV");
  ee->callback([&] {
    const TBox t = load_tbox(ee_in, lenient());
    std::vector<BoxEmbedding> ensemble;
    ensemble.reserve(ee_paths.size());
    for (const std::string& p : ee_paths) ensemble.push_back(load_embedding(p));
    const MetricReport report = run_embedding_error(t, ensemble);
    std::fputs(report_table(report).c_str(), stdout);
    if (!ee_csv.empty()) {
      std::ofstream out(ee_csv, std::ios::binary);
      if (!out) throw UserError("cannot write file: " + ee_csv);
      out << report_csv(report);
    }
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UserError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
}
